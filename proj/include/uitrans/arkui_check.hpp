#pragma once

// Well-formedness checking for the emitted ArkUI subset: balanced bracketing,
// decorator placement, one build() per struct, and builder-call shape with
// chained attribute calls (single- or multi-line). Not a full ArkTS parser;
// argument lists are treated as balanced token runs.

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "uitrans/common.hpp"

namespace uitrans {

struct WellformednessError {
    int line = 0;
    std::string message;

    std::string to_string() const { return "line " + std::to_string(line) + ": " + message; }
    bool operator==(const WellformednessError&) const = default;
};

namespace detail {

struct EtsToken {
    enum class Kind { ident, number, string, punct, decorator };
    Kind kind = Kind::punct;
    std::string text;
    int line = 1;
};

inline bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}
inline bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

inline std::vector<EtsToken> lex_ets(const std::string& src,
                                     std::vector<WellformednessError>& errs) {
    std::vector<EtsToken> toks;
    int line = 1;
    size_t i = 0;
    auto advance = [&](size_t n) {
        for (size_t k = 0; k < n; ++k) {
            if (src[i + k] == '\n') ++line;
        }
        i += n;
    };
    while (i < src.size()) {
        char c = src[i];
        if (c == '\n' || std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
            while (i < src.size() && src[i] != '\n') ++i;
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
            int open_line = line;
            advance(2);
            size_t end = src.find("*/", i);
            if (end == std::string::npos) {
                errs.push_back({open_line, "unterminated block comment"});
                break;
            }
            advance(end + 2 - i);
            continue;
        }
        if (c == '\'' || c == '"') {
            int open_line = line;
            size_t j = i + 1;
            while (j < src.size() && src[j] != c && src[j] != '\n') {
                if (src[j] == '\\') ++j;
                ++j;
            }
            if (j >= src.size() || src[j] == '\n') {
                errs.push_back({open_line, "unterminated string literal"});
                i = j;
                continue;
            }
            toks.push_back({EtsToken::Kind::string, src.substr(i, j + 1 - i), open_line});
            advance(j + 1 - i);
            continue;
        }
        if (c == '`') {
            int open_line = line;
            size_t j = i + 1;
            while (j < src.size() && src[j] != '`') {
                if (src[j] == '\\') ++j;
                ++j;
            }
            if (j >= src.size()) {
                errs.push_back({open_line, "unterminated template literal"});
                break;
            }
            toks.push_back({EtsToken::Kind::string, src.substr(i, j + 1 - i), open_line});
            advance(j + 1 - i);
            continue;
        }
        if (c == '@' && i + 1 < src.size() && ident_start(src[i + 1])) {
            size_t j = i + 1;
            while (j < src.size() && ident_char(src[j])) ++j;
            toks.push_back({EtsToken::Kind::decorator, src.substr(i, j - i), line});
            advance(j - i);
            continue;
        }
        if (ident_start(c)) {
            size_t j = i;
            while (j < src.size() && ident_char(src[j])) ++j;
            toks.push_back({EtsToken::Kind::ident, src.substr(i, j - i), line});
            advance(j - i);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t j = i;
            while (j < src.size() && (ident_char(src[j]) || src[j] == '.')) ++j;
            toks.push_back({EtsToken::Kind::number, src.substr(i, j - i), line});
            advance(j - i);
            continue;
        }
        toks.push_back({EtsToken::Kind::punct, std::string(1, c), line});
        advance(1);
    }
    return toks;
}

inline void check_balance(const std::vector<EtsToken>& toks,
                          std::vector<WellformednessError>& errs) {
    struct Open {
        char c;
        int line;
    };
    std::vector<Open> stack;
    auto closer = [](char c) { return c == ')' ? '(' : c == ']' ? '[' : '{'; };
    for (const auto& t : toks) {
        if (t.kind != EtsToken::Kind::punct || t.text.size() != 1) continue;
        char c = t.text[0];
        if (c == '(' || c == '[' || c == '{') {
            stack.push_back({c, t.line});
        } else if (c == ')' || c == ']' || c == '}') {
            if (stack.empty() || stack.back().c != closer(c)) {
                errs.push_back({t.line, std::string("unmatched '") + c + "'"});
            } else {
                stack.pop_back();
            }
        }
    }
    for (const auto& open : stack) {
        errs.push_back({open.line, std::string("unclosed '") + open.c + "'"});
    }
}

// Recursive-descent walk of the subset grammar. Recovery is one token at a
// time so every violation surfaces with its own line.
class SubsetChecker {
public:
    SubsetChecker(const std::vector<EtsToken>& toks, std::vector<WellformednessError>& errs)
        : toks_(toks), errs_(errs) {}

    void run() {
        while (!eof()) {
            if (at_ident("import")) {
                parse_import();
            } else if (at(EtsToken::Kind::decorator) || at_ident("export") ||
                       at_ident("struct")) {
                parse_struct();
            } else {
                parse_one_statement();  // free-standing component code
            }
        }
    }

private:
    const std::vector<EtsToken>& toks_;
    std::vector<WellformednessError>& errs_;
    size_t i_ = 0;
    bool have_builder_ = false;  // at the current statement nesting

    bool eof() const { return i_ >= toks_.size(); }
    const EtsToken& cur() const { return toks_[i_]; }
    int line() const { return eof() ? (toks_.empty() ? 1 : toks_.back().line) : cur().line; }
    bool at(EtsToken::Kind k) const { return !eof() && cur().kind == k; }
    bool at_ident(std::string_view s) const {
        return at(EtsToken::Kind::ident) && cur().text == s;
    }
    bool at_punct(char c) const {
        return at(EtsToken::Kind::punct) && cur().text.size() == 1 && cur().text[0] == c;
    }
    void fail(const std::string& message) { errs_.push_back({line(), message}); }
    void skip() {
        if (!eof()) ++i_;
    }
    bool expect_punct(char c, const std::string& what) {
        if (at_punct(c)) {
            ++i_;
            return true;
        }
        fail(std::string("expected '") + c + "' " + what);
        return false;
    }

    // consumes the '(' ... ')' run without inspecting the contents
    void consume_balanced_parens() {
        if (!expect_punct('(', "to open arguments")) return;
        std::vector<char> stack{'('};
        while (!eof() && !stack.empty()) {
            if (at(EtsToken::Kind::punct) && cur().text.size() == 1) {
                char c = cur().text[0];
                if (c == '(' || c == '[' || c == '{') stack.push_back(c);
                if (c == ')' || c == ']' || c == '}') {
                    if (!stack.empty()) stack.pop_back();
                }
            }
            ++i_;
        }
    }

    // single-line form: the module path string must sit on the import's line
    void parse_import() {
        int at_line = line();
        ++i_;  // import
        bool path_seen = false;
        while (!eof() && cur().line == at_line) {
            if (at(EtsToken::Kind::string)) {
                ++i_;
                path_seen = true;
                break;
            }
            ++i_;
        }
        if (!path_seen) errs_.push_back({at_line, "import without a module path"});
    }

    void parse_struct() {
        std::vector<EtsToken> decorators;
        while (at(EtsToken::Kind::decorator)) {
            decorators.push_back(cur());
            ++i_;
        }
        if (at_ident("export")) ++i_;
        if (!at_ident("struct")) {
            for (const auto& d : decorators) {
                errs_.push_back({d.line, d.text + " must precede a struct declaration"});
            }
            // consuming the decorators was already progress; what follows may
            // be valid free-standing code, so leave it for the caller
            if (decorators.empty()) {
                fail("expected 'struct'");
                skip();
            }
            return;
        }
        ++i_;  // struct
        std::string name = "<anonymous>";
        int struct_line = line();
        if (at(EtsToken::Kind::ident)) {
            name = cur().text;
            ++i_;
        } else {
            fail("struct without a name");
        }
        if (!expect_punct('{', "to open the struct body")) return;
        int builds = 0;
        while (!eof() && !at_punct('}')) {
            if (at(EtsToken::Kind::ident)) {
                std::string member = cur().text;
                ++i_;
                consume_balanced_parens();
                if (at_punct('{')) {
                    ++i_;
                    parse_statements();
                    expect_punct('}', "to close the method body");
                } else {
                    fail("method '" + member + "' without a body");
                }
                if (member == "build") ++builds;
            } else {
                fail("unexpected token '" + cur().text + "' in struct body");
                skip();
            }
        }
        expect_punct('}', "to close struct " + name);
        if (builds != 1) {
            errs_.push_back({struct_line, "struct " + name + " has " + std::to_string(builds) +
                                              " build() methods, expected exactly 1"});
        }
    }

    void parse_statements() {
        bool saved = have_builder_;
        have_builder_ = false;
        while (!eof() && !at_punct('}')) parse_one_statement();
        have_builder_ = saved;
    }

    void parse_one_statement() {
        if (at_punct(';')) {
            ++i_;
            return;
        }
        if (at_punct('.')) {
            if (!have_builder_) fail("attribute chain without a preceding builder call");
            ++i_;
            if (at(EtsToken::Kind::ident)) {
                ++i_;
            } else {
                fail("expected an attribute name after '.'");
                return;
            }
            consume_balanced_parens();
            return;
        }
        if (at(EtsToken::Kind::ident)) {
            ++i_;
            while (at_punct('.')) {  // dotted callee such as router.pushUrl
                ++i_;
                if (at(EtsToken::Kind::ident)) {
                    ++i_;
                } else {
                    fail("expected an identifier after '.'");
                    return;
                }
            }
            consume_balanced_parens();
            if (at_punct('{')) {
                ++i_;
                parse_statements();
                expect_punct('}', "to close the component body");
            }
            have_builder_ = true;
            return;
        }
        fail("unexpected token '" + (eof() ? std::string("<eof>") : cur().text) +
             "' in component code");
        skip();
    }
};

}  // namespace detail

inline std::vector<WellformednessError> check_wellformed(const std::string& ets_source) {
    std::vector<WellformednessError> errs;
    std::vector<detail::EtsToken> toks = detail::lex_ets(ets_source, errs);
    detail::check_balance(toks, errs);
    // the structural walk assumes lexically clean, balanced tokens; running it
    // anyway would only restate the same defect as cascade noise
    if (errs.empty()) detail::SubsetChecker(toks, errs).run();
    return errs;
}

}  // namespace uitrans
