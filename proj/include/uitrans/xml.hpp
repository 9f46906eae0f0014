#pragma once

// Minimal XML reader for Android project files. Covers the subset Android
// manifests, layouts and value resources actually use: elements, ordered
// attributes, character data, comments, CDATA, the xml declaration and the
// five named entities plus numeric character references. Tracks 1-based
// line/column positions for every element so downstream spans and error
// messages point at real source.

#include <string>
#include <string_view>
#include <vector>

#include "uitrans/common.hpp"

namespace uitrans {

struct XmlAttr {
    std::string name;
    std::string value;  // entity-decoded

    bool operator==(const XmlAttr&) const = default;
};

struct XmlElement {
    std::string tag;
    std::vector<XmlAttr> attrs;   // in document order
    std::vector<XmlElement> children;
    std::string text;             // concatenated direct character data, trimmed
    int line_begin = 1;           // line of '<'
    int line_end = 1;             // line of the closing '>'

    const std::string* attr(std::string_view name) const {
        for (const auto& a : attrs) {
            if (a.name == name) return &a.value;
        }
        return nullptr;
    }
    std::string attr_or(std::string_view name, std::string_view fallback) const {
        const std::string* v = attr(name);
        return v ? *v : std::string(fallback);
    }
};

namespace detail {

class XmlReader {
public:
    explicit XmlReader(std::string_view text) : text_(text) {}

    // Returns the document's single root element; throws MalformedXml or
    // EmptyLayout (no root element at all).
    XmlElement parse_document() {
        XmlElement root;
        bool have_root = false;
        skip_misc();
        while (pos_ < text_.size()) {
            if (peek() != '<') fail("text outside of root element");
            if (have_root) fail("junk after document element");
            root = parse_element();
            have_root = true;
            skip_misc();
        }
        if (!have_root) throw EmptyLayout();
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw MalformedXml(msg, line_, col());
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    bool starts(std::string_view s) const {
        return text_.substr(pos_, s.size()) == s;
    }

    void advance(size_t n = 1) {
        for (size_t i = 0; i < n && pos_ < text_.size(); ++i) {
            if (text_[pos_] == '\n') {
                ++line_;
                line_start_ = pos_ + 1;
            }
            ++pos_;
        }
    }

    int col() const { return static_cast<int>(pos_ - line_start_) + 1; }

    void skip_ws() {
        while (pos_ < text_.size() &&
               std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            advance();
        }
    }

    void expect(char c, const char* what) {
        if (peek() != c) fail(std::string("expected ") + what);
        advance();
    }

    void skip_until(std::string_view terminator, const char* what) {
        size_t found = text_.find(terminator, pos_);
        if (found == std::string_view::npos) fail(std::string("unterminated ") + what);
        advance(found + terminator.size() - pos_);
    }

    // Prolog, comments, PIs, DOCTYPE, whitespace between markup.
    void skip_misc() {
        for (;;) {
            skip_ws();
            if (starts("<!--")) {
                skip_until("-->", "comment");
            } else if (starts("<?")) {
                skip_until("?>", "processing instruction");
            } else if (starts("<!")) {
                skip_until(">", "declaration");
            } else {
                return;
            }
        }
    }

    static bool name_start(char c) {
        return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == ':';
    }
    static bool name_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == ':' ||
               c == '-' || c == '.';
    }

    std::string parse_name() {
        if (!name_start(peek())) fail("expected a name");
        size_t begin = pos_;
        while (pos_ < text_.size() && name_char(text_[pos_])) advance();
        return std::string(text_.substr(begin, pos_ - begin));
    }

    std::string decode_entities(std::string_view raw) {
        std::string out;
        out.reserve(raw.size());
        for (size_t i = 0; i < raw.size(); ++i) {
            if (raw[i] != '&') {
                out += raw[i];
                continue;
            }
            size_t semi = raw.find(';', i);
            if (semi == std::string_view::npos || semi - i > 32) {
                fail("unterminated entity reference");
            }
            std::string_view name = raw.substr(i + 1, semi - i - 1);
            if (name == "amp") out += '&';
            else if (name == "lt") out += '<';
            else if (name == "gt") out += '>';
            else if (name == "quot") out += '"';
            else if (name == "apos") out += '\'';
            else if (!name.empty() && name[0] == '#') {
                int base = 10;
                std::string_view digits = name.substr(1);
                if (!digits.empty() && (digits[0] == 'x' || digits[0] == 'X')) {
                    base = 16;
                    digits = digits.substr(1);
                }
                if (digits.empty()) fail("empty character reference");
                unsigned long code = 0;
                for (char d : digits) {
                    int v;
                    if (d >= '0' && d <= '9') v = d - '0';
                    else if (base == 16 && d >= 'a' && d <= 'f') v = d - 'a' + 10;
                    else if (base == 16 && d >= 'A' && d <= 'F') v = d - 'A' + 10;
                    else { fail("bad character reference"); }
                    code = code * static_cast<unsigned long>(base) + static_cast<unsigned long>(v);
                    if (code > 0x10FFFF) fail("character reference out of range");
                }
                append_utf8(out, static_cast<unsigned>(code));
            } else {
                fail("unknown entity &" + std::string(name) + ";");
            }
            i = semi;
        }
        return out;
    }

    static void append_utf8(std::string& out, unsigned code) {
        if (code < 0x80) {
            out += static_cast<char>(code);
        } else if (code < 0x800) {
            out += static_cast<char>(0xC0 | (code >> 6));
            out += static_cast<char>(0x80 | (code & 0x3F));
        } else if (code < 0x10000) {
            out += static_cast<char>(0xE0 | (code >> 12));
            out += static_cast<char>(0x80 | ((code >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (code & 0x3F));
        } else {
            out += static_cast<char>(0xF0 | (code >> 18));
            out += static_cast<char>(0x80 | ((code >> 12) & 0x3F));
            out += static_cast<char>(0x80 | ((code >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (code & 0x3F));
        }
    }

    XmlAttr parse_attr() {
        XmlAttr attr;
        attr.name = parse_name();
        skip_ws();
        expect('=', "'=' after attribute name");
        skip_ws();
        char quote = peek();
        if (quote != '"' && quote != '\'') fail("expected quoted attribute value");
        advance();
        size_t begin = pos_;
        while (pos_ < text_.size() && text_[pos_] != quote) {
            if (text_[pos_] == '<') fail("'<' in attribute value");
            advance();
        }
        if (pos_ >= text_.size()) fail("unterminated attribute value");
        attr.value = decode_entities(text_.substr(begin, pos_ - begin));
        advance();  // closing quote
        return attr;
    }

    XmlElement parse_element() {
        XmlElement el;
        el.line_begin = line_;
        expect('<', "'<'");
        el.tag = parse_name();
        for (;;) {
            skip_ws();
            char c = peek();
            if (c == '\0') fail("unterminated element " + el.tag);
            if (c == '/') {
                advance();
                expect('>', "'>' after '/'");
                el.line_end = line_;
                return el;
            }
            if (c == '>') {
                advance();
                break;
            }
            XmlAttr attr = parse_attr();
            for (const auto& existing : el.attrs) {
                if (existing.name == attr.name) {
                    fail("duplicate attribute " + attr.name + " on <" + el.tag + ">");
                }
            }
            el.attrs.push_back(std::move(attr));
        }
        // content
        std::string text;
        for (;;) {
            if (pos_ >= text_.size()) fail("missing closing tag for <" + el.tag + ">");
            if (starts("<!--")) {
                skip_until("-->", "comment");
            } else if (starts("<![CDATA[")) {
                size_t end = text_.find("]]>", pos_);
                if (end == std::string_view::npos) fail("unterminated CDATA");
                text += text_.substr(pos_ + 9, end - pos_ - 9);
                advance(end + 3 - pos_);
            } else if (starts("</")) {
                advance(2);
                std::string close = parse_name();
                if (close != el.tag) {
                    fail("mismatched closing tag: expected </" + el.tag + ">, got </" +
                         close + ">");
                }
                skip_ws();
                expect('>', "'>'");
                el.line_end = line_;
                el.text = trim(text);  // entities were decoded as they were read
                return el;
            } else if (peek() == '<') {
                el.children.push_back(parse_element());
            } else {
                size_t begin = pos_;
                while (pos_ < text_.size() && text_[pos_] != '<' && text_[pos_] != '&') {
                    advance();
                }
                text += text_.substr(begin, pos_ - begin);
                if (peek() == '&') {
                    size_t semi = text_.find(';', pos_);
                    if (semi == std::string_view::npos || semi - pos_ > 32) {
                        fail("unterminated entity reference");
                    }
                    text += decode_entities(text_.substr(pos_, semi + 1 - pos_));
                    advance(semi + 1 - pos_);
                }
            }
        }
    }

    std::string_view text_;
    size_t pos_ = 0;
    size_t line_start_ = 0;
    int line_ = 1;
};

}  // namespace detail

// Parses a whole document and returns its root element.
// Throws MalformedXml (with position) or EmptyLayout when there is no root.
inline XmlElement parse_xml(std::string_view text) {
    return detail::XmlReader(text).parse_document();
}

// Attribute-value escaping used by every serializer in the project. Newlines
// and tabs become numeric references so one-attribute-per-line layouts stay
// line-stable through a round trip.
inline std::string xml_escape_attr(std::string_view value) {
    std::string out;
    out.reserve(value.size());
    for (char c : value) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\n': out += "&#10;"; break;
            case '\r': out += "&#13;"; break;
            case '\t': out += "&#9;"; break;
            default: out += c;
        }
    }
    return out;
}

inline std::string xml_escape_text(std::string_view value) {
    std::string out;
    out.reserve(value.size());
    for (char c : value) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace uitrans
