#pragma once

// Shared error types, warning collection, and small string/file/hash helpers
// used across the library.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace uitrans {

// Insertion-ordered JSON keeps dumps deterministic and diff-friendly.
using ojson = nlohmann::ordered_json;

// ---- errors ----------------------------------------------------------------

class UiTransError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MalformedXml : public UiTransError {
public:
    MalformedXml(const std::string& msg, int line, int col)
        : UiTransError("malformed XML at " + std::to_string(line) + ":" +
                       std::to_string(col) + ": " + msg),
          line_(line), col_(col) {}
    // Wraps an inner parse error with the file it came from.
    MalformedXml(const std::string& file, const MalformedXml& inner)
        : UiTransError(file + ": " + inner.what()),
          line_(inner.line()), col_(inner.col()) {}
    int line() const { return line_; }
    int col() const { return col_; }

private:
    int line_;
    int col_;
};

class EmptyLayout : public UiTransError {
public:
    EmptyLayout() : UiTransError("layout has no root element") {}
};

class ManifestNotFound : public UiTransError {
public:
    explicit ManifestNotFound(const std::string& root)
        : UiTransError("no AndroidManifest.xml found under " + root) {}
};

class MissingPackage : public UiTransError {
public:
    MissingPackage() : UiTransError("manifest has no package attribute") {}
};

class SchemaViolation : public UiTransError {
public:
    SchemaViolation(const std::string& path, const std::string& field,
                    const std::string& msg)
        : UiTransError("schema violation in " + path + " (" + field + "): " + msg),
          path_(path), field_(field) {}
    const std::string& path() const { return path_; }
    const std::string& field() const { return field_; }

private:
    std::string path_;
    std::string field_;
};

class CyclicInclude : public UiTransError {
public:
    explicit CyclicInclude(const std::vector<std::string>& cycle)
        : UiTransError("cyclic <include> chain: " + join_cycle(cycle)), cycle_(cycle) {}
    const std::vector<std::string>& cycle() const { return cycle_; }

private:
    static std::string join_cycle(const std::vector<std::string>& c) {
        std::string out;
        for (const auto& s : c) {
            if (!out.empty()) out += " -> ";
            out += s;
        }
        return out;
    }
    std::vector<std::string> cycle_;
};

class BackendUnavailable : public UiTransError {
public:
    using UiTransError::UiTransError;
};

class BackendError : public UiTransError {
public:
    BackendError(int status, const std::string& body)
        : UiTransError("backend error, HTTP " + std::to_string(status) + ": " +
                       body.substr(0, 200)),
          status_(status) {}
    int status() const { return status_; }

private:
    int status_;
};

class PayloadIncomplete : public UiTransError {
public:
    explicit PayloadIncomplete(const std::string& field)
        : UiTransError("prompt payload missing required field: " + field),
          field_(field) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

class ReplayMiss : public UiTransError {
public:
    using UiTransError::UiTransError;
};

class MissingUnit : public UiTransError {
public:
    explicit MissingUnit(const std::string& unit_id)
        : UiTransError("no generated component for unit " + unit_id),
          unit_id_(unit_id) {}
    const std::string& unit_id() const { return unit_id_; }

private:
    std::string unit_id_;
};

class EmptyReference : public UiTransError {
public:
    EmptyReference() : UiTransError("reference text is empty") {}
};

class EmptyRecordSet : public UiTransError {
public:
    explicit EmptyRecordSet(const std::string& scope)
        : UiTransError("no evaluation records for scope: " + scope) {}
};

class IoError : public UiTransError {
public:
    using UiTransError::UiTransError;
};

class ConfigError : public UiTransError {
public:
    using UiTransError::UiTransError;
};

// ---- source spans and warnings ----------------------------------------------

// 1-based line range inside a named source file.
struct SourceSpan {
    std::string file;
    int line_begin = 1;
    int line_end = 1;

    bool operator==(const SourceSpan&) const = default;
    std::string to_string() const {
        return file + ":" + std::to_string(line_begin) + "-" + std::to_string(line_end);
    }
};

struct Warning {
    std::string kind;     // short slug, e.g. "unresolved_include"
    std::string message;
    SourceSpan span;      // span.file empty when not applicable

    std::string to_string() const {
        std::string out = kind + ": " + message;
        if (!span.file.empty()) out += " (" + span.to_string() + ")";
        return out;
    }
};

using Warnings = std::vector<Warning>;

inline void warn(Warnings& sink, std::string kind, std::string message,
                 SourceSpan span = {}) {
    sink.push_back(Warning{std::move(kind), std::move(message), std::move(span)});
}

// ---- hashing ----------------------------------------------------------------

inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<size_t>(i)] = digits[v & 0xF];
        v >>= 4;
    }
    return out;
}

// ---- strings ----------------------------------------------------------------

inline std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

inline std::string trim(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

inline std::string rtrim(std::string_view s) {
    size_t e = s.size();
    while (e > 0 && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(0, e));
}

// Splits on '\n'; a trailing newline does not produce an extra empty line.
inline std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> out;
    if (text.empty()) return out;
    size_t start = 0;
    while (start <= text.size()) {
        size_t nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            if (start < text.size()) out.emplace_back(text.substr(start));
            break;
        }
        out.emplace_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    return out;
}

inline bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

// "com.example.BadgeView" -> "BadgeView"
inline std::string simple_name(std::string_view qualified) {
    size_t dot = qualified.rfind('.');
    return std::string(dot == std::string_view::npos ? qualified
                                                     : qualified.substr(dot + 1));
}

// "activity_main" -> "ActivityMain"
inline std::string camel_case(std::string_view s) {
    std::string out;
    bool up = true;
    for (char c : s) {
        if (c == '_' || c == '-' || c == '.') {
            up = true;
            continue;
        }
        out += up ? static_cast<char>(std::toupper(static_cast<unsigned char>(c))) : c;
        up = false;
    }
    return out;
}

// Keeps [A-Za-z0-9_]; everything else becomes '_'. Never empty.
inline std::string sanitize_identifier(std::string_view s) {
    std::string out;
    for (char c : s) {
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '_') ? c : '_';
    }
    if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0]))) out = "_" + out;
    return out;
}

// ---- files ------------------------------------------------------------------

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

// Write temp file in the target's directory, then rename over the target.
// `crash_after_temp` is a test seam: stop after the temp write, before rename.
inline void write_file_atomic(const std::filesystem::path& path,
                              std::string_view content,
                              bool crash_after_temp = false) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    write_file(tmp, content);
    if (crash_after_temp) return;
    std::filesystem::rename(tmp, path);
}

}  // namespace uitrans
