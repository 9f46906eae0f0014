#pragma once

// Android project ingestion: manifest, layout trees, lexical Java interaction
// facts, value resources, and the per-page dictionary the rest of the pipeline
// consumes. Java analysis is a token-pattern scan over raw bytes, never a real
// parse; it must survive arbitrary input.

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "uitrans/common.hpp"
#include "uitrans/xml.hpp"

namespace uitrans {

// ---- manifest ----------------------------------------------------------------

struct ActivityDecl {
    std::string name;  // fully qualified
    bool is_launcher = false;

    bool operator==(const ActivityDecl&) const = default;
};

struct ManifestInfo {
    std::string package_name;
    std::vector<ActivityDecl> activities;

    bool operator==(const ManifestInfo&) const = default;
};

// ---- layout trees --------------------------------------------------------------

enum class NodeKind { native_widget, container, include_ref, fragment, custom };

inline const char* to_string(NodeKind k) {
    switch (k) {
        case NodeKind::native_widget: return "native_widget";
        case NodeKind::container: return "container";
        case NodeKind::include_ref: return "include_ref";
        case NodeKind::fragment: return "fragment";
        case NodeKind::custom: return "custom";
    }
    return "native_widget";
}

inline NodeKind classify_tag(std::string_view tag) {
    static const std::set<std::string, std::less<>> containers = {
        "LinearLayout",  "RelativeLayout", "FrameLayout", "ConstraintLayout",
        "ScrollView",    "HorizontalScrollView", "TableLayout", "TableRow",
        "GridLayout",    "RadioGroup",     "Toolbar",     "ViewAnimator",
        "ViewFlipper",   "ViewSwitcher"};
    if (tag == "include") return NodeKind::include_ref;
    if (tag == "fragment" || tag == "FragmentContainerView") return NodeKind::fragment;
    if (tag.find('.') != std::string_view::npos) return NodeKind::custom;
    if (containers.count(tag)) return NodeKind::container;
    return NodeKind::native_widget;
}

struct LayoutNode {
    std::string tag;
    std::vector<XmlAttr> attributes;  // document order
    std::vector<LayoutNode> children;
    NodeKind kind = NodeKind::native_widget;
    SourceSpan source_span;

    const std::string* attr(std::string_view name) const {
        for (const auto& a : attributes) {
            if (a.name == name) return &a.value;
        }
        return nullptr;
    }
    std::string attr_or(std::string_view name, std::string_view fallback) const {
        const std::string* v = attr(name);
        return v ? *v : std::string(fallback);
    }
    size_t subtree_size() const {
        size_t n = 1;
        for (const auto& c : children) n += c.subtree_size();
        return n;
    }
};

// Structural equality; spans participate only when requested (canonical
// re-serialization legitimately changes line numbers).
inline bool layout_equal(const LayoutNode& a, const LayoutNode& b,
                         bool compare_spans = false) {
    if (a.tag != b.tag || a.kind != b.kind || a.attributes != b.attributes ||
        a.children.size() != b.children.size()) {
        return false;
    }
    if (compare_spans && !(a.source_span == b.source_span)) return false;
    for (size_t i = 0; i < a.children.size(); ++i) {
        if (!layout_equal(a.children[i], b.children[i], compare_spans)) return false;
    }
    return true;
}

namespace detail {

inline LayoutNode to_layout_node(const XmlElement& el, const std::string& file) {
    LayoutNode node;
    node.tag = el.tag;
    node.attributes = el.attrs;
    node.kind = classify_tag(el.tag);
    node.source_span = SourceSpan{file, el.line_begin, el.line_end};
    node.children.reserve(el.children.size());
    for (const auto& child : el.children) {
        node.children.push_back(to_layout_node(child, file));
    }
    return node;
}

}  // namespace detail

// Parses one layout document. `layout_name` names the span's file when no real
// path is known. Throws MalformedXml / EmptyLayout.
inline LayoutNode parse_layout(std::string_view xml_text, const std::string& layout_name) {
    XmlElement root = parse_xml(xml_text);
    return detail::to_layout_node(root, layout_name);
}

// Canonical re-serializer: first attribute stays on the tag line, each further
// attribute gets its own line (element indent + 4), children indent by 2.
// Every line ends with '\n', so line count == count of newlines. This is the
// size measure decomposition uses, independent of input formatting.
inline void serialize_layout_into(const LayoutNode& node, int indent, std::string& out) {
    std::string ind(static_cast<size_t>(indent), ' ');
    out += ind;
    out += '<';
    out += node.tag;
    std::string attr_ind(static_cast<size_t>(indent) + 4, ' ');
    for (size_t i = 0; i < node.attributes.size(); ++i) {
        const auto& a = node.attributes[i];
        if (i == 0) {
            out += ' ';
        } else {
            out += '\n';
            out += attr_ind;
        }
        out += a.name;
        out += "=\"";
        out += xml_escape_attr(a.value);
        out += '"';
    }
    if (node.children.empty()) {
        out += "/>\n";
        return;
    }
    out += ">\n";
    for (const auto& child : node.children) {
        serialize_layout_into(child, indent + 2, out);
    }
    out += ind;
    out += "</";
    out += node.tag;
    out += ">\n";
}

inline std::string serialize_layout(const LayoutNode& node, int indent = 0) {
    std::string out;
    serialize_layout_into(node, indent, out);
    return out;
}

inline size_t serialized_line_count(const LayoutNode& node) {
    std::string s = serialize_layout(node);
    return static_cast<size_t>(std::count(s.begin(), s.end(), '\n'));
}

// ---- manifest parsing -----------------------------------------------------------

// Prefixes relative activity names with the package per platform rules.
inline std::string qualify_class_name(std::string_view name, const std::string& package) {
    if (name.empty()) return std::string(name);
    if (name.front() == '.') return package + std::string(name);
    if (name.find('.') == std::string_view::npos) return package + "." + std::string(name);
    return std::string(name);
}

inline ManifestInfo parse_manifest(std::string_view manifest_text, Warnings* warnings = nullptr) {
    Warnings local;
    Warnings& sink = warnings ? *warnings : local;

    XmlElement root = parse_xml(manifest_text);
    if (root.tag != "manifest") {
        throw MalformedXml("root element is <" + root.tag + ">, expected <manifest>",
                           root.line_begin, 1);
    }
    ManifestInfo info;
    const std::string* pkg = root.attr("package");
    if (!pkg || pkg->empty()) throw MissingPackage();
    info.package_name = *pkg;

    auto is_launcher_filter = [](const XmlElement& filter) {
        bool main = false, launcher = false;
        for (const auto& child : filter.children) {
            if (child.tag == "action" &&
                child.attr_or("android:name", "") == "android.intent.action.MAIN") {
                main = true;
            }
            if (child.tag == "category" &&
                child.attr_or("android:name", "") == "android.intent.category.LAUNCHER") {
                launcher = true;
            }
        }
        return main && launcher;
    };

    bool have_launcher = false;
    for (const auto& app : root.children) {
        if (app.tag != "application") continue;
        for (const auto& el : app.children) {
            if (el.tag != "activity") continue;
            std::string name = el.attr_or("android:name", "");
            if (name.empty()) {
                warn(sink, "activity_without_name", "activity element has no android:name",
                     SourceSpan{"AndroidManifest.xml", el.line_begin, el.line_end});
                continue;
            }
            ActivityDecl decl;
            decl.name = qualify_class_name(name, info.package_name);
            for (const auto& child : el.children) {
                if (child.tag == "intent-filter" && is_launcher_filter(child)) {
                    decl.is_launcher = true;
                }
            }
            if (decl.is_launcher && have_launcher) {
                warn(sink, "multiple_launchers",
                     "more than one launcher activity; keeping the first",
                     SourceSpan{"AndroidManifest.xml", el.line_begin, el.line_end});
                decl.is_launcher = false;
            }
            have_launcher = have_launcher || decl.is_launcher;
            info.activities.push_back(std::move(decl));
        }
    }
    if (info.activities.empty()) {
        warn(sink, "no_activities", "manifest declares no activities");
    }
    return info;
}

// ---- Java lexical scan ------------------------------------------------------------

enum class InteractionKind { view_binding, navigation, content_view, listener };

inline const char* to_string(InteractionKind k) {
    switch (k) {
        case InteractionKind::view_binding: return "view_binding";
        case InteractionKind::navigation: return "navigation";
        case InteractionKind::content_view: return "content_view";
        case InteractionKind::listener: return "listener";
    }
    return "view_binding";
}

struct InteractionFact {
    InteractionKind kind = InteractionKind::view_binding;
    std::string subject_id;
    std::string detail;  // verbatim substring of the scanned Java text
    // navigation facts only, filled when the fact is attached to a unit:
    // the view or XML onClick method whose handler encloses the call
    std::string via_view_id;
    std::string via_method;

    bool operator==(const InteractionFact&) const = default;
};

namespace detail {

// Shared comment/string skipper. Returns the position after the skipped
// region, or `pos` when nothing skippable starts here. Tolerates unterminated
// constructs (clamps to end).
inline size_t skip_java_noise(std::string_view text, size_t pos) {
    if (pos + 1 < text.size() && text[pos] == '/' && text[pos + 1] == '/') {
        size_t nl = text.find('\n', pos);
        return nl == std::string_view::npos ? text.size() : nl + 1;
    }
    if (pos + 1 < text.size() && text[pos] == '/' && text[pos + 1] == '*') {
        size_t end = text.find("*/", pos + 2);
        return end == std::string_view::npos ? text.size() : end + 2;
    }
    if (text[pos] == '"' || text[pos] == '\'') {
        char quote = text[pos];
        size_t i = pos + 1;
        while (i < text.size() && text[i] != quote && text[i] != '\n') {
            if (text[i] == '\\') ++i;
            ++i;
        }
        return i < text.size() ? i + 1 : text.size();
    }
    return pos;
}

inline size_t skip_ws_fwd(std::string_view text, size_t pos) {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    return pos;
}

inline std::string read_ident(std::string_view text, size_t& pos) {
    size_t begin = pos;
    while (pos < text.size() && is_ident_char(text[pos])) ++pos;
    return std::string(text.substr(begin, pos - begin));
}

// Reads a dotted identifier chain like "a.b.C" ending at pos.
inline std::string read_qualified_backwards(std::string_view text, size_t end) {
    size_t begin = end;
    while (begin > 0 && (is_ident_char(text[begin - 1]) || text[begin - 1] == '.')) --begin;
    return std::string(text.substr(begin, end - begin));
}

// Walks left from `pos` over "<recv.>", "(Cast)", '=' to find the variable a
// findViewById result is assigned to. Empty when the shape does not match.
inline std::string assigned_var_backwards(std::string_view text, size_t pos) {
    size_t i = pos;
    // optional receiver chain directly before the call: "view."
    while (i > 0 && (is_ident_char(text[i - 1]) || text[i - 1] == '.')) --i;
    auto skip_ws_back = [&](size_t j) {
        while (j > 0 && std::isspace(static_cast<unsigned char>(text[j - 1]))) --j;
        return j;
    };
    i = skip_ws_back(i);
    if (i > 0 && text[i - 1] == ')') {  // cast like "(Button)"
        int depth = 1;
        --i;
        while (i > 0 && depth > 0) {
            --i;
            if (text[i] == ')') ++depth;
            if (text[i] == '(') --depth;
        }
        if (depth != 0) return {};
        i = skip_ws_back(i);
    }
    if (i == 0 || text[i - 1] != '=') return {};
    --i;
    if (i > 0 && (text[i - 1] == '=' || text[i - 1] == '!' || text[i - 1] == '<' ||
                  text[i - 1] == '>')) {
        return {};  // comparison, not assignment
    }
    i = skip_ws_back(i);
    size_t end = i;
    while (i > 0 && is_ident_char(text[i - 1])) --i;
    return std::string(text.substr(i, end - i));
}

}  // namespace detail

// Lexical scan for interaction facts. Total: never throws, any byte input.
// Facts come back in source order; `detail` is always a verbatim substring.
inline std::vector<InteractionFact> extract_interactions(std::string_view java_text) {
    using namespace detail;
    std::vector<InteractionFact> facts;
    std::vector<std::string> listener_receivers;  // parallel to listener facts
    std::map<std::string, std::string> bindings;  // var -> resource id

    size_t i = 0;
    while (i < java_text.size()) {
        size_t skipped = skip_java_noise(java_text, i);
        if (skipped != i) {
            i = skipped;
            continue;
        }
        if (!is_ident_char(java_text[i]) || (i > 0 && is_ident_char(java_text[i - 1]))) {
            ++i;
            continue;
        }
        size_t word_begin = i;
        std::string word = read_ident(java_text, i);

        if (word == "findViewById") {
            size_t p = skip_ws_fwd(java_text, i);
            if (p < java_text.size() && java_text[p] == '(') {
                p = skip_ws_fwd(java_text, p + 1);
                if (java_text.substr(p, 5) == "R.id.") {
                    p += 5;
                    std::string id = read_ident(java_text, p);
                    size_t close = skip_ws_fwd(java_text, p);
                    if (close < java_text.size() && java_text[close] == ')') p = close + 1;
                    if (!id.empty()) {
                        facts.push_back(InteractionFact{
                            InteractionKind::view_binding, id,
                            std::string(java_text.substr(word_begin, p - word_begin))});
                        std::string var = assigned_var_backwards(java_text, word_begin);
                        if (!var.empty()) bindings[var] = id;
                        i = p;
                        continue;
                    }
                }
            }
        } else if (word == "setContentView") {
            size_t p = skip_ws_fwd(java_text, i);
            if (p < java_text.size() && java_text[p] == '(') {
                p = skip_ws_fwd(java_text, p + 1);
                if (java_text.substr(p, 9) == "R.layout.") {
                    p += 9;
                    std::string layout = read_ident(java_text, p);
                    size_t close = skip_ws_fwd(java_text, p);
                    if (close < java_text.size() && java_text[close] == ')') p = close + 1;
                    if (!layout.empty()) {
                        facts.push_back(InteractionFact{
                            InteractionKind::content_view, layout,
                            std::string(java_text.substr(word_begin, p - word_begin))});
                        i = p;
                        continue;
                    }
                }
            }
        } else if (word == "startActivity" || word == "startActivityForResult") {
            size_t p = skip_ws_fwd(java_text, i);
            if (p < java_text.size() && java_text[p] == '(') {
                // scan the call's argument list, tracking nesting and strings
                size_t args_begin = p + 1;
                size_t q = args_begin;
                int depth = 1;
                while (q < java_text.size() && depth > 0) {
                    size_t sk = skip_java_noise(java_text, q);
                    if (sk != q) {
                        q = sk;
                        continue;
                    }
                    if (java_text[q] == '(') ++depth;
                    if (java_text[q] == ')') --depth;
                    ++q;
                }
                std::string_view args = java_text.substr(args_begin, q > args_begin
                                                                          ? q - 1 - args_begin
                                                                          : 0);
                size_t cls = args.rfind(".class");
                if (cls != std::string_view::npos &&
                    args.find("Intent") != std::string_view::npos) {
                    std::string target = read_qualified_backwards(args, cls);
                    while (!target.empty() && target.back() == '.') target.pop_back();
                    if (!target.empty()) {
                        size_t end = depth == 0 ? q : java_text.size();
                        facts.push_back(InteractionFact{
                            InteractionKind::navigation, target,
                            std::string(java_text.substr(word_begin, end - word_begin))});
                        i = end;
                        continue;
                    }
                }
            }
        } else if (word.size() > 13 && word.rfind("setOn", 0) == 0 &&
                   word.size() >= 5 + 8 && word.substr(word.size() - 8) == "Listener") {
            size_t p = skip_ws_fwd(java_text, i);
            if (p < java_text.size() && java_text[p] == '(') {
                size_t recv_end = word_begin;
                std::string receiver;
                if (recv_end > 0 && java_text[recv_end - 1] == '.') {
                    size_t r = recv_end - 1;
                    size_t rb = r;
                    while (rb > 0 && is_ident_char(java_text[rb - 1])) --rb;
                    receiver = std::string(java_text.substr(rb, r - rb));
                    if (!receiver.empty()) word_begin = rb;
                }
                std::string subject = receiver.empty() ? word : receiver;
                facts.push_back(InteractionFact{
                    InteractionKind::listener, subject,
                    std::string(java_text.substr(word_begin, i - word_begin))});
                listener_receivers.push_back(receiver);
                continue;
            }
        }
    }

    // Resolve listener receivers through the binding map (bindings may be
    // declared after the attachment site, so resolve after the full scan).
    size_t listener_idx = 0;
    for (auto& fact : facts) {
        if (fact.kind != InteractionKind::listener) continue;
        const std::string& recv = listener_receivers[listener_idx++];
        auto it = bindings.find(recv);
        if (it != bindings.end()) fact.subject_id = it->second;
    }
    return facts;
}

// var -> resource id assignments recovered from findViewById call sites.
inline std::map<std::string, std::string> view_binding_map(std::string_view java_text) {
    using namespace detail;
    std::map<std::string, std::string> bindings;
    size_t i = 0;
    while (i < java_text.size()) {
        size_t skipped = skip_java_noise(java_text, i);
        if (skipped != i) {
            i = skipped;
            continue;
        }
        if (!is_ident_char(java_text[i]) || (i > 0 && is_ident_char(java_text[i - 1]))) {
            ++i;
            continue;
        }
        size_t word_begin = i;
        std::string word = read_ident(java_text, i);
        if (word != "findViewById") continue;
        size_t p = skip_ws_fwd(java_text, i);
        if (p >= java_text.size() || java_text[p] != '(') continue;
        p = skip_ws_fwd(java_text, p + 1);
        if (java_text.substr(p, 5) != "R.id.") continue;
        p += 5;
        std::string id = read_ident(java_text, p);
        std::string var = assigned_var_backwards(java_text, word_begin);
        if (!id.empty() && !var.empty()) bindings[var] = id;
        i = p;
    }
    return bindings;
}

// Event kind from a listener attachment: "setOnClickListener" -> "click",
// "setOnLongClickListener" -> "long_press", otherwise snake_case of the
// middle part ("setOnTouchListener" -> "touch").
inline std::string listener_event_kind(std::string_view detail_text) {
    size_t at = detail_text.find("setOn");
    if (at == std::string_view::npos) return "click";
    std::string_view rest = detail_text.substr(at + 5);
    size_t end = rest.find("Listener");
    if (end == std::string_view::npos) return "click";
    std::string_view event = rest.substr(0, end);
    if (event == "Click") return "click";
    if (event == "LongClick") return "long_press";
    std::string out;
    for (size_t i = 0; i < event.size(); ++i) {
        char c = event[i];
        if (std::isupper(static_cast<unsigned char>(c)) && i > 0) out += '_';
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out.empty() ? "click" : out;
}

// ---- resources -----------------------------------------------------------------

struct ResourceIndex {
    std::map<std::string, std::string> strings;
    std::map<std::string, std::string> colors;     // validated hex
    std::map<std::string, std::string> dimens;     // raw value+unit, e.g. "8dp"
    std::map<std::string, std::string> drawables;  // key -> path relative to project root

    bool operator==(const ResourceIndex&) const = default;
    size_t total() const {
        return strings.size() + colors.size() + dimens.size() + drawables.size();
    }
};

inline bool is_hex_color(std::string_view v) {
    if (v.size() < 4 || v[0] != '#') return false;
    size_t digits = v.size() - 1;
    if (digits != 3 && digits != 4 && digits != 6 && digits != 8) return false;
    for (size_t i = 1; i < v.size(); ++i) {
        if (!std::isxdigit(static_cast<unsigned char>(v[i]))) return false;
    }
    return true;
}

namespace detail {

inline void index_values_file(const XmlElement& root, const std::string& file,
                              ResourceIndex& index, Warnings& warnings) {
    if (root.tag != "resources") return;
    for (const auto& el : root.children) {
        std::string name = el.attr_or("name", "");
        if (name.empty()) {
            warn(warnings, "resource_without_name", "<" + el.tag + "> has no name",
                 SourceSpan{file, el.line_begin, el.line_end});
            continue;
        }
        auto put = [&](std::map<std::string, std::string>& ns, const std::string& value) {
            if (ns.count(name)) {
                warn(warnings, "duplicate_resource",
                     el.tag + "/" + name + " defined more than once; keeping the first",
                     SourceSpan{file, el.line_begin, el.line_end});
                return;
            }
            ns.emplace(name, value);
        };
        if (el.tag == "string") {
            put(index.strings, el.text);
        } else if (el.tag == "color") {
            if (!is_hex_color(el.text)) {
                warn(warnings, "invalid_color",
                     "color/" + name + " is not #RGB/#ARGB/#RRGGBB/#AARRGGBB: " + el.text,
                     SourceSpan{file, el.line_begin, el.line_end});
                continue;
            }
            put(index.colors, el.text);
        } else if (el.tag == "dimen") {
            put(index.dimens, el.text);
        }
    }
}

}  // namespace detail

// ---- pages and the project model -------------------------------------------------

struct DependencyEdge {
    enum class Kind { include, navigation, fragment };
    Kind kind = Kind::include;
    std::string source;  // page_id
    std::string target;  // layout name (include) or page_id (navigation/fragment)
    SourceSpan span;

    bool operator==(const DependencyEdge&) const = default;
};

inline const char* to_string(DependencyEdge::Kind k) {
    switch (k) {
        case DependencyEdge::Kind::include: return "include";
        case DependencyEdge::Kind::navigation: return "navigation";
        case DependencyEdge::Kind::fragment: return "fragment";
    }
    return "include";
}

struct PageRecord {
    std::string activity_name;  // fully qualified; doubles as page_id
    std::string java_code;
    std::string java_path;  // relative to project root, empty when not found
    std::vector<std::pair<std::string, LayoutNode>> xml_layouts;  // first is primary
    std::vector<DependencyEdge> dependencies;
    std::vector<std::string> resource_refs;  // "string/hi"
    std::vector<InteractionFact> interactions;
    std::map<std::string, std::string> view_bindings;  // var -> resource id
    bool is_subpage = false;

    const std::string& page_id() const { return activity_name; }
};

struct AndroidProject {
    std::filesystem::path root_path;
    ManifestInfo manifest;
    std::vector<PageRecord> pages;     // manifest order; activities only
    std::vector<PageRecord> subpages;  // fragment-derived
    ResourceIndex resources;
    std::vector<std::pair<std::string, LayoutNode>> layouts;  // full index, name-sorted
    std::vector<std::string> orphan_layouts;
    Warnings warnings;

    const LayoutNode* find_layout(std::string_view name) const {
        for (const auto& [n, node] : layouts) {
            if (n == name) return &node;
        }
        return nullptr;
    }
    PageRecord* find_page(std::string_view page_id) {
        for (auto& p : pages) {
            if (p.activity_name == page_id) return &p;
        }
        for (auto& p : subpages) {
            if (p.activity_name == page_id) return &p;
        }
        return nullptr;
    }
    const PageRecord* find_page(std::string_view page_id) const {
        return const_cast<AndroidProject*>(this)->find_page(page_id);
    }
};

namespace detail {

inline std::string layout_ref_name(std::string_view value) {
    // "@layout/toolbar" -> "toolbar"
    if (value.rfind("@layout/", 0) == 0) return std::string(value.substr(8));
    return {};
}

inline void collect_resource_refs(const LayoutNode& node, std::vector<std::string>& out,
                                  std::set<std::string>& seen) {
    for (const auto& a : node.attributes) {
        std::string_view v = a.value;
        if (v.size() < 2 || v[0] != '@') continue;
        if (v.rfind("@android:", 0) == 0) continue;  // system resources
        size_t slash = v.find('/');
        if (slash == std::string_view::npos) continue;
        std::string ns(v.substr(1, slash - 1));
        if (!ns.empty() && ns[0] == '+') ns = ns.substr(1);
        if (ns != "string" && ns != "color" && ns != "dimen" && ns != "drawable") continue;
        std::string key = ns + "/" + std::string(v.substr(slash + 1));
        if (seen.insert(key).second) out.push_back(key);
    }
    for (const auto& c : node.children) collect_resource_refs(c, out, seen);
}

inline int line_of_offset(std::string_view text, size_t offset) {
    int line = 1;
    for (size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') ++line;
    }
    return line;
}

template <typename Fn>
inline void walk_layout(const LayoutNode& node, Fn&& fn) {
    fn(node);
    for (const auto& c : node.children) walk_layout(c, fn);
}

}  // namespace detail

// Links include targets, navigation facts and fragment references. Unresolved
// targets become warnings, never silent drops. Idempotent: edges are rebuilt
// from scratch on every call.
inline AndroidProject& resolve_dependencies(AndroidProject& project) {
    auto resolve_activity = [&](std::string_view target) -> std::string {
        for (const auto& a : project.manifest.activities) {
            if (a.name == target) return a.name;
        }
        std::string qualified = qualify_class_name(std::string(target),
                                                   project.manifest.package_name);
        for (const auto& a : project.manifest.activities) {
            if (a.name == qualified) return a.name;
        }
        std::string match;
        for (const auto& a : project.manifest.activities) {
            if (simple_name(a.name) == target) {
                if (!match.empty()) return {};  // ambiguous
                match = a.name;
            }
        }
        return match;
    };
    auto resolve_subpage = [&](std::string_view cls) -> std::string {
        std::string qualified = qualify_class_name(std::string(cls),
                                                   project.manifest.package_name);
        for (const auto& sp : project.subpages) {
            if (sp.activity_name == qualified || simple_name(sp.activity_name) == cls) {
                return sp.activity_name;
            }
        }
        return {};
    };

    auto resolve_page = [&](PageRecord& page) {
        page.dependencies.clear();
        for (const auto& [layout_name, tree] : page.xml_layouts) {
            detail::walk_layout(tree, [&](const LayoutNode& node) {
                if (node.kind == NodeKind::include_ref) {
                    std::string target = detail::layout_ref_name(node.attr_or("layout", ""));
                    if (!target.empty() && project.find_layout(target)) {
                        page.dependencies.push_back(DependencyEdge{
                            DependencyEdge::Kind::include, page.page_id(), target,
                            node.source_span});
                    } else {
                        warn(project.warnings, "unresolved_include",
                             "include target '" + node.attr_or("layout", "") +
                                 "' not found",
                             node.source_span);
                    }
                } else if (node.kind == NodeKind::fragment) {
                    std::string cls = node.attr_or("android:name", node.attr_or("class", ""));
                    std::string layout =
                        detail::layout_ref_name(node.attr_or("tools:layout", ""));
                    std::string subpage = cls.empty() ? std::string() : resolve_subpage(cls);
                    if (!subpage.empty()) {
                        page.dependencies.push_back(DependencyEdge{
                            DependencyEdge::Kind::fragment, page.page_id(), subpage,
                            node.source_span});
                    } else if (!layout.empty() && project.find_layout(layout)) {
                        page.dependencies.push_back(DependencyEdge{
                            DependencyEdge::Kind::include, page.page_id(), layout,
                            node.source_span});
                    } else {
                        warn(project.warnings, "unresolved_fragment",
                             "fragment '" + (cls.empty() ? node.tag : cls) +
                                 "' has no resolvable class or layout",
                             node.source_span);
                    }
                }
            });
        }
        for (const auto& fact : page.interactions) {
            if (fact.kind != InteractionKind::navigation) continue;
            std::string target = resolve_activity(fact.subject_id);
            size_t offset = page.java_code.find(fact.detail);
            SourceSpan span{page.java_path,
                            detail::line_of_offset(page.java_code, offset), 0};
            span.line_end = span.line_begin;
            if (!target.empty()) {
                page.dependencies.push_back(DependencyEdge{
                    DependencyEdge::Kind::navigation, page.page_id(), target, span});
            } else {
                warn(project.warnings, "unresolved_navigation",
                     "navigation target '" + fact.subject_id +
                         "' is not a manifest activity",
                     span);
            }
        }
    };

    for (auto& page : project.pages) resolve_page(page);
    for (auto& page : project.subpages) resolve_page(page);
    return project;
}

namespace detail {

struct JavaSourceIndex {
    // simple class name -> sorted relative paths
    std::map<std::string, std::vector<std::filesystem::path>> by_simple_name;
    size_t non_java_sources = 0;
};

inline bool skip_dir(const std::filesystem::path& p) {
    std::string name = p.filename().string();
    return name == "build" || name == ".git" || name == ".gradle" || name == "out";
}

inline JavaSourceIndex index_java_sources(const std::filesystem::path& root) {
    JavaSourceIndex index;
    std::vector<std::filesystem::path> files;
    std::error_code ec;
    for (auto it = std::filesystem::recursive_directory_iterator(root, ec);
         it != std::filesystem::recursive_directory_iterator(); it.increment(ec)) {
        if (ec) break;
        if (it->is_directory() && skip_dir(it->path())) {
            it.disable_recursion_pending();
            continue;
        }
        if (!it->is_regular_file()) continue;
        auto ext = it->path().extension();
        if (ext == ".java") {
            files.push_back(std::filesystem::relative(it->path(), root));
        } else if (ext == ".kt" || ext == ".kts") {
            ++index.non_java_sources;
        }
    }
    std::sort(files.begin(), files.end());
    for (auto& f : files) {
        index.by_simple_name[f.stem().string()].push_back(f);
    }
    return index;
}

// Picks the candidate whose path contains the package directory when possible.
inline std::filesystem::path pick_java_file(const std::vector<std::filesystem::path>& candidates,
                                            const std::string& fqcn) {
    if (candidates.empty()) return {};
    std::string package_path = fqcn;
    size_t last_dot = package_path.rfind('.');
    if (last_dot != std::string::npos) package_path.resize(last_dot);
    std::replace(package_path.begin(), package_path.end(), '.', '/');
    for (const auto& cand : candidates) {
        std::string generic = cand.generic_string();
        if (generic.find(package_path + "/") != std::string::npos) return cand;
    }
    return candidates.front();
}

inline std::vector<std::filesystem::path> find_files(const std::filesystem::path& root,
                                                     const char* dir_name,
                                                     bool prefix_match) {
    std::vector<std::filesystem::path> out;
    std::error_code ec;
    for (auto it = std::filesystem::recursive_directory_iterator(root, ec);
         it != std::filesystem::recursive_directory_iterator(); it.increment(ec)) {
        if (ec) break;
        if (it->is_directory() && skip_dir(it->path())) {
            it.disable_recursion_pending();
            continue;
        }
        if (!it->is_regular_file()) continue;
        std::string parent = it->path().parent_path().filename().string();
        bool match = prefix_match ? parent.rfind(dir_name, 0) == 0 : parent == dir_name;
        if (match) out.push_back(std::filesystem::relative(it->path(), root));
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace detail

// Full project ingestion: manifest -> pages -> layouts -> resources ->
// fragment subpages -> dependency resolution -> orphan flagging.
inline AndroidProject parse_project(const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    AndroidProject project;
    project.root_path = root;

    if (!fs::exists(root) || !fs::is_directory(root)) {
        throw ManifestNotFound(root.string());
    }

    // manifest: shallowest AndroidManifest.xml wins
    std::vector<fs::path> manifests;
    std::error_code ec;
    for (auto it = fs::recursive_directory_iterator(root, ec);
         it != fs::recursive_directory_iterator(); it.increment(ec)) {
        if (ec) break;
        if (it->is_directory() && detail::skip_dir(it->path())) {
            it.disable_recursion_pending();
            continue;
        }
        if (it->is_regular_file() && it->path().filename() == "AndroidManifest.xml") {
            manifests.push_back(fs::relative(it->path(), root));
        }
    }
    if (manifests.empty()) throw ManifestNotFound(root.string());
    std::sort(manifests.begin(), manifests.end(),
              [](const fs::path& a, const fs::path& b) {
                  auto depth = [](const fs::path& p) {
                      return std::distance(p.begin(), p.end());
                  };
                  auto da = depth(a), db = depth(b);
                  return da != db ? da < db : a < b;
              });
    fs::path manifest_rel = manifests.front();
    try {
        project.manifest = parse_manifest(read_file(root / manifest_rel), &project.warnings);
    } catch (const MalformedXml& e) {
        throw MalformedXml(manifest_rel.generic_string(), e);
    }

    // layouts
    for (const auto& rel : detail::find_files(root, "layout", false)) {
        if (rel.extension() != ".xml") continue;
        std::string name = rel.stem().string();
        if (project.find_layout(name)) continue;  // first definition wins
        try {
            LayoutNode node = parse_layout(read_file(root / rel), rel.generic_string());
            project.layouts.emplace_back(name, std::move(node));
        } catch (const MalformedXml& e) {
            throw MalformedXml(rel.generic_string(), e);
        } catch (const EmptyLayout&) {
            warn(project.warnings, "empty_layout", rel.generic_string() + " has no root element");
        }
    }
    std::sort(project.layouts.begin(), project.layouts.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    // value resources + drawables
    for (const auto& rel : detail::find_files(root, "values", false)) {
        if (rel.extension() != ".xml") continue;
        try {
            XmlElement values = parse_xml(read_file(root / rel));
            detail::index_values_file(values, rel.generic_string(), project.resources,
                                      project.warnings);
        } catch (const MalformedXml& e) {
            throw MalformedXml(rel.generic_string(), e);
        } catch (const EmptyLayout&) {
        }
    }
    for (const auto& rel : detail::find_files(root, "drawable", false)) {
        std::string key = rel.stem().string();
        if (!project.resources.drawables.count(key)) {
            project.resources.drawables.emplace(key, rel.generic_string());
        }
    }

    // java sources
    detail::JavaSourceIndex sources = detail::index_java_sources(root);
    if (sources.non_java_sources > 0) {
        warn(project.warnings, "non_java_sources",
             std::to_string(sources.non_java_sources) +
                 " Kotlin source file(s) ignored");
    }

    auto build_record = [&](const std::string& fqcn) {
        PageRecord page;
        page.activity_name = fqcn;
        auto it = sources.by_simple_name.find(simple_name(fqcn));
        if (it != sources.by_simple_name.end()) {
            fs::path file = detail::pick_java_file(it->second, fqcn);
            page.java_path = file.generic_string();
            page.java_code = read_file(root / file);
            page.interactions = extract_interactions(page.java_code);
            page.view_bindings = view_binding_map(page.java_code);
        } else {
            warn(project.warnings, "missing_java",
                 "no Java source found for " + fqcn);
        }
        for (const auto& fact : page.interactions) {
            if (fact.kind != InteractionKind::content_view) continue;
            bool attached = false;
            for (const auto& [n, _] : page.xml_layouts) {
                if (n == fact.subject_id) attached = true;
            }
            if (attached) continue;
            const LayoutNode* layout = project.find_layout(fact.subject_id);
            if (layout) {
                page.xml_layouts.emplace_back(fact.subject_id, *layout);
            } else {
                warn(project.warnings, "unresolved_content_view",
                     fqcn + " references missing layout '" + fact.subject_id + "'");
            }
        }
        std::set<std::string> seen;
        for (const auto& [_, tree] : page.xml_layouts) {
            detail::collect_resource_refs(tree, page.resource_refs, seen);
        }
        return page;
    };

    for (const auto& activity : project.manifest.activities) {
        project.pages.push_back(build_record(activity.name));
    }

    // fragment subpages: a fragment node with a resolvable class becomes a
    // child record; its layout comes from tools:layout when present
    std::set<std::string> subpage_ids;
    for (const auto& page : project.pages) {
        for (const auto& [_, tree] : page.xml_layouts) {
            detail::walk_layout(tree, [&](const LayoutNode& node) {
                if (node.kind != NodeKind::fragment) return;
                std::string cls = node.attr_or("android:name", node.attr_or("class", ""));
                if (cls.empty()) return;
                std::string fqcn = qualify_class_name(cls, project.manifest.package_name);
                if (!sources.by_simple_name.count(simple_name(fqcn))) return;
                if (!subpage_ids.insert(fqcn).second) return;
                PageRecord sub = build_record(fqcn);
                sub.is_subpage = true;
                std::string layout = detail::layout_ref_name(node.attr_or("tools:layout", ""));
                if (!layout.empty() && sub.xml_layouts.empty()) {
                    if (const LayoutNode* l = project.find_layout(layout)) {
                        sub.xml_layouts.emplace_back(layout, *l);
                    }
                }
                project.subpages.push_back(std::move(sub));
            });
        }
    }

    resolve_dependencies(project);

    // orphans: not a content view, not an include/fragment target
    std::set<std::string> referenced;
    auto mark_page_refs = [&](const PageRecord& page) {
        for (const auto& [name, _] : page.xml_layouts) referenced.insert(name);
        for (const auto& edge : page.dependencies) {
            if (edge.kind == DependencyEdge::Kind::include) referenced.insert(edge.target);
        }
    };
    for (const auto& p : project.pages) mark_page_refs(p);
    for (const auto& p : project.subpages) mark_page_refs(p);
    for (const auto& [name, _] : project.layouts) {
        if (!referenced.count(name)) {
            project.orphan_layouts.push_back(name);
            warn(project.warnings, "orphan_layout",
                 "layout '" + name + "' is not referenced by any page");
        }
    }
    return project;
}

// ---- JSON dictionary dump ----------------------------------------------------------

namespace detail {

inline ojson layout_tree_to_json(const LayoutNode& node) {
    ojson j;
    j["tag"] = node.tag;
    j["kind"] = to_string(node.kind);
    j["span"] = ojson{{"file", node.source_span.file},
                      {"begin", node.source_span.line_begin},
                      {"end", node.source_span.line_end}};
    ojson attrs = ojson::array();
    for (const auto& a : node.attributes) attrs.push_back(ojson::array({a.name, a.value}));
    j["attrs"] = std::move(attrs);
    ojson children = ojson::array();
    for (const auto& c : node.children) children.push_back(layout_tree_to_json(c));
    j["children"] = std::move(children);
    return j;
}

inline LayoutNode layout_tree_from_json(const ojson& j) {
    LayoutNode node;
    node.tag = j.at("tag").get<std::string>();
    node.kind = classify_tag(node.tag);
    const auto& span = j.at("span");
    node.source_span = SourceSpan{span.at("file").get<std::string>(),
                                  span.at("begin").get<int>(), span.at("end").get<int>()};
    for (const auto& a : j.at("attrs")) {
        node.attributes.push_back(XmlAttr{a.at(0).get<std::string>(),
                                          a.at(1).get<std::string>()});
    }
    for (const auto& c : j.at("children")) {
        node.children.push_back(layout_tree_from_json(c));
    }
    return node;
}

inline ojson page_to_json(const PageRecord& page) {
    ojson j;
    j["activity"] = page.activity_name;
    j["java_code"] = page.java_code;
    j["java_path"] = page.java_path;
    ojson layouts = ojson::array();
    for (const auto& [name, tree] : page.xml_layouts) {
        layouts.push_back(ojson{{"name", name},
                                {"xml", serialize_layout(tree)},
                                {"tree", layout_tree_to_json(tree)}});
    }
    j["xml_layouts"] = std::move(layouts);
    ojson deps = ojson::array();
    for (const auto& e : page.dependencies) {
        deps.push_back(ojson{{"kind", to_string(e.kind)},
                             {"target", e.target},
                             {"file", e.span.file},
                             {"line", e.span.line_begin}});
    }
    j["dependencies"] = std::move(deps);
    j["resource_refs"] = page.resource_refs;
    ojson facts = ojson::array();
    for (const auto& f : page.interactions) {
        facts.push_back(ojson{{"kind", to_string(f.kind)},
                              {"subject_id", f.subject_id},
                              {"detail", f.detail}});
    }
    j["interactions"] = std::move(facts);
    ojson bindings = ojson::object();
    for (const auto& [var, id] : page.view_bindings) bindings[var] = id;
    j["bindings"] = std::move(bindings);
    return j;
}

inline PageRecord page_from_json(const ojson& j, bool is_subpage) {
    PageRecord page;
    page.activity_name = j.at("activity").get<std::string>();
    page.java_code = j.at("java_code").get<std::string>();
    page.java_path = j.value("java_path", std::string());
    for (const auto& l : j.at("xml_layouts")) {
        page.xml_layouts.emplace_back(l.at("name").get<std::string>(),
                                      layout_tree_from_json(l.at("tree")));
    }
    for (const auto& e : j.at("dependencies")) {
        DependencyEdge edge;
        std::string kind = e.at("kind").get<std::string>();
        edge.kind = kind == "navigation"  ? DependencyEdge::Kind::navigation
                    : kind == "fragment" ? DependencyEdge::Kind::fragment
                                         : DependencyEdge::Kind::include;
        edge.source = page.activity_name;
        edge.target = e.at("target").get<std::string>();
        edge.span = SourceSpan{e.value("file", std::string()), e.value("line", 1),
                               e.value("line", 1)};
        page.dependencies.push_back(std::move(edge));
    }
    for (const auto& r : j.at("resource_refs")) {
        page.resource_refs.push_back(r.get<std::string>());
    }
    for (const auto& f : j.at("interactions")) {
        InteractionFact fact;
        std::string kind = f.at("kind").get<std::string>();
        fact.kind = kind == "navigation"     ? InteractionKind::navigation
                    : kind == "content_view" ? InteractionKind::content_view
                    : kind == "listener"     ? InteractionKind::listener
                                             : InteractionKind::view_binding;
        fact.subject_id = f.at("subject_id").get<std::string>();
        fact.detail = f.at("detail").get<std::string>();
        page.interactions.push_back(std::move(fact));
    }
    if (j.contains("bindings")) {
        for (const auto& [var, id] : j.at("bindings").items()) {
            page.view_bindings[var] = id.get<std::string>();
        }
    }
    page.is_subpage = is_subpage;
    return page;
}

}  // namespace detail

// Page-dictionary dump consumed by `plan --pages` for staged runs.
inline ojson dump_pages_json(const AndroidProject& project) {
    ojson j;
    j["schema_version"] = 1;
    j["package"] = project.manifest.package_name;
    ojson activities = ojson::array();
    for (const auto& a : project.manifest.activities) {
        activities.push_back(ojson{{"name", a.name}, {"launcher", a.is_launcher}});
    }
    j["activities"] = std::move(activities);
    ojson pages = ojson::object();
    for (const auto& p : project.pages) pages[p.activity_name] = detail::page_to_json(p);
    j["pages"] = std::move(pages);
    ojson subpages = ojson::object();
    for (const auto& p : project.subpages) subpages[p.activity_name] = detail::page_to_json(p);
    j["subpages"] = std::move(subpages);
    ojson layouts = ojson::object();
    for (const auto& [name, tree] : project.layouts) {
        bool orphan = std::find(project.orphan_layouts.begin(), project.orphan_layouts.end(),
                                name) != project.orphan_layouts.end();
        layouts[name] = ojson{{"orphan", orphan},
                              {"tree", detail::layout_tree_to_json(tree)}};
    }
    j["layouts"] = std::move(layouts);
    j["resources"] = ojson{{"strings", project.resources.strings},
                           {"colors", project.resources.colors},
                           {"dimens", project.resources.dimens},
                           {"drawables", project.resources.drawables}};
    ojson warnings = ojson::array();
    for (const auto& w : project.warnings) warnings.push_back(w.to_string());
    j["warnings"] = std::move(warnings);
    return j;
}

inline AndroidProject load_pages_json(const ojson& j) {
    AndroidProject project;
    project.manifest.package_name = j.at("package").get<std::string>();
    for (const auto& a : j.at("activities")) {
        project.manifest.activities.push_back(
            ActivityDecl{a.at("name").get<std::string>(), a.at("launcher").get<bool>()});
    }
    for (const auto& [id, page] : j.at("pages").items()) {
        project.pages.push_back(detail::page_from_json(page, false));
    }
    if (j.contains("subpages")) {
        for (const auto& [id, page] : j.at("subpages").items()) {
            project.subpages.push_back(detail::page_from_json(page, true));
        }
    }
    for (const auto& [name, entry] : j.at("layouts").items()) {
        project.layouts.emplace_back(name, detail::layout_tree_from_json(entry.at("tree")));
        if (entry.value("orphan", false)) project.orphan_layouts.push_back(name);
    }
    const auto& res = j.at("resources");
    auto load_map = [](const ojson& obj, std::map<std::string, std::string>& out) {
        for (const auto& [k, v] : obj.items()) out[k] = v.get<std::string>();
    };
    load_map(res.at("strings"), project.resources.strings);
    load_map(res.at("colors"), project.resources.colors);
    load_map(res.at("dimens"), project.resources.dimens);
    load_map(res.at("drawables"), project.resources.drawables);
    return project;
}

}  // namespace uitrans
