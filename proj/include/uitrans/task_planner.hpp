#pragma once

// Recursive decomposition of page layouts into translatable units, plus the
// deterministic functional descriptions attached to each unit.
//
// Split rules, applied top-down:
//   R1  custom / include / fragment nodes always form their own unit
//   R2  a subtree that serializes within max_unit_lines and contains no R1
//       node below it is one unit
//   R3  otherwise the node becomes a container unit holding only its own
//       shell; each child is split recursively and referenced through a slot
//
// A container unit's root deliberately has no children: every node of the
// original tree belongs to exactly one unit, and reattaching child-unit
// subtrees in child_unit_ids order reproduces the input tree.

#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "uitrans/android_parser.hpp"
#include "uitrans/common.hpp"
#include "uitrans/llm_gateway.hpp"

namespace uitrans {

struct FunctionalDescription {
    std::string component_kind;  // root tag
    std::string purpose;
    std::vector<std::pair<std::string, int>> child_summary;  // child-unit root tags, first-seen order
    std::vector<std::pair<std::string, std::string>> salient_attributes;
    std::vector<std::string> events;

    bool operator==(const FunctionalDescription&) const = default;
};

struct TranslationUnit {
    std::string unit_id;
    std::string page_id;      // activity FQCN, or "layout:<name>" for shared layouts
    std::string layout_name;
    LayoutNode root;          // container units hold only the shell node
    bool container = false;   // true when children were split into child units
    int depth = 0;
    int preorder_index = 0;   // of root within the original layout tree
    std::string parent_unit;  // empty for the layout root unit
    std::vector<std::string> child_unit_ids;    // document order
    std::vector<std::string> child_root_tags;   // parallel to child_unit_ids
    FunctionalDescription description;
    std::vector<InteractionFact> related_interactions;

    size_t owned_node_count() const { return container ? 1 : root.subtree_size(); }
};

struct TranslationPlan {
    std::vector<TranslationUnit> units;  // bottom-up: children precede parents,
                                         // included layouts precede includers
    std::map<std::string, size_t> index;  // unit_id -> position in units

    const TranslationUnit* find(std::string_view unit_id) const {
        auto it = index.find(std::string(unit_id));
        return it == index.end() ? nullptr : &units[it->second];
    }
};

// ---- id helpers -------------------------------------------------------------------

inline std::string make_unit_id(const std::string& page_id, const std::string& layout_name,
                                const SourceSpan& span, int preorder_index) {
    std::string key = page_id + "|" + layout_name + "|" + span.file + ":" +
                      std::to_string(span.line_begin) + "-" +
                      std::to_string(span.line_end) + "|" +
                      std::to_string(preorder_index);
    return hex64(fnv1a64(key));
}

// "@+id/title_text" / "@id/title_text" -> "title_text"
inline std::string strip_id_ref(std::string_view value) {
    if (value.rfind("@+id/", 0) == 0) return std::string(value.substr(5));
    if (value.rfind("@id/", 0) == 0) return std::string(value.substr(4));
    return std::string(value);
}

// ---- decomposition ---------------------------------------------------------------

namespace detail {

inline bool is_r1(const LayoutNode& node) {
    return node.kind == NodeKind::custom || node.kind == NodeKind::include_ref ||
           node.kind == NodeKind::fragment;
}

inline bool has_r1_below(const LayoutNode& node) {
    for (const auto& c : node.children) {
        if (is_r1(c) || has_r1_below(c)) return true;
    }
    return false;
}

struct DecomposeState {
    const std::string& page_id;
    const std::string& layout_name;
    size_t max_unit_lines;
    std::vector<TranslationUnit>& out;  // post-order: children pushed before parent
};

// Returns the index within state.out of the unit rooted at `node`.
// `preorder` is advanced across the whole walk.
inline size_t split_node(const LayoutNode& node, int depth, DecomposeState& state,
                         int& preorder) {
    int my_index = preorder++;
    bool whole = !has_r1_below(node) &&
                 (is_r1(node) || serialized_line_count(node) <= state.max_unit_lines ||
                  node.children.empty());

    TranslationUnit unit;
    unit.page_id = state.page_id;
    unit.layout_name = state.layout_name;
    unit.depth = depth;
    unit.preorder_index = my_index;
    unit.unit_id = make_unit_id(state.page_id, state.layout_name, node.source_span, my_index);

    if (whole) {
        unit.root = node;
        state.out.push_back(std::move(unit));
        return state.out.size() - 1;
    }

    unit.container = true;
    unit.root = node;
    unit.root.children.clear();
    std::vector<size_t> child_indices;
    child_indices.reserve(node.children.size());
    for (const auto& child : node.children) {
        child_indices.push_back(split_node(child, depth + 1, state, preorder));
    }
    for (size_t ci : child_indices) {
        unit.child_unit_ids.push_back(state.out[ci].unit_id);
        unit.child_root_tags.push_back(state.out[ci].root.tag);
    }
    state.out.push_back(std::move(unit));
    size_t parent_index = state.out.size() - 1;
    for (size_t ci : child_indices) {
        state.out[ci].parent_unit = state.out[parent_index].unit_id;
    }
    return parent_index;
}

}  // namespace detail

// Splits one layout tree bottom-up; output order has children before parents.
inline FunctionalDescription build_description(const TranslationUnit& unit);

inline std::vector<TranslationUnit> decompose_layout(const std::string& page_id,
                                                     const std::string& layout_name,
                                                     const LayoutNode& root,
                                                     size_t max_unit_lines) {
    std::vector<TranslationUnit> units;
    detail::DecomposeState state{page_id, layout_name, max_unit_lines, units};
    int preorder = 0;
    detail::split_node(root, 0, state, preorder);
    for (auto& u : units) u.description = build_description(u);
    return units;
}

// Rebuilds the original subtree of a unit by splicing child units back in.
template <typename Lookup>
inline LayoutNode reconstruct_unit_tree(const TranslationUnit& unit, Lookup&& lookup) {
    LayoutNode node = unit.root;
    if (unit.container) {
        for (const auto& child_id : unit.child_unit_ids) {
            const TranslationUnit* child = lookup(child_id);
            if (!child) throw MissingUnit(child_id);
            node.children.push_back(reconstruct_unit_tree(*child, lookup));
        }
    }
    return node;
}

// The unit as shown to generation backends: container children appear as
// <slot ref="<child_unit_id>"/> elements.
inline LayoutNode unit_prompt_tree(const TranslationUnit& unit) {
    LayoutNode node = unit.root;
    for (const auto& child_id : unit.child_unit_ids) {
        LayoutNode slot;
        slot.tag = "slot";
        slot.attributes.push_back(XmlAttr{"ref", child_id});
        node.children.push_back(std::move(slot));
    }
    return node;
}

inline std::string unit_prompt_xml(const TranslationUnit& unit) {
    return serialize_layout(unit_prompt_tree(unit));
}

// ---- interaction linking -----------------------------------------------------------

struct NavigationLink {
    std::string view_id;  // view whose handler encloses the startActivity call
    std::string method;   // enclosing Java method name, when recoverable
};

namespace detail {

// Matches a paren run starting at `open` (which must be '('), skipping
// comments and strings. Returns one past the closing paren, or npos.
inline size_t match_paren(std::string_view text, size_t open) {
    if (open >= text.size() || text[open] != '(') return std::string_view::npos;
    size_t i = open;
    int depth = 0;
    while (i < text.size()) {
        size_t sk = skip_java_noise(text, i);
        if (sk != i) {
            i = sk;
            continue;
        }
        if (text[i] == '(') ++depth;
        if (text[i] == ')') {
            --depth;
            if (depth == 0) return i + 1;
        }
        ++i;
    }
    return std::string_view::npos;
}

}  // namespace detail

// Recovers which view's handler triggers a navigation fact: first by lexical
// enclosure in a listener attachment's argument list, then by the enclosing
// method name (to be matched against XML android:onClick).
inline NavigationLink link_navigation(const PageRecord& page, const InteractionFact& nav) {
    NavigationLink link;
    if (nav.kind != InteractionKind::navigation) return link;
    size_t nav_off = page.java_code.find(nav.detail);
    if (nav_off == std::string::npos) return link;

    for (const auto& fact : page.interactions) {
        if (fact.kind != InteractionKind::listener) continue;
        size_t att_off = page.java_code.find(fact.detail);
        if (att_off == std::string::npos) continue;
        size_t open = att_off + fact.detail.size();
        while (open < page.java_code.size() &&
               std::isspace(static_cast<unsigned char>(page.java_code[open]))) {
            ++open;
        }
        size_t end = detail::match_paren(page.java_code, open);
        if (end == std::string::npos) continue;
        if (nav_off > open && nav_off < end) {
            link.view_id = fact.subject_id;
            return link;
        }
    }

    // nearest preceding "void <name>(" declaration
    std::string_view code = page.java_code;
    size_t best = std::string::npos;
    size_t i = 0;
    while (i < nav_off) {
        size_t sk = detail::skip_java_noise(code, i);
        if (sk != i) {
            i = sk;
            continue;
        }
        if (is_ident_char(code[i]) && (i == 0 || !is_ident_char(code[i - 1]))) {
            size_t p = i;
            std::string word = detail::read_ident(code, p);
            if (word == "void" && p < nav_off) {
                size_t q = detail::skip_ws_fwd(code, p);
                std::string name = detail::read_ident(code, q);
                size_t r = detail::skip_ws_fwd(code, q);
                if (!name.empty() && r < code.size() && code[r] == '(') best = i;
                if (best == i) link.method = name;
            }
            i = p;
            continue;
        }
        ++i;
    }
    if (best == std::string::npos) link.method.clear();
    return link;
}

// ---- functional descriptions --------------------------------------------------------

namespace detail {

inline void collect_owned_ids(const TranslationUnit& unit, std::set<std::string>& ids) {
    auto visit = [&](const LayoutNode& node, auto&& self) -> void {
        if (const std::string* id = node.attr("android:id")) {
            ids.insert(strip_id_ref(*id));
        }
        for (const auto& c : node.children) self(c, self);
    };
    visit(unit.root, visit);  // container roots have no children, so shell only
}

inline const LayoutNode* find_node_with_onclick(const LayoutNode& node,
                                                const std::string& method) {
    if (const std::string* v = node.attr("android:onClick"); v && *v == method) return &node;
    for (const auto& c : node.children) {
        if (const LayoutNode* hit = find_node_with_onclick(c, method)) return hit;
    }
    return nullptr;
}

}  // namespace detail

// Single formatter behind every deterministic "purpose" string. Keeping it in
// one place guarantees the planner and the template backend agree byte for
// byte. All parameters are pre-rendered fragments; empty means absent.
inline std::string render_purpose(const std::string& tag, const std::string& kind_word,
                                  const std::string& orientation,
                                  const std::string& children,
                                  const std::string& key_attr,
                                  const std::string& events) {
    std::string s = tag + " " + kind_word;
    if (!orientation.empty()) s += " oriented " + orientation;
    if (!children.empty()) s += " containing " + children;
    if (!key_attr.empty()) s += " with " + key_attr;
    if (!events.empty()) s += "; handles " + events;
    return s;
}

inline std::string kind_word_for(const LayoutNode& root, bool container) {
    switch (root.kind) {
        case NodeKind::include_ref: return "included layout reference";
        case NodeKind::fragment: return "fragment host";
        case NodeKind::custom: return "custom view";
        case NodeKind::container: return container ? "container" : "group";
        case NodeKind::native_widget: break;
    }
    return container ? "container" : "widget";
}

inline std::string render_child_summary(const std::vector<std::pair<std::string, int>>& cs) {
    std::string out;
    for (const auto& [tag, count] : cs) {
        if (!out.empty()) out += ", ";
        out += tag;
        if (count > 1) out += " x" + std::to_string(count);
    }
    return out;
}

inline std::string render_events(const std::vector<std::string>& events) {
    std::string out;
    for (const auto& e : events) {
        if (!out.empty()) out += ", ";
        out += e;
    }
    return out;
}

// Deterministic template description: the fallback for every backend and the
// whole story for the template backend.
inline FunctionalDescription build_description(const TranslationUnit& unit) {
    FunctionalDescription d;
    d.component_kind = unit.root.tag;

    for (const auto& tag : unit.child_root_tags) {
        bool found = false;
        for (auto& [t, n] : d.child_summary) {
            if (t == tag) {
                ++n;
                found = true;
            }
        }
        if (!found) d.child_summary.emplace_back(tag, 1);
    }

    for (const auto& a : unit.root.attributes) {
        if (a.name.rfind("xmlns", 0) == 0) continue;
        if (a.name.rfind("android:layout_", 0) == 0) continue;
        d.salient_attributes.emplace_back(a.name, a.value);
    }

    auto add_event = [&](const std::string& e) {
        for (const auto& existing : d.events) {
            if (existing == e) return;
        }
        d.events.push_back(e);
    };
    for (const auto& fact : unit.related_interactions) {
        if (fact.kind == InteractionKind::listener) add_event(listener_event_kind(fact.detail));
    }
    auto scan_onclick = [&](const LayoutNode& node, auto&& self) -> void {
        if (node.attr("android:onClick")) add_event("click");
        for (const auto& c : node.children) self(c, self);
    };
    scan_onclick(unit.root, scan_onclick);

    std::string orientation;
    if (const std::string* o = unit.root.attr("android:orientation")) {
        orientation = *o;
    } else if (unit.root.tag == "LinearLayout") {
        orientation = "horizontal";  // platform default
    }
    std::string key_attr;
    for (const char* name : {"android:text", "android:hint", "android:src"}) {
        if (const std::string* v = unit.root.attr(name)) {
            std::string short_name = name;
            key_attr = short_name.substr(8) + " '" + *v + "'";
            break;
        }
    }
    d.purpose = render_purpose(d.component_kind, kind_word_for(unit.root, unit.container),
                               orientation, render_child_summary(d.child_summary), key_attr,
                               render_events(d.events));
    return d;
}

// ---- per-page decomposition ---------------------------------------------------------

namespace detail {

inline void attach_interactions(std::vector<TranslationUnit>& units, const PageRecord& page,
                                const std::string& primary_layout) {
    std::vector<std::set<std::string>> owned(units.size());
    for (size_t i = 0; i < units.size(); ++i) collect_owned_ids(units[i], owned[i]);

    auto unit_owning = [&](const std::string& view_id) -> TranslationUnit* {
        for (size_t i = 0; i < units.size(); ++i) {
            if (owned[i].count(view_id)) return &units[i];
        }
        return nullptr;
    };
    auto root_unit_of = [&](const std::string& layout_name) -> TranslationUnit* {
        for (auto& u : units) {
            if (u.layout_name == layout_name && u.depth == 0) return &u;
        }
        return nullptr;
    };
    auto unit_with_onclick = [&](const std::string& method) -> TranslationUnit* {
        for (auto& u : units) {
            if (find_node_with_onclick(u.root, method)) return &u;
        }
        return nullptr;
    };

    for (const auto& fact : page.interactions) {
        switch (fact.kind) {
            case InteractionKind::view_binding:
            case InteractionKind::listener: {
                if (TranslationUnit* u = unit_owning(fact.subject_id)) {
                    u->related_interactions.push_back(fact);
                }
                break;
            }
            case InteractionKind::content_view: {
                if (TranslationUnit* u = root_unit_of(fact.subject_id)) {
                    u->related_interactions.push_back(fact);
                }
                break;
            }
            case InteractionKind::navigation: {
                NavigationLink link = link_navigation(page, fact);
                TranslationUnit* target = nullptr;
                if (!link.view_id.empty()) target = unit_owning(link.view_id);
                if (!target && !link.method.empty()) target = unit_with_onclick(link.method);
                if (!target) target = root_unit_of(primary_layout);
                if (target) {
                    InteractionFact attached = fact;
                    attached.via_view_id = link.view_id;
                    attached.via_method = link.method;
                    target->related_interactions.push_back(attached);
                }
                break;
            }
        }
    }
}

}  // namespace detail

// Decomposes every layout of one page and fills deterministic descriptions.
inline std::vector<TranslationUnit> decompose(const PageRecord& page, size_t max_unit_lines) {
    std::vector<TranslationUnit> units;
    for (const auto& [layout_name, tree] : page.xml_layouts) {
        std::vector<TranslationUnit> layout_units =
            decompose_layout(page.page_id(), layout_name, tree, max_unit_lines);
        for (auto& u : layout_units) units.push_back(std::move(u));
    }
    std::string primary = page.xml_layouts.empty() ? "" : page.xml_layouts.front().first;
    detail::attach_interactions(units, page, primary);
    for (auto& u : units) u.description = build_description(u);
    return units;
}

// ---- whole-project planning ---------------------------------------------------------

namespace detail {

inline std::vector<std::string> include_targets_of(const LayoutNode& tree) {
    std::vector<std::string> out;
    walk_layout(tree, [&](const LayoutNode& node) {
        if (node.kind == NodeKind::include_ref) {
            std::string t = layout_ref_name(node.attr_or("layout", ""));
            if (!t.empty()) out.push_back(t);
        } else if (node.kind == NodeKind::fragment) {
            std::string t = layout_ref_name(node.attr_or("tools:layout", ""));
            if (!t.empty()) out.push_back(t);
        }
    });
    return out;
}

// DFS cycle check + post-order over the layout include graph.
struct IncludeGraph {
    std::map<std::string, std::vector<std::string>> edges;  // includer -> includees

    // Throws CyclicInclude; otherwise appends a dependency-first ordering of
    // `start` and everything it includes into `order`.
    void visit(const std::string& name, std::vector<std::string>& order,
               std::set<std::string>& done, std::vector<std::string>& stack) const {
        for (size_t i = 0; i < stack.size(); ++i) {
            if (stack[i] == name) {
                std::vector<std::string> cycle(stack.begin() + static_cast<long>(i),
                                               stack.end());
                cycle.push_back(name);
                throw CyclicInclude(cycle);
            }
        }
        if (done.count(name)) return;
        stack.push_back(name);
        auto it = edges.find(name);
        if (it != edges.end()) {
            for (const auto& dep : it->second) visit(dep, order, done, stack);
        }
        stack.pop_back();
        done.insert(name);
        order.push_back(name);
    }
};

}  // namespace detail

struct PlanConfig {
    size_t max_unit_lines = 40;
};

// Whole-project plan: shared (included) layouts first in dependency order,
// then fragment subpages, then activities in manifest order; within any
// layout, children precede their parent. Throws CyclicInclude.
inline TranslationPlan plan(const AndroidProject& project, const PlanConfig& config = {}) {
    detail::IncludeGraph graph;
    std::set<std::string> include_targets;
    for (const auto& [name, tree] : project.layouts) {
        for (const auto& target : detail::include_targets_of(tree)) {
            if (project.find_layout(target)) {
                graph.edges[name].push_back(target);
                include_targets.insert(target);
            }
        }
    }

    // cycle detection covers every layout, reachable or not
    {
        std::vector<std::string> order;
        std::set<std::string> done;
        for (const auto& [name, _] : project.layouts) {
            std::vector<std::string> stack;
            graph.visit(name, order, done, stack);
        }
    }

    // shared layouts in dependency-first order
    std::vector<std::string> shared_order;
    {
        std::set<std::string> done;
        for (const auto& name : include_targets) {  // std::set: lexicographic
            std::vector<std::string> stack;
            std::vector<std::string> order;
            graph.visit(name, order, done, stack);
            for (const auto& n : order) {
                if (include_targets.count(n)) shared_order.push_back(n);
            }
        }
    }

    TranslationPlan result;
    auto add_units = [&](std::vector<TranslationUnit>&& units) {
        for (auto& u : units) {
            result.index.emplace(u.unit_id, result.units.size());
            result.units.push_back(std::move(u));
        }
    };

    for (const auto& name : shared_order) {
        const LayoutNode* tree = project.find_layout(name);
        add_units(decompose_layout("layout:" + name, name, *tree, config.max_unit_lines));
    }
    for (const auto& page : project.subpages) {
        add_units(decompose(page, config.max_unit_lines));
    }
    for (const auto& page : project.pages) {
        add_units(decompose(page, config.max_unit_lines));
    }
    return result;
}

// ---- plan dump -----------------------------------------------------------------

inline ojson description_to_json(const FunctionalDescription& d) {
    ojson j;
    j["component_kind"] = d.component_kind;
    j["purpose"] = d.purpose;
    ojson cs = ojson::array();
    for (const auto& [tag, n] : d.child_summary) cs.push_back(ojson::array({tag, n}));
    j["child_summary"] = std::move(cs);
    ojson sa = ojson::array();
    for (const auto& [name, value] : d.salient_attributes) {
        sa.push_back(ojson::array({name, value}));
    }
    j["salient_attributes"] = std::move(sa);
    j["events"] = d.events;
    return j;
}

inline ojson dump_plan_json(const TranslationPlan& plan) {
    ojson arr = ojson::array();
    for (const auto& u : plan.units) {
        ojson j;
        j["unit_id"] = u.unit_id;
        j["page_id"] = u.page_id;
        j["layout"] = u.layout_name;
        j["span"] = ojson{{"file", u.root.source_span.file},
                          {"begin", u.root.source_span.line_begin},
                          {"end", u.root.source_span.line_end}};
        j["kind"] = u.root.tag;
        j["container"] = u.container;
        j["depth"] = u.depth;
        j["parent"] = u.parent_unit;
        j["children"] = u.child_unit_ids;
        j["description"] = description_to_json(u.description);
        arr.push_back(std::move(j));
    }
    return arr;
}

namespace detail {

inline std::string first_line_trimmed(const std::string& text) {
    size_t pos = 0;
    while (pos < text.size()) {
        size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        size_t begin = pos;
        while (begin < eol && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
        size_t end = eol;
        while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
        if (end > begin) return text.substr(begin, end - begin);
        pos = eol + 1;
    }
    return "";
}

}  // namespace detail

// Backend-assisted description. Only the purpose line is taken from the
// backend; the structural fields are recomputed locally and never trusted.
inline FunctionalDescription describe_unit(const TranslationUnit& unit, const PageRecord& page,
                                           Backend& backend, Warnings* warnings = nullptr) {
    FunctionalDescription local = build_description(unit);

    PromptPayload prompt;
    prompt.unit_xml = unit_prompt_xml(unit);
    prompt.knowledge.emplace_back("page", page.activity_name);

    GenerationRequest req;
    req.role = Role::describe;
    std::tie(req.system_text, req.user_text) = render_prompt(req.role, prompt);
    req.payload = ojson{{"purpose", local.purpose}};

    GenerationResponse res;
    try {
        res = complete(req, backend);
    } catch (const BackendUnavailable& e) {
        if (warnings) {
            warn(*warnings, "describe_fallback",
                 "describe failed for unit " + unit.unit_id + ": " + e.what());
        }
        return local;
    }

    std::string purpose = detail::first_line_trimmed(res.text);
    if (purpose.empty()) {
        if (warnings) {
            warn(*warnings, "describe_empty",
                 "backend returned no description for unit " + unit.unit_id);
        }
        return local;
    }
    if (purpose != local.purpose) {
        if (warnings) {
            warn(*warnings, "describe_divergence",
                 "unit " + unit.unit_id + ": backend purpose differs from the template");
        }
        local.purpose = purpose;
    }
    return local;
}

inline std::string template_describe_renderer(const GenerationRequest& req) {
    if (!req.payload.is_object() || !req.payload.contains("purpose")) {
        throw PayloadIncomplete("payload.purpose");
    }
    return req.payload["purpose"].get<std::string>();
}

}  // namespace uitrans
