#pragma once

// ArkUI code generation for one TranslationUnit. The deterministic renderer
// applies the best mapping entry's attribute map, surfaces every unmapped
// attribute as a TODO comment, and leaves slot placeholders where child units
// are spliced back in at assembly. translate_unit ships the rendered result
// through the gateway so every backend sees the same prompts and the final
// code always comes from the backend response.

#include <algorithm>
#include <cctype>
#include <cstring>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "uitrans/android_parser.hpp"
#include "uitrans/common.hpp"
#include "uitrans/knowledge_base.hpp"
#include "uitrans/llm_gateway.hpp"
#include "uitrans/task_planner.hpp"

namespace uitrans {

enum class GenMode { mapped, inferred };

inline const char* to_string(GenMode m) {
    return m == GenMode::mapped ? "mapped" : "inferred";
}

struct GeneratedComponent {
    std::string unit_id;
    std::string arkui_code;
    std::string component_name;
    std::vector<std::string> used_entry_ids;  // first-use order, no duplicates
    GenMode mode = GenMode::inferred;
    int attempts = 1;
    int attr_total = 0;      // non-xmlns attributes across the unit's own nodes
    int mapped_attrs = 0;
    int todo_attrs = 0;
    int consumed_attrs = 0;  // translated away without a visible output line
    std::vector<std::string> slot_ids;  // as they appear in arkui_code
};

// "com.example.MainActivity" -> "Main"; a bare "Activity" keeps its name.
inline std::string route_name_for(const std::string& page_id) {
    std::string name = simple_name(page_id);
    if (name.size() > 8 && name.ends_with("Activity")) {
        return name.substr(0, name.size() - 8);
    }
    return name;
}

inline std::string component_name_for(const TranslationUnit& unit) {
    return sanitize_identifier(simple_name(unit.root.tag)) + "_" + unit.unit_id.substr(0, 8);
}

inline std::string quote_arkts(std::string_view raw) {
    std::string out = "'";
    for (char c : raw) {
        if (c == '\\' || c == '\'') out += '\\';
        out += c;
    }
    out += '\'';
    return out;
}

namespace detail {

inline bool is_number(std::string_view v) {
    if (v.empty()) return false;
    size_t i = v[0] == '-' ? 1 : 0;
    bool dot = false, digits = false;
    for (; i < v.size(); ++i) {
        if (v[i] == '.') {
            if (dot) return false;
            dot = true;
        } else if (std::isdigit(static_cast<unsigned char>(v[i]))) {
            digits = true;
        } else {
            return false;
        }
    }
    return digits;
}

// "16sp" -> "16"; plain numbers pass through; anything else is not a dimension
inline std::optional<std::string> strip_dimension_literal(std::string_view v) {
    for (const char* unit : {"dip", "dp", "sp", "px"}) {
        size_t len = std::strlen(unit);
        if (v.size() > len && v.ends_with(unit)) {
            std::string_view num = v.substr(0, v.size() - len);
            if (is_number(num)) return std::string(num);
        }
    }
    if (is_number(v)) return std::string(v);
    return std::nullopt;
}

inline std::string literal_value(const std::string& raw) {
    if (is_number(raw) || raw == "true" || raw == "false") return raw;
    return quote_arkts(raw);
}

}  // namespace detail

// Android resource references and literals to ArkTS expressions. References
// without an ArkUI counterpart pass through as quoted literals with a warning.
inline std::string map_resource_ref(const std::string& raw, const ResourceIndex& resources,
                                    Warnings* warnings = nullptr) {
    auto tail = [&](size_t prefix) { return raw.substr(prefix); };
    if (raw.rfind("@string/", 0) == 0) return "$r('app.string." + tail(8) + "')";
    if (raw.rfind("@color/", 0) == 0) return "$r('app.color." + tail(7) + "')";
    if (raw.rfind("@drawable/", 0) == 0) return "$r('app.media." + tail(10) + "')";
    if (raw.rfind("@mipmap/", 0) == 0) return "$r('app.media." + tail(8) + "')";
    if (raw.rfind("@dimen/", 0) == 0) {
        auto it = resources.dimens.find(tail(7));
        if (it != resources.dimens.end()) {
            if (auto n = detail::strip_dimension_literal(it->second)) return *n;
        }
        if (warnings) warn(*warnings, "unmapped_resource", "no usable dimen for " + raw);
        return quote_arkts(raw);
    }
    if (!raw.empty() && raw[0] == '@') {
        if (warnings) warn(*warnings, "unmapped_resource", "unsupported reference " + raw);
        return quote_arkts(raw);
    }
    if (auto n = detail::strip_dimension_literal(raw)) return *n;
    if (raw == "true" || raw == "false") return raw;
    return quote_arkts(raw);
}

namespace detail {

// nullopt means the attribute is fully absorbed and produces no output.
inline std::optional<std::string> apply_transform(const std::string& transform,
                                                  const std::string& raw,
                                                  const ResourceIndex& resources,
                                                  Warnings* warnings) {
    if (transform == "consumed") return std::nullopt;
    if (transform == "identity") return literal_value(raw);
    if (transform == "strip_unit") {
        if (auto n = strip_dimension_literal(raw)) return *n;
        return map_resource_ref(raw, resources, warnings);
    }
    if (transform == "color_ref" || transform == "color_hex") {
        if (is_hex_color(raw)) return quote_arkts(raw);
        return map_resource_ref(raw, resources, warnings);
    }
    if (transform == "resource_ref") return map_resource_ref(raw, resources, warnings);
    if (transform == "dimension") {
        if (raw == "match_parent" || raw == "fill_parent") return std::string("'100%'");
        if (raw == "wrap_content") return std::nullopt;  // ArkUI default
        if (auto n = strip_dimension_literal(raw)) return *n;
        return map_resource_ref(raw, resources, warnings);
    }
    if (transform == "id_ref") return quote_arkts(strip_id_ref(raw));
    if (transform == "visibility") {
        if (raw == "visible") return std::string("Visibility.Visible");
        if (raw == "invisible") return std::string("Visibility.Hidden");
        if (raw == "gone") return std::string("Visibility.None");
        return quote_arkts(raw);
    }
    if (transform == "event_handler") return std::nullopt;  // the event pass owns these
    return literal_value(raw);
}

struct RenderStats {
    int total = 0;
    int consumed = 0;
    int todo = 0;
};

struct RenderScratch {
    const DomainKnowledge* knowledge = nullptr;
    const ResourceIndex* resources = nullptr;
    Warnings* warnings = nullptr;
    RenderStats stats;
    std::vector<std::string> used_entry_ids;
    std::map<const LayoutNode*, std::vector<std::string>> events;
    std::map<const LayoutNode*, std::string> routes;       // navigation target route
    std::map<const LayoutNode*, std::string> click_calls;  // XML onClick method
};

inline void collect_nodes(const LayoutNode& node, std::vector<const LayoutNode*>& out) {
    out.push_back(&node);
    for (const auto& c : node.children) collect_nodes(c, out);
}

// Decides which node carries each event chain before any code is emitted.
// Navigation facts bind to the view named by the enclosing handler when one
// was recovered, then to the first still-free clickable node, then to the
// unit root.
inline void plan_events(const TranslationUnit& unit, RenderScratch& s) {
    std::vector<const LayoutNode*> nodes;
    collect_nodes(unit.root, nodes);

    auto node_by_id = [&](const std::string& id) -> const LayoutNode* {
        for (const LayoutNode* n : nodes) {
            if (const std::string* v = n->attr("android:id"); v && strip_id_ref(*v) == id) {
                return n;
            }
        }
        return nullptr;
    };
    auto add_event = [&](const LayoutNode* n, const std::string& kind) {
        auto& kinds = s.events[n];
        if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end()) kinds.push_back(kind);
    };

    for (const LayoutNode* n : nodes) {
        if (const std::string* m = n->attr("android:onClick")) {
            add_event(n, "click");
            s.click_calls[n] = sanitize_identifier(*m);
        }
    }
    for (const auto& fact : unit.related_interactions) {
        if (fact.kind != InteractionKind::listener) continue;
        if (const LayoutNode* n = node_by_id(fact.subject_id)) {
            add_event(n, listener_event_kind(fact.detail));
        }
    }
    for (const auto& fact : unit.related_interactions) {
        if (fact.kind != InteractionKind::navigation) continue;
        const LayoutNode* target = nullptr;
        if (!fact.via_view_id.empty()) target = node_by_id(fact.via_view_id);
        if (!target && !fact.via_method.empty()) {
            for (const LayoutNode* n : nodes) {
                if (const std::string* m = n->attr("android:onClick");
                    m && *m == fact.via_method) {
                    target = n;
                    break;
                }
            }
        }
        if (!target) {
            for (const LayoutNode* n : nodes) {
                auto it = s.events.find(n);
                bool clickable = it != s.events.end() &&
                                 std::find(it->second.begin(), it->second.end(), "click") !=
                                     it->second.end();
                if (clickable && !s.routes.count(n)) {
                    target = n;
                    break;
                }
            }
        }
        if (!target) target = nodes.front();
        if (s.routes.count(target)) {
            if (s.warnings) {
                warn(*s.warnings, "navigation_collision",
                     "more than one navigation claims the same view in unit " + unit.unit_id +
                         "; keeping route " + s.routes[target]);
            }
            continue;
        }
        s.routes[target] = route_name_for(fact.subject_id);
        add_event(target, "click");
    }
}

// Root nodes use the retrieval winner; inline descendants pick from the
// exact-tag aux rows, preferring the row matching the node's orientation.
inline const MappingEntry* entry_for_node(const LayoutNode& node, const DomainKnowledge& k,
                                          bool is_root) {
    if (is_root) {
        if (!k.resolved) return nullptr;
        for (const auto& e : k.mapping_entries) {
            if (e.source_tag == node.tag) return &e;
        }
        return nullptr;
    }
    auto it = k.aux_entries.find(node.tag);
    if (it == k.aux_entries.end() || it->second.empty()) return nullptr;
    const auto& rows = it->second;
    if (rows.size() == 1) return &rows[0];
    std::string want = node.attr_or("android:orientation", "horizontal") == "vertical"
                           ? "vertical"
                           : "horizontal";
    for (const auto& r : rows) {
        if (r.description.find(want) != std::string::npos) return &r;
    }
    return &rows[0];
}

struct ChainItem {
    std::vector<std::string> lines;  // continuation lines carry their own offset
};

// Appends the node's fully indented lines to `out` and returns the builder name.
inline std::string emit_node(const LayoutNode& node, const TranslationUnit& unit, bool is_root,
                             RenderScratch& s, int indent, std::vector<std::string>& out) {
    const std::string pad(static_cast<size_t>(indent), ' ');
    const std::string inner(static_cast<size_t>(indent) + 2, ' ');

    const MappingEntry* entry = entry_for_node(node, *s.knowledge, is_root);
    std::string builder_name;
    std::set<std::string> kind_consumed;

    if (node.kind == NodeKind::include_ref) {
        std::string layout = layout_ref_name(node.attr_or("layout", ""));
        entry = nullptr;
        if (layout.empty()) {
            if (s.warnings) {
                warn(*s.warnings, "include_without_layout",
                     "<include> without a layout reference in unit " + unit.unit_id);
            }
            builder_name = "Column";
        } else {
            builder_name = camel_case(layout);
            kind_consumed.insert("layout");
        }
    } else if (node.kind == NodeKind::fragment) {
        std::string layout = layout_ref_name(node.attr_or("tools:layout", ""));
        entry = nullptr;
        if (layout.empty()) {
            if (s.warnings) {
                warn(*s.warnings, "fragment_without_layout",
                     "fragment host without tools:layout in unit " + unit.unit_id +
                         "; emitting a placeholder");
            }
            builder_name = "Column";
        } else {
            builder_name = camel_case(layout);
            kind_consumed.insert("tools:layout");
        }
        kind_consumed.insert("android:name");
        kind_consumed.insert("class");
    } else if (entry) {
        builder_name = entry->target_component;
        if (std::find(s.used_entry_ids.begin(), s.used_entry_ids.end(), entry->entry_id) ==
            s.used_entry_ids.end()) {
            s.used_entry_ids.push_back(entry->entry_id);
        }
    } else if (is_root && !s.knowledge->doc_entries.empty()) {
        builder_name = s.knowledge->doc_entries.front().component_name;
    } else {
        builder_name = "Column";
    }

    std::vector<std::string> positional;
    std::vector<std::pair<std::string, std::string>> named;
    std::vector<ChainItem> chains;
    std::vector<std::string> todos;

    for (const auto& attr : node.attributes) {
        if (attr.name.rfind("xmlns", 0) == 0) continue;
        ++s.stats.total;
        if (kind_consumed.count(attr.name)) {
            ++s.stats.consumed;
            continue;
        }
        if (attr.name == "android:onClick") {
            ++s.stats.consumed;  // surfaces through the event pass
            continue;
        }
        const AttributeMapRow* row = nullptr;
        if (entry) {
            for (const auto& r : entry->attribute_map) {
                if (r.android_attr == attr.name) {
                    row = &r;
                    break;
                }
            }
        }
        if (!row) {
            todos.push_back("// TODO(unmapped): " + attr.name + "=\"" + attr.value + "\"");
            ++s.stats.todo;
            continue;
        }
        if (row->arkui.empty()) {
            ++s.stats.consumed;
            continue;
        }
        std::optional<std::string> value =
            apply_transform(row->transform, attr.value, *s.resources, s.warnings);
        if (!value) {
            ++s.stats.consumed;
            continue;
        }
        if (row->arkui == "@arg") {
            positional.push_back(*value);
        } else if (row->arkui.rfind("@arg:", 0) == 0) {
            named.emplace_back(row->arkui.substr(5), *value);
        } else if (row->arkui[0] == '.') {
            chains.push_back(ChainItem{{row->arkui + "(" + *value + ")"}});
        } else {
            todos.push_back("// TODO(unmapped): " + attr.name + "=\"" + attr.value + "\"");
            ++s.stats.todo;
            if (s.warnings) {
                warn(*s.warnings, "bad_attribute_map",
                     entry->entry_id + " maps " + attr.name + " to unusable target " +
                         row->arkui);
            }
        }
    }

    if (auto ev = s.events.find(&node); ev != s.events.end()) {
        std::vector<std::string> ordered;
        for (const char* k : {"click", "long_press", "touch"}) {
            if (std::find(ev->second.begin(), ev->second.end(), k) != ev->second.end()) {
                ordered.push_back(k);
            }
        }
        for (const auto& k : ev->second) {
            if (std::find(ordered.begin(), ordered.end(), k) == ordered.end()) {
                ordered.push_back(k);
            }
        }
        for (const auto& kind : ordered) {
            if (kind == "click") {
                std::string body;
                if (auto route = s.routes.find(&node); route != s.routes.end()) {
                    body = "router.pushUrl({ url: 'pages/" + route->second + "' })";
                } else if (auto call = s.click_calls.find(&node); call != s.click_calls.end()) {
                    body = "this." + call->second + "()";
                }
                if (body.empty()) {
                    chains.push_back(ChainItem{{".onClick(() => {})"}});
                } else {
                    chains.push_back(ChainItem{{".onClick(() => {", "  " + body, "})"}});
                }
            } else if (kind == "long_press") {
                chains.push_back(ChainItem{{".gesture(LongPressGesture().onAction(() => {}))"}});
            } else if (kind == "touch") {
                chains.push_back(ChainItem{{".onTouch((event) => {})"}});
            } else {
                todos.push_back("// TODO(event): " + kind);
            }
        }
    }

    std::vector<std::string> body;
    if (is_root && unit.container) {
        for (const auto& child_id : unit.child_unit_ids) {
            body.push_back(inner + "/*__SLOT:" + child_id + "__*/");
        }
    } else {
        for (const auto& child : node.children) {
            emit_node(child, unit, false, s, indent + 2, body);
        }
    }

    std::string args;
    for (const auto& p : positional) {
        if (!args.empty()) args += ", ";
        args += p;
    }
    if (!named.empty()) {
        std::string obj = "{ ";
        for (size_t i = 0; i < named.size(); ++i) {
            if (i) obj += ", ";
            obj += named[i].first + ": " + named[i].second;
        }
        obj += " }";
        if (!args.empty()) args += ", ";
        args += obj;
    }
    std::string builder = builder_name + "(" + args + ")";

    if (body.empty() && chains.size() == 1 && chains[0].lines.size() == 1) {
        out.push_back(pad + builder + chains[0].lines[0]);
    } else if (body.empty()) {
        out.push_back(pad + builder);
        for (const auto& c : chains) {
            for (const auto& line : c.lines) out.push_back(inner + line);
        }
    } else {
        out.push_back(pad + builder + " {");
        for (auto& line : body) out.push_back(std::move(line));
        out.push_back(pad + "}");
        for (const auto& c : chains) {
            for (const auto& line : c.lines) out.push_back(inner + line);
        }
    }
    for (const auto& t : todos) out.push_back(inner + t);
    return builder_name;
}

struct RenderResult {
    std::string code;
    std::string root_component;
    std::vector<std::string> used_entry_ids;
    RenderStats stats;
};

inline RenderResult render_unit(const TranslationUnit& unit, const DomainKnowledge& knowledge,
                                const ResourceIndex& resources, Warnings* warnings) {
    RenderScratch s;
    s.knowledge = &knowledge;
    s.resources = &resources;
    s.warnings = warnings;
    plan_events(unit, s);

    std::vector<std::string> lines;
    RenderResult r;
    r.root_component = emit_node(unit.root, unit, true, s, 0, lines);
    for (const auto& l : lines) {
        r.code += l;
        r.code += '\n';
    }
    r.used_entry_ids = std::move(s.used_entry_ids);
    r.stats = s.stats;
    return r;
}

}  // namespace detail

inline std::vector<std::string> extract_slot_ids(const std::string& code) {
    std::vector<std::string> ids;
    size_t pos = 0;
    while ((pos = code.find("/*__SLOT:", pos)) != std::string::npos) {
        size_t begin = pos + 9;
        size_t end = code.find("__*/", begin);
        if (end == std::string::npos) break;
        ids.push_back(code.substr(begin, end - begin));
        pos = end + 4;
    }
    return ids;
}

inline int count_todo_markers(const std::string& code) {
    int n = 0;
    size_t pos = 0;
    while ((pos = code.find("// TODO(unmapped):", pos)) != std::string::npos) {
        ++n;
        pos += 18;
    }
    return n;
}

// First identifier that opens a builder line; empty when the code has none.
inline std::string detect_root_component(const std::string& code) {
    size_t i = 0;
    while (i <= code.size()) {
        size_t eol = code.find('\n', i);
        if (eol == std::string::npos) eol = code.size();
        size_t j = i;
        while (j < eol && std::isspace(static_cast<unsigned char>(code[j]))) ++j;
        if (j < eol &&
            (std::isalpha(static_cast<unsigned char>(code[j])) || code[j] == '_')) {
            size_t k = j;
            while (k < eol &&
                   (std::isalnum(static_cast<unsigned char>(code[k])) || code[k] == '_')) {
                ++k;
            }
            return code.substr(j, k - j);
        }
        i = eol + 1;
    }
    return "";
}

inline std::vector<std::pair<std::string, std::string>> knowledge_prompt_items(
    const DomainKnowledge& k) {
    std::vector<std::pair<std::string, std::string>> items;
    for (const auto& e : k.mapping_entries) {
        std::string text = e.description;
        if (!e.target_example.empty()) text += "\n" + e.target_example;
        items.emplace_back(e.entry_id, text);
    }
    for (const auto& d : k.doc_entries) {
        items.emplace_back(d.doc_id, d.functional_description);
    }
    return items;
}

inline GeneratedComponent translate_unit(const TranslationUnit& unit,
                                         const DomainKnowledge& knowledge, Backend& backend,
                                         const ResourceIndex& resources,
                                         Warnings* warnings = nullptr,
                                         const std::string& feedback = "") {
    detail::RenderResult local = detail::render_unit(unit, knowledge, resources, warnings);

    PromptPayload prompt;
    prompt.unit_xml = unit_prompt_xml(unit);
    prompt.description = unit.description.purpose;
    prompt.knowledge = knowledge_prompt_items(knowledge);
    prompt.feedback = feedback;

    GenerationRequest req;
    req.role = Role::generate;
    std::tie(req.system_text, req.user_text) = render_prompt(req.role, prompt);
    req.payload = ojson{{"code", local.code}};
    GenerationResponse res = complete(req, backend);

    GeneratedComponent out;
    out.unit_id = unit.unit_id;
    out.arkui_code = res.text;
    out.component_name = component_name_for(unit);
    out.used_entry_ids = std::move(local.used_entry_ids);
    out.mode = knowledge.resolved ? GenMode::mapped : GenMode::inferred;
    out.attr_total = local.stats.total;
    out.consumed_attrs = local.stats.consumed;
    out.todo_attrs = count_todo_markers(res.text);
    out.mapped_attrs = std::max(0, out.attr_total - out.consumed_attrs - out.todo_attrs);
    out.slot_ids = extract_slot_ids(res.text);
    return out;
}

// Renderer the template backend dispatches to for Role::generate: the caller
// computed the translation locally and shipped it in the request payload.
inline std::string template_generate_renderer(const GenerationRequest& req) {
    if (!req.payload.is_object() || !req.payload.contains("code")) {
        throw PayloadIncomplete("payload.code");
    }
    return req.payload["code"].get<std::string>();
}

}  // namespace uitrans
