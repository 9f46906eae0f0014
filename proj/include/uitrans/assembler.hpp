#pragma once

// Splices generated unit code into whole pages, orders them into a HarmonyOS
// project tree, and owns the emitted file map. The well-formedness checker
// lives in arkui_check.hpp so the reflector can use it too.

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "uitrans/android_parser.hpp"
#include "uitrans/arkui_check.hpp"
#include "uitrans/common.hpp"
#include "uitrans/generator.hpp"
#include "uitrans/task_planner.hpp"

namespace uitrans {

class DuplicateStructName : public UiTransError {
public:
    explicit DuplicateStructName(const std::string& name)
        : UiTransError("struct name still colliding after disambiguation: " + name) {}
};

struct ArkUIPage {
    std::string page_id;
    std::string struct_name;
    std::string ets_source;
    std::string route_name;  // empty for shared-layout components
    std::vector<std::string> child_components;

    bool is_component() const { return route_name.empty(); }
};

struct HarmonyProject {
    std::vector<ArkUIPage> pages;
    std::map<std::string, std::string> resource_files;  // path -> content
    std::vector<std::string> route_table;
    Warnings warnings;
};

inline constexpr std::string_view kSharedLayoutPrefix = "layout:";

namespace detail {

inline bool trivial_unit(const TranslationUnit& u) {
    return !u.container && u.root.subtree_size() == 1;
}

inline std::string indent_block(const std::string& code, const std::string& indent) {
    std::string out;
    size_t pos = 0;
    while (pos < code.size()) {
        size_t eol = code.find('\n', pos);
        if (eol == std::string::npos) eol = code.size();
        if (eol > pos) out += indent + code.substr(pos, eol - pos);
        out += "\n";
        pos = eol + 1;
    }
    return out;
}

// Every handler invoked as `this.<name>(` needs a method on the struct.
inline std::vector<std::string> handler_names(const std::string& code) {
    std::vector<std::string> names;
    size_t pos = 0;
    while ((pos = code.find("this.", pos)) != std::string::npos) {
        size_t begin = pos + 5;
        size_t end = begin;
        while (end < code.size() && (std::isalnum(static_cast<unsigned char>(code[end])) ||
                                     code[end] == '_' || code[end] == '$')) {
            ++end;
        }
        if (end > begin && end < code.size() && code[end] == '(') {
            std::string name = code.substr(begin, end - begin);
            if (std::find(names.begin(), names.end(), name) == names.end()) {
                names.push_back(name);
            }
        }
        pos = end;
    }
    return names;
}

inline std::string struct_source(const std::string& decorators, const std::string& name,
                                 const std::string& body) {
    std::string out = decorators + "struct " + name + " {\n" + "  build() {\n" +
                      indent_block(body, "    ") + "  }\n";
    for (const auto& handler : handler_names(body)) {
        out += "\n  " + handler + "() {\n    // TODO(handler): " + handler + "\n  }\n";
    }
    out += "}\n";
    return out;
}

// Replaces each slot line with the child's resolved code (1-node children)
// or an invocation of the child's struct (everything larger).
inline std::string fill_slots(const std::string& code,
                              const std::map<std::string, const TranslationUnit*>& units,
                              const std::map<std::string, std::string>& resolved,
                              const std::map<std::string, const GeneratedComponent*>& generated) {
    std::string out;
    size_t pos = 0;
    while (pos < code.size()) {
        size_t eol = code.find('\n', pos);
        if (eol == std::string::npos) eol = code.size();
        std::string line = code.substr(pos, eol - pos);
        size_t marker = line.find("/*__SLOT:");
        if (marker != std::string::npos) {
            size_t id_begin = marker + 9;
            size_t id_end = line.find("__*/", id_begin);
            std::string slot_id = line.substr(id_begin, id_end - id_begin);
            std::string indent = line.substr(0, marker);
            auto unit_it = units.find(slot_id);
            auto code_it = resolved.find(slot_id);
            if (unit_it == units.end() || code_it == resolved.end()) {
                throw MissingUnit(slot_id);
            }
            if (trivial_unit(*unit_it->second)) {
                out += indent_block(code_it->second, indent);
            } else {
                out += indent + generated.at(slot_id)->component_name + "()\n";
            }
        } else {
            out += line;
            out += "\n";
        }
        pos = eol + 1;
    }
    return out;
}

// Component layouts referenced by include/fragment units, in first-use order.
inline std::vector<std::string> referenced_components(
    const std::vector<const TranslationUnit*>& units) {
    std::vector<std::string> out;
    for (const TranslationUnit* u : units) {
        std::string target;
        if (u->root.kind == NodeKind::include_ref) {
            target = layout_ref_name(u->root.attr_or("layout", ""));
        } else if (u->root.kind == NodeKind::fragment) {
            target = layout_ref_name(u->root.attr_or("tools:layout", ""));
        }
        if (target.empty()) continue;
        std::string name = camel_case(target);
        if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
    }
    return out;
}

}  // namespace detail

inline std::string component_struct_name(const std::string& layout_name) {
    return camel_case(layout_name);
}

// One page (or shared-layout component) from its generated units. `units`
// must be the page's own units in plan order, children before parents.
// `known_components` lists the shared-layout structs that exist; references
// to anything else stay in the code but are flagged instead of imported.
inline ArkUIPage assemble_page(const std::vector<const TranslationUnit*>& units,
                               const std::map<std::string, const GeneratedComponent*>& generated,
                               const PageRecord& page,
                               const std::set<std::string>& known_components = {},
                               Warnings* warnings = nullptr) {
    ArkUIPage out;
    out.page_id = page.page_id();
    bool component_page = out.page_id.rfind(kSharedLayoutPrefix, 0) == 0;
    if (component_page) {
        out.struct_name =
            component_struct_name(out.page_id.substr(kSharedLayoutPrefix.size()));
    } else {
        out.struct_name = page.is_subpage ? sanitize_identifier(simple_name(out.page_id))
                                          : route_name_for(out.page_id);
        out.route_name = out.struct_name;
    }

    std::map<std::string, const TranslationUnit*> unit_by_id;
    for (const TranslationUnit* u : units) unit_by_id[u->unit_id] = u;

    std::map<std::string, std::string> resolved;
    for (const TranslationUnit* u : units) {
        auto it = generated.find(u->unit_id);
        if (it == generated.end()) throw MissingUnit(u->unit_id);
        resolved[u->unit_id] =
            detail::fill_slots(it->second->arkui_code, unit_by_id, resolved, generated);
    }

    std::string primary_layout;
    if (component_page) {
        primary_layout = units.empty() ? "" : units.front()->layout_name;
    } else if (!page.xml_layouts.empty()) {
        primary_layout = page.xml_layouts.front().first;
    }

    const TranslationUnit* root = nullptr;
    for (const TranslationUnit* u : units) {
        if (!u->parent_unit.empty()) continue;
        if (u->layout_name == primary_layout && root == nullptr) {
            root = u;
        } else if (u->layout_name != primary_layout && warnings) {
            warn(*warnings, "unused_layout",
                 "layout " + u->layout_name + " of page " + out.page_id +
                     " is not the primary layout; skipped");
        }
    }
    if (root == nullptr) throw MissingUnit(out.page_id + " (no root unit)");

    // structs for the non-trivial child units reachable from the root
    std::vector<const TranslationUnit*> struct_units;
    auto collect = [&](const TranslationUnit* u, auto&& self) -> void {
        for (const auto& child_id : u->child_unit_ids) {
            auto it = unit_by_id.find(child_id);
            if (it == unit_by_id.end()) throw MissingUnit(child_id);
            if (!detail::trivial_unit(*it->second)) {
                struct_units.push_back(it->second);
                self(it->second, self);
            }
        }
    };
    collect(root, collect);

    std::vector<std::string> refs = detail::referenced_components(units);
    std::string body = resolved.at(root->unit_id);

    std::string source;
    for (const auto& name : refs) {
        if (!known_components.count(name)) {
            if (warnings) {
                warn(*warnings, "missing_component",
                     "page " + out.page_id + " references component " + name +
                         " which was not assembled");
            }
            continue;
        }
        std::string bound = name;
        if (name == out.struct_name) {
            // the include target shares this page's name; alias the import and
            // retarget the invocations so both structs can coexist
            bound = name + "Component";
            if (warnings) {
                warn(*warnings, "duplicate_struct",
                     "component " + name + " collides with page " + out.struct_name +
                         "; imported as " + bound);
            }
            const std::string call = name + "()";
            const std::string replacement = bound + "()";
            size_t at = 0;
            while ((at = body.find(call, at)) != std::string::npos) {
                body.replace(at, call.size(), replacement);
                at += replacement.size();
            }
            source += "import { " + name + " as " + bound + " } from '../components/" +
                      name + "'\n";
        } else {
            source += "import { " + name + " } from '" +
                      (component_page ? "./" : "../components/") + name + "'\n";
        }
        out.child_components.push_back(bound);
    }
    if (body.find("router.") != std::string::npos) {
        source = "import router from '@ohos.router'\n" + source;
    }
    if (!source.empty()) source += "\n";

    if (component_page) {
        source += detail::struct_source("@Component\nexport ", out.struct_name, body);
    } else {
        source += detail::struct_source("@Entry\n@Component\n", out.struct_name, body);
    }
    for (const TranslationUnit* u : struct_units) {
        source += "\n" + detail::struct_source("@Component\n",
                                               generated.at(u->unit_id)->component_name,
                                               resolved.at(u->unit_id));
        out.child_components.push_back(generated.at(u->unit_id)->component_name);
    }

    out.ets_source = std::move(source);
    return out;
}

namespace detail {

inline std::string resource_json(const char* key,
                                 const std::map<std::string, std::string>& values,
                                 std::string (*convert)(const std::string&)) {
    ojson arr = ojson::array();
    for (const auto& [name, value] : values) {
        arr.push_back(ojson{{"name", name}, {"value", convert ? convert(value) : value}});
    }
    ojson root;
    root[key] = std::move(arr);
    return root.dump(2) + "\n";
}

inline std::string to_arkui_dimension(const std::string& v) {
    auto ends_with = [&](std::string_view suffix) {
        return v.size() > suffix.size() &&
               v.compare(v.size() - suffix.size(), suffix.size(), suffix) == 0;
    };
    if (ends_with("dip")) return v.substr(0, v.size() - 3) + "vp";
    if (ends_with("dp")) return v.substr(0, v.size() - 2) + "vp";
    if (ends_with("sp")) return v.substr(0, v.size() - 2) + "fp";
    return v;
}

}  // namespace detail

// Whole project tree. `pages` come in route order (launcher first); shared
// layout components may appear anywhere in the list and are not routed.
inline HarmonyProject assemble_project(std::vector<ArkUIPage> pages,
                                       const AndroidProject& project,
                                       const ResourceIndex& resources) {
    HarmonyProject out;

    // launcher first, components excluded from routing
    std::string launcher;
    for (const auto& a : project.manifest.activities) {
        if (a.is_launcher) launcher = route_name_for(a.name);
    }
    std::stable_sort(pages.begin(), pages.end(), [&](const ArkUIPage& x, const ArkUIPage& y) {
        auto rank = [&](const ArkUIPage& p) {
            if (p.is_component()) return 2;
            return p.route_name == launcher ? 0 : 1;
        };
        return rank(x) < rank(y);
    });

    // route and struct names must be unique; later claimants get a suffix
    std::set<std::string> taken;
    for (auto& page : pages) {
        std::string base = page.struct_name;
        std::string name = base;
        int serial = 2;
        while (taken.count(name)) name = base + std::to_string(serial++);
        if (name != base) {
            if (taken.count(name)) throw DuplicateStructName(name);
            warn(out.warnings, "duplicate_struct",
                 "struct " + base + " renamed to " + name + " for page " + page.page_id);
            const std::string decl = "struct " + base + " {";
            size_t at = page.ets_source.find(decl);
            if (at != std::string::npos) {
                page.ets_source.replace(at, decl.size(), "struct " + name + " {");
            }
            page.struct_name = name;
            if (!page.route_name.empty()) page.route_name = name;
        }
        taken.insert(name);
    }

    // a component importing another that ends up missing, or cycles among
    // components, degrade to warnings; emission always proceeds
    std::set<std::string> component_names;
    for (const auto& page : pages) {
        if (page.is_component()) component_names.insert(page.struct_name);
    }
    std::map<std::string, std::vector<std::string>> edges;
    for (const auto& page : pages) {
        for (const auto& dep : page.child_components) {
            if (component_names.count(dep) && dep != page.struct_name) {
                edges[page.struct_name].push_back(dep);
            }
        }
    }
    {
        std::set<std::string> done;
        auto dfs = [&](const std::string& name, std::vector<std::string>& stack,
                       auto&& self) -> void {
            if (std::find(stack.begin(), stack.end(), name) != stack.end()) {
                warn(out.warnings, "component_cycle",
                     "component dependency cycle through " + name + "; emitting anyway");
                return;
            }
            if (done.count(name)) return;
            stack.push_back(name);
            for (const auto& dep : edges[name]) self(dep, stack, self);
            stack.pop_back();
            done.insert(name);
        };
        for (const auto& page : pages) {
            std::vector<std::string> stack;
            dfs(page.struct_name, stack, dfs);
        }
    }

    for (const auto& page : pages) {
        if (!page.is_component()) out.route_table.push_back(page.route_name);
    }

    out.resource_files["entry/src/main/resources/base/element/string.json"] =
        detail::resource_json("string", resources.strings, nullptr);
    out.resource_files["entry/src/main/resources/base/element/color.json"] =
        detail::resource_json("color", resources.colors, nullptr);
    out.resource_files["entry/src/main/resources/base/element/float.json"] =
        detail::resource_json("float", resources.dimens, detail::to_arkui_dimension);

    for (const auto& [name, rel_path] : resources.drawables) {
        std::filesystem::path src = project.root_path / rel_path;
        std::string ext = src.extension().string();
        std::string content;
        if (std::filesystem::exists(src)) {
            content = read_file(src);
        } else {
            warn(out.warnings, "missing_drawable",
                 "drawable " + name + " not found at " + rel_path);
            continue;
        }
        out.resource_files["entry/src/main/resources/base/media/" + name + ext] =
            std::move(content);
    }

    ojson main_pages;
    ojson srcs = ojson::array();
    for (const auto& route : out.route_table) srcs.push_back("pages/" + route);
    main_pages["src"] = std::move(srcs);
    out.resource_files["entry/src/main/resources/base/profile/main_pages.json"] =
        main_pages.dump(2) + "\n";

    out.pages = std::move(pages);
    return out;
}

inline std::string page_file_path(const ArkUIPage& page) {
    if (page.is_component()) {
        return "entry/src/main/ets/components/" + page.struct_name + ".ets";
    }
    return "entry/src/main/ets/pages/" + page.route_name + ".ets";
}

// Full deterministic file map: pages plus resources.
inline std::map<std::string, std::string> emit_files(const HarmonyProject& project) {
    std::map<std::string, std::string> files = project.resource_files;
    for (const auto& page : project.pages) files[page_file_path(page)] = page.ets_source;
    return files;
}

inline void write_project(const HarmonyProject& project, const std::filesystem::path& out_dir,
                          bool force = false) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (fs::exists(out_dir) && !fs::is_directory(out_dir)) {
        throw IoError(out_dir.string() + " exists and is not a directory");
    }
    if (fs::exists(out_dir) && !fs::is_empty(out_dir, ec) && !force) {
        throw IoError(out_dir.string() + " is not empty; pass --force to overwrite");
    }
    for (const auto& [rel, content] : emit_files(project)) {
        fs::path target = out_dir / rel;
        fs::create_directories(target.parent_path(), ec);
        if (ec) throw IoError("cannot create " + target.parent_path().string());
        write_file(target, content);
    }
}

}  // namespace uitrans
