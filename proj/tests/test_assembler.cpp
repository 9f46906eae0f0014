#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "uitrans/assembler.hpp"
#include "uitrans/knowledge_base.hpp"
#include "uitrans/template_backend.hpp"

using namespace uitrans;
namespace fs = std::filesystem;

namespace {

KnowledgeBase load_seeded() {
    return load_stores(fs::path(UITRANS_DATA) / "mapping_table.json",
                       fs::path(UITRANS_DATA) / "arkui_corpus.json");
}

std::vector<TranslationUnit> units_of(const std::string& xml, const std::string& layout,
                                      const std::string& page_id, size_t max_lines = 40) {
    LayoutNode root = parse_layout(xml, layout + ".xml");
    return decompose_layout(page_id, layout, root, max_lines);
}

struct Translated {
    std::vector<TranslationUnit> units;
    std::map<std::string, GeneratedComponent> components;

    std::vector<const TranslationUnit*> unit_ptrs() const {
        std::vector<const TranslationUnit*> out;
        for (const auto& u : units) out.push_back(&u);
        return out;
    }
    std::map<std::string, const GeneratedComponent*> component_ptrs() const {
        std::map<std::string, const GeneratedComponent*> out;
        for (const auto& [id, c] : components) out.emplace(id, &c);
        return out;
    }
};

Translated translate_all(std::vector<TranslationUnit> units, const KnowledgeBase& kb,
                         Backend& backend) {
    Translated t;
    t.units = std::move(units);
    for (const auto& u : t.units) {
        DomainKnowledge knowledge = query_mapping(u, kb);
        t.components.emplace(u.unit_id, translate_unit(u, knowledge, backend, {}));
    }
    return t;
}

PageRecord activity_page(const std::string& fqcn, const std::string& layout) {
    PageRecord page;
    page.activity_name = fqcn;
    page.xml_layouts.emplace_back(layout, LayoutNode{});
    return page;
}

fs::path fresh_dir(const std::string& hint) {
    static int counter = 0;
    fs::path dir = fs::temp_directory_path() /
                   ("uitrans_asm_" + hint + "_" + std::to_string(counter++));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("a single-unit page becomes one entry struct") {
    KnowledgeBase kb = load_seeded();
    auto backend = make_template_backend();
    auto t = translate_all(
        units_of("<TextView android:text=\"@string/hi\" android:textSize=\"16sp\"/>",
                 "activity_main", "com.example.MainActivity"),
        kb, backend);

    ArkUIPage page = assemble_page(t.unit_ptrs(), t.component_ptrs(),
                                   activity_page("com.example.MainActivity", "activity_main"));
    CHECK(page.struct_name == "Main");
    CHECK(page.route_name == "Main");
    CHECK(page.child_components.empty());
    CHECK(page.ets_source ==
          "@Entry\n"
          "@Component\n"
          "struct Main {\n"
          "  build() {\n"
          "    Text($r('app.string.hi')).fontSize(16)\n"
          "  }\n"
          "}\n");
    CHECK(check_wellformed(page.ets_source).empty());
}

TEST_CASE("one-node children inline into the parent slot") {
    KnowledgeBase kb = load_seeded();
    auto backend = make_template_backend();
    auto t = translate_all(
        units_of("<LinearLayout android:orientation=\"vertical\">"
                 "<TextView android:text=\"a\" android:textSize=\"12sp\"/>"
                 "<TextView android:text=\"b\" android:textSize=\"12sp\"/>"
                 "</LinearLayout>",
                 "activity_main", "com.example.MainActivity", 5),
        kb, backend);
    REQUIRE(t.units.size() == 3);

    ArkUIPage page = assemble_page(t.unit_ptrs(), t.component_ptrs(),
                                   activity_page("com.example.MainActivity", "activity_main"));
    CHECK(page.ets_source ==
          "@Entry\n"
          "@Component\n"
          "struct Main {\n"
          "  build() {\n"
          "    Column() {\n"
          "      Text('a').fontSize(12)\n"
          "      Text('b').fontSize(12)\n"
          "    }\n"
          "  }\n"
          "}\n");
    CHECK(page.child_components.empty());
    CHECK(extract_slot_ids(page.ets_source).empty());
    CHECK(check_wellformed(page.ets_source).empty());
}

TEST_CASE("container children become invoked child structs") {
    KnowledgeBase kb = load_seeded();
    auto backend = make_template_backend();
    auto t = translate_all(
        units_of("<LinearLayout android:orientation=\"vertical\">"
                 "<LinearLayout android:orientation=\"horizontal\">"
                 "<TextView android:text=\"a\" android:textSize=\"12sp\"/>"
                 "<TextView android:text=\"b\" android:textSize=\"12sp\"/>"
                 "</LinearLayout>"
                 "<TextView android:text=\"c\" android:textSize=\"12sp\"/>"
                 "</LinearLayout>",
                 "activity_main", "com.example.MainActivity", 4),
        kb, backend);

    ArkUIPage page = assemble_page(t.unit_ptrs(), t.component_ptrs(),
                                   activity_page("com.example.MainActivity", "activity_main"));
    const TranslationUnit* inner = nullptr;
    for (const auto& u : t.units) {
        if (u.container && !u.parent_unit.empty()) inner = &u;
    }
    REQUIRE(inner != nullptr);
    std::string inner_name = t.components.at(inner->unit_id).component_name;

    CHECK(page.ets_source.find("      " + inner_name + "()\n") != std::string::npos);
    CHECK(page.ets_source.find("@Component\nstruct " + inner_name + " {\n") !=
          std::string::npos);
    CHECK(page.child_components == std::vector<std::string>{inner_name});
    CHECK(extract_slot_ids(page.ets_source).empty());
    CHECK(check_wellformed(page.ets_source).empty());
}

TEST_CASE("shared layouts assemble to exported components and pages import them") {
    KnowledgeBase kb = load_seeded();
    auto backend = make_template_backend();

    auto header = translate_all(
        units_of("<TextView android:text=\"@string/hi\" android:textSize=\"16sp\"/>",
                 "header", "layout:header"),
        kb, backend);
    PageRecord pseudo;
    pseudo.activity_name = "layout:header";
    pseudo.xml_layouts.emplace_back("header", LayoutNode{});
    ArkUIPage component = assemble_page(header.unit_ptrs(), header.component_ptrs(), pseudo);
    CHECK(component.is_component());
    CHECK(component.struct_name == "Header");
    CHECK(component.ets_source.find("@Component\nexport struct Header {\n") == 0);
    CHECK(check_wellformed(component.ets_source).empty());

    auto main = translate_all(
        units_of("<LinearLayout android:orientation=\"vertical\">"
                 "<include layout=\"@layout/header\"/>"
                 "<TextView android:text=\"a\" android:textSize=\"12sp\"/>"
                 "</LinearLayout>",
                 "activity_main", "com.example.MainActivity", 40),
        kb, backend);
    ArkUIPage page = assemble_page(main.unit_ptrs(), main.component_ptrs(),
                                   activity_page("com.example.MainActivity", "activity_main"),
                                   {"Header"});
    CHECK(page.ets_source.find("import { Header } from '../components/Header'\n") == 0);
    CHECK(page.ets_source.find("Header()") != std::string::npos);
    CHECK(page.child_components == std::vector<std::string>{"Header"});
    CHECK(check_wellformed(page.ets_source).empty());

    Warnings warnings;
    ArkUIPage orphan = assemble_page(main.unit_ptrs(), main.component_ptrs(),
                                     activity_page("com.example.MainActivity", "activity_main"),
                                     {}, &warnings);
    CHECK(orphan.ets_source.find("import {") == std::string::npos);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].kind == "missing_component");
}

TEST_CASE("referenced handlers get stub methods") {
    KnowledgeBase kb = load_seeded();
    auto backend = make_template_backend();
    auto t = translate_all(
        units_of("<Button android:text=\"@string/ok\" android:onClick=\"sendMessage\"/>",
                 "activity_main", "com.example.MainActivity"),
        kb, backend);

    ArkUIPage page = assemble_page(t.unit_ptrs(), t.component_ptrs(),
                                   activity_page("com.example.MainActivity", "activity_main"));
    CHECK(page.ets_source.find("\n  sendMessage() {\n"
                               "    // TODO(handler): sendMessage\n"
                               "  }\n") != std::string::npos);
    CHECK(check_wellformed(page.ets_source).empty());
}

TEST_CASE("router usage pulls in the router import") {
    KnowledgeBase kb = load_seeded();
    auto backend = make_template_backend();
    auto t = translate_all(units_of("<Button android:text=\"@string/ok\"/>", "activity_main",
                                    "com.example.MainActivity"),
                           kb, backend);
    GeneratedComponent& c = t.components.begin()->second;
    c.arkui_code =
        "Button($r('app.string.ok'))\n"
        "  .onClick(() => {\n"
        "    router.pushUrl({ url: 'pages/Detail' })\n"
        "  })\n";

    ArkUIPage page = assemble_page(t.unit_ptrs(), t.component_ptrs(),
                                   activity_page("com.example.MainActivity", "activity_main"));
    CHECK(page.ets_source.find("import router from '@ohos.router'\n") == 0);
    CHECK(check_wellformed(page.ets_source).empty());
}

TEST_CASE("a slot without its child unit is an error naming the unit") {
    KnowledgeBase kb = load_seeded();
    auto backend = make_template_backend();
    auto t = translate_all(
        units_of("<LinearLayout android:orientation=\"vertical\">"
                 "<TextView android:text=\"a\" android:textSize=\"12sp\"/>"
                 "<TextView android:text=\"b\" android:textSize=\"12sp\"/>"
                 "</LinearLayout>",
                 "activity_main", "com.example.MainActivity", 5),
        kb, backend);
    std::string dropped = t.units[0].unit_id;
    auto generated = t.component_ptrs();
    generated.erase(dropped);
    std::vector<const TranslationUnit*> units = t.unit_ptrs();
    units.erase(units.begin());

    try {
        assemble_page(units, generated,
                      activity_page("com.example.MainActivity", "activity_main"));
        FAIL("expected MissingUnit");
    } catch (const MissingUnit& e) {
        CHECK(e.unit_id() == dropped);
    }
}

TEST_CASE("assemble_project orders routes launcher first and emits resources") {
    KnowledgeBase kb = load_seeded();
    auto backend = make_template_backend();

    AndroidProject project;
    project.manifest.package_name = "com.example";
    project.manifest.activities = {{"com.example.DetailActivity", false},
                                   {"com.example.MainActivity", true}};

    auto make_page = [&](const std::string& fqcn, const std::string& layout) {
        auto t = translate_all(
            units_of("<TextView android:text=\"@string/hi\" android:textSize=\"16sp\"/>",
                     layout, fqcn),
            kb, backend);
        return assemble_page(t.unit_ptrs(), t.component_ptrs(), activity_page(fqcn, layout));
    };
    std::vector<ArkUIPage> pages = {make_page("com.example.DetailActivity", "activity_detail"),
                                    make_page("com.example.MainActivity", "activity_main")};

    ResourceIndex resources;
    resources.strings = {{"bye", "Goodbye"}, {"hi", "Hello"}, {"ok", "OK"}};
    resources.colors = {{"primary", "#FF0000"}};
    resources.dimens = {{"pad", "8dp"}, {"small", "4dip"}, {"text", "16sp"}, {"raw", "10px"}};

    HarmonyProject harmony = assemble_project(pages, project, resources);
    CHECK(harmony.route_table == std::vector<std::string>{"Main", "Detail"});
    CHECK(harmony.warnings.empty());

    auto files = emit_files(harmony);
    REQUIRE(files.count("entry/src/main/ets/pages/Main.ets") == 1);
    REQUIRE(files.count("entry/src/main/ets/pages/Detail.ets") == 1);

    ojson strings = ojson::parse(
        files.at("entry/src/main/resources/base/element/string.json"));
    REQUIRE(strings.at("string").size() == 3);
    CHECK(strings.at("string")[0].at("name") == "bye");
    CHECK(strings.at("string")[0].at("value") == "Goodbye");

    ojson floats = ojson::parse(files.at("entry/src/main/resources/base/element/float.json"));
    std::map<std::string, std::string> converted;
    for (const auto& row : floats.at("float")) {
        converted[row.at("name").get<std::string>()] = row.at("value").get<std::string>();
    }
    CHECK(converted == std::map<std::string, std::string>{
                           {"pad", "8vp"}, {"small", "4vp"}, {"text", "16fp"}, {"raw", "10px"}});

    ojson main_pages = ojson::parse(
        files.at("entry/src/main/resources/base/profile/main_pages.json"));
    CHECK(main_pages.at("src") == ojson::array({"pages/Main", "pages/Detail"}));
}

TEST_CASE("route collisions get deterministic suffixes") {
    KnowledgeBase kb = load_seeded();
    auto backend = make_template_backend();

    AndroidProject project;
    project.manifest.activities = {{"com.example.MainActivity", true},
                                   {"com.other.Main", false}};

    auto make_page = [&](const std::string& fqcn) {
        auto t = translate_all(
            units_of("<TextView android:text=\"@string/hi\" android:textSize=\"16sp\"/>",
                     "activity_main", fqcn),
            kb, backend);
        return assemble_page(t.unit_ptrs(), t.component_ptrs(),
                             activity_page(fqcn, "activity_main"));
    };
    std::vector<ArkUIPage> pages = {make_page("com.example.MainActivity"),
                                    make_page("com.other.Main")};

    HarmonyProject harmony = assemble_project(pages, project, {});
    CHECK(harmony.route_table == std::vector<std::string>{"Main", "Main2"});
    REQUIRE(harmony.warnings.size() == 1);
    CHECK(harmony.warnings[0].kind == "duplicate_struct");
    CHECK(harmony.pages[1].ets_source.find("struct Main2 {") != std::string::npos);
    CHECK(check_wellformed(harmony.pages[1].ets_source).empty());
}

TEST_CASE("component dependency cycles warn but still emit") {
    AndroidProject project;
    ArkUIPage a;
    a.page_id = "layout:a";
    a.struct_name = "A";
    a.ets_source = "@Component\nexport struct A {\n  build() {\n    B()\n  }\n}\n";
    a.child_components = {"B"};
    ArkUIPage b;
    b.page_id = "layout:b";
    b.struct_name = "B";
    b.ets_source = "@Component\nexport struct B {\n  build() {\n    A()\n  }\n}\n";
    b.child_components = {"A"};

    HarmonyProject harmony = assemble_project({a, b}, project, {});
    int cycles = 0;
    for (const auto& w : harmony.warnings) cycles += w.kind == "component_cycle";
    CHECK(cycles == 1);
    auto files = emit_files(harmony);
    CHECK(files.count("entry/src/main/ets/components/A.ets") == 1);
    CHECK(files.count("entry/src/main/ets/components/B.ets") == 1);
    CHECK(harmony.route_table.empty());
}

TEST_CASE("drawables copy into media with their resource names") {
    fs::path root = fresh_dir("media");
    fs::create_directories(root / "res/drawable");
    write_file(root / "res/drawable/icon.png", "PNGBYTES");

    AndroidProject project;
    project.root_path = root;
    ResourceIndex resources;
    resources.drawables = {{"icon", "res/drawable/icon.png"},
                           {"ghost", "res/drawable/ghost.png"}};

    HarmonyProject harmony = assemble_project({}, project, resources);
    CHECK(harmony.resource_files.at("entry/src/main/resources/base/media/icon.png") ==
          "PNGBYTES");
    CHECK(harmony.resource_files.count("entry/src/main/resources/base/media/ghost.png") == 0);
    REQUIRE(harmony.warnings.size() == 1);
    CHECK(harmony.warnings[0].kind == "missing_drawable");
}

TEST_CASE("write_project refuses a non-empty directory without force") {
    KnowledgeBase kb = load_seeded();
    auto backend = make_template_backend();
    auto t = translate_all(
        units_of("<TextView android:text=\"@string/hi\" android:textSize=\"16sp\"/>",
                 "activity_main", "com.example.MainActivity"),
        kb, backend);
    ArkUIPage page = assemble_page(t.unit_ptrs(), t.component_ptrs(),
                                   activity_page("com.example.MainActivity", "activity_main"));

    AndroidProject project;
    project.manifest.activities = {{"com.example.MainActivity", true}};
    HarmonyProject harmony = assemble_project({page}, project, {});

    fs::path out = fresh_dir("write");
    write_file(out / "leftover.txt", "x");
    CHECK_THROWS_AS(write_project(harmony, out), IoError);

    write_project(harmony, out, true);
    CHECK(fs::exists(out / "entry/src/main/ets/pages/Main.ets"));
    CHECK(read_file(out / "entry/src/main/ets/pages/Main.ets") == page.ets_source);
}
