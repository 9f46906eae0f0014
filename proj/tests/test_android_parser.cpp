#include <catch2/catch_amalgamated.hpp>

#include "uitrans/android_parser.hpp"

using namespace uitrans;

namespace {
const char* kMiniApp = UITRANS_FIXTURES "/mini_app";
}

TEST_CASE("manifest: package, qualification and launcher flag") {
    ManifestInfo info = parse_manifest(
        "<manifest package=\"com.ex\">\n"
        "  <application>\n"
        "    <activity android:name=\".MainActivity\">\n"
        "      <intent-filter>\n"
        "        <action android:name=\"android.intent.action.MAIN\"/>\n"
        "        <category android:name=\"android.intent.category.LAUNCHER\"/>\n"
        "      </intent-filter>\n"
        "    </activity>\n"
        "    <activity android:name=\"Bare\"/>\n"
        "    <activity android:name=\"org.other.FullName\"/>\n"
        "  </application>\n"
        "</manifest>");
    CHECK(info.package_name == "com.ex");
    REQUIRE(info.activities.size() == 3);
    CHECK(info.activities[0].name == "com.ex.MainActivity");
    CHECK(info.activities[0].is_launcher);
    CHECK(info.activities[1].name == "com.ex.Bare");
    CHECK_FALSE(info.activities[1].is_launcher);
    CHECK(info.activities[2].name == "org.other.FullName");
}

TEST_CASE("manifest: wrong root and missing package") {
    CHECK_THROWS_AS(parse_manifest("<application/>"), MalformedXml);
    CHECK_THROWS_AS(parse_manifest("<manifest><application/></manifest>"), MissingPackage);
}

TEST_CASE("manifest: second launcher demoted with a warning") {
    Warnings w;
    ManifestInfo info = parse_manifest(
        "<manifest package=\"p\"><application>"
        "<activity android:name=\".A\"><intent-filter>"
        "<action android:name=\"android.intent.action.MAIN\"/>"
        "<category android:name=\"android.intent.category.LAUNCHER\"/>"
        "</intent-filter></activity>"
        "<activity android:name=\".B\"><intent-filter>"
        "<action android:name=\"android.intent.action.MAIN\"/>"
        "<category android:name=\"android.intent.category.LAUNCHER\"/>"
        "</intent-filter></activity>"
        "</application></manifest>",
        &w);
    CHECK(info.activities[0].is_launcher);
    CHECK_FALSE(info.activities[1].is_launcher);
    REQUIRE(w.size() == 1);
    CHECK(w[0].kind == "multiple_launchers");
}

TEST_CASE("node kinds follow the tag classification rules") {
    CHECK(classify_tag("TextView") == NodeKind::native_widget);
    CHECK(classify_tag("LinearLayout") == NodeKind::container);
    CHECK(classify_tag("ScrollView") == NodeKind::container);
    CHECK(classify_tag("include") == NodeKind::include_ref);
    CHECK(classify_tag("fragment") == NodeKind::fragment);
    CHECK(classify_tag("FragmentContainerView") == NodeKind::fragment);
    CHECK(classify_tag("com.example.BadgeView") == NodeKind::custom);
}

TEST_CASE("canonical serializer layout and line accounting") {
    LayoutNode leaf;
    leaf.tag = "TextView";
    leaf.attributes = {{"android:id", "@+id/t"}, {"android:text", "hi"}, {"android:textSize", "16sp"}};
    CHECK(serialize_layout(leaf) ==
          "<TextView android:id=\"@+id/t\"\n"
          "    android:text=\"hi\"\n"
          "    android:textSize=\"16sp\"/>\n");
    CHECK(serialized_line_count(leaf) == 3);

    LayoutNode bare;
    bare.tag = "View";
    CHECK(serialize_layout(bare) == "<View/>\n");
    CHECK(serialized_line_count(bare) == 1);

    LayoutNode parent;
    parent.tag = "LinearLayout";
    parent.kind = NodeKind::container;
    parent.attributes = {{"android:orientation", "vertical"}};
    parent.children = {bare, bare};
    CHECK(serialize_layout(parent) ==
          "<LinearLayout android:orientation=\"vertical\">\n"
          "  <View/>\n"
          "  <View/>\n"
          "</LinearLayout>\n");
    CHECK(serialized_line_count(parent) == 4);
}

TEST_CASE("layout parse and canonical reserialize round trip") {
    const char* doc =
        "<LinearLayout xmlns:android=\"x\" android:orientation=\"vertical\">\n"
        "  <TextView android:text=\"a &amp; b\"/>\n"
        "  <include layout=\"@layout/bar\"/>\n"
        "</LinearLayout>\n";
    LayoutNode first = parse_layout(doc, "t.xml");
    std::string serialized = serialize_layout(first);
    LayoutNode second = parse_layout(serialized, "t.xml");
    CHECK(layout_equal(first, second));
    CHECK(serialize_layout(second) == serialized);
    CHECK(first.children[1].kind == NodeKind::include_ref);
}

TEST_CASE("interaction scan: bindings, order, comment and string immunity") {
    const char* java = R"JAVA(
public class MainActivity extends Activity {
    protected void onCreate(Bundle b) {
        setContentView(R.layout.activity_main);
        TextView title = (TextView) findViewById(R.id.title_text);
        Button open = (Button) findViewById(R.id.open_button);
        // findViewById(R.id.in_comment)
        /* setContentView(R.layout.in_block) */
        String s = "findViewById(R.id.in_string)";
        char c = '"';
        open.setOnClickListener(v -> {
            startActivity(new Intent(this, DetailActivity.class));
        });
    }
}
)JAVA";
    auto facts = extract_interactions(java);
    REQUIRE(facts.size() == 5);
    CHECK(facts[0].kind == InteractionKind::content_view);
    CHECK(facts[0].subject_id == "activity_main");
    CHECK(facts[1].kind == InteractionKind::view_binding);
    CHECK(facts[1].subject_id == "title_text");
    CHECK(facts[2].subject_id == "open_button");
    CHECK(facts[3].kind == InteractionKind::listener);
    CHECK(facts[3].subject_id == "open_button");  // receiver resolved via binding
    CHECK(facts[4].kind == InteractionKind::navigation);
    CHECK(facts[4].subject_id == "DetailActivity");
    CHECK(facts[4].detail.find("startActivity(new Intent") == 0);

    auto bindings = view_binding_map(java);
    CHECK(bindings.at("title") == "title_text");
    CHECK(bindings.at("open") == "open_button");
}

TEST_CASE("interaction scan: binding declared after the listener still resolves") {
    const char* java =
        "void f() {\n"
        "  save.setOnClickListener(h);\n"
        "  Button save = (Button) findViewById(R.id.save_button);\n"
        "}\n";
    auto facts = extract_interactions(java);
    REQUIRE(facts.size() == 2);
    CHECK(facts[0].kind == InteractionKind::listener);
    CHECK(facts[0].subject_id == "save_button");
}

TEST_CASE("interaction scan: unresolvable navigation is skipped") {
    auto facts = extract_interactions("void f() { startActivity(pendingIntent); }");
    CHECK(facts.empty());
    auto facts2 = extract_interactions(
        "void f() { startActivity(new Intent(ACTION_VIEW)); }");
    CHECK(facts2.empty());
}

TEST_CASE("interaction scan is total on junk input") {
    CHECK(extract_interactions("").empty());
    CHECK(extract_interactions("\"unterminated").empty());
    CHECK(extract_interactions("/* unterminated").empty());
    CHECK(extract_interactions("findViewById(").empty());
    CHECK(extract_interactions("startActivity(new Intent(").empty());
    extract_interactions(std::string(1000, '\\'));  // must not throw
}

TEST_CASE("listener event kinds") {
    CHECK(listener_event_kind("open.setOnClickListener") == "click");
    CHECK(listener_event_kind("v.setOnLongClickListener") == "long_press");
    CHECK(listener_event_kind("v.setOnTouchListener") == "touch");
    CHECK(listener_event_kind("v.setOnFocusChangeListener") == "focus_change");
}

TEST_CASE("color validation") {
    CHECK(is_hex_color("#FFF"));
    CHECK(is_hex_color("#80FF0000"));
    CHECK_FALSE(is_hex_color("#GGG"));
    CHECK_FALSE(is_hex_color("red"));
    CHECK_FALSE(is_hex_color("#FFFFF"));
}

TEST_CASE("parse_project on the mini fixture") {
    AndroidProject project = parse_project(kMiniApp);

    CHECK(project.manifest.package_name == "com.example.mini");
    REQUIRE(project.pages.size() == 2);
    CHECK(project.pages[0].activity_name == "com.example.mini.MainActivity");
    CHECK(project.manifest.activities[0].is_launcher);
    CHECK(project.pages[1].activity_name == "com.example.mini.DetailActivity");

    const PageRecord& main = project.pages[0];
    REQUIRE(main.xml_layouts.size() == 1);
    CHECK(main.xml_layouts[0].first == "activity_main");
    CHECK(main.xml_layouts[0].second.tag == "LinearLayout");

    // include edge to toolbar plus navigation edge to DetailActivity
    REQUIRE(main.dependencies.size() == 2);
    CHECK(main.dependencies[0].kind == DependencyEdge::Kind::include);
    CHECK(main.dependencies[0].target == "toolbar");
    CHECK(main.dependencies[0].span.file == "app/src/main/res/layout/activity_main.xml");
    CHECK(main.dependencies[1].kind == DependencyEdge::Kind::navigation);
    CHECK(main.dependencies[1].target == "com.example.mini.DetailActivity");

    CHECK(main.resource_refs ==
          std::vector<std::string>{"color/window_bg", "string/main_title",
                                   "color/primary_text", "dimen/logo_size",
                                   "drawable/ic_logo", "string/open_detail"});

    CHECK(main.view_bindings.at("openButton") == "open_button");
    CHECK(project.resources.strings.size() == 4);
    CHECK(project.resources.colors.size() == 4);
    CHECK(project.resources.dimens.at("logo_size") == "48dp");
    CHECK(project.resources.drawables.count("ic_logo") == 1);

    // toolbar is an include target, so nothing is orphaned
    CHECK(project.orphan_layouts.empty());
    CHECK(project.layouts.size() == 3);
    CHECK(project.warnings.empty());
}

TEST_CASE("parse_project: missing root raises ManifestNotFound") {
    CHECK_THROWS_AS(parse_project("/nonexistent/path"), ManifestNotFound);
}

TEST_CASE("pages dictionary dumps and reloads losslessly") {
    AndroidProject project = parse_project(kMiniApp);
    ojson dumped = dump_pages_json(project);
    AndroidProject reloaded = load_pages_json(dumped);

    CHECK(reloaded.manifest.package_name == project.manifest.package_name);
    CHECK(reloaded.manifest.activities == project.manifest.activities);
    REQUIRE(reloaded.pages.size() == project.pages.size());
    for (size_t i = 0; i < project.pages.size(); ++i) {
        const PageRecord& a = project.pages[i];
        const PageRecord& b = reloaded.pages[i];
        CHECK(a.activity_name == b.activity_name);
        CHECK(a.java_code == b.java_code);
        CHECK(a.interactions == b.interactions);
        CHECK(a.resource_refs == b.resource_refs);
        CHECK(a.view_bindings == b.view_bindings);
        REQUIRE(a.xml_layouts.size() == b.xml_layouts.size());
        for (size_t k = 0; k < a.xml_layouts.size(); ++k) {
            CHECK(a.xml_layouts[k].first == b.xml_layouts[k].first);
            CHECK(layout_equal(a.xml_layouts[k].second, b.xml_layouts[k].second, true));
        }
    }
    CHECK(reloaded.resources == project.resources);
    REQUIRE(reloaded.layouts.size() == project.layouts.size());
    for (size_t i = 0; i < project.layouts.size(); ++i) {
        CHECK(layout_equal(reloaded.layouts[i].second, project.layouts[i].second, true));
    }

    // a second dump of the reloaded model is byte identical
    CHECK(dump_pages_json(reloaded).dump(2) == dumped.dump(2));
}
