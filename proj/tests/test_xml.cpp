#include <catch2/catch_amalgamated.hpp>

#include "uitrans/xml.hpp"

using namespace uitrans;

TEST_CASE("parses a single element with attributes in document order") {
    XmlElement el = parse_xml("<TextView android:id=\"@+id/hi\" android:text=\"Hello\"/>");
    CHECK(el.tag == "TextView");
    REQUIRE(el.attrs.size() == 2);
    CHECK(el.attrs[0].name == "android:id");
    CHECK(el.attrs[0].value == "@+id/hi");
    CHECK(el.attrs[1].name == "android:text");
    CHECK(el.attrs[1].value == "Hello");
    CHECK(el.children.empty());
}

TEST_CASE("tracks line spans across nested elements") {
    const char* doc =
        "<?xml version=\"1.0\"?>\n"
        "<LinearLayout>\n"
        "  <TextView\n"
        "      android:text=\"a\"/>\n"
        "  <Button/>\n"
        "</LinearLayout>\n";
    XmlElement el = parse_xml(doc);
    CHECK(el.line_begin == 2);
    CHECK(el.line_end == 6);
    REQUIRE(el.children.size() == 2);
    CHECK(el.children[0].line_begin == 3);
    CHECK(el.children[0].line_end == 4);
    CHECK(el.children[1].line_begin == 5);
    CHECK(el.children[1].line_end == 5);
}

TEST_CASE("decodes entities and keeps text content") {
    XmlElement el = parse_xml("<string name=\"x\">a &amp; b &lt;c&gt; &#65;&#x42;</string>");
    CHECK(el.text == "a & b <c> AB");
}

TEST_CASE("handles comments, CDATA and processing instructions") {
    XmlElement el = parse_xml(
        "<?xml version=\"1.0\"?>\n"
        "<!-- header -->\n"
        "<root><!-- inner --><![CDATA[x < y]]></root>\n");
    CHECK(el.tag == "root");
    CHECK(el.text == "x < y");
}

TEST_CASE("malformed input reports position") {
    try {
        parse_xml("<a>\n  <b>\n</a>");
        FAIL("expected MalformedXml");
    } catch (const MalformedXml& e) {
        CHECK(e.line() == 3);
        CHECK(std::string(e.what()).find("</b>") != std::string::npos);
    }
}

TEST_CASE("rejects duplicate attributes") {
    CHECK_THROWS_AS(parse_xml("<a x=\"1\" x=\"2\"/>"), MalformedXml);
}

TEST_CASE("rejects text outside the root element") {
    CHECK_THROWS_AS(parse_xml("<a/> trailing"), MalformedXml);
    CHECK_THROWS_AS(parse_xml("<a/><b/>"), MalformedXml);
}

TEST_CASE("empty document raises EmptyLayout") {
    CHECK_THROWS_AS(parse_xml(""), EmptyLayout);
    CHECK_THROWS_AS(parse_xml("<?xml version=\"1.0\"?>\n<!-- only a comment -->"),
                    EmptyLayout);
}

TEST_CASE("attribute escaping survives a round trip") {
    std::string value = "a<b>&\"quoted\"\nnewline\ttab";
    std::string doc = "<t v=\"" + xml_escape_attr(value) + "\"/>";
    XmlElement el = parse_xml(doc);
    REQUIRE(el.attrs.size() == 1);
    CHECK(el.attrs[0].value == value);
    CHECK(xml_escape_attr(value).find('\n') == std::string::npos);
}
