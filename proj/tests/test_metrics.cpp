#include <catch2/catch_amalgamated.hpp>

#include "uitrans/metrics.hpp"

using namespace uitrans;

namespace {

EvaluationRecord rec(RecordScope scope, int modified, int total) {
    EvaluationRecord r;
    r.scope = scope;
    r.id = "r";
    r.lines_modified = modified;
    r.total_lines = total;
    return r;
}

std::string repeat_lines(const std::string& prefix, int n) {
    std::string out;
    for (int i = 0; i < n; ++i) out += prefix + std::to_string(i) + "\n";
    return out;
}

}  // namespace

TEST_CASE("identical texts modify nothing") {
    std::string text = repeat_lines("line", 10);
    auto [modified, total] = lines_modified(text, text);
    CHECK(modified == 0);
    CHECK(total == 10);
}

TEST_CASE("two replaced lines count as two modifications") {
    std::string reference = repeat_lines("line", 10);
    std::string generated;
    for (int i = 0; i < 10; ++i) {
        generated += (i == 3 || i == 7) ? "changed" + std::to_string(i) + "\n"
                                        : "line" + std::to_string(i) + "\n";
    }
    auto [modified, total] = lines_modified(generated, reference);
    CHECK(modified == 2);
    CHECK(total == 10);
}

TEST_CASE("empty generated text modifies every reference line") {
    auto [modified, total] = lines_modified("", repeat_lines("line", 5));
    CHECK(modified == 5);
    CHECK(total == 5);
}

TEST_CASE("an empty reference is rejected") {
    CHECK_THROWS_AS(lines_modified("anything", ""), EmptyReference);
}

TEST_CASE("trailing whitespace does not count as a modification") {
    auto [modified, total] = lines_modified("Text('x')  \t\n", "Text('x')\n");
    CHECK(modified == 0);
    CHECK(total == 1);

    auto [m2, t2] = lines_modified("  Text('x')\n", "Text('x')\n");
    CHECK(m2 == 1);
    CHECK(t2 == 1);
}

TEST_CASE("an inserted line leaves reference lines matched") {
    std::string reference = "a\nb\nc\n";
    std::string generated = "a\nextra\nb\nc\n";
    auto [modified, total] = lines_modified(generated, reference);
    CHECK(modified == 0);
    CHECK(total == 3);
}

TEST_CASE("component success is the mean of per-record ratios") {
    std::vector<EvaluationRecord> records = {rec(RecordScope::component, 0, 10),
                                             rec(RecordScope::component, 5, 10)};
    CHECK(comp_success(records) == Catch::Approx(0.75).margin(1e-12));
}

TEST_CASE("mean of ratios and ratio of sums diverge on unequal sizes") {
    std::vector<EvaluationRecord> records = {rec(RecordScope::component, 0, 10),
                                             rec(RecordScope::component, 5, 5)};
    CHECK(comp_success(records) == Catch::Approx(0.5).margin(1e-12));
    CHECK(project_success(records) == Catch::Approx(2.0 / 3.0).margin(1e-12));
}

TEST_CASE("equal totals make the mean and the ratio of sums agree") {
    std::vector<EvaluationRecord> records = {rec(RecordScope::component, 2, 10),
                                             rec(RecordScope::component, 4, 10),
                                             rec(RecordScope::component, 0, 10)};
    CHECK(comp_success(records) == Catch::Approx(project_success(records)).margin(1e-12));
}

TEST_CASE("all-zero-mod records score one across the board") {
    std::vector<EvaluationRecord> components = {rec(RecordScope::component, 0, 7),
                                                rec(RecordScope::component, 0, 3)};
    std::vector<EvaluationRecord> pages = {rec(RecordScope::page, 0, 10)};
    SuccessReport report = build_report(components, pages);
    CHECK(report.comp_success == Catch::Approx(1.0).margin(1e-12));
    CHECK(report.page_success == Catch::Approx(1.0).margin(1e-12));
    CHECK(report.project_success == Catch::Approx(1.0).margin(1e-12));
    CHECK(report.zero_mod_components == 2);
    CHECK(report.zero_mod_pages == 1);
}

TEST_CASE("fixing lines never lowers any rate") {
    std::vector<EvaluationRecord> before = {rec(RecordScope::component, 4, 10),
                                            rec(RecordScope::component, 2, 8)};
    std::vector<EvaluationRecord> after = before;
    after[0].lines_modified = 3;
    CHECK(comp_success(after) > comp_success(before));
    CHECK(project_success(after) > project_success(before));
}

TEST_CASE("empty or mixed-scope record sets are rejected") {
    CHECK_THROWS_AS(comp_success({}), EmptyRecordSet);
    CHECK_THROWS_AS(page_success({}), EmptyRecordSet);
    CHECK_THROWS_AS(project_success({}), EmptyRecordSet);
    std::vector<EvaluationRecord> mixed = {rec(RecordScope::component, 0, 10),
                                           rec(RecordScope::page, 0, 10)};
    CHECK_THROWS_AS(comp_success(mixed), EmptyRecordSet);
}

TEST_CASE("plain report renders percentages with zero-mod counts") {
    SuccessReport report;
    report.comp_success = 0.941;
    report.page_success = 0.938;
    report.project_success = 0.920;
    report.zero_mod_components = 22;
    report.zero_mod_pages = 3;
    std::string text = emit_report(report, ReportFormat::plain);
    CHECK(text.find("94.1%(22)  93.8%(3)  92.0%\n") != std::string::npos);

    report.comp_success = 1.0;
    report.page_success = 1.0;
    report.project_success = 1.0;
    text = emit_report(report, ReportFormat::plain);
    CHECK(text.find("100.0%(22)  100.0%(3)  100.0%\n") != std::string::npos);
}

TEST_CASE("json report round-trips") {
    SuccessReport report;
    report.comp_success = 0.941;
    report.page_success = 0.938;
    report.project_success = 0.920;
    report.zero_mod_components = 22;
    report.zero_mod_pages = 3;
    ojson j = ojson::parse(emit_report(report, ReportFormat::json));
    CHECK(j.at("comp_success").get<double>() == Catch::Approx(0.941).margin(1e-12));
    CHECK(j.at("page_success").get<double>() == Catch::Approx(0.938).margin(1e-12));
    CHECK(j.at("project_success").get<double>() == Catch::Approx(0.920).margin(1e-12));
    CHECK(j.at("zero_mod_components").get<int>() == 22);
    CHECK(j.at("zero_mod_pages").get<int>() == 3);
}
