#pragma once

// Success metrics over (generated, reference) code pairs: line-LCS based
// modification counts, the three success rates, and report rendering.

#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "uitrans/common.hpp"

namespace uitrans {

enum class RecordScope { component, page, project };

inline const char* to_string(RecordScope s) {
    switch (s) {
        case RecordScope::component: return "component";
        case RecordScope::page: return "page";
        case RecordScope::project: return "project";
    }
    return "unknown";
}

struct EvaluationRecord {
    RecordScope scope = RecordScope::component;
    std::string id;
    int lines_modified = 0;
    int total_lines = 1;

    bool zero_mod() const { return lines_modified == 0; }
};

struct SuccessReport {
    double comp_success = 0.0;
    double page_success = 0.0;
    double project_success = 0.0;
    int zero_mod_components = 0;
    int zero_mod_pages = 0;
};

namespace detail {

inline std::vector<std::string> trimmed_lines(const std::string& text) {
    std::vector<std::string> lines;
    size_t pos = 0;
    while (pos < text.size()) {
        size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        size_t end = eol;
        while (end > pos && (text[end - 1] == ' ' || text[end - 1] == '\t' ||
                             text[end - 1] == '\r')) {
            --end;
        }
        lines.push_back(text.substr(pos, end - pos));
        pos = eol + 1;
    }
    return lines;
}

inline size_t line_lcs(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.empty() || b.empty()) return 0;
    std::vector<size_t> prev(b.size() + 1, 0);
    std::vector<size_t> curr(b.size() + 1, 0);
    for (size_t i = 1; i <= a.size(); ++i) {
        for (size_t j = 1; j <= b.size(); ++j) {
            curr[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1
                                           : std::max(prev[j], curr[j - 1]);
        }
        std::swap(prev, curr);
    }
    return prev[b.size()];
}

}  // namespace detail

// (modified, total): total counts reference lines; modified is how many of
// them have no match in a longest common subsequence with the generated text.
inline std::pair<int, int> lines_modified(const std::string& generated,
                                          const std::string& reference) {
    if (reference.empty()) throw EmptyReference();
    std::vector<std::string> ref = detail::trimmed_lines(reference);
    std::vector<std::string> gen = detail::trimmed_lines(generated);
    size_t lcs = detail::line_lcs(gen, ref);
    return {static_cast<int>(ref.size() - lcs), static_cast<int>(ref.size())};
}

namespace detail {

inline void require_scope(const std::vector<EvaluationRecord>& records, RecordScope scope) {
    if (records.empty()) throw EmptyRecordSet(to_string(scope));
    for (const auto& r : records) {
        if (r.scope != scope) {
            throw EmptyRecordSet(std::string(to_string(scope)) + " (found a " +
                                 to_string(r.scope) + " record)");
        }
    }
}

inline double mean_success(const std::vector<EvaluationRecord>& records) {
    double sum = 0.0;
    for (const auto& r : records) {
        sum += 1.0 - static_cast<double>(r.lines_modified) / r.total_lines;
    }
    return sum / static_cast<double>(records.size());
}

}  // namespace detail

// Mean of per-record ratios.
inline double comp_success(const std::vector<EvaluationRecord>& records) {
    detail::require_scope(records, RecordScope::component);
    return detail::mean_success(records);
}

inline double page_success(const std::vector<EvaluationRecord>& records) {
    detail::require_scope(records, RecordScope::page);
    return detail::mean_success(records);
}

// Ratio of sums over the whole project; diverges from the mean of ratios
// whenever record sizes differ.
inline double project_success(const std::vector<EvaluationRecord>& records) {
    if (records.empty()) throw EmptyRecordSet(to_string(RecordScope::project));
    long long modified = 0;
    long long total = 0;
    for (const auto& r : records) {
        modified += r.lines_modified;
        total += r.total_lines;
    }
    return 1.0 - static_cast<double>(modified) / static_cast<double>(total);
}

inline SuccessReport build_report(const std::vector<EvaluationRecord>& components,
                                  const std::vector<EvaluationRecord>& pages) {
    SuccessReport report;
    report.comp_success = comp_success(components);
    report.page_success = page_success(pages);
    report.project_success = project_success(components);
    for (const auto& r : components) report.zero_mod_components += r.zero_mod();
    for (const auto& r : pages) report.zero_mod_pages += r.zero_mod();
    return report;
}

enum class ReportFormat { plain, json };

namespace detail {

inline std::string percent(double rate) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%%", rate * 100.0);
    return buf;
}

}  // namespace detail

inline std::string emit_report(const SuccessReport& report, ReportFormat format) {
    if (format == ReportFormat::json) {
        ojson j;
        j["comp_success"] = report.comp_success;
        j["page_success"] = report.page_success;
        j["project_success"] = report.project_success;
        j["zero_mod_components"] = report.zero_mod_components;
        j["zero_mod_pages"] = report.zero_mod_pages;
        return j.dump(2) + "\n";
    }
    std::string out = "Comp. Success%  Page Success%  Project Success%\n";
    out += detail::percent(report.comp_success) + "(" +
           std::to_string(report.zero_mod_components) + ")  " +
           detail::percent(report.page_success) + "(" +
           std::to_string(report.zero_mod_pages) + ")  " +
           detail::percent(report.project_success) + "\n";
    out += "counts in parentheses: components/pages needing zero modifications; "
           "compile verification is not attempted\n";
    return out;
}

}  // namespace uitrans
