#pragma once

// Reflection over generated components: deterministic checks against the
// functional description, the feedback-driven regeneration loop, and the
// enrichment candidates a passing inferred unit yields.

#include <algorithm>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uitrans/arkui_check.hpp"
#include "uitrans/generator.hpp"
#include "uitrans/knowledge_base.hpp"
#include "uitrans/llm_gateway.hpp"
#include "uitrans/task_planner.hpp"

namespace uitrans {

enum class Verdict { pass, fail };

inline const char* to_string(Verdict v) { return v == Verdict::pass ? "pass" : "fail"; }

struct ReflectionCheck {
    std::string name;
    bool passed = true;
    std::string detail;
};

struct ReflectionReport {
    std::string unit_id;
    Verdict verdict = Verdict::fail;
    std::vector<ReflectionCheck> checks;
    int iteration = 1;
    int mandatory_failures = 0;

    const ReflectionCheck* check(std::string_view name) const {
        for (const auto& c : checks) {
            if (c.name == name) return &c;
        }
        return nullptr;
    }
};

inline constexpr double kCoverageAdvisory = 0.8;
inline constexpr double kCoverageMandatory = 0.5;

// Verdict-relevant failures rendered as regeneration feedback.
inline std::string feedback_from(const ReflectionReport& report) {
    std::string fb;
    for (const auto& c : report.checks) {
        if (c.passed || c.name == "critique") continue;
        if (!fb.empty()) fb += "\n";
        fb += c.name + ": " + (c.detail.empty() ? "failed" : c.detail);
    }
    return fb;
}

// Deterministic checks own the verdict; the gateway critique is advisory text
// appended as its own always-passing entry.
inline ReflectionReport reflect(const GeneratedComponent& component,
                                const FunctionalDescription& description, Backend& backend,
                                Warnings* warnings = nullptr) {
    ReflectionReport report;
    report.unit_id = component.unit_id;
    const std::string& code = component.arkui_code;

    ReflectionCheck c1{"wellformed", true, ""};
    if (code.empty()) {
        c1.passed = false;
        c1.detail = "empty output";
    } else if (auto violations = check_wellformed(code); !violations.empty()) {
        c1.passed = false;
        size_t shown = std::min<size_t>(violations.size(), 3);
        for (size_t i = 0; i < shown; ++i) {
            if (i) c1.detail += "; ";
            c1.detail += violations[i].to_string();
        }
        if (violations.size() > shown) {
            c1.detail += "; +" + std::to_string(violations.size() - shown) + " more";
        }
    }

    int expected = 0;
    for (const auto& [tag, n] : description.child_summary) expected += n;
    int found = static_cast<int>(extract_slot_ids(code).size());
    ReflectionCheck c2{"child_coverage", expected == found, ""};
    if (!c2.passed) {
        c2.detail = "expected " + std::to_string(expected) + " slots, found " +
                    std::to_string(found);
    }

    ReflectionCheck c3{"event_coverage", true, ""};
    for (const auto& e : description.events) {
        bool covered = false;
        if (e == "click") {
            covered = code.find(".onClick") != std::string::npos;
        } else if (e == "long_press") {
            covered = code.find("LongPressGesture") != std::string::npos;
        } else if (e == "touch") {
            covered = code.find(".onTouch") != std::string::npos;
        } else {
            covered = code.find("// TODO(event): " + e) != std::string::npos;
        }
        if (!covered) {
            c3.passed = false;
            if (!c3.detail.empty()) c3.detail += ", ";
            c3.detail += e;
        }
    }
    if (!c3.passed) c3.detail = "missing handlers: " + c3.detail;

    int denom = component.mapped_attrs + component.todo_attrs;
    double ratio = denom == 0 ? 1.0 : static_cast<double>(component.mapped_attrs) / denom;
    bool mandatory_ok = ratio >= kCoverageMandatory;
    ReflectionCheck c4{"attribute_coverage", ratio >= kCoverageAdvisory, ""};
    if (!c4.passed) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "coverage %.2f below %.2f%s", ratio,
                      mandatory_ok ? kCoverageAdvisory : kCoverageMandatory,
                      mandatory_ok ? " (advisory)" : "");
        c4.detail = buf;
    }

    report.checks = {c1, c2, c3, c4};
    report.mandatory_failures =
        static_cast<int>(!c1.passed) + static_cast<int>(!c2.passed) +
        static_cast<int>(!c3.passed) + static_cast<int>(!mandatory_ok);
    report.verdict = report.mandatory_failures == 0 ? Verdict::pass : Verdict::fail;

    std::string local_critique;
    for (const auto& c : report.checks) {
        if (c.passed) continue;
        if (!local_critique.empty()) local_critique += "\n";
        local_critique += c.name + ": " + (c.detail.empty() ? "failed" : c.detail);
    }
    if (local_critique.empty()) local_critique = "no issues found";

    PromptPayload prompt;
    prompt.code = code.empty() ? "(empty)" : code;
    prompt.description = description.purpose;
    GenerationRequest req;
    req.role = Role::reflect;
    std::tie(req.system_text, req.user_text) = render_prompt(req.role, prompt);
    req.payload = ojson{{"critique", local_critique}};
    try {
        std::string text = complete(req, backend).text;
        report.checks.push_back({"critique", true, text.empty() ? local_critique : text});
    } catch (const BackendUnavailable& e) {
        if (warnings) {
            warn(*warnings, "critique_unavailable",
                 "critique skipped for unit " + component.unit_id + ": " + e.what());
        }
        report.checks.push_back({"critique", true, local_critique});
    }
    return report;
}

inline std::string template_reflect_renderer(const GenerationRequest& req) {
    if (!req.payload.is_object() || !req.payload.contains("critique")) {
        throw PayloadIncomplete("payload.critique");
    }
    return req.payload["critique"].get<std::string>();
}

struct ReflectOutcome {
    GeneratedComponent component;
    ReflectionReport report;
    std::optional<MappingEntry> enrichment;
};

// Regenerates with the failed-check details as feedback until the verdict
// passes or the cap is hit; keeps the attempt with the fewest mandatory
// failures (earliest on ties).
inline ReflectOutcome reflect_loop(const TranslationUnit& unit, const DomainKnowledge& knowledge,
                                   Backend& backend, const ResourceIndex& resources,
                                   int max_iters, Warnings* warnings = nullptr) {
    if (max_iters < 1) throw ConfigError("max_reflection_iters must be at least 1");

    ReflectOutcome best;
    bool have_best = false;
    std::string feedback;
    for (int iter = 1; iter <= max_iters; ++iter) {
        GeneratedComponent component =
            translate_unit(unit, knowledge, backend, resources, warnings, feedback);
        component.attempts = iter;
        ReflectionReport report = reflect(component, unit.description, backend, warnings);
        report.iteration = iter;

        if (!have_best || report.mandatory_failures < best.report.mandatory_failures) {
            best.component = std::move(component);
            best.report = report;
            have_best = true;
        }
        if (best.report.verdict == Verdict::pass) break;
        feedback = feedback_from(report);
    }

    if (best.report.verdict != Verdict::pass && warnings) {
        warn(*warnings, "reflection_exhausted",
             "unit " + unit.unit_id + " still failing after " + std::to_string(max_iters) +
                 " attempts; keeping iteration " + std::to_string(best.report.iteration));
    }

    bool enrichable = unit.root.kind != NodeKind::include_ref &&
                      unit.root.kind != NodeKind::fragment;
    if (enrichable && best.component.mode == GenMode::inferred &&
        best.report.verdict == Verdict::pass) {
        MappingEntry entry;
        entry.source_tag = unit.root.tag;
        entry.target_component = detect_root_component(best.component.arkui_code);
        entry.description = unit.description.purpose;
        entry.source_example = unit_prompt_xml(unit);
        entry.target_example = best.component.arkui_code;
        entry.provenance = "learned";
        for (const auto& a : unit.root.attributes) {
            if (a.name == "android:onClick") {
                entry.attribute_map.push_back({a.name, ".onClick", "event_handler"});
            }
        }
        if (!entry.target_component.empty()) best.enrichment = std::move(entry);
    }
    return best;
}

inline ojson report_to_json(const ReflectionReport& report) {
    ojson j;
    j["unit_id"] = report.unit_id;
    j["verdict"] = to_string(report.verdict);
    j["iteration"] = report.iteration;
    j["mandatory_failures"] = report.mandatory_failures;
    ojson checks = ojson::array();
    for (const auto& c : report.checks) {
        checks.push_back(ojson{{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    }
    j["checks"] = std::move(checks);
    return j;
}

}  // namespace uitrans
