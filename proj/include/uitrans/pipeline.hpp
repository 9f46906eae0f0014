#pragma once

// Whole-run orchestration: parse, plan, per-unit describe/retrieve/reflect,
// assembly, and output staging. Owns all parallelism decisions; knowledge
// base writes are queued and applied between page batches by a single writer.

#include <atomic>
#include <chrono>
#include <exception>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "uitrans/android_parser.hpp"
#include "uitrans/assembler.hpp"
#include "uitrans/common.hpp"
#include "uitrans/knowledge_base.hpp"
#include "uitrans/llm_gateway.hpp"
#include "uitrans/reflector.hpp"
#include "uitrans/task_planner.hpp"
#include "uitrans/template_backend.hpp"

namespace uitrans {

struct BackendConfig {
    std::string kind = "template";  // template | remote
    std::string endpoint;
    std::string model = "default";
    std::string api_key_env;
    double timeout_s = 60.0;
    int max_concurrency = 4;
};

struct RunConfig {
    std::filesystem::path input_dir;
    std::filesystem::path out_dir;
    BackendConfig backend;
    size_t max_unit_lines = 40;
    int max_reflection_iters = 3;
    std::filesystem::path mapping_table;
    std::filesystem::path doc_corpus;
    int jobs = 0;  // 0 picks the processor count
    bool force = false;
    bool verbose = false;
    std::filesystem::path record_dir;  // --record-llm
    std::filesystem::path replay_dir;  // --replay-llm
    std::filesystem::path dump_pages;
    std::filesystem::path dump_plan;
    std::filesystem::path dump_units;        // directory
    std::filesystem::path dump_reflections;  // file, one JSON report per line
};

inline void validate(const RunConfig& config) {
    if (config.max_unit_lines < 5 || config.max_unit_lines > 500) {
        throw ConfigError("max_unit_lines must be within [5, 500]");
    }
    if (config.max_reflection_iters < 1 || config.max_reflection_iters > 10) {
        throw ConfigError("max_reflection_iters must be within [1, 10]");
    }
    if (config.backend.kind != "template" && config.backend.kind != "remote") {
        throw ConfigError("backend.kind must be 'template' or 'remote', got '" +
                          config.backend.kind + "'");
    }
    if (config.backend.kind == "remote" && config.backend.endpoint.empty() &&
        config.replay_dir.empty()) {
        throw ConfigError("backend.endpoint is required for the remote backend");
    }
    if (config.jobs < 0) throw ConfigError("--jobs must be positive");
    if (!config.record_dir.empty() && !config.replay_dir.empty()) {
        throw ConfigError("--record-llm and --replay-llm are mutually exclusive");
    }
}

inline void validate_translate(const RunConfig& config) {
    validate(config);
    if (!std::filesystem::is_directory(config.input_dir)) {
        throw ConfigError("input directory not found: " + config.input_dir.string());
    }
    if (config.out_dir.empty()) throw ConfigError("output directory is required");
    if (config.mapping_table.empty() || config.doc_corpus.empty()) {
        throw ConfigError("mapping table and corpus paths are required");
    }
}

// Replay replaces the configured backend entirely; recording wraps it. Both
// pieces live here so the wrapper's inner reference stays valid.
struct BackendStack {
    std::unique_ptr<Backend> base;
    std::unique_ptr<Backend> recorder;

    Backend& active() { return recorder ? *recorder : *base; }
};

inline BackendStack make_backend(const RunConfig& config) {
    BackendStack stack;
    if (!config.replay_dir.empty()) {
        stack.base = std::make_unique<ReplayBackend>(config.replay_dir);
        return stack;
    }
    if (config.backend.kind == "remote") {
        RemoteConfig rc;
        rc.endpoint = config.backend.endpoint;
        rc.model = config.backend.model;
        rc.api_key_env = config.backend.api_key_env;
        rc.timeout_s = config.backend.timeout_s;
        rc.max_concurrency = config.backend.max_concurrency;
        stack.base = std::make_unique<RemoteBackend>(std::move(rc));
    } else {
        stack.base = std::make_unique<TemplateBackend>(make_template_backend());
    }
    if (!config.record_dir.empty()) {
        stack.recorder = std::make_unique<RecordingBackend>(*stack.base, config.record_dir);
    }
    return stack;
}

struct RunReport {
    size_t units = 0;
    size_t units_mapped = 0;
    size_t units_inferred = 0;
    size_t reflection_passed = 0;
    size_t reflection_failed = 0;
    size_t enrichments = 0;
    size_t pages = 0;
    size_t components = 0;
    std::vector<std::pair<std::string, double>> timings_ms;  // stage order preserved
    std::vector<Warning> warnings;
};

inline ojson report_to_json(const RunReport& r) {
    ojson j;
    j["units"] = r.units;
    j["units_mapped"] = r.units_mapped;
    j["units_inferred"] = r.units_inferred;
    j["reflection_passed"] = r.reflection_passed;
    j["reflection_failed"] = r.reflection_failed;
    j["enrichments"] = r.enrichments;
    j["pages"] = r.pages;
    j["components"] = r.components;
    ojson timings;
    for (const auto& [stage, ms] : r.timings_ms) timings[stage] = ms;
    j["timings_ms"] = std::move(timings);
    ojson warnings = ojson::array();
    for (const auto& w : r.warnings) {
        ojson entry{{"kind", w.kind}, {"message", w.message}};
        if (!w.span.file.empty()) entry["span"] = w.span.to_string();
        warnings.push_back(std::move(entry));
    }
    j["warnings"] = std::move(warnings);
    return j;
}

struct PipelineResult {
    AndroidProject project;
    TranslationPlan plan;
    std::vector<ReflectOutcome> outcomes;  // plan order
    KnowledgeBase kb;                      // includes entries learned this run
    bool enriched = false;
    HarmonyProject harmony;
    RunReport report;
};

namespace detail {

class StageClock {
public:
    explicit StageClock(RunReport& report) : report_(report) {}

    void finish(const std::string& stage) {
        auto now = std::chrono::steady_clock::now();
        double ms = std::chrono::duration<double, std::milli>(now - mark_).count();
        report_.timings_ms.emplace_back(stage, ms);
        mark_ = now;
    }

private:
    RunReport& report_;
    std::chrono::steady_clock::time_point mark_ = std::chrono::steady_clock::now();
};

// Consecutive plan units with the same page_id; the plan emits each page's
// units contiguously, so batches are exactly pages (and shared layouts).
struct Batch {
    std::string page_id;
    size_t begin = 0;
    size_t end = 0;
};

inline std::vector<Batch> batches_of(const TranslationPlan& plan) {
    std::vector<Batch> batches;
    for (size_t i = 0; i < plan.units.size(); ++i) {
        if (batches.empty() || batches.back().page_id != plan.units[i].page_id) {
            batches.push_back({plan.units[i].page_id, i, i + 1});
        } else {
            batches.back().end = i + 1;
        }
    }
    return batches;
}

inline PageRecord synthetic_page(const std::string& page_id) {
    PageRecord rec;
    rec.activity_name = page_id;
    return rec;
}

// Runs fn(i) for i in [0, count) on up to `jobs` threads; the first failure
// in index order is rethrown after all workers drain.
template <typename Fn>
void parallel_for(size_t count, int jobs, Fn&& fn) {
    if (count == 0) return;
    size_t workers = jobs > 0 ? static_cast<size_t>(jobs)
                              : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, count);
    if (workers <= 1) {
        for (size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(count);
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (size_t i; (i = next.fetch_add(1)) < count;) {
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace detail

// Parses, plans, translates every unit, and assembles the project in memory.
// Learned mappings are applied to the in-memory knowledge base between page
// batches; the input table file is never modified.
inline PipelineResult run_pipeline(const RunConfig& config, Backend& backend) {
    validate_translate(config);
    PipelineResult result;
    detail::StageClock clock(result.report);

    result.project = parse_project(config.input_dir);
    if (!config.dump_pages.empty()) {
        write_file(config.dump_pages, dump_pages_json(result.project).dump(2) + "\n");
    }
    clock.finish("parse");

    result.plan = plan(result.project, PlanConfig{config.max_unit_lines});
    if (!config.dump_plan.empty()) {
        write_file(config.dump_plan, dump_plan_json(result.plan).dump(2) + "\n");
    }
    clock.finish("plan");

    std::map<std::string, const PageRecord*> page_by_id;
    for (const auto& p : result.project.pages) page_by_id[p.page_id()] = &p;
    for (const auto& p : result.project.subpages) page_by_id[p.page_id()] = &p;

    result.kb = load_stores(config.mapping_table, config.doc_corpus);

    // scratch path satisfies enrich()'s persistence; the merged table is
    // re-emitted into the output directory at the end instead
    std::filesystem::path scratch =
        std::filesystem::temp_directory_path() /
        ("uitrans-learned-" + hex64(fnv1a64(config.out_dir.string())) + ".json");

    result.outcomes.resize(result.plan.units.size());
    std::vector<std::vector<Warning>> unit_warnings(result.plan.units.size());

    for (const auto& batch : detail::batches_of(result.plan)) {
        const PageRecord* page = nullptr;
        auto it = page_by_id.find(batch.page_id);
        PageRecord synthetic;
        if (it != page_by_id.end()) {
            page = it->second;
        } else {
            synthetic = detail::synthetic_page(batch.page_id);
            page = &synthetic;
        }

        detail::parallel_for(batch.end - batch.begin, config.jobs, [&](size_t offset) {
            size_t i = batch.begin + offset;
            TranslationUnit& unit = result.plan.units[i];
            Warnings& sink = unit_warnings[i];
            unit.description = describe_unit(unit, *page, backend, &sink);
            DomainKnowledge knowledge = query_mapping(unit, result.kb);
            result.outcomes[i] = reflect_loop(unit, knowledge, backend, result.project.resources,
                                              config.max_reflection_iters, &sink);
        });

        for (size_t i = batch.begin; i < batch.end; ++i) {
            auto& enrichment = result.outcomes[i].enrichment;
            if (!enrichment) continue;
            if (enrich(*enrichment, result.kb, scratch, &unit_warnings[i]) ==
                EnrichOutcome::inserted) {
                result.report.enrichments += 1;
                result.enriched = true;
            }
        }
    }
    std::error_code ec;
    std::filesystem::remove(scratch, ec);

    result.report.units = result.plan.units.size();
    for (size_t i = 0; i < result.outcomes.size(); ++i) {
        const ReflectOutcome& outcome = result.outcomes[i];
        if (outcome.component.mode == GenMode::mapped) {
            result.report.units_mapped += 1;
        } else {
            result.report.units_inferred += 1;
        }
        if (outcome.report.verdict == Verdict::pass) {
            result.report.reflection_passed += 1;
        } else {
            result.report.reflection_failed += 1;
        }
    }

    if (!config.dump_units.empty()) {
        for (const auto& outcome : result.outcomes) {
            write_file(config.dump_units / (outcome.component.unit_id + ".ets.partial"),
                       outcome.component.arkui_code);
        }
    }
    if (!config.dump_reflections.empty()) {
        std::string lines;
        for (const auto& outcome : result.outcomes) {
            lines += report_to_json(outcome.report).dump() + "\n";
        }
        write_file(config.dump_reflections, lines);
    }
    clock.finish("translate");

    std::map<std::string, const GeneratedComponent*> generated;
    for (const auto& outcome : result.outcomes) {
        generated[outcome.component.unit_id] = &outcome.component;
    }

    std::set<std::string> known_components;
    std::vector<detail::Batch> batches = detail::batches_of(result.plan);
    for (const auto& batch : batches) {
        if (batch.page_id.rfind(kSharedLayoutPrefix, 0) == 0) {
            known_components.insert(
                component_struct_name(batch.page_id.substr(kSharedLayoutPrefix.size())));
        }
    }

    std::vector<ArkUIPage> pages;
    std::vector<Warning> assembly_warnings;
    for (const auto& batch : batches) {
        std::vector<const TranslationUnit*> units;
        for (size_t i = batch.begin; i < batch.end; ++i) units.push_back(&result.plan.units[i]);
        const PageRecord* page = nullptr;
        PageRecord synthetic;
        auto it = page_by_id.find(batch.page_id);
        if (it != page_by_id.end()) {
            page = it->second;
        } else {
            synthetic = detail::synthetic_page(batch.page_id);
            page = &synthetic;
        }
        pages.push_back(assemble_page(units, generated, *page, known_components,
                                      &assembly_warnings));
    }
    result.harmony = assemble_project(std::move(pages), result.project, result.project.resources);
    for (const auto& p : result.harmony.pages) {
        if (p.is_component()) {
            result.report.components += 1;
        } else {
            result.report.pages += 1;
        }
    }
    clock.finish("assemble");

    result.report.warnings = result.project.warnings;
    for (const auto& per_unit : unit_warnings) {
        result.report.warnings.insert(result.report.warnings.end(), per_unit.begin(),
                                      per_unit.end());
    }
    result.report.warnings.insert(result.report.warnings.end(), assembly_warnings.begin(),
                                  assembly_warnings.end());
    result.report.warnings.insert(result.report.warnings.end(),
                                  result.harmony.warnings.begin(),
                                  result.harmony.warnings.end());
    return result;
}

// Stages the emitted project plus run artifacts in a sibling directory, then
// moves it over out_dir in one rename so a failed run leaves no partial tree.
inline void write_run_outputs(PipelineResult& result, const RunConfig& config) {
    namespace fs = std::filesystem;
    detail::StageClock clock(result.report);
    const fs::path& out = config.out_dir;
    if (fs::exists(out) && !fs::is_empty(out) && !config.force) {
        throw IoError("output directory " + out.string() + " is not empty (use --force)");
    }
    fs::path staging = out;
    staging += ".staging";
    fs::remove_all(staging);
    try {
        write_project(result.harmony, staging, true);
        if (result.enriched) {
            write_file(staging / "learned_mappings.json", dump_mapping_table(result.kb));
        }
        clock.finish("write");
        write_file(staging / "uitrans-report.json",
                   report_to_json(result.report).dump(2) + "\n");
        fs::remove_all(out);
        fs::rename(staging, out);
    } catch (...) {
        std::error_code ec;
        fs::remove_all(staging, ec);
        throw;
    }
}

}  // namespace uitrans
