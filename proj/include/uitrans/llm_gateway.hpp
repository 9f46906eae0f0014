#pragma once

// Generation backends behind one interface: a deterministic template backend,
// a remote chat-completions HTTP backend with retry and a concurrency cap,
// and record/replay wrappers. All network egress happens here.

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "uitrans/common.hpp"

namespace uitrans {

// ---- requests and responses --------------------------------------------------------

enum class Role { parse_assist, describe, generate, reflect, assemble };

inline std::string to_string(Role role) {
    switch (role) {
        case Role::parse_assist: return "parse_assist";
        case Role::describe: return "describe";
        case Role::generate: return "generate";
        case Role::reflect: return "reflect";
        case Role::assemble: return "assemble";
    }
    return "unknown";
}

struct GenerationRequest {
    Role role = Role::generate;
    std::string system_text;
    std::string user_text;
    std::vector<std::pair<std::string, std::string>> context_items;
    int max_output_tokens = 1024;
    double temperature = 0.0;
    // structured payload for deterministic renderers; remote backends ignore it
    ojson payload;
};

struct GenerationResponse {
    std::string text;
    std::string backend_id;
    long latency_ms = 0;
    int tokens_in = -1;   // -1 when the backend reports no counts
    int tokens_out = -1;
};

// ---- prompt assembly ----------------------------------------------------------------

struct PromptPayload {
    std::string unit_xml;
    std::string description;
    std::string code;
    std::vector<std::pair<std::string, std::string>> knowledge;
    std::string feedback;
};

inline constexpr size_t kMaxPromptChars = 16384;

namespace detail {

inline void require_field(const std::string& value, const char* name) {
    if (value.empty()) throw PayloadIncomplete(name);
}

inline std::string fenced(const std::string& lang, const std::string& body) {
    return "```" + lang + "\n" + body + (body.ends_with('\n') ? "" : "\n") + "```";
}

}  // namespace detail

// Deterministic prompt assembly. Knowledge items render as labeled fenced
// blocks; when the prompt exceeds `max_chars` they are dropped last-first.
// The unit XML is never truncated.
inline std::pair<std::string, std::string> render_prompt(Role role, const PromptPayload& p,
                                                         size_t max_chars = kMaxPromptChars) {
    std::string system_text;
    switch (role) {
        case Role::parse_assist:
            detail::require_field(p.unit_xml, "unit_xml");
            system_text = "You analyze Android app sources and answer structural "
                          "questions precisely.";
            break;
        case Role::describe:
            detail::require_field(p.unit_xml, "unit_xml");
            system_text = "You describe the purpose of one Android layout unit in a "
                          "single short sentence.";
            break;
        case Role::generate:
            detail::require_field(p.unit_xml, "unit_xml");
            detail::require_field(p.description, "description");
            system_text = "You translate one Android layout unit into HarmonyOS ArkUI "
                          "(ArkTS) code. Reply with code only.";
            break;
        case Role::reflect:
            detail::require_field(p.code, "code");
            detail::require_field(p.description, "description");
            system_text = "You review generated ArkUI code against its functional "
                          "description and list concrete defects.";
            break;
        case Role::assemble:
            detail::require_field(p.description, "description");
            system_text = "You arrange generated ArkUI components into a complete "
                          "HarmonyOS page.";
            break;
    }

    std::vector<std::string> fixed;
    if (!p.unit_xml.empty()) {
        fixed.push_back("## Unit XML\n" + detail::fenced("xml", p.unit_xml));
    }
    if (!p.description.empty()) {
        fixed.push_back("## Functional description\n" + p.description);
    }
    if (!p.code.empty()) {
        fixed.push_back("## Generated code\n" + detail::fenced("", p.code));
    }
    if (!p.feedback.empty()) {
        fixed.push_back("## Feedback\n" + p.feedback);
    }

    auto assemble_text = [&](size_t knowledge_count) {
        std::string user;
        for (size_t i = 0; i < fixed.size(); ++i) {
            if (i) user += "\n\n";
            user += fixed[i];
        }
        // knowledge goes after the unit material, before feedback; ordering
        // within the prompt is cosmetic, the block count is the contract
        for (size_t i = 0; i < knowledge_count; ++i) {
            user += "\n\n## Knowledge: " + p.knowledge[i].first + "\n" +
                    detail::fenced("", p.knowledge[i].second);
        }
        return user;
    };

    size_t keep = p.knowledge.size();
    std::string user_text = assemble_text(keep);
    while (keep > 0 && system_text.size() + user_text.size() > max_chars) {
        --keep;
        user_text = assemble_text(keep);
    }
    return {system_text, user_text};
}

// ---- the backend seam -----------------------------------------------------------

// Process-wide count of network send attempts; the remote backend is the only
// code path that increments it.
inline std::atomic<size_t>& network_attempt_counter() {
    static std::atomic<size_t> counter{0};
    return counter;
}

class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string id() const = 0;
    virtual GenerationResponse complete(const GenerationRequest& req) = 0;
};

// Single entry point the rest of the library calls.
inline GenerationResponse complete(const GenerationRequest& req, Backend& backend) {
    if (req.user_text.empty()) throw PayloadIncomplete("user_text");
    GenerationResponse res = backend.complete(req);
    if (res.backend_id.empty()) res.backend_id = backend.id();
    return res;
}

// ---- template backend -----------------------------------------------------------

// Pure function of the request: renderers are fixed at construction and must
// be deterministic. The generator and reflector modules supply the real ones.
class TemplateBackend : public Backend {
public:
    using Renderer = std::function<std::string(const GenerationRequest&)>;

    void set_renderer(Role role, Renderer renderer) {
        renderers_[role] = std::move(renderer);
    }

    std::string id() const override { return "template"; }

    GenerationResponse complete(const GenerationRequest& req) override {
        auto it = renderers_.find(req.role);
        if (it == renderers_.end()) {
            throw PayloadIncomplete("template renderer for role " + to_string(req.role));
        }
        GenerationResponse res;
        res.text = it->second(req);
        res.backend_id = id();
        return res;
    }

private:
    std::map<Role, Renderer> renderers_;
};

// ---- concurrency limiter ---------------------------------------------------------

class ConcurrencyLimiter {
public:
    explicit ConcurrencyLimiter(int cap) : cap_(cap > 0 ? cap : 1) {}

    class Guard {
    public:
        explicit Guard(ConcurrencyLimiter* limiter) : limiter_(limiter) {}
        Guard(Guard&& other) noexcept : limiter_(other.limiter_) { other.limiter_ = nullptr; }
        Guard(const Guard&) = delete;
        Guard& operator=(const Guard&) = delete;
        Guard& operator=(Guard&&) = delete;
        ~Guard() {
            if (limiter_) limiter_->release();
        }

    private:
        ConcurrencyLimiter* limiter_;
    };

    Guard acquire() {
        std::unique_lock lock(mutex_);
        cv_.wait(lock, [&] { return active_ < cap_; });
        ++active_;
        peak_ = std::max(peak_, active_);
        return Guard(this);
    }

    int peak_active() const {
        std::lock_guard lock(mutex_);
        return peak_;
    }

private:
    void release() {
        std::lock_guard lock(mutex_);
        --active_;
        cv_.notify_one();
    }

    mutable std::mutex mutex_;
    std::condition_variable cv_;
    int cap_;
    int active_ = 0;
    int peak_ = 0;
};

// ---- remote backend -------------------------------------------------------------

using Sleeper = std::function<void(std::chrono::milliseconds)>;

struct RemoteConfig {
    std::string endpoint;  // e.g. http://127.0.0.1:8089/v1/chat/completions
    std::string model = "default";
    std::string api_key_env;  // name of the env var holding the key, optional
    double timeout_s = 60.0;
    int max_concurrency = 4;
    int max_attempts = 3;
    std::chrono::milliseconds backoff_base{250};
};

class RemoteBackend : public Backend {
public:
    explicit RemoteBackend(RemoteConfig cfg, Sleeper sleeper = {})
        : cfg_(std::move(cfg)),
          sleeper_(sleeper ? std::move(sleeper)
                           : [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }),
          limiter_(cfg_.max_concurrency) {
        if (cfg_.endpoint.empty()) throw ConfigError("backend.endpoint is required");
        size_t scheme = cfg_.endpoint.find("://");
        if (scheme == std::string::npos) {
            throw ConfigError("backend.endpoint must include a scheme: " + cfg_.endpoint);
        }
        size_t path = cfg_.endpoint.find('/', scheme + 3);
        base_url_ = path == std::string::npos ? cfg_.endpoint : cfg_.endpoint.substr(0, path);
        path_ = path == std::string::npos ? "/" : cfg_.endpoint.substr(path);
        if (!cfg_.api_key_env.empty()) {
            const char* key = std::getenv(cfg_.api_key_env.c_str());
            if (!key || !*key) {
                throw ConfigError("environment variable " + cfg_.api_key_env + " is not set");
            }
            api_key_ = key;
        }
    }

    std::string id() const override { return "remote:" + cfg_.model; }

    size_t attempts_made() const { return attempts_.load(); }
    const ConcurrencyLimiter& limiter() const { return limiter_; }

    GenerationResponse complete(const GenerationRequest& req) override {
        ojson body;
        body["model"] = cfg_.model;
        body["messages"] = ojson::array({ojson{{"role", "system"}, {"content", req.system_text}},
                                         ojson{{"role", "user"}, {"content", req.user_text}}});
        body["temperature"] = req.temperature;
        body["max_tokens"] = req.max_output_tokens;
        std::string payload = body.dump();

        auto guard = limiter_.acquire();
        auto started = std::chrono::steady_clock::now();
        std::string last_error;
        for (int attempt = 1; attempt <= cfg_.max_attempts; ++attempt) {
            if (attempt > 1) {
                sleeper_(cfg_.backoff_base * (1 << (attempt - 2)));
            }
            ++attempts_;
            ++network_attempt_counter();

            httplib::Client client(base_url_);
            int sec = static_cast<int>(cfg_.timeout_s);
            int usec = static_cast<int>((cfg_.timeout_s - sec) * 1e6);
            client.set_connection_timeout(sec, usec);
            client.set_read_timeout(sec, usec);
            client.set_write_timeout(sec, usec);
            httplib::Headers headers;
            if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

            auto http = client.Post(path_, headers, payload, "application/json");
            if (!http) {
                last_error = "connection failed: " + httplib::to_string(http.error());
                continue;
            }
            if (http->status >= 500) {
                last_error = "HTTP " + std::to_string(http->status);
                continue;
            }
            if (http->status < 200 || http->status >= 300) {
                throw BackendError(http->status, http->body.substr(0, 200));
            }
            return parse_response(*http, started);
        }
        throw BackendUnavailable("backend unreachable after " +
                                 std::to_string(cfg_.max_attempts) + " attempts (" +
                                 last_error + ")");
    }

private:
    GenerationResponse parse_response(const httplib::Response& http,
                                      std::chrono::steady_clock::time_point started) {
        ojson parsed = ojson::parse(http.body, nullptr, false);
        if (parsed.is_discarded() || !parsed.contains("choices") ||
            !parsed["choices"].is_array() || parsed["choices"].empty() ||
            !parsed["choices"][0].contains("message")) {
            throw BackendError(http.status, "malformed completion body: " +
                                                http.body.substr(0, 200));
        }
        GenerationResponse res;
        res.text = parsed["choices"][0]["message"].value("content", std::string());
        res.backend_id = id();
        res.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - started)
                             .count();
        if (parsed.contains("usage")) {
            res.tokens_in = parsed["usage"].value("prompt_tokens", -1);
            res.tokens_out = parsed["usage"].value("completion_tokens", -1);
        }
        return res;
    }

    RemoteConfig cfg_;
    Sleeper sleeper_;
    std::string base_url_;
    std::string path_;
    std::string api_key_;
    std::atomic<size_t> attempts_{0};
    ConcurrencyLimiter limiter_;
};

// ---- record / replay ------------------------------------------------------------

inline ojson request_to_json(const GenerationRequest& req) {
    ojson j;
    j["role"] = to_string(req.role);
    j["system_text"] = req.system_text;
    j["user_text"] = req.user_text;
    ojson items = ojson::array();
    for (const auto& [label, text] : req.context_items) {
        items.push_back(ojson::array({label, text}));
    }
    j["context_items"] = std::move(items);
    j["max_output_tokens"] = req.max_output_tokens;
    j["temperature"] = req.temperature;
    if (!req.payload.is_null()) j["payload"] = req.payload;
    return j;
}

inline std::string request_key(const GenerationRequest& req) {
    return hex64(fnv1a64(request_to_json(req).dump()));
}

// Wraps another backend and stores each exchange as <dir>/<request-hash>.json.
class RecordingBackend : public Backend {
public:
    RecordingBackend(Backend& inner, std::filesystem::path dir)
        : inner_(inner), dir_(std::move(dir)) {
        std::filesystem::create_directories(dir_);
    }

    std::string id() const override { return inner_.id(); }

    GenerationResponse complete(const GenerationRequest& req) override {
        GenerationResponse res = inner_.complete(req);
        ojson j;
        j["request"] = request_to_json(req);
        j["response"] = ojson{{"text", res.text},
                              {"backend_id", res.backend_id},
                              {"latency_ms", res.latency_ms},
                              {"tokens_in", res.tokens_in},
                              {"tokens_out", res.tokens_out}};
        std::lock_guard lock(mutex_);
        write_file(dir_ / (request_key(req) + ".json"), j.dump(2) + "\n");
        return res;
    }

private:
    Backend& inner_;
    std::filesystem::path dir_;
    std::mutex mutex_;
};

// Serves previously recorded responses; a request with no recording is a miss.
class ReplayBackend : public Backend {
public:
    explicit ReplayBackend(std::filesystem::path dir) : dir_(std::move(dir)) {}

    std::string id() const override { return "replay"; }

    GenerationResponse complete(const GenerationRequest& req) override {
        std::filesystem::path file = dir_ / (request_key(req) + ".json");
        if (!std::filesystem::exists(file)) {
            throw ReplayMiss("no recording for " + to_string(req.role) + " request " +
                             request_key(req));
        }
        ojson j = ojson::parse(read_file(file));
        const ojson& r = j.at("response");
        GenerationResponse res;
        res.text = r.value("text", std::string());
        res.backend_id = r.value("backend_id", std::string("replay"));
        res.latency_ms = 0;
        res.tokens_in = r.value("tokens_in", -1);
        res.tokens_out = r.value("tokens_out", -1);
        return res;
    }

private:
    std::filesystem::path dir_;
};

}  // namespace uitrans
