#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <filesystem>
#include <thread>

#include "uitrans/llm_gateway.hpp"

using namespace uitrans;
namespace fs = std::filesystem;
using namespace std::chrono_literals;

namespace {

PromptPayload generate_payload() {
    PromptPayload p;
    p.unit_xml = "<TextView android:text=\"@string/hi\"/>";
    p.description = "TextView widget with text '@string/hi'";
    p.knowledge = {{"map-textview-text", "TextView -> Text"},
                   {"map-button-button", "Button -> Button"},
                   {"doc-text", "Text renders a string"}};
    return p;
}

size_t count_occurrences(const std::string& haystack, const std::string& needle) {
    size_t count = 0;
    for (size_t pos = haystack.find(needle); pos != std::string::npos;
         pos = haystack.find(needle, pos + needle.size())) {
        ++count;
    }
    return count;
}

// Local chat-completions stand-in; each test configures its handler.
struct FakeServer {
    httplib::Server server;
    int port = 0;
    std::thread runner;

    explicit FakeServer(httplib::Server::Handler handler) {
        server.Post("/v1/chat/completions", std::move(handler));
        port = server.bind_to_any_port("127.0.0.1");
        REQUIRE(port > 0);
        runner = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~FakeServer() {
        server.stop();
        runner.join();
    }
    std::string endpoint() const {
        return "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
    }
};

std::string chat_body(const std::string& content) {
    ojson j;
    j["choices"] = ojson::array({ojson{{"message", ojson{{"content", content}}}}});
    j["usage"] = ojson{{"prompt_tokens", 12}, {"completion_tokens", 5}};
    return j.dump();
}

RemoteConfig fast_config(const std::string& endpoint) {
    RemoteConfig cfg;
    cfg.endpoint = endpoint;
    cfg.model = "test-model";
    cfg.timeout_s = 5.0;
    cfg.backoff_base = std::chrono::milliseconds(250);
    return cfg;
}

Sleeper recording_sleeper(std::vector<long>& sleeps) {
    return [&sleeps](std::chrono::milliseconds d) { sleeps.push_back(d.count()); };
}

fs::path fresh_dir(const std::string& hint) {
    static int counter = 0;
    fs::path dir = fs::temp_directory_path() /
                   ("uitrans_gw_" + hint + "_" + std::to_string(counter++));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("render_prompt emits one labeled block per knowledge item") {
    auto [system_text, user_text] = render_prompt(Role::generate, generate_payload());
    CHECK(!system_text.empty());
    CHECK(count_occurrences(user_text, "## Knowledge:") == 3);
    CHECK(user_text.find("map-textview-text") != std::string::npos);
    CHECK(user_text.find("<TextView android:text=\"@string/hi\"/>") != std::string::npos);

    auto again = render_prompt(Role::generate, generate_payload());
    CHECK(again.first == system_text);
    CHECK(again.second == user_text);
}

TEST_CASE("render_prompt drops knowledge blocks last-first but never the unit XML") {
    PromptPayload p = generate_payload();
    p.knowledge = {{"keep-a", std::string(300, 'a')},
                   {"keep-b", std::string(300, 'b')},
                   {"drop-c", std::string(300, 'c')}};
    size_t cap = 900;  // fits the fixed sections plus roughly two blocks

    auto [system_text, user_text] = render_prompt(Role::generate, p, cap);
    CHECK(system_text.size() + user_text.size() <= cap);
    CHECK(user_text.find(p.unit_xml) != std::string::npos);
    CHECK(count_occurrences(user_text, "## Knowledge:") == 2);
    CHECK(user_text.find("keep-a") != std::string::npos);
    CHECK(user_text.find("drop-c") == std::string::npos);

    // even a cap below the fixed sections keeps the unit XML
    auto tiny = render_prompt(Role::generate, p, 10);
    CHECK(tiny.second.find(p.unit_xml) != std::string::npos);
    CHECK(count_occurrences(tiny.second, "## Knowledge:") == 0);
}

TEST_CASE("render_prompt names the missing payload field") {
    PromptPayload p;
    p.unit_xml = "<Button/>";
    CHECK_THROWS_WITH(render_prompt(Role::generate, p),
                      Catch::Matchers::ContainsSubstring("description"));
    CHECK_THROWS_WITH(render_prompt(Role::reflect, p),
                      Catch::Matchers::ContainsSubstring("code"));
    PromptPayload empty;
    CHECK_THROWS_AS(render_prompt(Role::describe, empty), PayloadIncomplete);
}

TEST_CASE("complete rejects an empty user_text before any network activity") {
    size_t before = network_attempt_counter().load();
    TemplateBackend backend;
    GenerationRequest req;
    req.user_text = "";
    CHECK_THROWS_AS(complete(req, backend), PayloadIncomplete);
    CHECK(network_attempt_counter().load() == before);
}

TEST_CASE("template backend is a pure function of the request") {
    TemplateBackend backend;
    backend.set_renderer(Role::generate, [](const GenerationRequest& req) {
        return "Text('" + req.payload.value("word", std::string()) + "')";
    });

    GenerationRequest req;
    req.role = Role::generate;
    req.user_text = "prompt";
    req.payload = ojson{{"word", "hi"}};

    size_t before = network_attempt_counter().load();
    GenerationResponse a = complete(req, backend);
    GenerationResponse b = complete(req, backend);
    CHECK(a.text == "Text('hi')");
    CHECK(a.text == b.text);
    CHECK(a.backend_id == "template");
    CHECK(network_attempt_counter().load() == before);

    GenerationRequest other;
    other.role = Role::reflect;
    other.user_text = "prompt";
    CHECK_THROWS_AS(complete(other, backend), PayloadIncomplete);
}

TEST_CASE("remote backend parses a chat completion response") {
    FakeServer server([](const httplib::Request& req, httplib::Response& res) {
        ojson body = ojson::parse(req.body);
        REQUIRE(body["model"] == "test-model");
        REQUIRE(body["messages"].size() == 2);
        REQUIRE(body["messages"][0]["role"] == "system");
        REQUIRE(body["messages"][1]["content"] == "translate this");
        res.set_content(chat_body("Text('hi')"), "application/json");
    });

    RemoteBackend backend(fast_config(server.endpoint()));
    GenerationRequest req;
    req.role = Role::generate;
    req.system_text = "system";
    req.user_text = "translate this";

    size_t before = network_attempt_counter().load();
    GenerationResponse res = complete(req, backend);
    CHECK(res.text == "Text('hi')");
    CHECK(res.backend_id == "remote:test-model");
    CHECK(res.tokens_in == 12);
    CHECK(res.tokens_out == 5);
    CHECK(network_attempt_counter().load() == before + 1);
    CHECK(backend.attempts_made() == 1);
}

TEST_CASE("persistent 500s exhaust the retries with exponential backoff") {
    std::atomic<int> hits{0};
    FakeServer server([&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        res.status = 500;
    });

    std::vector<long> sleeps;
    RemoteBackend backend(fast_config(server.endpoint()), recording_sleeper(sleeps));
    GenerationRequest req;
    req.user_text = "x";

    CHECK_THROWS_AS(complete(req, backend), BackendUnavailable);
    CHECK(hits.load() == 3);
    CHECK(backend.attempts_made() == 3);
    CHECK(sleeps == std::vector<long>{250, 500});
}

TEST_CASE("a 4xx fails immediately with status and body") {
    std::atomic<int> hits{0};
    FakeServer server([&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        res.status = 404;
        res.set_content("no such model", "text/plain");
    });

    RemoteBackend backend(fast_config(server.endpoint()));
    GenerationRequest req;
    req.user_text = "x";

    try {
        complete(req, backend);
        FAIL("expected BackendError");
    } catch (const BackendError& e) {
        CHECK(e.status() == 404);
        CHECK(std::string(e.what()).find("no such model") != std::string::npos);
    }
    CHECK(hits.load() == 1);
}

TEST_CASE("an unreachable endpoint becomes BackendUnavailable after three attempts") {
    RemoteConfig cfg = fast_config("http://127.0.0.1:1/v1/chat/completions");
    cfg.timeout_s = 1.0;
    std::vector<long> sleeps;
    RemoteBackend backend(cfg, recording_sleeper(sleeps));
    GenerationRequest req;
    req.user_text = "x";

    size_t before = network_attempt_counter().load();
    CHECK_THROWS_AS(complete(req, backend), BackendUnavailable);
    CHECK(backend.attempts_made() == 3);
    CHECK(network_attempt_counter().load() == before + 3);
    CHECK(sleeps.size() == 2);
}

TEST_CASE("a malformed 200 body is a BackendError, not a retry") {
    std::atomic<int> hits{0};
    FakeServer server([&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        res.set_content("{\"weird\": true}", "application/json");
    });

    RemoteBackend backend(fast_config(server.endpoint()));
    GenerationRequest req;
    req.user_text = "x";
    CHECK_THROWS_AS(complete(req, backend), BackendError);
    CHECK(hits.load() == 1);
}

TEST_CASE("a named but unset api key env var is a configuration error") {
    RemoteConfig cfg = fast_config("http://127.0.0.1:9/v1");
    cfg.api_key_env = "UITRANS_TEST_NO_SUCH_KEY";
    CHECK_THROWS_AS(RemoteBackend(cfg), ConfigError);
}

TEST_CASE("the concurrency limiter caps in-flight requests") {
    ConcurrencyLimiter limiter(4);
    std::atomic<int> active{0};
    std::atomic<int> peak{0};

    std::vector<std::thread> workers;
    for (int i = 0; i < 12; ++i) {
        workers.emplace_back([&] {
            auto guard = limiter.acquire();
            int now = ++active;
            int expected = peak.load();
            while (now > expected && !peak.compare_exchange_weak(expected, now)) {
            }
            std::this_thread::sleep_for(5ms);
            --active;
        });
    }
    for (auto& w : workers) w.join();

    CHECK(peak.load() <= 4);
    CHECK(limiter.peak_active() == peak.load());
    CHECK(limiter.peak_active() >= 1);
}

TEST_CASE("recorded exchanges replay verbatim and misses are loud") {
    fs::path dir = fresh_dir("record");

    TemplateBackend inner;
    inner.set_renderer(Role::generate,
                       [](const GenerationRequest&) { return "Column() {}"; });
    RecordingBackend recorder(inner, dir);

    GenerationRequest req;
    req.role = Role::generate;
    req.system_text = "sys";
    req.user_text = "make a column";
    GenerationResponse live = complete(req, recorder);
    CHECK(live.text == "Column() {}");
    CHECK(fs::exists(dir / (request_key(req) + ".json")));

    ReplayBackend replay(dir);
    GenerationResponse replayed = complete(req, replay);
    CHECK(replayed.text == live.text);
    CHECK(replayed.backend_id == "template");

    GenerationRequest unseen = req;
    unseen.user_text = "make a row";
    CHECK_THROWS_AS(complete(unseen, replay), ReplayMiss);
}
