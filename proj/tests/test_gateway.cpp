#include <doctest.h>

#include <atomic>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "sciagent/gateway.hpp"
#include "test_util.hpp"

using namespace sciagent;
using namespace sciagent::gateway;

namespace {

CompletionRequest request_for(prompt::Role role, const std::string& text) {
    CompletionRequest req;
    req.prompt = text;
    req.role = role;
    req.model.model = "test-model";
    return req;
}

}  // namespace

TEST_CASE("fixture parse and scripted replay order") {
    std::string jsonl =
        R"({"role":"consultant","text":"expansion A"})" "\n"
        R"({"role":"programmer","text":"code A"})" "\n"
        R"({"role":"programmer","text":"code B"})" "\n";
    Fixture f = Fixture::parse(jsonl);
    REQUIRE(f.replies.size() == 3);

    ScriptedBackend backend(f);
    CHECK(backend.complete(request_for(prompt::Role::consultant, "any")).text == "expansion A");
    CHECK(backend.complete(request_for(prompt::Role::programmer_initial, "any")).text == "code A");
    CHECK(backend.complete(request_for(prompt::Role::programmer_revise, "any")).text == "code B");
    CHECK_THROWS_AS(backend.complete(request_for(prompt::Role::programmer_initial, "again")),
                    TransportError);
}

TEST_CASE("two scripted backends replay a fixture identically") {
    Fixture f;
    f.append("consultant", "one");
    f.append("programmer", "two");
    ScriptedBackend a(f), b(f);
    CHECK(a.complete(request_for(prompt::Role::consultant, "x")).text ==
          b.complete(request_for(prompt::Role::consultant, "y")).text);
    CHECK(a.complete(request_for(prompt::Role::programmer_initial, "x")).text ==
          b.complete(request_for(prompt::Role::programmer_initial, "y")).text);
}

TEST_CASE("fixture sample tags route replies to their sample only") {
    Fixture f;
    f.append("programmer", "shared");
    f.append("programmer", "only for 1", 1);
    ScriptedBackend s0(f, 0), s1(f, 1);
    CHECK(s0.complete(request_for(prompt::Role::programmer_initial, "p")).text == "shared");
    CHECK_THROWS_AS(s0.complete(request_for(prompt::Role::programmer_initial, "p")),
                    TransportError);
    CHECK(s1.complete(request_for(prompt::Role::programmer_initial, "p")).text == "shared");
    CHECK(s1.complete(request_for(prompt::Role::programmer_revise, "p")).text == "only for 1");
}

TEST_CASE("fixture round-trips through jsonl") {
    Fixture f;
    f.append("consultant", "line with \"quotes\" and\nnewline");
    f.append("reviewer", "plain", 2);
    Fixture g = Fixture::parse(f.to_jsonl());
    REQUIRE(g.replies.size() == 2);
    CHECK(g.replies[0].text == f.replies[0].text);
    CHECK(g.replies[1].sample == 2);
}

TEST_CASE("gateway rejects prompts over the token budget") {
    Fixture f;
    f.append("consultant", "reply");
    Gateway gw(std::make_shared<ScriptedBackend>(f), TruncationPolicy{});
    std::string huge(4 * 1000000, 'x');  // ~10^6 tokens vs budget 4500
    CHECK_THROWS_AS(gw.complete(request_for(prompt::Role::consultant, huge)), BudgetExceededError);
    CHECK(gw.complete(request_for(prompt::Role::consultant, "small")).text == "reply");
}

TEST_CASE("role assignment validation and lookup") {
    RoleAssignment roles;
    roles.consultant.model = "c";
    roles.programmer.model = "p";
    roles.reviewer.model = "r";
    roles.validate();
    CHECK(roles.for_role(prompt::Role::consultant).model == "c");
    CHECK(roles.for_role(prompt::Role::programmer_initial).model == "p");
    CHECK(roles.for_role(prompt::Role::programmer_revise).model == "p");
    CHECK(roles.for_role(prompt::Role::reviewer).model == "r");
    roles.reviewer.temperature = -1;
    CHECK_THROWS_AS(roles.validate(), Error);
}

// ---------------------------------------------------------------------------
// Live HTTP contract against a loopback server.
// ---------------------------------------------------------------------------

namespace {

struct TestServer {
    httplib::Server server;
    std::thread thread;
    int port = 0;
    std::atomic<int> hits{0};

    explicit TestServer(std::function<void(int, const httplib::Request&, httplib::Response&)> fn) {
        server.Post("/v1/chat/completions",
                    [this, fn](const httplib::Request& req, httplib::Response& res) {
                        fn(hits.fetch_add(1), req, res);
                    });
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~TestServer() {
        server.stop();
        thread.join();
    }
    HttpBackend::Config config() const {
        HttpBackend::Config c;
        c.base_url = "http://127.0.0.1:" + std::to_string(port);
        c.api_key = "test-key";
        return c;
    }
};

std::string ok_payload(const std::string& text) {
    nlohmann::json body{
        {"choices",
         nlohmann::json::array(
             {nlohmann::json{{"message", {{"role", "assistant"}, {"content", text}}},
                             {"finish_reason", "stop"}}})},
        {"usage", {{"prompt_tokens", 10}, {"completion_tokens", 5}}}};
    return body.dump();
}

}  // namespace

TEST_CASE("http backend retries 429 and reports the retry count") {
    TestServer server([](int hit, const httplib::Request&, httplib::Response& res) {
        if (hit < 2) {
            res.status = 429;
            res.set_header("Retry-After", "0");
            res.set_content("{\"error\":\"slow down\"}", "application/json");
        } else {
            res.status = 200;
            res.set_content(ok_payload("recovered"), "application/json");
        }
    });
    RetryPolicy retry;
    retry.max_retries = 3;
    retry.base_backoff = std::chrono::milliseconds(1);
    Gateway gw(std::make_shared<HttpBackend>(server.config()), TruncationPolicy{}, retry);
    CompletionResponse resp = gw.complete(request_for(prompt::Role::consultant, "ping"));
    CHECK(resp.text == "recovered");
    CHECK(resp.retry_count == 2);
    CHECK(server.hits.load() == 3);
}

TEST_CASE("http backend forwards the chat-completions request shape") {
    TestServer server([](int, const httplib::Request& req, httplib::Response& res) {
        nlohmann::json body = nlohmann::json::parse(req.body);
        bool ok = body["model"] == "test-model" && body["messages"][0]["role"] == "user" &&
                  body["messages"][0]["content"] == "the prompt" &&
                  req.get_header_value("Authorization") == "Bearer test-key";
        res.status = 200;
        res.set_content(ok_payload(ok ? "shape-ok" : "shape-bad"), "application/json");
    });
    Gateway gw(std::make_shared<HttpBackend>(server.config()), TruncationPolicy{});
    CHECK(gw.complete(request_for(prompt::Role::consultant, "the prompt")).text == "shape-ok");
}

TEST_CASE("well-formed error payloads are not retried") {
    TestServer server([](int, const httplib::Request&, httplib::Response& res) {
        res.status = 400;
        res.set_content("{\"error\":{\"message\":\"bad request\"}}", "application/json");
    });
    RetryPolicy retry;
    retry.max_retries = 5;
    retry.base_backoff = std::chrono::milliseconds(1);
    Gateway gw(std::make_shared<HttpBackend>(server.config()), TruncationPolicy{}, retry);
    CHECK_THROWS_AS(gw.complete(request_for(prompt::Role::consultant, "x")), BadResponseError);
    CHECK(server.hits.load() == 1);
}

TEST_CASE("server errors are retried as transient") {
    TestServer server([](int hit, const httplib::Request&, httplib::Response& res) {
        if (hit == 0) {
            res.status = 500;
            res.set_content("oops", "text/plain");
        } else {
            res.status = 200;
            res.set_content(ok_payload("after blip"), "application/json");
        }
    });
    RetryPolicy retry;
    retry.max_retries = 2;
    retry.base_backoff = std::chrono::milliseconds(1);
    Gateway gw(std::make_shared<HttpBackend>(server.config()), TruncationPolicy{}, retry);
    CompletionResponse resp = gw.complete(request_for(prompt::Role::consultant, "x"));
    CHECK(resp.text == "after blip");
    CHECK(resp.retry_count == 1);
}

TEST_CASE("malformed success payloads raise BadResponse") {
    TestServer server([](int, const httplib::Request&, httplib::Response& res) {
        res.status = 200;
        res.set_content("{\"choices\":[]}", "application/json");
    });
    Gateway gw(std::make_shared<HttpBackend>(server.config()), TruncationPolicy{});
    CHECK_THROWS_AS(gw.complete(request_for(prompt::Role::consultant, "x")), BadResponseError);
}
