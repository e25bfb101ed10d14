#pragma once

#include <chrono>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "sciagent/error.hpp"
#include "sciagent/prompt.hpp"
#include "sciagent/tokens.hpp"

namespace sciagent::gateway {

struct TransportError : Error {
    using Error::Error;
};
struct RateLimitedError : Error {
    RateLimitedError(const std::string& msg, std::optional<double> retry_after_s)
        : Error(msg), retry_after_s(retry_after_s) {}
    std::optional<double> retry_after_s;
};
struct BadResponseError : Error {
    using Error::Error;
};
struct BudgetExceededError : Error {
    using Error::Error;
};

struct ModelDescriptor {
    std::string backend_id = "scripted";
    std::string model = "scripted-default";
    double temperature = 0.0;
    int max_output_tokens = 4096;
};

// Which model plays which pipeline role.
struct RoleAssignment {
    ModelDescriptor consultant;
    ModelDescriptor programmer;
    ModelDescriptor reviewer;

    const ModelDescriptor& for_role(prompt::Role r) const;
    void validate() const;
};

struct CompletionRequest {
    std::string prompt;
    ModelDescriptor model;
    prompt::Role role = prompt::Role::consultant;
};

struct CompletionResponse {
    std::string text;
    std::string finish_reason = "stop";
    std::size_t prompt_tokens = 0;
    std::size_t completion_tokens = 0;
    double latency_s = 0;
    int retry_count = 0;
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual CompletionResponse complete(const CompletionRequest& req) = 0;
};

// Deterministic replay backend. A fixture is an ordered list of replies per
// role; complete() pops the queue of the requesting role. Fixture files are
// JSON Lines, one object per reply: {"role": ..., "text": ...} with an
// optional "sample" index restricting the reply to one campaign sample.
struct FixtureReply {
    std::string role;
    std::string text;
    std::optional<int> sample;
};

struct Fixture {
    std::vector<FixtureReply> replies;

    static Fixture load(const std::filesystem::path& file);
    static Fixture parse(const std::string& jsonl);
    void append(const std::string& role, const std::string& text,
                std::optional<int> sample = std::nullopt);
    std::string to_jsonl() const;
};

class ScriptedBackend : public Backend {
public:
    explicit ScriptedBackend(Fixture fixture, int sample_index = 0);
    CompletionResponse complete(const CompletionRequest& req) override;

private:
    std::map<std::string, std::deque<std::string>> queues_;
};

struct RetryPolicy {
    int max_retries = 3;
    std::chrono::milliseconds base_backoff{200};
    std::chrono::milliseconds min_interval{0};  // per-backend burst spacing
};

// Chat-completions HTTP contract: POST {model, messages, temperature,
// max_tokens} to base_url + path with a bearer token. Nothing vendor-specific.
class HttpBackend : public Backend {
public:
    struct Config {
        std::string base_url;                     // e.g. http://localhost:8080
        std::string api_key;                      // sent as Authorization: Bearer <key>
        std::string path = "/v1/chat/completions";
        double timeout_s = 120.0;

        static Config from_env();  // SCIAGENT_API_BASE_URL / SCIAGENT_API_KEY
    };
    explicit HttpBackend(Config config);
    CompletionResponse complete(const CompletionRequest& req) override;

private:
    Config config_;
};

// Budget enforcement + transient-failure retry wrapper around a backend.
// Shareable across threads; a per-gateway limiter serializes bursts.
class Gateway {
public:
    Gateway(std::shared_ptr<Backend> backend, TruncationPolicy policy, RetryPolicy retry = {});

    CompletionResponse complete(const CompletionRequest& req);
    const TruncationPolicy& policy() const { return policy_; }

private:
    std::shared_ptr<Backend> backend_;
    TruncationPolicy policy_;
    RetryPolicy retry_;
    std::mutex pace_mutex_;
    std::chrono::steady_clock::time_point last_call_{};
};

}  // namespace sciagent::gateway
