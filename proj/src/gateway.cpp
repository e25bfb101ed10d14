#include "sciagent/gateway.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace sciagent::gateway {

using nlohmann::json;

const ModelDescriptor& RoleAssignment::for_role(prompt::Role r) const {
    switch (r) {
        case prompt::Role::consultant: return consultant;
        case prompt::Role::reviewer: return reviewer;
        default: return programmer;
    }
}

void RoleAssignment::validate() const {
    for (const auto* d : {&consultant, &programmer, &reviewer}) {
        if (d->temperature < 0) throw Error("role assignment: temperature must be >= 0");
        if (d->model.empty()) throw Error("role assignment: empty model name");
    }
}

Fixture Fixture::parse(const std::string& jsonl) {
    Fixture f;
    std::istringstream in(jsonl);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json obj = json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object() || !obj.contains("role") || !obj.contains("text"))
            throw Error("fixture line " + std::to_string(line_no) +
                        ": expected {\"role\":...,\"text\":...}");
        FixtureReply r;
        r.role = obj["role"].get<std::string>();
        r.text = obj["text"].get<std::string>();
        if (obj.contains("sample")) r.sample = obj["sample"].get<int>();
        f.replies.push_back(std::move(r));
    }
    return f;
}

Fixture Fixture::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw Error("cannot open fixture file " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

void Fixture::append(const std::string& role, const std::string& text, std::optional<int> sample) {
    replies.push_back({role, text, sample});
}

std::string Fixture::to_jsonl() const {
    std::string out;
    for (const auto& r : replies) {
        json obj{{"role", r.role}, {"text", r.text}};
        if (r.sample) obj["sample"] = *r.sample;
        out += obj.dump();
        out += '\n';
    }
    return out;
}

ScriptedBackend::ScriptedBackend(Fixture fixture, int sample_index) {
    for (auto& r : fixture.replies) {
        if (r.sample && *r.sample != sample_index) continue;
        queues_[r.role].push_back(std::move(r.text));
    }
}

CompletionResponse ScriptedBackend::complete(const CompletionRequest& req) {
    std::string role = to_string(req.role);
    // Both programmer phases drain the same queue: a fixture scripts the
    // programmer's replies in pipeline order.
    if (role == "programmer_initial" || role == "programmer_revise") role = "programmer";
    auto it = queues_.find(role);
    if (it == queues_.end() || it->second.empty())
        throw TransportError("scripted backend: fixture exhausted for role '" + role + "'");
    CompletionResponse resp;
    resp.text = std::move(it->second.front());
    it->second.pop_front();
    resp.prompt_tokens = estimate_tokens(req.prompt);
    resp.completion_tokens = estimate_tokens(resp.text);
    if (resp.text.empty()) throw BadResponseError("scripted backend: empty reply in fixture");
    return resp;
}

HttpBackend::Config HttpBackend::Config::from_env() {
    Config c;
    if (const char* v = std::getenv("SCIAGENT_API_BASE_URL")) c.base_url = v;
    if (const char* v = std::getenv("SCIAGENT_API_KEY")) c.api_key = v;
    return c;
}

HttpBackend::HttpBackend(Config config) : config_(std::move(config)) {
    if (config_.base_url.empty())
        throw Error("http backend: no base URL (set SCIAGENT_API_BASE_URL)");
}

Gateway::Gateway(std::shared_ptr<Backend> backend, TruncationPolicy policy, RetryPolicy retry)
    : backend_(std::move(backend)), policy_(policy), retry_(retry) {
    policy_.validate();
    if (!backend_) throw Error("gateway: null backend");
}

CompletionResponse Gateway::complete(const CompletionRequest& req) {
    if (estimate_tokens(req.prompt) > policy_.prompt_budget)
        throw BudgetExceededError("prompt of ~" + std::to_string(estimate_tokens(req.prompt)) +
                                  " tokens exceeds budget " + std::to_string(policy_.prompt_budget));

    if (retry_.min_interval.count() > 0) {
        std::lock_guard lock(pace_mutex_);
        auto now = std::chrono::steady_clock::now();
        auto next = last_call_ + retry_.min_interval;
        if (next > now) std::this_thread::sleep_until(next);
        last_call_ = std::chrono::steady_clock::now();
    }

    int attempt = 0;
    while (true) {
        auto t0 = std::chrono::steady_clock::now();
        try {
            CompletionResponse resp = backend_->complete(req);
            resp.latency_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            resp.retry_count = attempt;
            if (resp.text.empty()) throw BadResponseError("backend returned empty text");
            return resp;
        } catch (const RateLimitedError& e) {
            if (attempt >= retry_.max_retries) throw;
            auto wait = retry_.base_backoff * (1 << attempt);
            if (e.retry_after_s)
                wait = std::chrono::milliseconds(static_cast<long>(*e.retry_after_s * 1000));
            std::this_thread::sleep_for(wait);
        } catch (const TransportError&) {
            if (attempt >= retry_.max_retries) throw;
            std::this_thread::sleep_for(retry_.base_backoff * (1 << attempt));
        }
        ++attempt;
    }
}

}  // namespace sciagent::gateway
