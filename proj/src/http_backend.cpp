#include <json.hpp>

#include "sciagent/gateway.hpp"

#include <httplib.h>

namespace sciagent::gateway {

using nlohmann::json;

CompletionResponse HttpBackend::complete(const CompletionRequest& req) {
    httplib::Client client(config_.base_url);
    client.set_connection_timeout(std::chrono::duration<double>(config_.timeout_s));
    client.set_read_timeout(std::chrono::duration<double>(config_.timeout_s));

    httplib::Headers headers;
    if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

    json body{{"model", req.model.model},
              {"messages", json::array({json{{"role", "user"}, {"content", req.prompt}}})},
              {"temperature", req.model.temperature},
              {"max_tokens", req.model.max_output_tokens}};

    auto res = client.Post(config_.path, headers, body.dump(), "application/json");
    if (!res) throw TransportError("http backend: " + httplib::to_string(res.error()));

    if (res->status == 429) {
        std::optional<double> retry_after;
        if (res->has_header("Retry-After")) {
            try {
                retry_after = std::stod(res->get_header_value("Retry-After"));
            } catch (...) {
            }
        }
        throw RateLimitedError("http backend: rate limited (429)", retry_after);
    }
    if (res->status >= 500)
        throw TransportError("http backend: server error " + std::to_string(res->status));
    if (res->status != 200)
        throw BadResponseError("http backend: status " + std::to_string(res->status) + ": " +
                               res->body);

    json parsed = json::parse(res->body, nullptr, false);
    if (parsed.is_discarded() || !parsed.contains("choices") || parsed["choices"].empty())
        throw BadResponseError("http backend: malformed completion payload");

    const auto& choice = parsed["choices"][0];
    CompletionResponse out;
    out.text = choice.value("message", json::object()).value("content", "");
    out.finish_reason = choice.value("finish_reason", "stop");
    if (parsed.contains("usage")) {
        out.prompt_tokens = parsed["usage"].value("prompt_tokens", 0);
        out.completion_tokens = parsed["usage"].value("completion_tokens", 0);
    }
    if (out.text.empty()) throw BadResponseError("http backend: empty completion text");
    return out;
}

}  // namespace sciagent::gateway
