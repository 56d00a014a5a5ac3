#include "quoteattr/http_backend.hpp"

#include <chrono>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "quoteattr/errors.hpp"

namespace quoteattr {

namespace {

// Splits "scheme://host:port/some/prefix" into client base and path prefix.
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
    auto scheme_end = endpoint.find("://");
    std::size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    auto path_start = endpoint.find('/', host_start);
    if (path_start == std::string::npos) return {endpoint, ""};
    std::string prefix = endpoint.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {endpoint.substr(0, path_start), prefix};
}

}  // namespace

HttpBackend::HttpBackend(HttpBackendConfig config)
    : config_(std::move(config)),
      in_flight_(std::max(1, std::min(config_.max_in_flight, 256))) {
    if (config_.endpoint.empty()) throw TransportError("http backend requires an endpoint");
    if (config_.model.empty()) throw TransportError("http backend requires a model id");
    std::tie(host_, path_prefix_) = split_endpoint(config_.endpoint);
}

HttpBackend::~HttpBackend() = default;

std::string HttpBackend::post_json(const std::string& path, const std::string& body) {
    in_flight_.acquire();
    struct Release {
        std::counting_semaphore<256>& sem;
        ~Release() { sem.release(); }
    } release{in_flight_};

    httplib::Client client(host_);
    client.set_connection_timeout(30, 0);
    client.set_read_timeout(config_.timeout_seconds, 0);
    httplib::Headers headers;
    if (!config_.api_key.empty())
        headers.emplace("Authorization", "Bearer " + config_.api_key);

    std::string last_error;
    for (int attempt = 0; attempt < std::max(1, config_.retries); ++attempt) {
        if (attempt > 0)
            std::this_thread::sleep_for(
                std::chrono::milliseconds(config_.retry_backoff_ms * attempt));
        auto res = client.Post(path_prefix_ + path, headers, body, "application/json");
        if (!res) {
            last_error = "connection failed: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 200 && res->status < 300) return res->body;
        last_error = "http " + std::to_string(res->status) + ": " + res->body.substr(0, 512);
        if (res->status >= 400 && res->status < 500 && res->status != 429)
            break;  // not retryable
    }
    throw TransportError("request to " + host_ + path + " failed: " + last_error);
}

std::string HttpBackend::complete(std::string_view prompt, const DecodingParams& params) {
    nlohmann::json body = {
        {"model", config_.model},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", std::string(prompt)}}})},
        {"temperature", params.temperature},
        {"max_tokens", params.max_output_tokens},
    };
    if (params.seed) body["seed"] = *params.seed;

    auto raw = post_json("/v1/chat/completions", body.dump());
    auto parsed = nlohmann::json::parse(raw, nullptr, false);
    if (parsed.is_discarded() || !parsed.contains("choices") || parsed["choices"].empty())
        throw TransportError("malformed chat completion response");
    std::string content = parsed["choices"][0]["message"]["content"].get<std::string>();
    if (content.empty()) throw TransportError("chat completion returned empty content");
    return content;
}

std::vector<TokenScore> HttpBackend::score(std::string_view text) {
    if (!config_.scoring)
        throw CapabilityError("backend '" + config_.model + "' has token scoring disabled");
    nlohmann::json body = {
        {"model", config_.model}, {"prompt", std::string(text)}, {"max_tokens", 0},
        {"echo", true},           {"logprobs", 0},
    };
    auto raw = post_json("/v1/completions", body.dump());
    auto parsed = nlohmann::json::parse(raw, nullptr, false);
    if (parsed.is_discarded() || !parsed.contains("choices") || parsed["choices"].empty())
        throw TransportError("malformed completions response");
    const auto& lp = parsed["choices"][0]["logprobs"];
    std::vector<TokenScore> scores;
    const auto& tokens = lp["tokens"];
    const auto& values = lp["token_logprobs"];
    for (std::size_t i = 0; i < tokens.size() && i < values.size(); ++i) {
        if (values[i].is_null()) continue;  // first token carries no conditional
        scores.push_back({tokens[i].get<std::string>(), values[i].get<double>()});
    }
    return scores;
}

}  // namespace quoteattr
