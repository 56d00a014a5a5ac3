#pragma once

#include <memory>
#include <semaphore>
#include <string>

#include "quoteattr/inference.hpp"

namespace quoteattr {

struct HttpBackendConfig {
    std::string endpoint;     // base URL, e.g. http://localhost:8000
    std::string model;
    std::string api_key;      // empty = no Authorization header
    int retries = 3;
    int retry_backoff_ms = 500;
    int timeout_seconds = 600;
    int max_in_flight = 4;
    bool scoring = true;      // endpoint offers the echo+logprobs completions route
};

// OpenAI-compatible chat-completion client; token scoring goes through
// the completions route with echo and logprobs enabled.
class HttpBackend : public Backend {
  public:
    explicit HttpBackend(HttpBackendConfig config);
    ~HttpBackend() override;

    std::string model_id() const override { return config_.model; }
    bool supports_scoring() const override { return config_.scoring; }
    std::string complete(std::string_view prompt, const DecodingParams& params) override;
    std::vector<TokenScore> score(std::string_view text) override;

  private:
    std::string post_json(const std::string& path, const std::string& body);

    HttpBackendConfig config_;
    std::string host_;         // scheme://host[:port]
    std::string path_prefix_;  // path component of the endpoint, if any
    std::counting_semaphore<256> in_flight_;
};

}  // namespace quoteattr
