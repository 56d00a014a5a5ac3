#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace quoteattr {

struct DecodingParams {
    double temperature = 0.0;  // greedy by default
    int max_output_tokens = 2048;
    std::optional<std::int64_t> seed;
};

struct TokenScore {
    std::string token;
    double logprob = 0.0;  // natural log of the conditional probability
};

// Uniform client contract over chat completion and token scoring.
class Backend {
  public:
    virtual ~Backend() = default;

    virtual std::string model_id() const = 0;
    virtual std::string complete(std::string_view prompt, const DecodingParams& params) = 0;

    virtual bool supports_scoring() const { return false; }
    virtual std::vector<TokenScore> score(std::string_view text);
};

// Deterministic per-token logprobs for mock backends: whitespace
// tokenization, score derived from a token content hash.
std::vector<TokenScore> mock_token_scores(std::string_view text);

// Pure table-driven backend for tests and offline runs.
class MockBackend : public Backend {
  public:
    explicit MockBackend(std::string model_id = "mock");

    void set_response(std::string_view prompt, std::string response);
    void set_default_response(std::string response);
    // Fallback responder consulted when no table entry matches; must be pure.
    void set_responder(std::function<std::string(std::string_view)> responder);

    std::string model_id() const override { return model_id_; }
    std::string complete(std::string_view prompt, const DecodingParams& params) override;
    bool supports_scoring() const override { return true; }
    std::vector<TokenScore> score(std::string_view text) override;

    int upstream_calls() const { return calls_.load(); }

  private:
    std::string model_id_;
    std::map<std::string, std::string, std::less<>> responses_;
    std::optional<std::string> default_response_;
    std::function<std::string(std::string_view)> responder_;
    std::atomic<int> calls_{0};
};

struct ParsedAttribution {
    std::map<int, std::string> entries;
    bool parse_failed = false;
    std::vector<std::string> warnings;
};

// Extracts the first balanced {...} region; accepts single- or
// double-quoted keys/values; non-integer keys are dropped with a warning.
// Never throws on arbitrary text.
ParsedAttribution parse_attribution_json(std::string_view response);

// Content of the first <speaker>...</speaker> region (the <\speaker>
// closing variant is accepted), trimmed; nullopt when absent.
std::optional<std::string> parse_speaker_tag(std::string_view response);

}  // namespace quoteattr
