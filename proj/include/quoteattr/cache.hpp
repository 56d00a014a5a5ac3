#pragma once

#include <filesystem>
#include <mutex>
#include <string>
#include <string_view>

#include "quoteattr/inference.hpp"

namespace quoteattr {

std::string sha256_hex(std::string_view data);

// Disk cache for completions and token scores, keyed by
// sha256(model id, request kind, prompt, decoding params). Lets long runs
// resume and makes reruns byte-identical with a pure backend.
class ResponseCache {
  public:
    explicit ResponseCache(std::filesystem::path dir);

    std::optional<std::string> get_completion(std::string_view model, std::string_view prompt,
                                              const DecodingParams& params) const;
    void put_completion(std::string_view model, std::string_view prompt,
                        const DecodingParams& params, std::string_view response);

    std::optional<std::vector<TokenScore>> get_scores(std::string_view model,
                                                      std::string_view text) const;
    void put_scores(std::string_view model, std::string_view text,
                    const std::vector<TokenScore>& scores);

    const std::filesystem::path& dir() const { return dir_; }

  private:
    std::filesystem::path path_for(std::string_view key) const;

    std::filesystem::path dir_;
    mutable std::mutex write_mutex_;
};

// Wraps a backend with a ResponseCache; identical repeated requests hit
// the inner backend once.
class CachingBackend : public Backend {
  public:
    CachingBackend(Backend& inner, ResponseCache& cache) : inner_(inner), cache_(cache) {}

    std::string model_id() const override { return inner_.model_id(); }
    bool supports_scoring() const override { return inner_.supports_scoring(); }
    std::string complete(std::string_view prompt, const DecodingParams& params) override;
    std::vector<TokenScore> score(std::string_view text) override;

  private:
    Backend& inner_;
    ResponseCache& cache_;
};

}  // namespace quoteattr
