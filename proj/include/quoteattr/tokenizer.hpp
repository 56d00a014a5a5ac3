#pragma once

#include <memory>
#include <string_view>

namespace quoteattr {

// Token accounting used by the chunker. Injected so an endpoint-backed
// exact tokenizer can replace the default approximation.
class TokenCounter {
  public:
    virtual ~TokenCounter() = default;

    virtual int count(std::string_view text) const = 0;

    // Byte length of the longest prefix, ending at a word boundary, whose
    // token count does not exceed max_tokens.
    virtual std::size_t truncate_bytes(std::string_view text, int max_tokens) const = 0;
};

// Approximates subword inflation as ceil(words * factor).
class WordTokenCounter final : public TokenCounter {
  public:
    explicit WordTokenCounter(double factor = 1.3) : factor_(factor) {}

    int count(std::string_view text) const override;
    std::size_t truncate_bytes(std::string_view text, int max_tokens) const override;

  private:
    double factor_;
};

const TokenCounter& default_token_counter();

}  // namespace quoteattr
