#pragma once

#include <map>
#include <string>
#include <vector>

#include "quoteattr/corpus.hpp"
#include "quoteattr/inference.hpp"

namespace quoteattr {

// Marked regions found in a prompt passage: (local id, inner text with
// any wrapping quotation marks removed).
std::vector<std::pair<int, std::string>> extract_marked_quotes(std::string_view prompt);

// Pure backend answering every prompt with the gold speaker, resolved by
// looking the quoted text (attribution) or target quote (speaker-guess
// prompts) up in the loaded novels. Name-cloze prompts are answered by
// aligning the masked passage against the novel texts.
class GoldOracleBackend : public Backend {
  public:
    explicit GoldOracleBackend(const std::vector<Novel>& novels);

    std::string model_id() const override { return "mock-gold"; }
    std::string complete(std::string_view prompt, const DecodingParams& params) override;
    bool supports_scoring() const override { return true; }
    std::vector<TokenScore> score(std::string_view text) override { return mock_token_scores(text); }

  private:
    std::string speaker_for_subquote(std::string_view text) const;
    std::string speaker_for_quote_text(std::string_view text) const;
    std::string masked_name(std::string_view passage) const;

    std::map<std::string, std::string, std::less<>> by_subquote_;
    std::map<std::string, std::string, std::less<>> by_quote_text_;
    std::vector<std::string> texts_;
};

// Pure backend answering a fixed name everywhere; with a non-alias name
// it drives every prediction to "invalid".
class FixedNameBackend : public Backend {
  public:
    explicit FixedNameBackend(std::string name, std::string model_id = "mock-wrong");

    std::string model_id() const override { return model_id_; }
    std::string complete(std::string_view prompt, const DecodingParams& params) override;
    bool supports_scoring() const override { return true; }
    std::vector<TokenScore> score(std::string_view text) override { return mock_token_scores(text); }

  private:
    std::string name_;
    std::string model_id_;
};

}  // namespace quoteattr
