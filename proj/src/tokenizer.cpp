#include "quoteattr/tokenizer.hpp"

#include <cmath>

#include "quoteattr/strings.hpp"

namespace quoteattr {

int WordTokenCounter::count(std::string_view text) const {
    return static_cast<int>(std::ceil(factor_ * static_cast<double>(str::word_count(text))));
}

std::size_t WordTokenCounter::truncate_bytes(std::string_view text, int max_tokens) const {
    if (max_tokens <= 0) return 0;
    // ceil(factor * w) <= M  <=>  w <= floor(M / factor)
    const auto max_words = static_cast<std::size_t>(std::floor(max_tokens / factor_));
    if (max_words == 0) return 0;

    std::size_t words = 0;
    bool in_word = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (str::is_ascii_space(text[i])) {
            in_word = false;
        } else if (!in_word) {
            in_word = true;
            if (++words > max_words) return i;  // prefix ends before this word
        }
    }
    return text.size();
}

const TokenCounter& default_token_counter() {
    static const WordTokenCounter counter;
    return counter;
}

}  // namespace quoteattr
