#include "quoteattr/inference.hpp"

#include <cmath>

#include "quoteattr/errors.hpp"
#include "quoteattr/strings.hpp"

namespace quoteattr {

std::vector<TokenScore> Backend::score(std::string_view) {
    throw CapabilityError("backend '" + model_id() + "' does not support token scoring");
}

std::vector<TokenScore> mock_token_scores(std::string_view text) {
    std::vector<TokenScore> scores;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && str::is_ascii_space(text[i])) ++i;
        std::size_t start = i;
        while (i < text.size() && !str::is_ascii_space(text[i])) ++i;
        if (i == start) break;
        std::string token(text.substr(start, i - start));
        // FNV-1a, folded down to a stable pseudo-logprob in [-9, -0.5].
        std::uint64_t h = 1469598103934665603ull;
        for (unsigned char c : token) {
            h ^= c;
            h *= 1099511628211ull;
        }
        double u = static_cast<double>(h % 10000) / 10000.0;
        scores.push_back({std::move(token), -0.5 - 8.5 * u});
    }
    return scores;
}

MockBackend::MockBackend(std::string model_id) : model_id_(std::move(model_id)) {}

void MockBackend::set_response(std::string_view prompt, std::string response) {
    responses_[std::string(prompt)] = std::move(response);
}

void MockBackend::set_default_response(std::string response) {
    default_response_ = std::move(response);
}

void MockBackend::set_responder(std::function<std::string(std::string_view)> responder) {
    responder_ = std::move(responder);
}

std::string MockBackend::complete(std::string_view prompt, const DecodingParams&) {
    calls_.fetch_add(1);
    auto it = responses_.find(prompt);
    if (it != responses_.end()) return it->second;
    if (responder_) return responder_(prompt);
    if (default_response_) return *default_response_;
    throw TransportError("mock backend has no response for the given prompt");
}

std::vector<TokenScore> MockBackend::score(std::string_view text) {
    calls_.fetch_add(1);
    return mock_token_scores(text);
}

// ---------------------------------------------------------------------------
// Response parsing

namespace {

// Span of the first balanced {...} region outside string literals.
std::optional<std::pair<std::size_t, std::size_t>> balanced_region(std::string_view s) {
    for (std::size_t start = 0; start < s.size(); ++start) {
        if (s[start] != '{') continue;
        int depth = 0;
        char quote = 0;
        for (std::size_t i = start; i < s.size(); ++i) {
            char c = s[i];
            if (quote) {
                if (c == '\\') {
                    ++i;
                } else if (c == quote) {
                    quote = 0;
                }
                continue;
            }
            if (c == '\'' || c == '"') {
                quote = c;
            } else if (c == '{') {
                ++depth;
            } else if (c == '}') {
                if (--depth == 0) return std::make_pair(start, i + 1);
            }
        }
    }
    return std::nullopt;
}

struct TokenCursor {
    std::string_view s;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < s.size() && str::is_ascii_space(s[pos])) ++pos;
    }
    bool done() {
        skip_ws();
        return pos >= s.size();
    }
    bool accept(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    // Quoted or bare token ending at one of the stop characters.
    std::optional<std::string> token(std::string_view stops) {
        skip_ws();
        if (pos >= s.size()) return std::nullopt;
        char c = s[pos];
        if (c == '\'' || c == '"') {
            char quote = c;
            ++pos;
            std::string out;
            while (pos < s.size()) {
                char ch = s[pos];
                if (ch == '\\' && pos + 1 < s.size()) {
                    out.push_back(s[pos + 1]);
                    pos += 2;
                    continue;
                }
                if (ch == quote) {
                    ++pos;
                    return out;
                }
                out.push_back(ch);
                ++pos;
            }
            return out;  // unterminated string: take what we saw
        }
        std::size_t start = pos;
        while (pos < s.size() && stops.find(s[pos]) == std::string_view::npos) ++pos;
        return std::string(str::trim(s.substr(start, pos - start)));
    }
};

std::optional<int> as_int(std::string_view s) {
    auto t = str::trim(s);
    if (t.empty()) return std::nullopt;
    std::size_t i = 0;
    if (t[0] == '-' || t[0] == '+') i = 1;
    if (i == t.size()) return std::nullopt;
    long v = 0;
    for (; i < t.size(); ++i) {
        if (!str::is_ascii_digit(t[i])) return std::nullopt;
        v = v * 10 + (t[i] - '0');
        if (v > 1000000000) return std::nullopt;
    }
    return static_cast<int>(t[0] == '-' ? -v : v);
}

}  // namespace

ParsedAttribution parse_attribution_json(std::string_view response) {
    ParsedAttribution out;
    auto region = balanced_region(response);
    if (!region) {
        out.parse_failed = true;
        return out;
    }
    // Interior without the outer braces.
    TokenCursor cur{response.substr(region->first + 1, region->second - region->first - 2)};
    while (!cur.done()) {
        auto key = cur.token(":,}");
        if (!key) break;
        if (!cur.accept(':')) {
            // Stray token without a value; skip to the next comma.
            cur.token(",");
            cur.accept(',');
            continue;
        }
        auto value = cur.token(",}");
        cur.accept(',');
        if (!value) break;
        auto id = as_int(*key);
        if (!id) {
            out.warnings.push_back("dropped non-integer key '" + *key + "'");
            continue;
        }
        out.entries[*id] = *value;
    }
    return out;
}

std::optional<std::string> parse_speaker_tag(std::string_view response) {
    static constexpr std::string_view kOpen = "<speaker>";
    std::size_t open = response.find(kOpen);
    if (open == std::string_view::npos) return std::nullopt;
    std::size_t content = open + kOpen.size();
    std::size_t close = response.find("</speaker>", content);
    std::size_t alt = response.find("<\\speaker>", content);
    std::size_t end = std::min(close, alt);
    if (end == std::string_view::npos) return std::nullopt;
    return std::string(str::trim(response.substr(content, end - content)));
}

}  // namespace quoteattr
