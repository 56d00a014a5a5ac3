#include "quoteattr/oracle.hpp"

#include <algorithm>

#include "quoteattr/errors.hpp"
#include "quoteattr/strings.hpp"

namespace quoteattr {

namespace {

bool strip_wrapping_quote(std::string& s) {
    auto strip_one = [&](bool front) {
        if (s.empty()) return false;
        if (front ? s.front() == '"' : s.back() == '"') {
            if (front) s.erase(0, 1);
            else s.pop_back();
            return true;
        }
        if (s.size() >= 3) {
            const unsigned char* p = reinterpret_cast<const unsigned char*>(
                front ? s.data() : s.data() + s.size() - 3);
            if (p[0] == 0xE2 && p[1] == 0x80 && (p[2] == 0x9C || p[2] == 0x9D)) {
                if (front) s.erase(0, 3);
                else s.erase(s.size() - 3);
                return true;
            }
        }
        return false;
    };
    bool any = strip_one(true);
    any |= strip_one(false);
    return any;
}

std::string attribution_answer(const std::vector<std::pair<int, std::string>>& quotes,
                               const std::function<std::string(std::string_view)>& lookup) {
    std::map<int, std::string> answers;
    for (const auto& [local, text] : quotes) {
        if (!answers.count(local)) answers[local] = lookup(text);
    }
    std::string out = "{ ";
    bool first = true;
    for (const auto& [local, name] : answers) {
        if (!first) out += ", ";
        first = false;
        out += "'" + std::to_string(local) + "': '" + name + "'";
    }
    out += " }";
    return out;
}

std::string_view target_quote_of(std::string_view prompt) {
    static constexpr std::string_view kLabel = "Target quote:";
    std::size_t pos = prompt.rfind(kLabel);
    if (pos == std::string_view::npos) return {};
    return str::trim(prompt.substr(pos + kLabel.size()));
}

}  // namespace

std::vector<std::pair<int, std::string>> extract_marked_quotes(std::string_view prompt) {
    std::vector<std::pair<int, std::string>> out;
    std::size_t i = 0;
    while (i < prompt.size()) {
        if (prompt[i] != '|') {
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        while (j < prompt.size() && str::is_ascii_digit(prompt[j])) ++j;
        if (j == i + 1 || j >= prompt.size() || prompt[j] != '|') {
            ++i;
            continue;
        }
        int id = std::stoi(std::string(prompt.substr(i + 1, j - i - 1)));
        std::string closing = "|" + std::to_string(id) + "|";
        std::size_t content = j + 1;
        std::size_t close = prompt.find(closing, content);
        if (close == std::string_view::npos) {
            ++i;
            continue;
        }
        std::string inner(prompt.substr(content, close - content));
        strip_wrapping_quote(inner);
        out.emplace_back(id, std::move(inner));
        i = close + closing.size();
    }
    return out;
}

GoldOracleBackend::GoldOracleBackend(const std::vector<Novel>& novels) {
    for (const auto& novel : novels) {
        texts_.push_back(novel.text);
        for (const auto& quote : novel.quotes) {
            by_quote_text_.emplace(quote.text, quote.speaker);
            for (const auto& sub : quote.sub_quotations) by_subquote_.emplace(sub, quote.speaker);
        }
    }
}

std::string GoldOracleBackend::speaker_for_subquote(std::string_view text) const {
    auto it = by_subquote_.find(text);
    if (it != by_subquote_.end()) return it->second;
    return "Unknown Speaker";
}

std::string GoldOracleBackend::speaker_for_quote_text(std::string_view text) const {
    auto it = by_quote_text_.find(text);
    if (it != by_quote_text_.end()) return it->second;
    auto sub = by_subquote_.find(text);
    if (sub != by_subquote_.end()) return sub->second;
    return "Unknown Speaker";
}

std::string GoldOracleBackend::masked_name(std::string_view passage) const {
    std::size_t mask = passage.find("[MASK]");
    if (mask == std::string_view::npos) return "Unknown Speaker";
    // Align the context around [MASK] against the novel texts; the
    // original bytes between prefix and suffix are the masked name.
    std::size_t ctx = 24;
    std::string_view prefix = passage.substr(mask > ctx ? mask - ctx : 0,
                                             mask > ctx ? ctx : mask);
    std::string_view suffix = passage.substr(mask + 6, ctx);
    for (const auto& text : texts_) {
        std::size_t at = text.find(prefix);
        while (at != std::string::npos) {
            std::size_t name_start = at + prefix.size();
            std::size_t suffix_at = suffix.empty() ? name_start : text.find(suffix, name_start);
            if (suffix_at != std::string::npos && suffix_at >= name_start &&
                suffix_at - name_start <= 64) {
                auto name = str::trim(std::string_view(text).substr(name_start,
                                                                    suffix_at - name_start));
                if (!name.empty()) return std::string(name);
            }
            at = text.find(prefix, at + 1);
        }
    }
    return "Unknown Speaker";
}

std::string GoldOracleBackend::complete(std::string_view prompt, const DecodingParams&) {
    auto marked = extract_marked_quotes(prompt);
    if (!marked.empty() && prompt.find("quote attributions") != std::string_view::npos)
        return attribution_answer(marked,
                                  [this](std::string_view t) { return speaker_for_subquote(t); });

    auto target = target_quote_of(prompt);
    if (!target.empty()) {
        std::string inner(target);
        strip_wrapping_quote(inner);
        std::string speaker = speaker_for_quote_text(target);
        if (speaker == "Unknown Speaker") speaker = speaker_for_quote_text(inner);
        return "<speaker>" + speaker + "</speaker>";
    }

    if (prompt.find("[MASK]") != std::string_view::npos) {
        static constexpr std::string_view kLabel = "Passage:";
        std::size_t pos = prompt.find(kLabel);
        std::string_view passage =
            pos == std::string_view::npos ? prompt : prompt.substr(pos + kLabel.size());
        return "<speaker>" + masked_name(passage) + "</speaker>";
    }
    throw TransportError("gold oracle cannot interpret the prompt");
}

FixedNameBackend::FixedNameBackend(std::string name, std::string model_id)
    : name_(std::move(name)), model_id_(std::move(model_id)) {}

std::string FixedNameBackend::complete(std::string_view prompt, const DecodingParams&) {
    auto marked = extract_marked_quotes(prompt);
    if (!marked.empty() && prompt.find("quote attributions") != std::string_view::npos)
        return attribution_answer(marked, [this](std::string_view) { return name_; });
    return "<speaker>" + name_ + "</speaker>";
}

}  // namespace quoteattr
