#include "quoteattr/memaudit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "quoteattr/errors.hpp"
#include "quoteattr/strings.hpp"

namespace quoteattr {

NamePool NamePool::from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open name pool file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    auto j = nlohmann::json::parse(buf.str());
    NamePool pool;
    if (j.contains("female_first")) pool.female_first = j["female_first"].get<std::vector<std::string>>();
    if (j.contains("male_first")) pool.male_first = j["male_first"].get<std::vector<std::string>>();
    if (j.contains("last")) pool.last = j["last"].get<std::vector<std::string>>();
    return pool;
}

namespace {

struct Match {
    std::size_t pos;
    std::size_t len;
    std::string_view alias;
};

bool boundary_before(std::string_view text, std::size_t pos) {
    if (pos == 0) return true;
    char c = text[pos - 1];
    return !(str::is_ascii_alpha(c) || str::is_ascii_digit(c));
}

bool boundary_after(std::string_view text, std::size_t end) {
    if (end >= text.size()) return true;
    char c = text[end];
    return !(str::is_ascii_alpha(c) || str::is_ascii_digit(c));
}

bool is_proper_alias(std::string_view alias) {
    bool word_start = true;
    for (char c : alias) {
        if (str::is_ascii_space(c)) {
            word_start = true;
        } else {
            if (word_start && str::is_ascii_upper(c)) return true;
            word_start = false;
        }
    }
    return false;
}

std::vector<std::string_view> proper_aliases_longest_first(const Character& character) {
    std::vector<std::string_view> out;
    for (const auto& alias : character.aliases)
        if (is_proper_alias(alias)) out.push_back(alias);
    std::sort(out.begin(), out.end(), [](std::string_view a, std::string_view b) {
        if (a.size() != b.size()) return a.size() > b.size();
        return a < b;
    });
    return out;
}

// Non-overlapping, longest-first, word-bounded occurrences.
std::vector<Match> scan_mentions(std::string_view text,
                                 const std::vector<std::string_view>& aliases) {
    std::vector<Match> matches;
    if (aliases.empty()) return matches;
    std::size_t pos = 0;
    while (pos < text.size()) {
        if (!boundary_before(text, pos)) {
            ++pos;
            continue;
        }
        bool matched = false;
        for (auto alias : aliases) {
            if (alias.empty() || pos + alias.size() > text.size()) continue;
            if (text.compare(pos, alias.size(), alias) != 0) continue;
            if (!boundary_after(text, pos + alias.size())) continue;
            matches.push_back({pos, alias.size(), alias});
            pos += alias.size();
            matched = true;
            break;
        }
        if (!matched) ++pos;
    }
    return matches;
}

std::string strip_trailing_period(std::string_view word) {
    while (!word.empty() && word.back() == '.') word.remove_suffix(1);
    return std::string(word);
}

const std::vector<std::string>& honorifics_or_default(const std::vector<std::string>& given) {
    return given.empty() ? default_honorifics() : given;
}

std::optional<std::string> leading_honorific(std::string_view mention,
                                             const std::vector<std::string>& honorifics) {
    std::size_t end = 0;
    while (end < mention.size() && !str::is_ascii_space(mention[end])) ++end;
    std::string first = strip_trailing_period(mention.substr(0, end));
    for (const auto& h : honorifics)
        if (str::iequals(first, h)) return std::string(mention.substr(0, end));
    return std::nullopt;
}

// Mirrors the mention's shape: honorifics are preserved, surnames map to
// the replacement surname, bare first names to the replacement first name.
std::string shape_replacement(std::string_view mention, const Character& speaker,
                              const std::string& first, const std::string& last,
                              const std::vector<std::string>& honorifics) {
    auto words = [](std::string_view s) {
        std::vector<std::string_view> out;
        std::size_t i = 0;
        while (i < s.size()) {
            while (i < s.size() && str::is_ascii_space(s[i])) ++i;
            std::size_t b = i;
            while (i < s.size() && !str::is_ascii_space(s[i])) ++i;
            if (i > b) out.push_back(s.substr(b, i - b));
        }
        return out;
    };

    auto honorific = leading_honorific(mention, honorifics);
    auto mention_words = words(mention);
    if (honorific) {
        std::size_t rest = mention_words.size() - 1;
        if (rest <= 1) return *honorific + " " + last;
        return *honorific + " " + first + " " + last;
    }
    if (mention_words.size() == 1) {
        auto canonical_words = words(speaker.id);
        if (canonical_words.size() >= 2 &&
            str::iequals(mention_words[0], canonical_words.back()))
            return last;
        return first;
    }
    return first + " " + last;
}

std::set<std::string> alias_word_set(const AliasMap& map) {
    std::set<std::string> out;
    for (const auto& c : map.characters()) {
        for (const auto& alias : c.aliases) {
            std::size_t i = 0;
            while (i < alias.size()) {
                while (i < alias.size() && str::is_ascii_space(alias[i])) ++i;
                std::size_t b = i;
                while (i < alias.size() && !str::is_ascii_space(alias[i])) ++i;
                if (i > b) out.insert(str::fold(strip_trailing_period(
                    std::string_view(alias).substr(b, i - b))));
            }
        }
    }
    return out;
}

struct PassageWindow {
    std::string text;
    std::size_t quote_begin;  // quote extent, passage-local
    std::size_t quote_end;
};

std::optional<PassageWindow> context_window(const Novel& novel, const Quote& quote,
                                            int context_sentences) {
    int chapter = novel.chapter_of(quote);
    if (chapter < 0) return std::nullopt;
    const ByteSpan chapter_span = novel.chapters[static_cast<std::size_t>(chapter)].span;
    std::string_view chapter_text = novel.chapter_text(chapter);
    auto sentences = segment_sentences(chapter_text);
    if (sentences.empty()) return std::nullopt;

    const std::size_t qb = quote.extent().begin - chapter_span.begin;
    const std::size_t qe = quote.extent().end - chapter_span.begin;

    std::size_t first = 0, last = sentences.size() - 1;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        if (sentences[i].contains(qb)) first = i;
        if (sentences[i].contains(qe == 0 ? 0 : qe - 1)) last = i;
    }
    std::size_t lo = first >= static_cast<std::size_t>(context_sentences)
                         ? first - static_cast<std::size_t>(context_sentences)
                         : 0;
    std::size_t hi = std::min(sentences.size() - 1, last + static_cast<std::size_t>(context_sentences));

    const std::size_t begin = sentences[lo].begin;
    const std::size_t end = sentences[hi].end;
    PassageWindow window;
    window.text = std::string(chapter_text.substr(begin, end - begin));
    window.quote_begin = qb - begin;
    window.quote_end = qe - begin;
    return window;
}

}  // namespace

CsgBuildResult build_csg_item(const Novel& novel, const Quote& quote, Rng& rng,
                              const CsgBuildOptions& options) {
    const auto& honorifics = honorifics_or_default(options.honorifics);

    const Character* speaker = novel.characters.find(quote.speaker);
    if (!speaker) return CsgIneligible::NoNamedMention;
    if (speaker->gender == Gender::Unknown) return CsgIneligible::GenderUnknown;

    auto window = context_window(novel, quote, options.context_sentences);
    if (!window) return CsgIneligible::OutsideChapters;

    auto aliases = proper_aliases_longest_first(*speaker);
    auto matches = scan_mentions(window->text, aliases);
    if (matches.empty()) return CsgIneligible::NoNamedMention;

    const bool cloze = quote.quote_type == QuoteType::Explicit;
    std::size_t masked_index = matches.size();  // sentinel: none
    if (cloze) {
        if (!quote.referring_expression) return CsgIneligible::NoReferringExpression;
        const std::string& expr = *quote.referring_expression;
        // Occurrence of the referring expression nearest to the quote.
        std::size_t best = std::string::npos;
        std::size_t best_dist = SIZE_MAX;
        std::size_t at = window->text.find(expr);
        while (at != std::string::npos) {
            std::size_t dist = at > window->quote_begin ? at - window->quote_begin
                                                        : window->quote_begin - at;
            if (dist < best_dist) {
                best_dist = dist;
                best = at;
            }
            at = window->text.find(expr, at + 1);
        }
        if (best == std::string::npos) return CsgIneligible::NoReferringExpression;
        for (std::size_t i = 0; i < matches.size(); ++i) {
            if (matches[i].pos >= best && matches[i].pos + matches[i].len <= best + expr.size()) {
                masked_index = i;
                break;
            }
        }
        if (masked_index == matches.size()) return CsgIneligible::NoReferringExpression;
    }

    // The corrupted passage must keep at least one (replaced) named mention.
    std::size_t visible_mentions = matches.size() - (masked_index < matches.size() ? 1 : 0);
    if (visible_mentions == 0) return CsgIneligible::NoNamedMention;

    // Replacement components must be fresh for this novel.
    auto used_words = alias_word_set(novel.characters);
    const auto& first_pool =
        speaker->gender == Gender::Female ? options.pool.female_first : options.pool.male_first;
    std::vector<std::string> firsts, lasts;
    for (const auto& name : first_pool)
        if (!used_words.count(str::fold(name))) firsts.push_back(name);
    for (const auto& name : options.pool.last)
        if (!used_words.count(str::fold(name))) lasts.push_back(name);
    if (firsts.empty() || lasts.empty())
        throw Error("replacement name pool exhausted for novel " + novel.id);

    CSGItem item;
    item.quote_id = quote.quote_id;
    item.variant = cloze ? CsgVariant::Cloze : CsgVariant::Speaker;
    item.quote_type = quote.quote_type;
    item.passage = window->text;
    item.true_speaker = speaker->id;
    item.replacement_first = firsts[rng.below(firsts.size())];
    item.replacement_last = lasts[rng.below(lasts.size())];
    item.replacement_name = item.replacement_first + " " + item.replacement_last;
    item.replacement_gender = speaker->gender;
    item.target_quote = quote.text;
    item.book_title = novel.title;
    item.book_author = novel.author;

    std::string corrupted;
    corrupted.reserve(window->text.size());
    std::size_t pos = 0;
    std::set<std::string> emitted;
    for (std::size_t i = 0; i < matches.size(); ++i) {
        const auto& m = matches[i];
        corrupted.append(window->text, pos, m.pos - pos);
        if (i == masked_index) {
            corrupted += "[MASK]";
        } else {
            std::string shaped = shape_replacement(m.alias, *speaker, item.replacement_first,
                                                   item.replacement_last, honorifics);
            emitted.insert(shaped);
            corrupted += shaped;
        }
        pos = m.pos + m.len;
    }
    corrupted.append(window->text, pos, window->text.size() - pos);
    item.corrupted_passage = std::move(corrupted);
    item.emitted_forms.assign(emitted.begin(), emitted.end());

    // Corruption-completeness self check; a violation is a bug, not bad data.
    if (!scan_mentions(item.corrupted_passage, aliases).empty())
        throw Error("corruption left a speaker mention in quote " + quote.quote_id);
    return item;
}

CsgClass classify_csg(const std::optional<std::string>& predicted_name, const CSGItem& item,
                      const Novel& novel, const std::vector<std::string>& honorifics) {
    if (!predicted_name) return CsgClass::Wrong;
    const auto& titles = honorifics_or_default(honorifics);

    auto strip_honorific = [&](std::string_view name) -> std::string {
        auto h = leading_honorific(name, titles);
        if (!h) return std::string(str::trim(name));
        return std::string(str::trim(name.substr(h->size())));
    };

    std::string pred = std::string(str::trim(*predicted_name));
    std::vector<std::string> pred_forms = {str::fold(pred), str::fold(strip_honorific(pred))};

    const Character* speaker = novel.characters.find(item.true_speaker);
    if (speaker) {
        for (const auto& alias : speaker->aliases) {
            std::string folded = str::fold(alias);
            for (const auto& p : pred_forms)
                if (!p.empty() && p == folded) return CsgClass::Memorization;
        }
    }

    std::set<std::string> reasoning_forms = {str::fold(item.replacement_first),
                                             str::fold(item.replacement_name)};
    for (const auto& form : item.emitted_forms) {
        reasoning_forms.insert(str::fold(form));
        reasoning_forms.insert(str::fold(strip_honorific(form)));
    }
    for (const auto& p : pred_forms)
        if (!p.empty() && reasoning_forms.count(p)) return CsgClass::Reasoning;
    return CsgClass::Wrong;
}

CSGResult run_csg(const Novel& novel, Backend& backend, const CsgRunOptions& options,
                  std::vector<CsgItemOutcome>* outcomes) {
    const PromptTemplateSet& templates =
        options.templates ? *options.templates : PromptTemplateSet::defaults();

    CSGResult result;
    result.novel_id = novel.id;
    result.n_per_type = options.n_per_type;
    result.seed = options.seed;

    const QuoteType types[] = {QuoteType::Explicit, QuoteType::Anaphoric, QuoteType::Implicit};
    int populated_types = 0;
    double mem_sum = 0.0, reason_sum = 0.0;

    for (QuoteType type : types) {
        std::vector<std::size_t> indices;
        for (std::size_t i = 0; i < novel.quotes.size(); ++i)
            if (novel.quotes[i].quote_type == type) indices.push_back(i);

        Rng rng(options.seed ^ (0x9e3779b97f4a7c15ull * (static_cast<std::uint64_t>(type) + 1)));
        rng.shuffle(indices);

        CsgTypeStats stats;
        for (std::size_t idx : indices) {
            if (stats.sampled >= options.n_per_type) break;
            auto built = build_csg_item(novel, novel.quotes[idx], rng, options.build);
            if (std::holds_alternative<CsgIneligible>(built)) continue;
            CSGItem item = std::get<CSGItem>(std::move(built));

            auto prompt = build_csg_prompt(item, templates);
            auto response = backend.complete(prompt, options.decoding);
            auto predicted = parse_speaker_tag(response);
            CsgClass cls = classify_csg(predicted, item, novel, options.build.honorifics);

            ++stats.sampled;
            switch (cls) {
                case CsgClass::Memorization: ++stats.memorization; break;
                case CsgClass::Reasoning: ++stats.reasoning; break;
                case CsgClass::Wrong: ++stats.wrong; break;
            }
            if (outcomes) outcomes->push_back({std::move(item), predicted, cls});
        }
        stats.shortfall = stats.sampled < options.n_per_type;
        if (stats.sampled > 0) {
            stats.mem_accuracy = static_cast<double>(stats.memorization) / stats.sampled;
            stats.reason_accuracy = static_cast<double>(stats.reasoning) / stats.sampled;
            mem_sum += *stats.mem_accuracy;
            reason_sum += *stats.reason_accuracy;
            ++populated_types;
            if (type == QuoteType::Explicit) result.cloze_mem_accuracy = *stats.mem_accuracy;
        }
        result.per_type[type] = stats;
    }

    if (populated_types == 0)
        throw Error("no eligible quotes for corruption in novel " + novel.id);
    result.mem_accuracy = mem_sum / populated_types;
    result.reason_accuracy = reason_sum / populated_types;
    return result;
}

NameClozeResult run_name_cloze(const Novel& novel, Backend& backend,
                               const NameClozeOptions& options) {
    const PromptTemplateSet& templates =
        options.templates ? *options.templates : PromptTemplateSet::defaults();

    // All proper-alias occurrences of all characters across the novel.
    struct Occurrence {
        std::size_t pos, len;
        const Character* character;
    };
    std::vector<Occurrence> occurrences;
    for (const auto& character : novel.characters.characters()) {
        auto aliases = proper_aliases_longest_first(character);
        for (const auto& m : scan_mentions(novel.text, aliases))
            occurrences.push_back({m.pos, m.len, &character});
    }
    if (occurrences.empty())
        throw Error("novel " + novel.id + " has no proper-name mentions to mask");
    std::sort(occurrences.begin(), occurrences.end(),
              [](const Occurrence& a, const Occurrence& b) { return a.pos < b.pos; });

    std::vector<std::size_t> order(occurrences.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(options.seed);
    rng.shuffle(order);

    NameClozeResult result;
    result.novel_id = novel.id;
    result.seed = options.seed;

    const std::string_view text(novel.text);
    for (std::size_t oi : order) {
        if (result.sampled >= options.n_samples) break;
        const auto& occ = occurrences[oi];

        // Expand to a word window around the mention.
        std::size_t begin = occ.pos;
        for (int w = 0; w < options.window_words_before && begin > 0;) {
            --begin;
            if (begin == 0 || (str::is_ascii_space(text[begin - 1]) &&
                               !str::is_ascii_space(text[begin])))
                ++w;
        }
        std::size_t end = occ.pos + occ.len;
        for (int w = 0; w < options.window_words_after && end < text.size();) {
            ++end;
            if (end == text.size() ||
                (end < text.size() && str::is_ascii_space(text[end - 1]) &&
                 !str::is_ascii_space(text[end])))
                ++w;
        }

        // The masked name must be the window's only mention of its character.
        auto aliases = proper_aliases_longest_first(*occ.character);
        auto in_window = scan_mentions(text.substr(begin, end - begin), aliases);
        if (in_window.size() != 1) continue;

        std::string passage = std::string(text.substr(begin, occ.pos - begin)) + "[MASK]" +
                              std::string(text.substr(occ.pos + occ.len, end - occ.pos - occ.len));
        auto prompt = build_name_cloze_prompt(passage, templates);
        auto predicted = parse_speaker_tag(backend.complete(prompt, options.decoding));

        ++result.sampled;
        if (predicted) {
            auto resolved = novel.characters.resolve(*predicted);
            if (resolved && *resolved == occ.character->id) ++result.correct;
        }
    }
    if (result.sampled == 0)
        throw Error("novel " + novel.id + " yielded no usable name-cloze passages");
    result.accuracy = static_cast<double>(result.correct) / result.sampled;
    return result;
}

double min_k_value(std::span<const double> logprobs, double k_percent) {
    if (logprobs.empty()) throw Error("min-k requires a non-empty score vector");
    if (!(k_percent > 0.0 && k_percent <= 100.0))
        throw Error("min-k percentage must lie in (0, 100]");
    const std::size_t n = logprobs.size();
    auto m = static_cast<std::size_t>(
        std::ceil(k_percent * static_cast<double>(n) / 100.0 - 1e-9));
    m = std::clamp<std::size_t>(m, 1, n);

    std::vector<double> sorted(logprobs.begin(), logprobs.end());
    std::nth_element(sorted.begin(), sorted.begin() + (m - 1), sorted.end());
    const double cutoff = sorted[m - 1];

    double sum = 0.0;
    std::size_t count = 0;
    for (double v : logprobs) {
        if (v <= cutoff) {
            sum += v;
            ++count;
        }
    }
    return sum / static_cast<double>(count);
}

std::vector<MinKResult> run_min_k(const Novel& novel, Backend& backend,
                                  const MinKOptions& options) {
    if (!backend.supports_scoring())
        throw CapabilityError("min-k requires a backend with token scoring");
    for (double k : options.k_values)
        if (!(k > 0.0 && k <= 100.0)) throw Error("min-k percentage must lie in (0, 100]");
    if (!(options.sample_fraction > 0.0 && options.sample_fraction <= 1.0))
        throw Error("min-k sample fraction must lie in (0, 1]");
    if (novel.quotes.empty()) throw Error("novel " + novel.id + " has no annotation records");

    std::vector<std::size_t> indices(novel.quotes.size());
    for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
    Rng rng(options.seed);
    rng.shuffle(indices);
    auto m = static_cast<std::size_t>(std::ceil(
        options.sample_fraction * static_cast<double>(indices.size()) - 1e-9));
    m = std::clamp<std::size_t>(m, 1, indices.size());
    indices.resize(m);
    std::sort(indices.begin(), indices.end());  // stable artifact order

    std::map<double, std::pair<double, int>> sums;  // k -> (sum, count)
    for (std::size_t idx : indices) {
        auto text = verbalize_record(novel.quotes[idx].record);
        auto scored = backend.score(text);
        if (scored.empty()) continue;
        std::vector<double> logprobs;
        logprobs.reserve(scored.size());
        for (const auto& s : scored) logprobs.push_back(s.logprob);
        for (double k : options.k_values) {
            auto& [sum, count] = sums[k];
            sum += min_k_value(logprobs, k);
            ++count;
        }
    }

    std::vector<MinKResult> results;
    for (double k : options.k_values) {
        MinKResult r;
        r.novel_id = novel.id;
        r.k = k;
        auto it = sums.find(k);
        r.sample_size = it == sums.end() ? 0 : it->second.second;
        r.value = r.sample_size ? it->second.first / r.sample_size : 0.0;
        results.push_back(r);
    }
    return results;
}

}  // namespace quoteattr
