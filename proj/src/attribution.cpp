#include "quoteattr/attribution.hpp"

#include <cmath>

#include "quoteattr/errors.hpp"
#include "quoteattr/strings.hpp"

namespace quoteattr {

std::string_view to_string(Strategy s) {
    return s == Strategy::FirstPrediction ? "first" : "incremental";
}

Strategy parse_strategy(std::string_view s) {
    std::string f = str::fold(s);
    if (f == "first" || f == "first_prediction" || f == "1") return Strategy::FirstPrediction;
    if (f == "incremental" || f == "2") return Strategy::Incremental;
    throw UsageError("unknown strategy: " + std::string(s));
}

namespace {

struct RawPrediction {
    std::string raw_name;
    int chunk = -1;
};

PredictionSet finalize(const Novel& novel, Strategy strategy,
                       const std::map<std::string, RawPrediction>& raw, int parse_failures,
                       std::vector<std::string> warnings) {
    PredictionSet set;
    set.novel_id = novel.id;
    set.strategy = strategy;
    set.parse_failures = parse_failures;
    set.warnings = std::move(warnings);
    for (const auto& quote : novel.quotes) {
        Prediction p;
        p.quote_id = quote.quote_id;
        p.strategy = strategy;
        auto it = raw.find(quote.quote_id);
        if (it != raw.end()) {
            p.raw_name = it->second.raw_name;
            p.source_chunk = it->second.chunk;
            if (!p.raw_name.empty()) p.resolved = novel.characters.resolve(p.raw_name);
        }
        set.predictions.push_back(std::move(p));
    }
    return set;
}

struct RunContext {
    const TokenCounter& counter;
    const PromptTemplateSet& templates;
    std::string alias_block;
    std::vector<Chunk> chunks;
};

RunContext prepare(const Novel& novel, const AttributionOptions& options) {
    const TokenCounter& counter = options.counter ? *options.counter : default_token_counter();
    const PromptTemplateSet& templates =
        options.templates ? *options.templates : PromptTemplateSet::defaults();
    return RunContext{counter, templates, format_alias_block(novel.characters),
                      chunk_novel(novel, counter, options.chunking)};
}

}  // namespace

PredictionSet run_first_strategy(const Novel& novel, Backend& backend,
                                 const AttributionOptions& options) {
    auto ctx = prepare(novel, options);
    std::map<std::string, RawPrediction> raw;
    int parse_failures = 0;
    std::vector<std::string> warnings;

    for (std::size_t k = 0; k < ctx.chunks.size(); ++k) {
        const Chunk& chunk = ctx.chunks[k];
        if (chunk.quotes.empty()) continue;
        auto prompt = build_attribution_prompt(chunk.marked_text, ctx.alias_block, ctx.templates);
        auto parsed = parse_attribution_json(backend.complete(prompt, options.decoding));
        if (parsed.parse_failed) ++parse_failures;
        for (const auto& w : parsed.warnings)
            warnings.push_back(novel.id + " chunk " + std::to_string(k) + ": " + w);
        for (const auto& [local, global] : chunk.quotes) {
            auto it = parsed.entries.find(local);
            if (it == parsed.entries.end()) continue;
            // First prediction wins.
            if (!raw.count(global)) raw[global] = {it->second, static_cast<int>(k)};
        }
    }
    return finalize(novel, Strategy::FirstPrediction, raw, parse_failures, std::move(warnings));
}

PredictionSet run_incremental_strategy(const Novel& novel, Backend& backend,
                                       const AttributionOptions& options) {
    auto ctx = prepare(novel, options);
    std::map<std::string, RawPrediction> raw;
    int parse_failures = 0;
    std::vector<std::string> warnings;

    for (std::size_t k = 0; k < ctx.chunks.size(); ++k) {
        const Chunk& chunk = ctx.chunks[k];
        if (chunk.quotes.empty()) continue;

        std::map<std::string, std::string> prior;
        for (const auto& [id, p] : raw) prior[id] = p.raw_name;
        auto carried = carryover(prior, chunk);
        for (const auto& missing : carried.missing)
            warnings.push_back(novel.id + " chunk " + std::to_string(k) +
                               ": no prior prediction for overlap quote " + missing);

        std::string prompt =
            carried.entries.empty()
                ? build_attribution_prompt(chunk.marked_text, ctx.alias_block, ctx.templates)
                : build_incremental_prompt(chunk.marked_text, ctx.alias_block, carried.entries,
                                           ctx.templates);
        auto parsed = parse_attribution_json(backend.complete(prompt, options.decoding));
        if (parsed.parse_failed) ++parse_failures;
        for (const auto& w : parsed.warnings)
            warnings.push_back(novel.id + " chunk " + std::to_string(k) + ": " + w);
        for (const auto& [local, global] : chunk.quotes) {
            auto it = parsed.entries.find(local);
            if (it == parsed.entries.end()) continue;
            // Latest prediction wins.
            raw[global] = {it->second, static_cast<int>(k)};
        }
    }
    return finalize(novel, Strategy::Incremental, raw, parse_failures, std::move(warnings));
}

AccuracyReport score_predictions(const PredictionSet& predictions, const Novel& novel) {
    if (predictions.predictions.size() != novel.quotes.size())
        throw Error("prediction set does not cover the novel's quotes");

    AccuracyReport report;
    report.novel_id = novel.id;
    report.strategy = predictions.strategy;
    report.parse_failure_count = predictions.parse_failures;

    std::map<std::string, const Prediction*> by_id;
    for (const auto& p : predictions.predictions) by_id[p.quote_id] = &p;

    int other_evaluated = 0, other_correct = 0;
    for (const auto& quote : novel.quotes) {
        if (novel.tier(quote.speaker) != CharacterTier::MajorOrIntermediate) continue;
        const Prediction* p = by_id.at(quote.quote_id);

        auto& bucket = report.per_type[quote.quote_type];
        ++bucket.evaluated;
        ++report.evaluated_quotes;

        bool correct = p->resolved && str::fold(*p->resolved) == str::fold(quote.speaker);
        if (correct) {
            ++bucket.correct;
            ++report.correct_quotes;
        }
        if (!p->resolved) {
            if (p->raw_name.empty()) ++report.unpredicted_count;
            else ++report.invalid_name_count;
        }
        if (quote.quote_type != QuoteType::Explicit) {
            ++other_evaluated;
            if (correct) ++other_correct;
        }
    }

    for (auto& [type, bucket] : report.per_type)
        if (bucket.evaluated > 0)
            bucket.accuracy = static_cast<double>(bucket.correct) / bucket.evaluated;

    if (report.evaluated_quotes > 0)
        report.accuracy_all =
            static_cast<double>(report.correct_quotes) / report.evaluated_quotes;
    auto explicit_it = report.per_type.find(QuoteType::Explicit);
    if (explicit_it != report.per_type.end()) report.accuracy_explicit = explicit_it->second.accuracy;
    if (other_evaluated > 0)
        report.accuracy_other = static_cast<double>(other_correct) / other_evaluated;
    return report;
}

namespace {

MetricSummary summarize(const std::vector<double>& values) {
    MetricSummary s;
    s.count = static_cast<int>(values.size());
    if (values.empty()) return s;
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return s;
}

}  // namespace

CorpusSummary aggregate(const std::vector<AccuracyReport>& reports) {
    if (reports.empty()) throw Error("aggregate requires at least one report");
    CorpusSummary summary;
    summary.novels = static_cast<int>(reports.size());
    std::vector<double> all, expl, other;
    for (const auto& r : reports) {
        if (r.accuracy_all) all.push_back(*r.accuracy_all);
        if (r.accuracy_explicit) expl.push_back(*r.accuracy_explicit);
        if (r.accuracy_other) other.push_back(*r.accuracy_other);
    }
    summary.all = summarize(all);
    summary.explicit_ = summarize(expl);
    summary.other = summarize(other);
    return summary;
}

}  // namespace quoteattr
