#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "quoteattr/chunking.hpp"
#include "quoteattr/corpus.hpp"
#include "quoteattr/inference.hpp"
#include "quoteattr/prompting.hpp"

namespace quoteattr {

enum class Strategy { FirstPrediction, Incremental };

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view s);

struct Prediction {
    std::string quote_id;
    std::string raw_name;                 // as generated; empty when never predicted
    std::optional<std::string> resolved;  // canonical id, when raw_name is an alias
    int source_chunk = -1;
    Strategy strategy = Strategy::FirstPrediction;
};

struct PredictionSet {
    std::string novel_id;
    Strategy strategy = Strategy::FirstPrediction;
    std::vector<Prediction> predictions;  // exactly one per gold quote
    int parse_failures = 0;               // chunks whose response had no usable JSON
    std::vector<std::string> warnings;
};

struct AttributionOptions {
    ChunkingOptions chunking;
    DecodingParams decoding;
    const TokenCounter* counter = nullptr;          // default word counter when null
    const PromptTemplateSet* templates = nullptr;   // defaults when null
};

PredictionSet run_first_strategy(const Novel& novel, Backend& backend,
                                 const AttributionOptions& options = {});
PredictionSet run_incremental_strategy(const Novel& novel, Backend& backend,
                                       const AttributionOptions& options = {});

struct TypeAccuracy {
    int evaluated = 0;
    int correct = 0;
    std::optional<double> accuracy;  // empty when evaluated == 0
};

struct AccuracyReport {
    std::string novel_id;
    Strategy strategy = Strategy::FirstPrediction;
    std::optional<double> accuracy_all;
    std::optional<double> accuracy_explicit;
    std::optional<double> accuracy_other;  // anaphoric and implicit pooled
    std::map<QuoteType, TypeAccuracy> per_type;
    int evaluated_quotes = 0;
    int correct_quotes = 0;
    int invalid_name_count = 0;   // evaluated quotes with an unresolvable non-empty name
    int unpredicted_count = 0;    // evaluated quotes never answered
    int parse_failure_count = 0;
};

// Scores only quotes whose gold speaker utters >= 10 quotes in the novel.
AccuracyReport score_predictions(const PredictionSet& predictions, const Novel& novel);

struct MetricSummary {
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation, 0 for a single report
    int count = 0;
};

struct CorpusSummary {
    MetricSummary all;
    MetricSummary explicit_;
    MetricSummary other;
    int novels = 0;
};

// Unweighted macro-average across novels.
CorpusSummary aggregate(const std::vector<AccuracyReport>& reports);

}  // namespace quoteattr
