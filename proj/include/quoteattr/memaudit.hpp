#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "quoteattr/corpus.hpp"
#include "quoteattr/inference.hpp"
#include "quoteattr/prompting.hpp"
#include "quoteattr/rng.hpp"

namespace quoteattr {

enum class CsgVariant { Cloze, Speaker };

// Replacement names drawn when corrupting a passage. Combinations are
// filtered so no component occurs anywhere in the novel's alias lists.
struct NamePool {
    std::vector<std::string> female_first = {"Emma", "Elizabeth"};
    std::vector<std::string> male_first = {"Henry", "Joseph"};
    std::vector<std::string> last = {"Stone", "Walker", "Smith"};

    static NamePool from_json_file(const std::filesystem::path& path);
};

struct CSGItem {
    std::string quote_id;
    CsgVariant variant = CsgVariant::Speaker;
    QuoteType quote_type = QuoteType::Implicit;
    std::string passage;           // original context, 10 sentences each side
    std::string corrupted_passage;
    std::string true_speaker;
    std::string replacement_first;
    std::string replacement_last;
    std::string replacement_name;  // "First Last"
    Gender replacement_gender = Gender::Unknown;
    std::vector<std::string> emitted_forms;  // surface forms written into the passage
    std::string target_quote;
    std::string book_title;
    std::string book_author;
};

enum class CsgIneligible {
    GenderUnknown,
    NoNamedMention,          // no proper-named mention of the speaker survives in the window
    NoReferringExpression,   // cloze variant could not locate/mask the referring expression
    OutsideChapters,
};

using CsgBuildResult = std::variant<CSGItem, CsgIneligible>;

struct CsgBuildOptions {
    NamePool pool;
    std::vector<std::string> honorifics;  // empty = default_honorifics()
    int context_sentences = 10;
};

CsgBuildResult build_csg_item(const Novel& novel, const Quote& quote, Rng& rng,
                              const CsgBuildOptions& options = {});

enum class CsgClass { Memorization, Reasoning, Wrong };

CsgClass classify_csg(const std::optional<std::string>& predicted_name, const CSGItem& item,
                      const Novel& novel, const std::vector<std::string>& honorifics = {});

struct CsgTypeStats {
    int sampled = 0;
    int memorization = 0;
    int reasoning = 0;
    int wrong = 0;
    bool shortfall = false;  // fewer eligible quotes than requested
    std::optional<double> mem_accuracy;
    std::optional<double> reason_accuracy;
};

struct CsgItemOutcome {
    CSGItem item;
    std::optional<std::string> predicted;
    CsgClass classification = CsgClass::Wrong;
};

struct CSGResult {
    std::string novel_id;
    double mem_accuracy = 0.0;        // unweighted mean over quote types
    double reason_accuracy = 0.0;
    double cloze_mem_accuracy = 0.0;  // explicit/cloze type alone
    std::map<QuoteType, CsgTypeStats> per_type;
    int n_per_type = 0;
    std::uint64_t seed = 0;
};

struct CsgRunOptions {
    int n_per_type = 100;
    std::uint64_t seed = 0;
    CsgBuildOptions build;
    DecodingParams decoding;
    const PromptTemplateSet* templates = nullptr;
};

CSGResult run_csg(const Novel& novel, Backend& backend, const CsgRunOptions& options,
                  std::vector<CsgItemOutcome>* outcomes = nullptr);

struct NameClozeOptions {
    int n_samples = 100;
    std::uint64_t seed = 0;
    int window_words_before = 24;  // ~40-60 word passages centered on the mention
    int window_words_after = 24;
    DecodingParams decoding;
    const PromptTemplateSet* templates = nullptr;
};

struct NameClozeResult {
    std::string novel_id;
    int sampled = 0;
    int correct = 0;
    double accuracy = 0.0;
    std::uint64_t seed = 0;
};

NameClozeResult run_name_cloze(const Novel& novel, Backend& backend,
                               const NameClozeOptions& options = {});

// Mean of the ceil(k% * n) lowest logprobs; ties at the cutoff included.
double min_k_value(std::span<const double> logprobs, double k_percent);

struct MinKResult {
    std::string novel_id;
    double k = 0.0;
    double value = 0.0;
    int sample_size = 0;
};

struct MinKOptions {
    std::vector<double> k_values = {10, 20, 30};
    double sample_fraction = 0.20;
    std::uint64_t seed = 0;
};

// Verbalizes a sampled fraction of annotation records, scores them with
// the backend, and averages per-record min-k values.
std::vector<MinKResult> run_min_k(const Novel& novel, Backend& backend,
                                  const MinKOptions& options = {});

}  // namespace quoteattr
