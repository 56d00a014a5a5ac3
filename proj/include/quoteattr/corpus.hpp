#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace quoteattr {

enum class Gender { Female, Male, Unknown };
enum class QuoteType { Explicit, Anaphoric, Implicit };
enum class SubsetTag { PDNC1, PDNC2, Unseen };
enum class CharacterTier { MajorOrIntermediate, Minor };

std::string_view to_string(Gender g);
std::string_view to_string(QuoteType t);
std::string_view to_string(SubsetTag t);
Gender parse_gender(std::string_view s);
QuoteType parse_quote_type(std::string_view s);
SubsetTag parse_subset_tag(std::string_view s);

// Characters uttering at least this many quotes in a novel are evaluated.
inline constexpr int kMajorQuoteThreshold = 10;

struct ByteSpan {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t length() const { return end - begin; }
    bool contains(std::size_t pos) const { return pos >= begin && pos < end; }
    friend bool operator==(const ByteSpan&, const ByteSpan&) = default;
};

struct Character {
    std::string id;                    // canonical name, always aliases.front()
    std::vector<std::string> aliases;  // surface forms, canonical first
    Gender gender = Gender::Unknown;
    int quote_count = 0;
};

// One raw annotation row, exactly as read from the quote CSV.
struct AnnotationRecord {
    std::array<std::string, 11> columns;
};

// Fixed column order of the annotation CSV.
extern const std::array<std::string_view, 11> kAnnotationColumns;

struct Quote {
    std::string quote_id;
    std::string text;
    std::vector<std::string> sub_quotations;
    std::vector<ByteSpan> byte_spans;  // ascending, non-overlapping, global offsets
    std::string speaker;
    std::vector<std::string> addressees;
    QuoteType quote_type = QuoteType::Implicit;
    std::optional<std::string> referring_expression;
    std::vector<std::vector<std::string>> mention_texts;
    std::vector<std::vector<ByteSpan>> mention_spans;
    std::vector<std::vector<std::string>> mention_entities;
    AnnotationRecord record;

    // Covering span from first sub-quotation byte to last.
    ByteSpan extent() const;
};

struct Chapter {
    std::string heading;
    ByteSpan span;  // includes the heading line
};

// Bidirectional character/alias index. Alias lookups are
// case-insensitive exact matches after trimming; no substring matching.
class AliasMap {
  public:
    AliasMap() = default;

    // Accepts either plain "Canonical=Alias1=Alias2" lines or a CSV with
    // header canonical,aliases,gender (aliases cell '='-joined).
    static AliasMap parse(std::string_view raw);

    void add(Character character);

    const Character* find(std::string_view id) const;
    Character* find(std::string_view id);
    std::optional<std::string> resolve(std::string_view name) const;

    const std::vector<Character>& characters() const { return characters_; }
    std::vector<Character>& characters() { return characters_; }
    bool empty() const { return characters_.empty(); }

  private:
    std::vector<Character> characters_;
    std::unordered_map<std::string, std::size_t> by_id_;         // folded id -> index
    std::unordered_map<std::string, std::string> alias_to_id_;   // folded alias -> id
};

struct ChapterPattern {
    // When set, a trimmed line matching this regex starts a chapter.
    std::optional<std::string> regex;
};

struct Novel {
    std::string id;  // directory slug
    std::string title;
    std::string author;
    SubsetTag subset = SubsetTag::PDNC1;
    std::string text;
    std::vector<Chapter> chapters;
    std::vector<Quote> quotes;
    AliasMap characters;

    std::string_view chapter_text(int chapter_index) const;
    // Index of the chapter containing the quote's extent, -1 if none.
    int chapter_of(const Quote& quote) const;
    CharacterTier tier(std::string_view character_id) const;
    const Quote* find_quote(std::string_view quote_id) const;
};

struct LoadOptions {
    ChapterPattern chapter_pattern;
};

// Reads {novel.txt, quotation_info.csv, characters.csv[, meta.json]}.
Novel load_novel(const std::filesystem::path& dir, const LoadOptions& options = {});

// Semantic invariant checks; returns human-readable diagnostics, empty when valid.
std::vector<std::string> validate_novel(const Novel& novel);

std::string verbalize_record(const AnnotationRecord& record);
// Inverse of verbalize_record over well-formed output.
AnnotationRecord split_verbalized(std::string_view text);

// Rule-based sentence segmentation: terminator + whitespace + capital or
// quote-open starts a new sentence; honorific/abbreviation stoplist and
// quoted spans suppress splits. Spans partition the input.
std::vector<ByteSpan> segment_sentences(std::string_view text);

// Abbreviations that never end a sentence (compared case-insensitively,
// without the trailing period).
const std::vector<std::string>& default_abbreviations();

// Leading titles preserved when corrupting mentions.
const std::vector<std::string>& default_honorifics();

}  // namespace quoteattr
