#include "quoteattr/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "quoteattr/csv.hpp"
#include "quoteattr/errors.hpp"
#include "quoteattr/pyliteral.hpp"
#include "quoteattr/strings.hpp"

namespace quoteattr {

const std::array<std::string_view, 11> kAnnotationColumns = {
    "quoteID",          "quoteText",        "subQuotationList",
    "quoteByteSpans",   "speaker",          "addressees",
    "quoteType",        "referringExpression",
    "mentionTextsList", "mentionSpansList", "mentionEntitiesList"};

std::string_view to_string(Gender g) {
    switch (g) {
        case Gender::Female: return "Female";
        case Gender::Male: return "Male";
        case Gender::Unknown: return "Unknown";
    }
    return "Unknown";
}

std::string_view to_string(QuoteType t) {
    switch (t) {
        case QuoteType::Explicit: return "Explicit";
        case QuoteType::Anaphoric: return "Anaphoric";
        case QuoteType::Implicit: return "Implicit";
    }
    return "Implicit";
}

std::string_view to_string(SubsetTag t) {
    switch (t) {
        case SubsetTag::PDNC1: return "pdnc1";
        case SubsetTag::PDNC2: return "pdnc2";
        case SubsetTag::Unseen: return "unseen";
    }
    return "pdnc1";
}

Gender parse_gender(std::string_view s) {
    std::string f = str::fold(s);
    if (f == "female" || f == "f") return Gender::Female;
    if (f == "male" || f == "m") return Gender::Male;
    if (f.empty() || f == "unknown" || f == "u") return Gender::Unknown;
    throw ValidationError("unknown gender value: " + std::string(s));
}

QuoteType parse_quote_type(std::string_view s) {
    std::string f = str::fold(s);
    if (f == "explicit") return QuoteType::Explicit;
    if (f == "anaphoric" || f.rfind("anaphoric", 0) == 0) return QuoteType::Anaphoric;
    if (f == "implicit") return QuoteType::Implicit;
    throw ValidationError("unknown quote type: " + std::string(s));
}

SubsetTag parse_subset_tag(std::string_view s) {
    std::string f = str::fold(s);
    if (f == "pdnc1") return SubsetTag::PDNC1;
    if (f == "pdnc2") return SubsetTag::PDNC2;
    if (f == "unseen") return SubsetTag::Unseen;
    throw ValidationError("unknown subset tag: " + std::string(s));
}

ByteSpan Quote::extent() const {
    if (byte_spans.empty()) return {};
    return {byte_spans.front().begin, byte_spans.back().end};
}

// ---------------------------------------------------------------------------
// AliasMap

void AliasMap::add(Character character) {
    if (character.id.empty()) throw ValidationError("character with empty canonical name");
    if (character.aliases.empty() || character.aliases.front() != character.id)
        character.aliases.insert(character.aliases.begin(), character.id);

    // Dedupe within the character, preserving order.
    std::vector<std::string> unique;
    for (auto& alias : character.aliases) {
        std::string folded = str::fold(alias);
        bool seen = false;
        for (const auto& u : unique)
            if (str::fold(u) == folded) {
                seen = true;
                break;
            }
        if (!seen) unique.push_back(alias);
    }
    character.aliases = std::move(unique);

    for (const auto& alias : character.aliases) {
        std::string folded = str::fold(alias);
        auto it = alias_to_id_.find(folded);
        if (it != alias_to_id_.end() && it->second != character.id)
            throw ValidationError("alias '" + alias + "' claimed by both '" + it->second +
                                  "' and '" + character.id + "'");
    }

    std::string folded_id = str::fold(character.id);
    if (by_id_.count(folded_id))
        throw ValidationError("duplicate character id: " + character.id);

    for (const auto& alias : character.aliases) alias_to_id_[str::fold(alias)] = character.id;
    by_id_[folded_id] = characters_.size();
    characters_.push_back(std::move(character));
}

AliasMap AliasMap::parse(std::string_view raw) {
    AliasMap map;
    auto lines = str::split_lines(raw);

    bool csv_mode = false;
    if (!lines.empty()) {
        std::string head = str::fold(lines.front());
        csv_mode = head == "canonical,aliases,gender";
    }

    if (csv_mode) {
        auto rows = csv::parse(raw);
        for (std::size_t r = 1; r < rows.size(); ++r) {
            const auto& row = rows[r];
            if (row.empty() || (row.size() == 1 && str::trim(row[0]).empty())) continue;
            if (row.size() != 3)
                throw ValidationError("characters csv row " + std::to_string(r + 1) +
                                      ": expected 3 columns, got " + std::to_string(row.size()));
            Character c;
            c.id = std::string(str::trim(row[0]));
            c.aliases.push_back(c.id);
            for (auto& alias : str::split(row[1], '=')) {
                auto t = str::trim(alias);
                if (!t.empty()) c.aliases.emplace_back(t);
            }
            c.gender = parse_gender(row[2]);
            map.add(std::move(c));
        }
    } else {
        for (auto line : lines) {
            auto t = str::trim(line);
            if (t.empty() || t[0] == '#') continue;
            Character c;
            for (auto& part : str::split(t, '=')) {
                auto p = str::trim(part);
                if (!p.empty()) c.aliases.emplace_back(p);
            }
            if (c.aliases.empty()) continue;
            c.id = c.aliases.front();
            map.add(std::move(c));
        }
    }

    if (map.empty()) throw ValidationError("character file defines no characters");
    return map;
}

const Character* AliasMap::find(std::string_view id) const {
    auto it = by_id_.find(str::fold(id));
    return it == by_id_.end() ? nullptr : &characters_[it->second];
}

Character* AliasMap::find(std::string_view id) {
    auto it = by_id_.find(str::fold(id));
    return it == by_id_.end() ? nullptr : &characters_[it->second];
}

std::optional<std::string> AliasMap::resolve(std::string_view name) const {
    auto it = alias_to_id_.find(str::fold(name));
    if (it == alias_to_id_.end()) return std::nullopt;
    return it->second;
}

// ---------------------------------------------------------------------------
// Novel

std::string_view Novel::chapter_text(int chapter_index) const {
    const auto& span = chapters.at(static_cast<std::size_t>(chapter_index)).span;
    return std::string_view(text).substr(span.begin, span.length());
}

int Novel::chapter_of(const Quote& quote) const {
    ByteSpan extent = quote.extent();
    for (std::size_t i = 0; i < chapters.size(); ++i) {
        const auto& span = chapters[i].span;
        if (extent.begin >= span.begin && extent.end <= span.end) return static_cast<int>(i);
    }
    return -1;
}

CharacterTier Novel::tier(std::string_view character_id) const {
    const Character* c = characters.find(character_id);
    if (!c) throw ValidationError("unknown character id: " + std::string(character_id));
    return c->quote_count >= kMajorQuoteThreshold ? CharacterTier::MajorOrIntermediate
                                                  : CharacterTier::Minor;
}

const Quote* Novel::find_quote(std::string_view quote_id) const {
    for (const auto& q : quotes)
        if (q.quote_id == quote_id) return &q;
    return nullptr;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

bool is_heading_line(std::string_view line, const ChapterPattern& pattern) {
    auto t = str::trim(line);
    if (t.empty()) return false;
    if (pattern.regex) {
        static thread_local std::string cached_source;
        static thread_local std::regex cached;
        if (cached_source != *pattern.regex) {
            cached = std::regex(*pattern.regex);
            cached_source = *pattern.regex;
        }
        return std::regex_search(t.begin(), t.end(), cached);
    }
    if (t.rfind("Chapter", 0) == 0 || t.rfind("CHAPTER", 0) == 0) return true;
    if (t.size() <= 60) {
        bool has_alpha = false, has_lower = false;
        for (char c : t) {
            if (c >= 'a' && c <= 'z') has_lower = true;
            if (str::is_ascii_alpha(c)) has_alpha = true;
        }
        if (has_alpha && !has_lower) return true;
    }
    return false;
}

std::vector<Chapter> detect_chapters(const std::string& text, const ChapterPattern& pattern) {
    std::vector<Chapter> chapters;
    std::vector<std::pair<std::size_t, std::string>> headings;  // offset, heading text

    std::size_t line_start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == '\n') {
            std::string_view line(text.data() + line_start, i - line_start);
            if (is_heading_line(line, pattern))
                headings.emplace_back(line_start, std::string(str::trim(line)));
            line_start = i + 1;
        }
    }

    if (headings.empty()) {
        if (!text.empty()) chapters.push_back({"", {0, text.size()}});
        return chapters;
    }

    // Front matter before the first heading becomes an unlabeled chapter so
    // the spans still partition the text.
    if (headings.front().first > 0) chapters.push_back({"", {0, headings.front().first}});
    for (std::size_t h = 0; h < headings.size(); ++h) {
        std::size_t end = h + 1 < headings.size() ? headings[h + 1].first : text.size();
        chapters.push_back({headings[h].second, {headings[h].first, end}});
    }
    return chapters;
}

Quote quote_from_record(const AnnotationRecord& rec) {
    Quote q;
    q.record = rec;
    q.quote_id = rec.columns[0];
    q.text = rec.columns[1];
    q.sub_quotations = pyliteral::parse_string_list(rec.columns[2]);
    for (auto [b, e] : pyliteral::parse_span_list(rec.columns[3])) q.byte_spans.push_back({b, e});
    q.speaker = rec.columns[4];
    q.addressees = pyliteral::parse_string_list(rec.columns[5]);
    q.quote_type = parse_quote_type(rec.columns[6]);
    if (!str::trim(rec.columns[7]).empty()) q.referring_expression = rec.columns[7];
    q.mention_texts = pyliteral::parse_string_list_list(rec.columns[8]);
    for (const auto& spans : pyliteral::parse_span_list_list(rec.columns[9])) {
        std::vector<ByteSpan> list;
        for (auto [b, e] : spans) list.push_back({b, e});
        q.mention_spans.push_back(std::move(list));
    }
    q.mention_entities = pyliteral::parse_string_list_list(rec.columns[10]);
    return q;
}

}  // namespace

Novel load_novel(const std::filesystem::path& dir, const LoadOptions& options) {
    Novel novel;
    novel.id = dir.filename().string();
    if (novel.id.empty()) novel.id = dir.parent_path().filename().string();
    novel.title = novel.id;

    novel.text = read_file(dir / "novel.txt");
    novel.characters = AliasMap::parse(read_file(dir / "characters.csv"));

    auto meta_path = dir / "meta.json";
    if (std::filesystem::exists(meta_path)) {
        auto meta = nlohmann::json::parse(read_file(meta_path));
        if (meta.contains("title")) novel.title = meta["title"].get<std::string>();
        if (meta.contains("author")) novel.author = meta["author"].get<std::string>();
        if (meta.contains("subset"))
            novel.subset = parse_subset_tag(meta["subset"].get<std::string>());
    }

    novel.chapters = detect_chapters(novel.text, options.chapter_pattern);

    auto rows = csv::parse(read_file(dir / "quotation_info.csv"));
    std::size_t first = 0;
    if (!rows.empty() && !rows[0].empty() && str::fold(rows[0][0]) == "quoteid") first = 1;
    for (std::size_t r = first; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() == 1 && str::trim(row[0]).empty()) continue;
        if (row.size() != kAnnotationColumns.size())
            throw ValidationError(novel.id + ": quotation_info row " + std::to_string(r + 1) +
                                  " has " + std::to_string(row.size()) + " columns, expected 11");
        AnnotationRecord rec;
        std::copy(row.begin(), row.end(), rec.columns.begin());
        try {
            novel.quotes.push_back(quote_from_record(rec));
        } catch (const Error& e) {
            throw ValidationError(novel.id + ": quotation_info row " + std::to_string(r + 1) +
                                  ": " + e.what());
        }
    }

    for (const auto& q : novel.quotes) {
        if (Character* c = novel.characters.find(q.speaker)) ++c->quote_count;
    }
    return novel;
}

std::vector<std::string> validate_novel(const Novel& novel) {
    std::vector<std::string> problems;
    auto report = [&](const std::string& msg) { problems.push_back(novel.id + ": " + msg); };

    std::size_t covered = 0;
    for (const auto& ch : novel.chapters) {
        if (ch.span.begin != covered)
            report("chapter spans do not partition the text at byte " + std::to_string(covered));
        covered = ch.span.end;
    }
    if (covered != novel.text.size()) report("chapter spans do not cover the full text");

    std::unordered_map<std::string, int> seen_ids;
    for (const auto& q : novel.quotes) {
        if (++seen_ids[q.quote_id] == 2) report("duplicate quote id " + q.quote_id);

        if (q.byte_spans.size() != q.sub_quotations.size()) {
            report(q.quote_id + ": span/sub-quotation count mismatch");
            continue;
        }
        std::size_t prev_end = 0;
        for (std::size_t i = 0; i < q.byte_spans.size(); ++i) {
            const auto& s = q.byte_spans[i];
            if (s.end < s.begin || s.begin < prev_end) {
                report(q.quote_id + ": byte spans not ascending/non-overlapping");
                break;
            }
            prev_end = s.end;
            if (s.end > novel.text.size()) {
                report(q.quote_id + ": span [" + std::to_string(s.begin) + ", " +
                       std::to_string(s.end) + ") exceeds text size");
                break;
            }
            std::string_view slice(novel.text.data() + s.begin, s.length());
            if (slice != q.sub_quotations[i])
                report(q.quote_id + ": span [" + std::to_string(s.begin) + ", " +
                       std::to_string(s.end) + ") does not slice to its sub-quotation");
        }

        if (novel.chapter_of(q) < 0)
            report(q.quote_id + ": extent not contained in a single chapter");
        if (!novel.characters.resolve(q.speaker))
            report(q.quote_id + ": speaker '" + q.speaker + "' not in the alias map");
    }
    return problems;
}

// ---------------------------------------------------------------------------
// Verbalization

std::string verbalize_record(const AnnotationRecord& record) {
    if (str::trim(record.columns[0]).empty())
        throw ValidationError("annotation record has empty quoteID");
    std::string out;
    for (std::size_t i = 0; i < kAnnotationColumns.size(); ++i) {
        if (i) out += "; ";
        out += kAnnotationColumns[i];
        out += ": ";
        out += record.columns[i];
    }
    return out;
}

AnnotationRecord split_verbalized(std::string_view text) {
    AnnotationRecord rec;
    std::string lead = std::string(kAnnotationColumns[0]) + ": ";
    if (text.rfind(lead, 0) != 0) throw Error("verbalized record does not start with quoteID");
    std::size_t value_start = lead.size();
    for (std::size_t i = 1; i < kAnnotationColumns.size(); ++i) {
        std::string marker = "; " + std::string(kAnnotationColumns[i]) + ": ";
        std::size_t hit = text.find(marker, value_start);
        if (hit == std::string_view::npos)
            throw Error("verbalized record missing field " + std::string(kAnnotationColumns[i]));
        rec.columns[i - 1] = std::string(text.substr(value_start, hit - value_start));
        value_start = hit + marker.size();
    }
    rec.columns.back() = std::string(text.substr(value_start));
    return rec;
}

// ---------------------------------------------------------------------------
// Sentence segmentation

const std::vector<std::string>& default_abbreviations() {
    static const std::vector<std::string> list = {
        "mr",  "mrs", "ms",   "dr",  "st",  "prof", "rev", "capt", "col",
        "gen", "lt",  "sgt",  "maj", "adm", "hon",  "esq", "jr",   "sr",
        "vs",  "etc", "e.g",  "i.e", "no",  "vol",  "ch",  "pp",   "mt"};
    return list;
}

const std::vector<std::string>& default_honorifics() {
    static const std::vector<std::string> list = {
        "Mr",      "Mrs",   "Miss",     "Ms",       "Dr",        "Sir",    "Lady",
        "Lord",    "Dame",  "Captain",  "Admiral",  "Colonel",   "Major",  "General",
        "Professor", "Reverend", "Rev", "Father",   "Mother",    "Aunt",   "Uncle",
        "Madame",  "Madam", "Monsieur", "Mademoiselle", "St",    "Nurse",  "Doctor"};
    return list;
}

namespace {

bool is_abbreviation(std::string_view word) {
    if (word.empty()) return false;
    // Single letters are initials ("A. B. C met ...").
    if (word.size() == 1 && str::is_ascii_alpha(word[0])) return true;
    std::string folded = str::fold(word);
    for (const auto& abbr : default_abbreviations())
        if (folded == abbr) return true;
    return false;
}

bool is_open_quote_at(std::string_view text, std::size_t i) {
    if (text[i] == '"') return true;
    // U+201C left double quotation mark
    return i + 2 < text.size() && static_cast<unsigned char>(text[i]) == 0xE2 &&
           static_cast<unsigned char>(text[i + 1]) == 0x80 &&
           static_cast<unsigned char>(text[i + 2]) == 0x9C;
}

bool is_close_quote_at(std::string_view text, std::size_t i) {
    if (text[i] == '"') return true;
    // U+201D right double quotation mark
    return i + 2 < text.size() && static_cast<unsigned char>(text[i]) == 0xE2 &&
           static_cast<unsigned char>(text[i + 1]) == 0x80 &&
           static_cast<unsigned char>(text[i + 2]) == 0x9D;
}

// Word ending right before position i (exclusive), alphabetic run.
std::string_view word_before(std::string_view text, std::size_t i) {
    std::size_t e = i;
    std::size_t b = e;
    while (b > 0 && (str::is_ascii_alpha(text[b - 1]) || text[b - 1] == '.')) --b;
    // Keep inner periods (i.e/e.g) but drop leading ones.
    while (b < e && text[b] == '.') ++b;
    return text.substr(b, e - b);
}

// Returns the boundary position (start of the next sentence) if the
// candidate at i splits, npos otherwise.
std::size_t boundary_after(std::string_view text, std::size_t i) {
    std::size_t k = i + 1;
    while (k < text.size() && str::is_ascii_space(text[k])) ++k;
    if (k == i + 1) return std::string_view::npos;  // no whitespace after terminator
    if (k >= text.size()) return text.size();
    char c = text[k];
    if (str::is_ascii_upper(c) || is_open_quote_at(text, k)) return k;
    return std::string_view::npos;
}

}  // namespace

std::vector<ByteSpan> segment_sentences(std::string_view text) {
    std::vector<ByteSpan> spans;
    if (text.empty()) return spans;

    bool in_quote = false;
    std::size_t start = 0;
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (is_open_quote_at(text, i) || is_close_quote_at(text, i)) {
            bool closing = in_quote;
            in_quote = !in_quote;
            std::size_t quote_len = (c == '"') ? 1 : 3;
            if (closing && i > 0 && (text[i - 1] == '.' || text[i - 1] == '!' || text[i - 1] == '?')) {
                // Sentence may end at a closing quote after a terminator.
                std::size_t b = boundary_after(text, i + quote_len - 1);
                if (b != std::string_view::npos) {
                    spans.push_back({start, b});
                    start = b;
                    i = b;
                    continue;
                }
            }
            i += quote_len;
            continue;
        }
        if ((c == '.' || c == '!' || c == '?') && !in_quote) {
            if (c == '.' && is_abbreviation(word_before(text, i))) {
                ++i;
                continue;
            }
            std::size_t b = boundary_after(text, i);
            if (b != std::string_view::npos) {
                spans.push_back({start, b});
                start = b;
                i = b;
                continue;
            }
        }
        ++i;
    }
    if (start < text.size()) spans.push_back({start, text.size()});
    return spans;
}

}  // namespace quoteattr
