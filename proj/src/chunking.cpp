#include "quoteattr/chunking.hpp"

#include <algorithm>

#include "quoteattr/errors.hpp"
#include "quoteattr/strings.hpp"

namespace quoteattr {

namespace {

struct QuoteRef {
    int index;  // into novel.quotes
    ByteSpan extent;
};

std::vector<QuoteRef> chapter_quotes(const Novel& novel, int chapter_index) {
    const ByteSpan chapter = novel.chapters.at(static_cast<std::size_t>(chapter_index)).span;
    std::vector<QuoteRef> refs;
    for (std::size_t i = 0; i < novel.quotes.size(); ++i) {
        ByteSpan extent = novel.quotes[i].extent();
        if (extent.length() == 0) continue;
        if (extent.begin >= chapter.begin && extent.end <= chapter.end)
            refs.push_back({static_cast<int>(i), extent});
    }
    std::sort(refs.begin(), refs.end(),
              [](const QuoteRef& a, const QuoteRef& b) { return a.extent.begin < b.extent.begin; });
    return refs;
}

bool is_quote_mark_before(std::string_view text, std::size_t pos, std::size_t floor_pos,
                          std::size_t* mark_len) {
    if (pos >= 1 && pos - 1 >= floor_pos && text[pos - 1] == '"') {
        *mark_len = 1;
        return true;
    }
    if (pos >= 3 && pos - 3 >= floor_pos) {
        unsigned char a = text[pos - 3], b = text[pos - 2], c = text[pos - 1];
        if (a == 0xE2 && b == 0x80 && (c == 0x9C || c == 0x9D)) {
            *mark_len = 3;
            return true;
        }
    }
    return false;
}

bool is_quote_mark_at(std::string_view text, std::size_t pos, std::size_t end,
                      std::size_t* mark_len) {
    if (pos < end && text[pos] == '"') {
        *mark_len = 1;
        return true;
    }
    if (pos + 3 <= end) {
        unsigned char a = text[pos], b = text[pos + 1], c = text[pos + 2];
        if (a == 0xE2 && b == 0x80 && (c == 0x9C || c == 0x9D)) {
            *mark_len = 3;
            return true;
        }
    }
    return false;
}

}  // namespace

std::vector<Chunk> chunk_chapter(const Novel& novel, int chapter_index,
                                 const TokenCounter& counter, const ChunkingOptions& options) {
    const int window = options.window_tokens;
    const int overlap = options.overlap_tokens;
    if (!(window > overlap && overlap > 0))
        throw Error("chunking requires window > overlap > 0");

    const ByteSpan chapter = novel.chapters.at(static_cast<std::size_t>(chapter_index)).span;
    const std::string_view text(novel.text);
    const auto refs = chapter_quotes(novel, chapter_index);

    for (const auto& ref : refs) {
        std::string_view qtext = text.substr(ref.extent.begin, ref.extent.length());
        if (counter.count(qtext) > window)
            throw Error("quote " + novel.quotes[ref.index].quote_id +
                        " is longer than the chunk window");
    }

    std::vector<Chunk> chunks;
    auto finish_chunk = [&](std::size_t begin, std::size_t end) {
        Chunk chunk;
        chunk.chapter_index = chapter_index;
        chunk.span = {begin, end};
        chunk.text = std::string(text.substr(begin, end - begin));
        chunk.token_begin = counter.count(text.substr(chapter.begin, begin - chapter.begin));
        chunk.token_end = counter.count(text.substr(chapter.begin, end - chapter.begin));
        int local = 0;
        for (const auto& ref : refs) {
            if (ref.extent.begin >= begin && ref.extent.end <= end) {
                chunk.quotes.emplace_back(++local, novel.quotes[ref.index].quote_id);
                chunk.quote_indices.push_back(ref.index);
            }
        }
        chunk.marked_text = mark_quotes(novel, chunk);
        chunks.push_back(std::move(chunk));
    };

    std::string_view chapter_view = text.substr(chapter.begin, chapter.length());
    if (counter.count(chapter_view) <= window) {
        finish_chunk(chapter.begin, chapter.end);
    } else {
        std::size_t start = chapter.begin;
        while (start < chapter.end) {
            std::string_view rest = text.substr(start, chapter.end - start);
            std::size_t end = start + counter.truncate_bytes(rest, window);
            if (end <= start) throw Error("chunk window admits no words");

            // Push the end outward over any bisected quote.
            bool grew = true;
            while (grew) {
                grew = false;
                for (const auto& ref : refs) {
                    if (ref.extent.begin < end && ref.extent.end > end) {
                        end = ref.extent.end;
                        grew = true;
                    }
                }
            }
            end = std::min(end, chapter.end);
            finish_chunk(start, end);
            if (end >= chapter.end) break;

            std::size_t step =
                counter.truncate_bytes(text.substr(start, chapter.end - start), window - overlap);
            std::size_t next = start + step;
            // Pull the start back so it never lands inside a quote.
            for (const auto& ref : refs) {
                if (ref.extent.begin < next && ref.extent.end > next) next = ref.extent.begin;
            }
            if (next <= start) {
                // The blocking quote begins at start and outlives the step;
                // it is fully covered by the current window, so skip past it.
                std::size_t resume = start;
                for (const auto& ref : refs)
                    if (ref.extent.begin == start) resume = std::max(resume, ref.extent.end);
                next = resume > start ? resume : end;
            }
            start = next;
        }
    }

    for (std::size_t k = 1; k < chunks.size(); ++k) {
        std::set<std::string> prev_ids;
        for (const auto& [local, global] : chunks[k - 1].quotes) prev_ids.insert(global);
        for (const auto& [local, global] : chunks[k].quotes)
            if (prev_ids.count(global)) chunks[k].overlap_with_prev.insert(global);
    }
    return chunks;
}

std::vector<Chunk> chunk_novel(const Novel& novel, const TokenCounter& counter,
                               const ChunkingOptions& options) {
    std::vector<Chunk> all;
    for (int c = 0; c < static_cast<int>(novel.chapters.size()); ++c) {
        auto chunks = chunk_chapter(novel, c, counter, options);
        all.insert(all.end(), std::make_move_iterator(chunks.begin()),
                   std::make_move_iterator(chunks.end()));
    }
    return all;
}

std::string mark_quotes(const Novel& novel, const Chunk& chunk) {
    struct Region {
        std::size_t begin, end;
        int local_id;
    };
    std::vector<Region> regions;
    const std::string_view text(novel.text);

    for (std::size_t qi = 0; qi < chunk.quote_indices.size(); ++qi) {
        const Quote& quote = novel.quotes[static_cast<std::size_t>(chunk.quote_indices[qi])];
        const int local = chunk.quotes[qi].first;
        for (const auto& span : quote.byte_spans) {
            std::size_t begin = span.begin;
            std::size_t end = span.end;
            std::size_t len = 0;
            if (is_quote_mark_before(text, begin, chunk.span.begin, &len)) begin -= len;
            if (is_quote_mark_at(text, end, chunk.span.end, &len)) end += len;
            regions.push_back({begin, end, local});
        }
    }
    std::sort(regions.begin(), regions.end(),
              [](const Region& a, const Region& b) { return a.begin < b.begin; });

    std::string out;
    out.reserve(chunk.text.size() + regions.size() * 8);
    std::size_t pos = chunk.span.begin;
    for (const auto& r : regions) {
        if (r.end <= pos) continue;
        std::size_t begin = std::max(r.begin, pos);  // clamp touching expansions
        out.append(text.substr(pos, begin - pos));
        std::string header = "|" + std::to_string(r.local_id) + "|";
        out += header;
        out.append(text.substr(begin, r.end - begin));
        out += header;
        pos = r.end;
    }
    out.append(text.substr(pos, chunk.span.end - pos));
    return out;
}

std::string strip_markers(std::string_view marked) {
    std::string out;
    out.reserve(marked.size());
    std::size_t i = 0;
    while (i < marked.size()) {
        if (marked[i] == '|') {
            std::size_t j = i + 1;
            while (j < marked.size() && str::is_ascii_digit(marked[j])) ++j;
            if (j > i + 1 && j < marked.size() && marked[j] == '|') {
                i = j + 1;
                continue;
            }
        }
        out.push_back(marked[i]);
        ++i;
    }
    return out;
}

CarryoverResult carryover(const std::map<std::string, std::string>& prior_by_global,
                          const Chunk& current) {
    CarryoverResult result;
    for (const auto& [local, global] : current.quotes) {
        if (!current.overlap_with_prev.count(global)) continue;
        auto it = prior_by_global.find(global);
        if (it == prior_by_global.end() || it->second.empty()) {
            result.missing.push_back(global);
            continue;
        }
        result.entries[local] = it->second;
    }
    return result;
}

}  // namespace quoteattr
