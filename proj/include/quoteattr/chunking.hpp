#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "quoteattr/corpus.hpp"
#include "quoteattr/tokenizer.hpp"

namespace quoteattr {

struct Chunk {
    int chapter_index = 0;
    int token_begin = 0;
    int token_end = 0;
    ByteSpan span;      // novel-global byte window, snapped so no quote is bisected
    std::string text;   // novel text slice
    // (local id 1..n, global quote id) in order of first byte.
    std::vector<std::pair<int, std::string>> quotes;
    std::vector<int> quote_indices;  // parallel indices into novel.quotes
    std::string marked_text;
    std::set<std::string> overlap_with_prev;
};

struct ChunkingOptions {
    int window_tokens = 4096;
    int overlap_tokens = 1024;
};

// Sliding windows over one chapter. A chapter at most window_tokens long
// yields a single full-chapter chunk; otherwise windows advance by
// (window - overlap) tokens, with boundaries pushed outward so every
// intersecting quote lies fully inside the window.
std::vector<Chunk> chunk_chapter(const Novel& novel, int chapter_index,
                                 const TokenCounter& counter, const ChunkingOptions& options = {});

// All chapters in order; overlap sets link consecutive chunks of the same chapter.
std::vector<Chunk> chunk_novel(const Novel& novel, const TokenCounter& counter,
                               const ChunkingOptions& options = {});

// Wraps every sub-span of every chunk quote as |i|...|i|, extending the
// wrap over directly adjacent quotation-mark bytes.
std::string mark_quotes(const Novel& novel, const Chunk& chunk);

// Removes |digits| headers; inverse of mark_quotes on the chunk text.
std::string strip_markers(std::string_view marked);

struct CarryoverResult {
    std::map<int, std::string> entries;  // current-chunk local id -> prior predicted name
    std::vector<std::string> missing;    // overlap quotes without a usable prior prediction
};

// Prior predictions for the quotes shared with the previous chunk, keyed
// by this chunk's local ids.
CarryoverResult carryover(const std::map<std::string, std::string>& prior_by_global,
                          const Chunk& current);

}  // namespace quoteattr
