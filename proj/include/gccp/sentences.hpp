#pragma once

#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "corpus.hpp"

namespace gccp {

struct Sentence {
    std::string text;
    std::string doc_id;
    std::uint32_t doc_rank = 0;  // initial rank of the source document, 1-based
    std::uint32_t index = 0;     // position of the segment within the source document
};

/// Orders sentences by (source rank, index in doc).
[[nodiscard]] bool position_before(Sentence const& a, Sentence const& b) noexcept;

struct SegmenterConfig {
    std::size_t min_tokens = 3;
    /// Tokens such as "Dr." or "e.g." after which a terminator does not split.
    /// Compared case-insensitively.
    std::unordered_set<std::string> abbreviations = default_abbreviations();

    static std::unordered_set<std::string> default_abbreviations();
    /// Replaces the guard list with the contents of a one-per-line file.
    void load_abbreviations(std::string const& path);
};

/// Rule-based splitter. A '.', '!' or '?' (plus any trailing closing quotes or
/// brackets) ends a sentence when followed by whitespace and an uppercase
/// letter, or by the end of the text, unless the word ending at the period is
/// on the guard list. Segments shorter than `min_tokens` are dropped; indices
/// are positions among all segments, so they increase strictly.
std::vector<Sentence> split_sentences(Document const& doc, std::uint32_t doc_rank,
                                      SegmenterConfig const& config = {});

/// Lowercase, whitespace collapsed, terminal punctuation stripped.
std::string dedup_key(std::string const& text);

/// Drops sentences whose dedup_key was already seen. The survivor for each key
/// is the one earliest by (source rank, index); input order is preserved.
std::vector<Sentence> dedup_sentences(std::vector<Sentence> const& sentences);

}  // namespace gccp
