#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "run.hpp"
#include "sentences.hpp"
#include "tfidf.hpp"

namespace gccp {

enum class AnchorStrategy { spectral, top, random };

std::string to_string(AnchorStrategy s);
AnchorStrategy parse_anchor_strategy(std::string const& name);

enum class IdfSource { sentences, documents };

struct AnchorParams {
    std::size_t m = 10;      // documents feeding the summary
    std::size_t z = 10;      // sentences kept
    double theta = 0.1;      // affinity threshold
    AnchorStrategy strategy = AnchorStrategy::spectral;
    std::uint64_t seed = 0;  // random strategy only
    IdfSource idf_source = IdfSource::sentences;
    SegmenterConfig segmenter;
    TokenizerConfig tokenizer;
};

struct AnchorDocument {
    std::string query_id;
    std::string text;
    std::vector<Sentence> selected;
    std::size_t positive_size = 0;  // |C+|
    std::size_t negative_size = 0;  // |C-|
    std::size_t z = 0;
    std::optional<double> lambda2;
    AnchorStrategy strategy = AnchorStrategy::spectral;
    /// Set when the spectral summary was unavailable and the top document was used.
    bool fallback = false;
    std::string fallback_reason;
};

/// Picks the larger cluster (ties go to the cluster holding the earliest
/// sentence by source rank and index), orders it by position and keeps the
/// first min(z, |C|) sentences joined by single spaces.
AnchorDocument assemble_anchor(std::vector<std::uint32_t> const& positive,
                               std::vector<std::uint32_t> const& negative,
                               std::vector<Sentence> const& sentences, std::size_t z);

/// Spectral summary of the top-m documents of `run`. Throws anchor_unavailable
/// when fewer than two sentences survive or the graph has no edges.
AnchorDocument build_anchor(Query const& query, CandidateRun const& run, Corpus const& corpus,
                            AnchorParams const& params);

/// Anchor for any strategy. A spectral failure falls back to the top-1
/// document with `fallback` set.
AnchorDocument select_anchor(Query const& query, CandidateRun const& run, Corpus const& corpus,
                             AnchorParams const& params);

/// {query_id, anchor_text, sentence_provenance, lambda2, cluster_sizes, fallback}
std::string anchor_to_json(AnchorDocument const& anchor);

}  // namespace gccp
