#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "corpus.hpp"
#include "run.hpp"

namespace gccp {

/// Okapi BM25. Defaults follow the Anserini/Pyserini defaults (k1=0.9, b=0.4).
struct Bm25Params {
    double k1 = 0.9;
    double b = 0.4;
};

/// Collection statistics over the tokenizer in text.hpp.
struct CorpusStats {
    std::size_t num_docs = 0;
    double avg_doc_len = 0.0;
    std::unordered_map<std::string, std::uint32_t> doc_freq;

    static CorpusStats from_corpus(Corpus const& corpus);

    /// IDF(t) = ln((N - df + 0.5) / (df + 0.5) + 1); never negative.
    [[nodiscard]] double idf(std::string const& term) const;
};

/// A document pre-tokenized into term counts.
struct TermCounts {
    std::unordered_map<std::string, std::uint32_t> tf;
    std::uint32_t length = 0;

    static TermCounts from_text(std::string const& text);
};

/// Sums the per-term BM25 weight over the query's tokens (repeated query
/// tokens contribute repeatedly). Throws std::invalid_argument on empty stats.
double bm25_score(Query const& query, Document const& doc, CorpusStats const& stats,
                  double k1 = 0.9, double b = 0.4);

double bm25_score(std::vector<std::string> const& query_terms, TermCounts const& doc,
                  CorpusStats const& stats, Bm25Params params);

/// Tokenized corpus kept around so many queries can be scored against it.
class Bm25Index {
  public:
    explicit Bm25Index(Corpus const& corpus, Bm25Params params = {});

    [[nodiscard]] CorpusStats const& stats() const noexcept { return m_stats; }
    [[nodiscard]] std::vector<std::string> const& doc_ids() const noexcept { return m_ids; }
    [[nodiscard]] std::vector<TermCounts> const& docs() const noexcept { return m_docs; }
    [[nodiscard]] Bm25Params params() const noexcept { return m_params; }

  private:
    Bm25Params m_params;
    CorpusStats m_stats;
    std::vector<std::string> m_ids;
    std::vector<TermCounts> m_docs;
};

/// Top-k documents by BM25, ties broken by doc id. The run is tagged "BM25".
CandidateRun bm25_retrieve(Query const& query, Bm25Index const& index, std::size_t k);
CandidateRun bm25_retrieve(Query const& query, Corpus const& corpus, std::size_t k,
                           Bm25Params params = {});

}  // namespace gccp
