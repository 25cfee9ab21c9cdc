#include "gccp/bm25.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "gccp/kernels.hpp"
#include "gccp/text.hpp"

namespace gccp {

CorpusStats CorpusStats::from_corpus(Corpus const& corpus)
{
    CorpusStats stats;
    std::size_t total = 0;
    for (auto const& [id, doc] : corpus) {
        auto terms = tokenize(doc.text);
        total += terms.size();
        std::unordered_set<std::string> unique(terms.begin(), terms.end());
        for (auto const& t : unique) {
            ++stats.doc_freq[t];
        }
    }
    stats.num_docs = corpus.size();
    stats.avg_doc_len =
        corpus.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(corpus.size());
    return stats;
}

double CorpusStats::idf(std::string const& term) const
{
    auto it = doc_freq.find(term);
    double df = it == doc_freq.end() ? 0.0 : static_cast<double>(it->second);
    auto n = static_cast<double>(num_docs);
    return std::log((n - df + 0.5) / (df + 0.5) + 1.0);
}

TermCounts TermCounts::from_text(std::string const& text)
{
    TermCounts counts;
    for (auto& t : tokenize(text)) {
        ++counts.tf[std::move(t)];
        ++counts.length;
    }
    return counts;
}

double bm25_score(std::vector<std::string> const& query_terms, TermCounts const& doc,
                  CorpusStats const& stats, Bm25Params params)
{
    if (stats.num_docs == 0) {
        throw std::invalid_argument("bm25_score: empty corpus statistics");
    }
    // A corpus of empty documents has avg_doc_len 0; treat every length as average.
    double norm_len = stats.avg_doc_len > 0.0 ? doc.length / stats.avg_doc_len : 1.0;
    double length_factor = params.k1 * (1.0 - params.b + params.b * norm_len);
    double score = 0.0;
    for (auto const& term : query_terms) {
        auto it = doc.tf.find(term);
        if (it == doc.tf.end()) {
            continue;
        }
        auto tf = static_cast<double>(it->second);
        score += stats.idf(term) * tf * (params.k1 + 1.0) / (tf + length_factor);
    }
    return score;
}

double bm25_score(Query const& query, Document const& doc, CorpusStats const& stats, double k1,
                  double b)
{
    return bm25_score(tokenize(query.text), TermCounts::from_text(doc.text), stats, {k1, b});
}

Bm25Index::Bm25Index(Corpus const& corpus, Bm25Params params)
    : m_params(params), m_stats(CorpusStats::from_corpus(corpus))
{
    m_ids.reserve(corpus.size());
    m_docs.reserve(corpus.size());
    for (auto const& [id, doc] : corpus) {
        m_ids.push_back(id);
        m_docs.push_back(TermCounts::from_text(doc.text));
    }
}

CandidateRun bm25_retrieve(Query const& query, Bm25Index const& index, std::size_t k)
{
    if (index.stats().num_docs == 0) {
        throw std::invalid_argument("bm25_retrieve: empty corpus");
    }
    auto scores = kernels::parallel::bm25_scores(tokenize(query.text), index.docs(),
                                                 index.stats(), index.params());
    CandidateRun run{query.id, {}, "BM25"};
    run.entries.reserve(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        // Equal prior ranks so ties fall through to doc id.
        run.entries.push_back({index.doc_ids()[i], scores[i], 1});
    }
    auto keep = std::min(k, run.entries.size());
    std::partial_sort(run.entries.begin(), run.entries.begin() + static_cast<std::ptrdiff_t>(keep),
                      run.entries.end(), ranks_before);
    run.entries.resize(keep);
    for (std::size_t i = 0; i < keep; ++i) {
        run.entries[i].rank = static_cast<std::uint32_t>(i + 1);
    }
    return run;
}

CandidateRun bm25_retrieve(Query const& query, Corpus const& corpus, std::size_t k,
                           Bm25Params params)
{
    return bm25_retrieve(query, Bm25Index(corpus, params), k);
}

}  // namespace gccp
