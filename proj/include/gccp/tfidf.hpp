#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "sentences.hpp"

namespace gccp {

/// Sparse, L2-normalized (or empty) TF-IDF vector, sorted by term id.
struct TfIdfVector {
    std::vector<std::pair<std::uint32_t, double>> weights;

    [[nodiscard]] bool is_zero() const noexcept { return weights.empty(); }
    [[nodiscard]] double weight(std::uint32_t term) const noexcept;
    [[nodiscard]] double norm() const noexcept;
};

struct TokenizerConfig {
    std::unordered_set<std::string> stopwords;

    [[nodiscard]] std::vector<std::string> terms(std::string const& text) const;
};

/// Term ids with smoothed IDF, IDF(t) = ln((1 + n) / (1 + f(t))) + 1 where n is
/// the number of units (sentences by default) and f(t) the units containing t.
class Vocabulary {
  public:
    static Vocabulary build(std::vector<std::vector<std::string>> const& units);

    [[nodiscard]] std::size_t size() const noexcept { return m_idf.size(); }
    [[nodiscard]] std::size_t num_units() const noexcept { return m_units; }
    /// Term id, or -1 for unseen terms.
    [[nodiscard]] std::int64_t id(std::string const& term) const;
    [[nodiscard]] double idf(std::string const& term) const;
    [[nodiscard]] double idf(std::uint32_t id) const { return m_idf.at(id); }

  private:
    std::unordered_map<std::string, std::uint32_t> m_ids;
    std::vector<double> m_idf;
    std::size_t m_units = 0;
};

Vocabulary build_vocabulary(std::vector<Sentence> const& sentences,
                            TokenizerConfig const& tokenizer = {});

/// weight(t) = tf(t) * IDF(t), then L2-normalized. Unseen terms get no weight.
TfIdfVector tfidf_embed(std::vector<std::string> const& terms, Vocabulary const& vocab);
TfIdfVector tfidf_embed(Sentence const& sentence, Vocabulary const& vocab,
                        TokenizerConfig const& tokenizer = {});

/// Dot product of two normalized vectors, clamped to [0, 1]. Zero vectors give 0.
double cosine(TfIdfVector const& a, TfIdfVector const& b) noexcept;

}  // namespace gccp
