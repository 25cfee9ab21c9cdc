#pragma once

#include <cstdint>
#include <string>

#include "backend.hpp"
#include "corpus.hpp"

namespace gccp {

/// Deterministic pseudo-model: logprob(target) = -10 * frac(H / 2^64) with
/// H = FNV-1a-64 over UTF-8 bytes prompt || 0x1F || target. In labels mode the
/// target is the label; for continuation token j it is tokens 0..j joined by
/// single spaces. Continuation tokens are whitespace tokens.
class HashMockBackend final : public Backend {
  public:
    ScoreResponse score(ScoreRequest const& request) override;
    [[nodiscard]] std::string name() const override { return "hash-mock"; }

    /// Throws std::invalid_argument on an empty target.
    static double logprob(std::string const& prompt, std::string const& target);
};

/// Backend whose scores follow known relevance grades.
///
/// Labels are read in request order as relevance-ascending unless request
/// metadata "label_order" is "descending". With K labels, label k gets logit
/// -|k - g*(K-1)/G| + sigma*N, where g is the grade of (metadata "qid",
/// metadata "docid"), G the largest grade in the table, and N a standard
/// normal keyed by (seed, qid, docid, label). Continuation tokens each get
/// -0.5 - 2.0*(G - g)/G (+ noise).
class OracleMockBackend final : public Backend {
  public:
    OracleMockBackend(Qrels qrels, double sigma = 0.0, std::uint64_t seed = 0);

    ScoreResponse score(ScoreRequest const& request) override;
    [[nodiscard]] std::string name() const override { return "oracle-mock"; }

  private:
    [[nodiscard]] double noise(std::string const& qid, std::string const& docid,
                               std::string const& label) const;

    Qrels m_qrels;
    double m_sigma;
    std::uint64_t m_seed;
};

}  // namespace gccp
