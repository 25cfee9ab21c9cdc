#pragma once

#include <span>
#include <string>
#include <vector>

#include "affinity.hpp"
#include "bm25.hpp"
#include "tfidf.hpp"

/// Data-parallel kernels. `serial` is the reference; `parallel` uses OpenMP and
/// must produce bit-identical output.
namespace gccp::kernels {

namespace serial {

AffinityMatrix affinity(std::span<TfIdfVector const> embeddings, double theta);

/// y = x - S x with S = D^{-1/2} A D^{-1/2}, given inv_sqrt_degrees.
void normalized_laplacian_apply(AffinityMatrix const& a, std::span<double const> inv_sqrt_degrees,
                                std::span<double const> x, std::span<double> y);

std::vector<double> bm25_scores(std::vector<std::string> const& query_terms,
                                std::span<TermCounts const> docs, CorpusStats const& stats,
                                Bm25Params params);

}  // namespace serial

namespace parallel {

AffinityMatrix affinity(std::span<TfIdfVector const> embeddings, double theta);

void normalized_laplacian_apply(AffinityMatrix const& a, std::span<double const> inv_sqrt_degrees,
                                std::span<double const> x, std::span<double> y);

std::vector<double> bm25_scores(std::vector<std::string> const& query_terms,
                                std::span<TermCounts const> docs, CorpusStats const& stats,
                                Bm25Params params);

}  // namespace parallel

}  // namespace gccp::kernels
