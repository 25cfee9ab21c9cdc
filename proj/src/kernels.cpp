#include "gccp/kernels.hpp"

#include <cstdint>
#include <stdexcept>

#include <omp.h>

namespace gccp::kernels {

namespace {

struct Row {
    std::vector<std::uint32_t> cols;
    std::vector<double> vals;
};

void check_affinity_args(std::span<TfIdfVector const> embeddings, double theta)
{
    if (embeddings.size() < 2) {
        throw std::invalid_argument("affinity needs at least two sentences");
    }
    if (!(theta >= 0.0 && theta < 1.0)) {
        throw std::invalid_argument("affinity threshold must lie in [0, 1)");
    }
}

Row affinity_row(std::span<TfIdfVector const> embeddings, std::size_t i, double theta)
{
    Row row;
    for (std::size_t j = 0; j < embeddings.size(); ++j) {
        if (j == i) {
            continue;
        }
        double c = cosine(embeddings[i], embeddings[j]);
        if (c > 0.0 && c >= theta) {
            row.cols.push_back(static_cast<std::uint32_t>(j));
            row.vals.push_back(c);
        }
    }
    return row;
}

AffinityMatrix assemble(std::vector<Row>& rows, double theta)
{
    std::vector<std::size_t> row_ptr(rows.size() + 1, 0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        row_ptr[i + 1] = row_ptr[i] + rows[i].cols.size();
    }
    std::vector<std::uint32_t> cols;
    std::vector<double> vals;
    cols.reserve(row_ptr.back());
    vals.reserve(row_ptr.back());
    for (auto& r : rows) {
        cols.insert(cols.end(), r.cols.begin(), r.cols.end());
        vals.insert(vals.end(), r.vals.begin(), r.vals.end());
    }
    return {rows.size(), theta, std::move(row_ptr), std::move(cols), std::move(vals)};
}

inline double laplacian_row(AffinityMatrix const& a, std::span<double const> inv_sqrt,
                            std::span<double const> x, std::size_t i)
{
    auto cols = a.row_cols(i);
    auto vals = a.row_vals(i);
    double acc = 0.0;
    for (std::size_t p = 0; p < cols.size(); ++p) {
        acc += vals[p] * inv_sqrt[cols[p]] * x[cols[p]];
    }
    return x[i] - inv_sqrt[i] * acc;
}

}  // namespace

namespace serial {

AffinityMatrix affinity(std::span<TfIdfVector const> embeddings, double theta)
{
    check_affinity_args(embeddings, theta);
    std::vector<Row> rows(embeddings.size());
    for (std::size_t i = 0; i < embeddings.size(); ++i) {
        rows[i] = affinity_row(embeddings, i, theta);
    }
    return assemble(rows, theta);
}

void normalized_laplacian_apply(AffinityMatrix const& a, std::span<double const> inv_sqrt_degrees,
                                std::span<double const> x, std::span<double> y)
{
    for (std::size_t i = 0; i < a.size(); ++i) {
        y[i] = laplacian_row(a, inv_sqrt_degrees, x, i);
    }
}

std::vector<double> bm25_scores(std::vector<std::string> const& query_terms,
                                std::span<TermCounts const> docs, CorpusStats const& stats,
                                Bm25Params params)
{
    std::vector<double> scores(docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) {
        scores[i] = bm25_score(query_terms, docs[i], stats, params);
    }
    return scores;
}

}  // namespace serial

namespace parallel {

AffinityMatrix affinity(std::span<TfIdfVector const> embeddings, double theta)
{
    check_affinity_args(embeddings, theta);
    std::vector<Row> rows(embeddings.size());
    auto n = static_cast<std::int64_t>(embeddings.size());
#pragma omp parallel for schedule(dynamic, 8)
    for (std::int64_t i = 0; i < n; ++i) {
        rows[static_cast<std::size_t>(i)] =
            affinity_row(embeddings, static_cast<std::size_t>(i), theta);
    }
    return assemble(rows, theta);
}

void normalized_laplacian_apply(AffinityMatrix const& a, std::span<double const> inv_sqrt_degrees,
                                std::span<double const> x, std::span<double> y)
{
    auto n = static_cast<std::int64_t>(a.size());
    // Not worth waking the thread team for small graphs.
#pragma omp parallel for schedule(static) if (n > 2048)
    for (std::int64_t i = 0; i < n; ++i) {
        y[static_cast<std::size_t>(i)] =
            laplacian_row(a, inv_sqrt_degrees, x, static_cast<std::size_t>(i));
    }
}

std::vector<double> bm25_scores(std::vector<std::string> const& query_terms,
                                std::span<TermCounts const> docs, CorpusStats const& stats,
                                Bm25Params params)
{
    if (stats.num_docs == 0) {
        throw std::invalid_argument("bm25_score: empty corpus statistics");
    }
    std::vector<double> scores(docs.size());
    auto n = static_cast<std::int64_t>(docs.size());
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < n; ++i) {
        auto k = static_cast<std::size_t>(i);
        scores[k] = bm25_score(query_terms, docs[k], stats, params);
    }
    return scores;
}

}  // namespace parallel

}  // namespace gccp::kernels
