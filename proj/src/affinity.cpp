#include "gccp/affinity.hpp"

#include <algorithm>
#include <stdexcept>

#include "gccp/kernels.hpp"

namespace gccp {

AffinityMatrix::AffinityMatrix(std::size_t n, double theta, std::vector<std::size_t> row_ptr,
                               std::vector<std::uint32_t> cols, std::vector<double> vals)
    : m_n(n), m_theta(theta), m_row_ptr(std::move(row_ptr)), m_cols(std::move(cols)),
      m_vals(std::move(vals))
{
    if (m_row_ptr.size() != n + 1 || m_cols.size() != m_vals.size()
        || m_row_ptr.back() != m_cols.size()) {
        throw std::invalid_argument("inconsistent CSR arrays");
    }
}

AffinityMatrix AffinityMatrix::from_dense(std::vector<std::vector<double>> const& dense,
                                          double theta)
{
    auto n = dense.size();
    std::vector<std::size_t> row_ptr{0};
    std::vector<std::uint32_t> cols;
    std::vector<double> vals;
    for (std::size_t i = 0; i < n; ++i) {
        if (dense[i].size() != n) {
            throw std::invalid_argument("affinity matrix must be square");
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (dense[i][j] != dense[j][i]) {
                throw std::invalid_argument("affinity matrix must be symmetric");
            }
            if (dense[i][j] < 0.0) {
                throw std::invalid_argument("affinity weights must be non-negative");
            }
            if (i != j && dense[i][j] > 0.0 && dense[i][j] >= theta) {
                cols.push_back(static_cast<std::uint32_t>(j));
                vals.push_back(dense[i][j]);
            }
        }
        row_ptr.push_back(cols.size());
    }
    return {n, theta, std::move(row_ptr), std::move(cols), std::move(vals)};
}

double AffinityMatrix::at(std::size_t i, std::size_t j) const
{
    auto cols = row_cols(i);
    auto it = std::lower_bound(cols.begin(), cols.end(), static_cast<std::uint32_t>(j));
    if (it == cols.end() || *it != j) {
        return 0.0;
    }
    return row_vals(i)[static_cast<std::size_t>(it - cols.begin())];
}

double AffinityMatrix::degree(std::size_t i) const
{
    double d = 0.0;
    for (double v : row_vals(i)) {
        d += v;
    }
    return d;
}

std::vector<double> AffinityMatrix::degrees() const
{
    std::vector<double> d(m_n);
    for (std::size_t i = 0; i < m_n; ++i) {
        d[i] = degree(i);
    }
    return d;
}

std::vector<std::vector<double>> AffinityMatrix::dense() const
{
    std::vector<std::vector<double>> out(m_n, std::vector<double>(m_n, 0.0));
    for (std::size_t i = 0; i < m_n; ++i) {
        auto cols = row_cols(i);
        auto vals = row_vals(i);
        for (std::size_t p = 0; p < cols.size(); ++p) {
            out[i][cols[p]] = vals[p];
        }
    }
    return out;
}

AffinityMatrix build_affinity(std::span<TfIdfVector const> embeddings, double theta)
{
    return kernels::parallel::affinity(embeddings, theta);
}

}  // namespace gccp
