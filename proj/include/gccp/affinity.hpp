#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tfidf.hpp"

namespace gccp {

/// Symmetric sparse sentence-similarity graph in CSR form (both triangles
/// stored). The diagonal is always zero and every stored weight is >= theta
/// and > 0.
class AffinityMatrix {
  public:
    AffinityMatrix() = default;
    AffinityMatrix(std::size_t n, double theta, std::vector<std::size_t> row_ptr,
                   std::vector<std::uint32_t> cols, std::vector<double> vals);

    /// Dense input, mostly for tests. Entries below theta are dropped.
    static AffinityMatrix from_dense(std::vector<std::vector<double>> const& dense,
                                     double theta = 0.0);

    [[nodiscard]] std::size_t size() const noexcept { return m_n; }
    [[nodiscard]] double theta() const noexcept { return m_theta; }
    [[nodiscard]] std::size_t nnz() const noexcept { return m_vals.size(); }
    [[nodiscard]] double at(std::size_t i, std::size_t j) const;
    [[nodiscard]] double degree(std::size_t i) const;
    [[nodiscard]] std::vector<double> degrees() const;

    [[nodiscard]] std::span<std::uint32_t const> row_cols(std::size_t i) const
    {
        return {m_cols.data() + m_row_ptr[i], m_row_ptr[i + 1] - m_row_ptr[i]};
    }
    [[nodiscard]] std::span<double const> row_vals(std::size_t i) const
    {
        return {m_vals.data() + m_row_ptr[i], m_row_ptr[i + 1] - m_row_ptr[i]};
    }

    [[nodiscard]] std::vector<std::vector<double>> dense() const;

    friend bool operator==(AffinityMatrix const&, AffinityMatrix const&) = default;

  private:
    std::size_t m_n = 0;
    double m_theta = 0.0;
    std::vector<std::size_t> m_row_ptr{0};
    std::vector<std::uint32_t> m_cols;
    std::vector<double> m_vals;
};

/// a_ij = cos(e_i, e_j) when it is >= theta (and positive), else no edge.
/// Requires theta in [0, 1) and at least two embeddings.
AffinityMatrix build_affinity(std::span<TfIdfVector const> embeddings, double theta);

}  // namespace gccp
