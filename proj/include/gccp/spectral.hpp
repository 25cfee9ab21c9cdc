#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "affinity.hpp"

namespace gccp {

/// L = I - D^{-1/2} A D^{-1/2} over the non-isolated vertices of A.
class NormalizedLaplacian {
  public:
    /// Drops zero-degree vertices. Throws anchor_unavailable if none remain.
    explicit NormalizedLaplacian(AffinityMatrix const& affinity);

    [[nodiscard]] std::size_t size() const noexcept { return m_vertices.size(); }
    /// Reduced index -> original vertex index.
    [[nodiscard]] std::vector<std::uint32_t> const& vertices() const noexcept { return m_vertices; }
    [[nodiscard]] std::vector<double> const& degrees() const noexcept { return m_degrees; }
    [[nodiscard]] AffinityMatrix const& reduced() const noexcept { return m_reduced; }

    /// y = L x.
    void apply(std::span<double const> x, std::span<double> y) const;
    void apply_serial(std::span<double const> x, std::span<double> y) const;

    [[nodiscard]] std::vector<std::vector<double>> dense() const;

  private:
    AffinityMatrix m_reduced;
    std::vector<std::uint32_t> m_vertices;
    std::vector<double> m_degrees;
    std::vector<double> m_inv_sqrt_degrees;
};

struct SpectralResult {
    double lambda2 = 0.0;
    std::vector<double> fiedler;           // unit norm, reduced indexing
    std::vector<double> degrees;           // reduced indexing
    std::vector<std::uint32_t> vertices;   // reduced -> original
    double residual = 0.0;                 // ||L v - lambda v||
    std::size_t iterations = 0;            // operator applications
};

struct EigensolverOptions {
    double tolerance = 1e-8;
    std::size_t max_iterations = 10000;
    /// Krylov basis size before a restart.
    std::size_t max_basis = 256;
};

/// Second-smallest eigenpair of L. The null direction D^{1/2}1 is deflated
/// exactly; the rest of the spectrum is explored by Lanczos with full
/// reorthogonalization from a deterministic alternating start vector, with
/// restarts from the current Ritz vector. The sign is fixed so the first
/// entry of largest magnitude is positive. Throws convergence_error.
SpectralResult fiedler_vector(NormalizedLaplacian const& laplacian,
                              EigensolverOptions const& options = {});

inline constexpr double sign_epsilon = 1e-9;

/// Original vertex indices with v2 > sign_epsilon, and the rest (zeros
/// included). Isolated vertices appear in neither.
std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>>
partition(SpectralResult const& result);

/// Eigen-decomposition of a symmetric tridiagonal matrix (implicit QL).
/// `diag` receives the eigenvalues ascending; `vectors` (row-major k x k,
/// column j = eigenvector j) is filled when non-null.
void tridiagonal_eigen(std::vector<double>& diag, std::vector<double> off,
                       std::vector<double>* vectors);

}  // namespace gccp
