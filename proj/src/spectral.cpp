#include "gccp/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "gccp/error.hpp"
#include "gccp/kernels.hpp"

namespace gccp {

NormalizedLaplacian::NormalizedLaplacian(AffinityMatrix const& affinity)
{
    auto degrees = affinity.degrees();
    std::vector<std::int64_t> reduced_index(affinity.size(), -1);
    for (std::size_t i = 0; i < affinity.size(); ++i) {
        if (degrees[i] > 0.0) {
            reduced_index[i] = static_cast<std::int64_t>(m_vertices.size());
            m_vertices.push_back(static_cast<std::uint32_t>(i));
            m_degrees.push_back(degrees[i]);
            m_inv_sqrt_degrees.push_back(1.0 / std::sqrt(degrees[i]));
        }
    }
    if (m_vertices.empty()) {
        throw anchor_unavailable("every sentence is isolated in the affinity graph");
    }
    std::vector<std::size_t> row_ptr{0};
    std::vector<std::uint32_t> cols;
    std::vector<double> vals;
    for (auto v : m_vertices) {
        auto c = affinity.row_cols(v);
        auto w = affinity.row_vals(v);
        for (std::size_t p = 0; p < c.size(); ++p) {
            // Neighbours of a non-isolated vertex are non-isolated too.
            cols.push_back(static_cast<std::uint32_t>(reduced_index[c[p]]));
            vals.push_back(w[p]);
        }
        row_ptr.push_back(cols.size());
    }
    m_reduced = AffinityMatrix(m_vertices.size(), affinity.theta(), std::move(row_ptr),
                               std::move(cols), std::move(vals));
}

void NormalizedLaplacian::apply(std::span<double const> x, std::span<double> y) const
{
    kernels::parallel::normalized_laplacian_apply(m_reduced, m_inv_sqrt_degrees, x, y);
}

void NormalizedLaplacian::apply_serial(std::span<double const> x, std::span<double> y) const
{
    kernels::serial::normalized_laplacian_apply(m_reduced, m_inv_sqrt_degrees, x, y);
}

std::vector<std::vector<double>> NormalizedLaplacian::dense() const
{
    auto n = size();
    auto a = m_reduced.dense();
    std::vector<std::vector<double>> l(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            l[i][j] = (i == j ? 1.0 : 0.0) - m_inv_sqrt_degrees[i] * a[i][j] * m_inv_sqrt_degrees[j];
        }
    }
    return l;
}

void tridiagonal_eigen(std::vector<double>& diag, std::vector<double> off,
                       std::vector<double>* vectors)
{
    auto n = diag.size();
    if (n == 0) {
        return;
    }
    off.resize(n, 0.0);
    off[n - 1] = 0.0;
    if (vectors != nullptr) {
        vectors->assign(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            (*vectors)[i * n + i] = 1.0;
        }
    }
    auto& d = diag;
    auto& e = off;
    constexpr double eps = std::numeric_limits<double>::epsilon();
    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        std::size_t m = l;
        do {
            for (m = l; m + 1 < n; ++m) {
                double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= eps * dd) {
                    break;
                }
            }
            if (m == l) {
                break;
            }
            if (++iter > 100) {
                throw convergence_error("tridiagonal QL did not converge", std::abs(e[l]));
            }
            double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            double r = std::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
            double s = 1.0;
            double c = 1.0;
            double p = 0.0;
            bool underflow = false;
            for (std::size_t i = m; i-- > l;) {
                double f = s * e[i];
                double b = c * e[i];
                r = std::hypot(f, g);
                e[i + 1] = r;
                if (r == 0.0) {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if (vectors != nullptr) {
                    auto& z = *vectors;
                    for (std::size_t k = 0; k < n; ++k) {
                        f = z[k * n + i + 1];
                        z[k * n + i + 1] = s * z[k * n + i] + c * f;
                        z[k * n + i] = c * z[k * n + i] - s * f;
                    }
                }
            }
            if (underflow) {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        } while (m != l);
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
    std::vector<double> sorted(n);
    for (std::size_t i = 0; i < n; ++i) {
        sorted[i] = d[order[i]];
    }
    d = std::move(sorted);
    if (vectors != nullptr) {
        std::vector<double> z(n * n);
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t i = 0; i < n; ++i) {
                z[k * n + i] = (*vectors)[k * n + order[i]];
            }
        }
        *vectors = std::move(z);
    }
}

namespace {

using Vec = std::vector<double>;

double dot(Vec const& a, Vec const& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

double norm(Vec const& a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, Vec const& x, Vec& y)
{
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] += alpha * x[i];
    }
}

void scale(Vec& x, double alpha)
{
    for (auto& v : x) {
        v *= alpha;
    }
}

/// Removes the components along u0 and every basis vector (two passes).
void orthogonalize(Vec& w, Vec const& u0, std::vector<Vec> const& basis)
{
    for (int pass = 0; pass < 2; ++pass) {
        axpy(-dot(u0, w), u0, w);
        for (auto const& q : basis) {
            axpy(-dot(q, w), q, w);
        }
    }
}

/// A unit vector orthogonal to u0 and `basis`, trying the alternating pattern
/// first and then unit vectors in index order. Empty when none exists.
Vec fresh_direction(Vec const& u0, std::vector<Vec> const& basis, bool alternating)
{
    auto n = u0.size();
    auto attempt = [&](Vec v) -> Vec {
        orthogonalize(v, u0, basis);
        double nv = norm(v);
        if (nv < 1e-6) {
            return {};
        }
        scale(v, 1.0 / nv);
        return v;
    };
    if (alternating) {
        Vec v(n);
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = (i % 2 == 0) ? 1.0 : -1.0;
        }
        if (auto r = attempt(std::move(v)); !r.empty()) {
            return r;
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        Vec v(n, 0.0);
        v[k] = 1.0;
        if (auto r = attempt(std::move(v)); !r.empty()) {
            return r;
        }
    }
    return {};
}

}  // namespace

SpectralResult fiedler_vector(NormalizedLaplacian const& laplacian,
                              EigensolverOptions const& options)
{
    auto n = laplacian.size();
    if (n < 2) {
        throw std::invalid_argument("fiedler_vector needs at least two connected vertices");
    }
    auto const& degrees = laplacian.degrees();
    Vec u0(n);
    for (std::size_t i = 0; i < n; ++i) {
        u0[i] = std::sqrt(degrees[i]);
    }
    scale(u0, 1.0 / norm(u0));

    auto apply = [&](Vec const& x, Vec& y) { laplacian.apply(x, y); };

    std::size_t budget = std::min<std::size_t>(n - 1, std::max<std::size_t>(options.max_basis, 2));
    Vec start = fresh_direction(u0, {}, true);
    std::size_t iterations = 0;
    Vec ritz;
    double lambda = 0.0;
    double residual = std::numeric_limits<double>::infinity();
    Vec lv(n);

    while (true) {
        std::vector<Vec> basis{start};
        Vec alpha;
        Vec beta;
        Vec w(n);
        while (true) {
            auto const& q = basis.back();
            apply(q, w);
            ++iterations;
            double a = dot(q, w);
            alpha.push_back(a);
            axpy(-a, q, w);
            if (basis.size() >= 2) {
                axpy(-beta.back(), basis[basis.size() - 2], w);
            }
            orthogonalize(w, u0, basis);
            if (basis.size() == budget || iterations >= options.max_iterations) {
                break;
            }
            double b = norm(w);
            if (b < 1e-10) {
                // Invariant subspace: continue in a direction not reached yet.
                Vec next = fresh_direction(u0, basis, false);
                if (next.empty()) {
                    break;
                }
                beta.push_back(0.0);
                basis.push_back(std::move(next));
            } else {
                beta.push_back(b);
                scale(w, 1.0 / b);
                basis.push_back(w);
            }
        }

        auto k = alpha.size();
        Vec eigvals = alpha;
        Vec eigvecs;
        tridiagonal_eigen(eigvals, beta, &eigvecs);
        ritz.assign(n, 0.0);
        for (std::size_t j = 0; j < k; ++j) {
            axpy(eigvecs[j * k + 0], basis[j], ritz);
        }
        orthogonalize(ritz, u0, {});
        scale(ritz, 1.0 / norm(ritz));
        apply(ritz, lv);
        ++iterations;
        lambda = dot(ritz, lv);
        Vec r = lv;
        axpy(-lambda, ritz, r);
        residual = norm(r);
        if (residual <= options.tolerance) {
            break;
        }
        if (iterations >= options.max_iterations) {
            throw convergence_error("Fiedler vector did not converge", residual);
        }
        start = ritz;
    }

    double max_abs = 0.0;
    for (double v : ritz) {
        max_abs = std::max(max_abs, std::abs(v));
    }
    for (double v : ritz) {
        if (std::abs(v) >= max_abs - 1e-12) {
            if (v < 0.0) {
                scale(ritz, -1.0);
            }
            break;
        }
    }

    SpectralResult result;
    result.lambda2 = std::max(0.0, lambda);
    result.fiedler = std::move(ritz);
    result.degrees = degrees;
    result.vertices = laplacian.vertices();
    result.residual = residual;
    result.iterations = iterations;
    return result;
}

std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>>
partition(SpectralResult const& result)
{
    std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>> clusters;
    for (std::size_t i = 0; i < result.fiedler.size(); ++i) {
        auto v = result.vertices.at(i);
        if (result.fiedler[i] > sign_epsilon) {
            clusters.first.push_back(v);
        } else {
            clusters.second.push_back(v);
        }
    }
    return clusters;
}

}  // namespace gccp
