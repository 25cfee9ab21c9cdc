#pragma once

#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gccp/affinity.hpp"
#include "gccp/spectral.hpp"
#include "oracles/jacobi.hpp"
#include "oracles/union_find.hpp"

namespace test {

using Dense = std::vector<std::vector<double>>;

/// Symmetric weights in [0.1, 1] with edge probability `density`; zero diagonal.
inline Dense random_graph(std::mt19937_64& rng, std::size_t n, double density)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_real_distribution<double> w(0.1, 1.0);
    Dense a(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (u(rng) < density) {
                a[i][j] = a[j][i] = w(rng);
            }
        }
    }
    return a;
}

/// Two random blocks with no edges between them.
inline Dense random_split_graph(std::mt19937_64& rng, std::size_t n, double density)
{
    auto a = random_graph(rng, n, density);
    std::size_t cut = n / 2;
    for (std::size_t i = 0; i < cut; ++i) {
        for (std::size_t j = cut; j < n; ++j) {
            a[i][j] = a[j][i] = 0.0;
        }
    }
    return a;
}

struct SpectralCheck {
    bool ok = true;
    bool skipped = false;        // no edges at all
    bool connected = true;
    bool partition_compared = false;
    double lambda2 = 0.0;
    double lambda2_oracle = 0.0;
    double residual = 0.0;
    double orthogonality = 0.0;
    std::string detail;
};

/// Runs the iterative solver on `a` and checks it against a dense Jacobi
/// decomposition built independently from the same weights.
inline SpectralCheck check_spectral(Dense const& a, gccp::EigensolverOptions const& options = {})
{
    SpectralCheck out;
    std::ostringstream why;
    std::size_t n = a.size();

    std::vector<std::size_t> keep;
    std::vector<double> deg;
    for (std::size_t i = 0; i < n; ++i) {
        double d = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            d += a[i][j];
        }
        if (d > 0.0) {
            keep.push_back(i);
            deg.push_back(d);
        }
    }
    if (keep.empty()) {
        out.skipped = true;
        return out;
    }
    std::size_t m = keep.size();
    Dense lap(m, std::vector<double>(m, 0.0));
    oracle::UnionFind uf(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            double w = a[keep[i]][keep[j]];
            lap[i][j] = (i == j ? 1.0 : 0.0) - w / std::sqrt(deg[i] * deg[j]);
            if (w > 0.0) {
                uf.unite(i, j);
            }
        }
    }
    out.connected = uf.components() == 1;
    auto eig = oracle::jacobi_eigen(lap);
    out.lambda2_oracle = eig.values.at(1);

    auto affinity = gccp::AffinityMatrix::from_dense(a, 0.0);
    gccp::NormalizedLaplacian laplacian(affinity);
    auto res = gccp::fiedler_vector(laplacian, options);
    out.lambda2 = res.lambda2;

    if (res.vertices.size() != m) {
        why << "reduced size " << res.vertices.size() << " != " << m << "; ";
        out.ok = false;
        out.detail = why.str();
        return out;
    }
    for (std::size_t i = 0; i < m; ++i) {
        if (res.vertices[i] != keep[i]) {
            why << "vertex map differs; ";
            out.ok = false;
        }
    }

    double r2 = 0.0, dot = 0.0, norm2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double lv = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            lv += lap[i][j] * res.fiedler[j];
        }
        r2 += (lv - res.lambda2 * res.fiedler[i]) * (lv - res.lambda2 * res.fiedler[i]);
        dot += std::sqrt(deg[i]) * res.fiedler[i];
        norm2 += res.fiedler[i] * res.fiedler[i];
    }
    out.residual = std::sqrt(r2);
    out.orthogonality = std::abs(dot);

    if (std::abs(res.lambda2 - out.lambda2_oracle) > 1e-6) {
        why << "lambda2 " << res.lambda2 << " vs oracle " << out.lambda2_oracle << "; ";
        out.ok = false;
    }
    if (out.residual > 1e-6) {
        why << "residual " << out.residual << "; ";
        out.ok = false;
    }
    if (out.orthogonality > 1e-6) {
        why << "not orthogonal to D^1/2 1: " << out.orthogonality << "; ";
        out.ok = false;
    }
    if (std::abs(norm2 - 1.0) > 1e-9) {
        why << "not unit norm; ";
        out.ok = false;
    }

    // sign convention: first entry of largest magnitude is positive
    double biggest = 0.0;
    for (double v : res.fiedler) {
        biggest = std::max(biggest, std::abs(v));
    }
    for (double v : res.fiedler) {
        if (std::abs(v) >= biggest - 1e-12) {
            if (v <= 0.0) {
                why << "sign convention violated; ";
                out.ok = false;
            }
            break;
        }
    }

    auto [pos, neg] = gccp::partition(res);
    if (pos.size() + neg.size() != m) {
        why << "partition loses vertices; ";
        out.ok = false;
    }
    std::vector<int> side(n, -1);
    for (auto v : pos) {
        side[v] = 1;
    }
    for (auto v : neg) {
        side[v] = 0;
    }

    if (out.connected) {
        if (pos.empty() || neg.empty()) {
            why << "connected graph gave an empty cluster; ";
            out.ok = false;
        }
        auto const& ov = eig.vectors.at(1);
        double gap = eig.values.size() > 2 ? eig.values[2] - eig.values[1] : 1.0;
        double smallest = 1.0;
        for (double v : ov) {
            smallest = std::min(smallest, std::abs(v));
        }
        // the sign pattern is only well defined for a simple eigenvalue with no near-zero entries
        if (gap > 1e-6 && smallest > 1e-6) {
            out.partition_compared = true;
            bool same = true, flipped = true;
            for (std::size_t i = 0; i < m; ++i) {
                int oracle_side = ov[i] > 0.0 ? 1 : 0;
                same = same && oracle_side == side[keep[i]];
                flipped = flipped && oracle_side != side[keep[i]];
            }
            if (!same && !flipped) {
                why << "partition differs from oracle; ";
                out.ok = false;
            }
        }
    } else {
        if (res.lambda2 > 1e-8) {
            why << "disconnected graph has lambda2 " << res.lambda2 << "; ";
            out.ok = false;
        }
        bool refines = true;
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                refines = refines && (uf.find(i) != uf.find(j) || side[keep[i]] == side[keep[j]]);
            }
        }
        if (!refines) {
            why << "partition splits a component; ";
            out.ok = false;
        }
    }
    out.detail = why.str();
    return out;
}

}  // namespace test
