// Copyright 2026 The qsym Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "qsym/network.hpp"
#include "qsym/qcore.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace qsym {

// Dicke states are indexed by excitation count k (number of ones). With
// S = mI + sum_i sigma_z^(i) the matching S eigenvalue is 2(m - k).

struct DickeIndex {
    int m;
    int k;

    DickeIndex(int m_, int k_) : m(m_), k(k_) {
        if (m < 1 || k < 0 || k > m) {
            throw std::out_of_range("Dicke index (" + std::to_string(m_) + "," + std::to_string(k_) +
                                    ") out of range");
        }
    }
    int s_eigenvalue() const { return 2 * (m - k); }
};

inline int excitation_from_eigenvalue(int m, int lambda) {
    if (lambda < 0 || lambda > 2 * m || lambda % 2 != 0) {
        throw std::out_of_range("not an eigenvalue of S: " + std::to_string(lambda));
    }
    return m - lambda / 2;
}

inline int excitations(std::size_t index) { return std::popcount(index); }

inline double binomial(int n, int k) {
    if (k < 0 || k > n) {
        return 0.0;
    }
    double r = 1.0;
    for (int i = 1; i <= k; ++i) {
        r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    }
    return std::round(r);
}

/// Computational basis indices with exactly k ones, ascending.
inline std::vector<std::size_t> excitation_indices(int m, int k) {
    DickeIndex idx(m, k);
    std::vector<std::size_t> out;
    const std::size_t dim = std::size_t{1} << m;
    for (std::size_t x = 0; x < dim; ++x) {
        if (excitations(x) == idx.k) {
            out.push_back(x);
        }
    }
    return out;
}

inline std::vector<Ket> excitation_basis(int m, int k) {
    std::vector<Ket> out;
    for (std::size_t x : excitation_indices(m, k)) {
        out.push_back(Ket::basis(std::size_t{1} << m, x));
    }
    return out;
}

/// |(m,k)>
inline Ket dicke_ket(int m, int k) {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(std::size_t{1} << m));
    for (std::size_t x : excitation_indices(m, k)) {
        v(static_cast<Eigen::Index>(x)) = 1.0;
    }
    return Ket(std::move(v));
}

/// Projector onto the excitation subspace H_k.
inline Operator excitation_projector(int m, int k) {
    const std::size_t dim = std::size_t{1} << m;
    Operator p = Operator::Zero(dim, dim);
    for (std::size_t x : excitation_indices(m, k)) {
        p(x, x) = 1.0;
    }
    return p;
}

/// Builds |(m,k)> from its bipartite expansion over sites 1..m_A and
/// m_A+1..m, weighting each product term by sqrt(C(m_A,k_A) C(m_B,k_B)).
inline Ket schmidt_reconstruct(int m, int k, int m_a) {
    DickeIndex idx(m, k);
    if (m_a < 1 || m_a >= m) {
        throw std::invalid_argument("bipartition needs 1 <= m_A < m");
    }
    const int m_b = m - m_a;
    Vector v = Vector::Zero(static_cast<Eigen::Index>(std::size_t{1} << m));
    for (int k_a = 0; k_a <= idx.k; ++k_a) {
        const int k_b = idx.k - k_a;
        if (k_a > m_a || k_b > m_b) {
            continue;
        }
        const double mu = std::sqrt(binomial(m_a, k_a) * binomial(m_b, k_b));
        v += mu * tensor(dicke_ket(m_a, k_a), dicke_ket(m_b, k_b)).amplitudes();
    }
    v /= std::sqrt(binomial(m, idx.k));
    const double n = v.norm();
    if (std::abs(n - 1.0) > 1e-12) {
        throw InvariantViolation("Schmidt expansion lost normalization: " + std::to_string(n));
    }
    return Ket(std::move(v));
}

/// S = mI + sum_i sigma_z^(i), diagonal.
inline Operator global_observable_S(int m) {
    if (m < 1) {
        throw std::invalid_argument("global_observable_S needs m >= 1");
    }
    const std::size_t dim = std::size_t{1} << m;
    Operator s = Operator::Zero(dim, dim);
    for (std::size_t x = 0; x < dim; ++x) {
        s(x, x) = 2.0 * (m - excitations(x));
    }
    return s;
}

/// |0...0><0...0| + |1...1><1...1|
inline Operator smc_projector(int m) {
    if (m < 1) {
        throw std::invalid_argument("smc_projector needs m >= 1");
    }
    const std::size_t dim = std::size_t{1} << m;
    Operator p = Operator::Zero(dim, dim);
    p(0, 0) = 1.0;
    p(dim - 1, dim - 1) = 1.0;
    return p;
}

//=========================================================================
// Consensus predicates
//=========================================================================

struct SscCheck {
    bool holds;
    double residual;
};

struct SmcCheck {
    bool holds;
    double population;
    double pairwise_residual;
};

struct ConsensusReport {
    double ssc_residual;
    double smc_population;
    double smc_pairwise_residual;
    double s_expectation;
};

/// Max over adjacent transpositions (i,i+1) of ||U rho U^dagger - rho||_max.
inline SscCheck is_ssc(const DensityMatrix &rho, int m, double tolerance) {
    if (rho.dim() != (std::size_t{1} << m)) {
        throw std::invalid_argument("is_ssc: dimension mismatch");
    }
    double residual = 0.0;
    const Matrix swap = swap_gate();
    for (int i = 1; i < m; ++i) {
        const Operator u = embed_neighborhood(swap, SitePair(i, i + 1), m);
        residual = std::max(residual, max_abs(u * rho.matrix() * u.adjoint() - rho.matrix()));
    }
    return {residual <= tolerance, residual};
}

inline SmcCheck is_smc(const DensityMatrix &rho, int m, double tolerance) {
    if (rho.dim() != (std::size_t{1} << m)) {
        throw std::invalid_argument("is_smc: dimension mismatch");
    }
    const auto pops = rho.populations();
    const double population = pops.front() + pops.back();

    // Tr(Pi_j^(k) Pi_j^(l) rho) and Tr(Pi_j^(l) rho) only see the diagonal.
    double pairwise = 0.0;
    for (int j = 0; j <= 1; ++j) {
        for (int k = 1; k <= m; ++k) {
            for (int l = 1; l <= m; ++l) {
                double joint = 0.0;
                double single = 0.0;
                for (std::size_t x = 0; x < pops.size(); ++x) {
                    const bool on_l = bit_of(x, l, m) == j;
                    if (on_l) {
                        single += pops[x];
                        if (bit_of(x, k, m) == j) {
                            joint += pops[x];
                        }
                    }
                }
                pairwise = std::max(pairwise, std::abs(joint - single));
            }
        }
    }
    return {population >= 1.0 - tolerance, population, pairwise};
}

inline ConsensusReport consensus_report(const DensityMatrix &rho, int m) {
    const auto ssc = is_ssc(rho, m, 0.0);
    const auto smc = is_smc(rho, m, 0.0);
    return {ssc.residual, smc.population, smc.pairwise_residual, expectation(rho, global_observable_S(m))};
}

//=========================================================================
// Lyapunov functions
//=========================================================================

/// <(m,k)| rho |(m,k)>
inline double dicke_population(const DensityMatrix &rho, int m, int k) {
    return fidelity(rho, dicke_ket(m, k));
}

/// 1 - <(m,k)|rho|(m,k)>
inline double v_dicke(const DensityMatrix &rho, int m, int k) { return 1.0 - dicke_population(rho, m, k); }

/// sum_k v_dicke; its minimum m is reached iff supp(rho) lies in the Dicke span.
inline double v_total(const DensityMatrix &rho, int m) {
    double v = 0.0;
    for (int k = 0; k <= m; ++k) {
        v += v_dicke(rho, m, k);
    }
    return v;
}

inline double v_smc(const DensityMatrix &rho, int m) {
    if (rho.dim() != (std::size_t{1} << m)) {
        throw std::invalid_argument("v_smc: dimension mismatch");
    }
    return 1.0 - (rho(0, 0).real() + rho(rho.dim() - 1, rho.dim() - 1).real());
}

/// Exact average over the full permutation group, (1/m!) sum_pi U_pi rho U_pi^dagger.
inline DensityMatrix gossip_fixed_point(const DensityMatrix &rho0, int m) {
    if (m > 8) {
        throw std::invalid_argument("gossip_fixed_point enumerates m! permutations; m must be <= 8");
    }
    if (rho0.dim() != (std::size_t{1} << m)) {
        throw std::invalid_argument("gossip_fixed_point: dimension mismatch");
    }
    std::vector<int> pi(static_cast<std::size_t>(m));
    std::iota(pi.begin(), pi.end(), 1);
    Matrix acc = Matrix::Zero(rho0.dim(), rho0.dim());
    std::size_t count = 0;
    do {
        // U_pi is a permutation matrix; apply it by index relabelling.
        std::vector<std::size_t> image(rho0.dim());
        for (std::size_t x = 0; x < rho0.dim(); ++x) {
            std::size_t y = 0;
            for (int i = 1; i <= m; ++i) {
                y |= static_cast<std::size_t>(bit_of(x, pi[i - 1], m)) << site_bit(i, m);
            }
            image[x] = y;
        }
        for (std::size_t a = 0; a < rho0.dim(); ++a) {
            for (std::size_t b = 0; b < rho0.dim(); ++b) {
                acc(image[a], image[b]) += rho0(a, b);
            }
        }
        ++count;
    } while (std::next_permutation(pi.begin(), pi.end()));
    return DensityMatrix(acc / static_cast<double>(count));
}

}  // namespace qsym
