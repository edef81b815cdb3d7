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

#include "qsym/qcore.hpp"

#include <cmath>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qsym {

// Site convention used throughout: sites are numbered 1..m, site 1 is the
// most significant bit of the computational basis index.

inline int site_bit(int site, int m) { return m - site; }

inline int bit_of(std::size_t index, int site, int m) {
    return static_cast<int>((index >> site_bit(site, m)) & 1U);
}

namespace pauli {
inline Matrix I() { return identity(2); }
inline Matrix X() {
    Matrix x(2, 2);
    x << 0, 1, 1, 0;
    return x;
}
inline Matrix Y() {
    Matrix y(2, 2);
    y << 0, Complex(0, -1), Complex(0, 1), 0;
    return y;
}
inline Matrix Z() {
    Matrix z(2, 2);
    z << 1, 0, 0, -1;
    return z;
}
}  // namespace pauli

/// Two-qubit swap in the computational basis.
inline Matrix swap_gate() {
    Matrix u = Matrix::Zero(4, 4);
    u(0, 0) = 1;
    u(1, 2) = 1;
    u(2, 1) = 1;
    u(3, 3) = 1;
    return u;
}

/// Unordered pair of sites, stored with first < second.
struct SitePair {
    int first;
    int second;

    SitePair(int a, int b) : first(std::min(a, b)), second(std::max(a, b)) {
        if (a == b) {
            throw std::invalid_argument("a neighborhood needs two distinct sites");
        }
    }
    friend bool operator==(const SitePair &, const SitePair &) = default;
    friend auto operator<=>(const SitePair &, const SitePair &) = default;
};

inline void check_pair(const SitePair &p, int m) {
    if (p.first < 1 || p.second > m) {
        throw std::out_of_range("neighborhood {" + std::to_string(p.first) + "," +
                                std::to_string(p.second) + "} outside sites 1.." + std::to_string(m));
    }
}

//=========================================================================
// Topology
//=========================================================================

class NetworkTopology {
   public:
    NetworkTopology(int m, std::vector<SitePair> neighborhoods,
                    std::optional<std::vector<double>> probabilities = std::nullopt)
        : m_(m), pairs_(std::move(neighborhoods)), probs_(std::move(probabilities)) {
        if (m_ < 2) {
            throw std::invalid_argument("a network needs at least two subsystems");
        }
        if (pairs_.empty()) {
            throw std::invalid_argument("a network needs at least one neighborhood");
        }
        std::set<SitePair> seen;
        for (const auto &p : pairs_) {
            check_pair(p, m_);
            if (!seen.insert(p).second) {
                throw std::invalid_argument("duplicate neighborhood {" + std::to_string(p.first) + "," +
                                            std::to_string(p.second) + "}");
            }
        }
        if (probs_) {
            if (probs_->size() != pairs_.size()) {
                throw std::invalid_argument("need exactly one probability per neighborhood");
            }
            double total = 0.0;
            for (double q : *probs_) {
                if (!(q > 0.0)) {
                    throw std::invalid_argument("neighborhood probabilities must be positive");
                }
                total += q;
            }
            if (std::abs(total - 1.0) > 1e-12) {
                throw std::invalid_argument("neighborhood probabilities must sum to 1");
            }
        }
    }

    /// Path 1-2-...-m.
    static NetworkTopology path(int m) {
        std::vector<SitePair> p;
        for (int i = 1; i < m; ++i) {
            p.emplace_back(i, i + 1);
        }
        return NetworkTopology(m, std::move(p));
    }

    static NetworkTopology complete(int m) {
        std::vector<SitePair> p;
        for (int i = 1; i <= m; ++i) {
            for (int j = i + 1; j <= m; ++j) {
                p.emplace_back(i, j);
            }
        }
        return NetworkTopology(m, std::move(p));
    }

    int sites() const { return m_; }
    std::size_t dim() const { return std::size_t{1} << m_; }
    const std::vector<SitePair> &neighborhoods() const { return pairs_; }
    const std::optional<std::vector<double>> &probabilities() const { return probs_; }

    /// Explicit probabilities, or uniform when none were given.
    std::vector<double> selection_probabilities() const {
        if (probs_) {
            return *probs_;
        }
        return std::vector<double>(pairs_.size(), 1.0 / static_cast<double>(pairs_.size()));
    }

   private:
    int m_;
    std::vector<SitePair> pairs_;
    std::optional<std::vector<double>> probs_;
};

/// True iff the neighborhoods cover every site and form a connected graph.
inline bool is_connected(const NetworkTopology &t) {
    const int m = t.sites();
    std::vector<int> parent(static_cast<std::size_t>(m + 1));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (const auto &p : t.neighborhoods()) {
        parent[find(p.first)] = find(p.second);
    }
    const int root = find(1);
    for (int s = 2; s <= m; ++s) {
        if (find(s) != root) {
            return false;
        }
    }
    return true;
}

//=========================================================================
// Embeddings
//=========================================================================

/// I^(site-1) (x) sigma (x) I^(m-site)
inline Operator embed_local(const Operator &sigma, int site, int m) {
    if (sigma.rows() != 2 || sigma.cols() != 2) {
        throw std::invalid_argument("embed_local expects a 2x2 operator");
    }
    if (site < 1 || site > m) {
        throw std::out_of_range("embed_local: site " + std::to_string(site) + " outside 1.." +
                                std::to_string(m));
    }
    Operator out = identity(std::size_t{1} << (site - 1));
    out = tensor(out, sigma);
    return tensor(out, identity(std::size_t{1} << (m - site)));
}

/// Acts as `v` on sites (pair.first, pair.second), identity elsewhere. The
/// first pair site carries the high bit of v's local index.
inline Operator embed_neighborhood(const Operator &v, const SitePair &pair, int m) {
    if (v.rows() != 4 || v.cols() != 4) {
        throw std::invalid_argument("embed_neighborhood expects a 4x4 operator");
    }
    check_pair(pair, m);
    const std::size_t dim = std::size_t{1} << m;
    const int bj = site_bit(pair.first, m);
    const int bk = site_bit(pair.second, m);
    const std::size_t mask = (std::size_t{1} << bj) | (std::size_t{1} << bk);
    Operator out = Operator::Zero(dim, dim);
    for (std::size_t x = 0; x < dim; ++x) {
        const std::size_t local_in = (((x >> bj) & 1U) << 1) | ((x >> bk) & 1U);
        const std::size_t rest = x & ~mask;
        for (std::size_t local_out = 0; local_out < 4; ++local_out) {
            const Complex a = v(local_out, local_in);
            if (a == Complex(0.0, 0.0)) {
                continue;
            }
            const std::size_t y = rest | (((local_out >> 1) & 1U) << bj) | ((local_out & 1U) << bk);
            out(y, x) += a;
        }
    }
    return out;
}

/// Permutation given in one-line form: pi[i-1] = pi(i), values 1..m. The
/// result satisfies U (X_1 (x) ... (x) X_m) U^dagger = X_pi(1) (x) ... (x) X_pi(m),
/// so U|b_1...b_m> = |b_pi(1)...b_pi(m)>.
inline Operator permutation_unitary(const std::vector<int> &pi, int m) {
    if (static_cast<int>(pi.size()) != m) {
        throw std::invalid_argument("permutation has wrong length");
    }
    std::vector<bool> hit(static_cast<std::size_t>(m + 1), false);
    for (int v : pi) {
        if (v < 1 || v > m || hit[v]) {
            throw std::invalid_argument("not a permutation of 1..m");
        }
        hit[v] = true;
    }
    const std::size_t dim = std::size_t{1} << m;
    Operator u = Operator::Zero(dim, dim);
    for (std::size_t x = 0; x < dim; ++x) {
        std::size_t y = 0;
        for (int i = 1; i <= m; ++i) {
            y |= static_cast<std::size_t>(bit_of(x, pi[i - 1], m)) << site_bit(i, m);
        }
        u(y, x) = 1.0;
    }
    return u;
}

}  // namespace qsym
