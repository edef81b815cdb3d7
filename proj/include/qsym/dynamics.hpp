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
#include "qsym/symmetry.hpp"

#include <bit>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qsym {

//=========================================================================
// Channel families
//=========================================================================

enum class FamilyKind { Gossip, Ssc, Smc };

inline constexpr double kDefaultGossipAlpha = 0.5;

class ChannelFamily {
   public:
    static ChannelFamily gossip(double alpha = kDefaultGossipAlpha) { return ChannelFamily(FamilyKind::Gossip, alpha); }
    static ChannelFamily ssc() { return ChannelFamily(FamilyKind::Ssc, 0.0); }
    static ChannelFamily smc() { return ChannelFamily(FamilyKind::Smc, 0.0); }

    FamilyKind kind() const { return kind_; }
    /// Only meaningful for gossip.
    double alpha() const { return alpha_; }

   private:
    ChannelFamily(FamilyKind kind, double alpha) : kind_(kind), alpha_(alpha) {
        if (kind_ == FamilyKind::Gossip && !(alpha_ > 0.0 && alpha_ < 1.0)) {
            throw std::invalid_argument("gossip alpha must lie in (0,1), got " + std::to_string(alpha_));
        }
    }
    FamilyKind kind_;
    double alpha_;
};

inline std::string_view family_name(FamilyKind k) {
    switch (k) {
        case FamilyKind::Gossip:
            return "gossip";
        case FamilyKind::Ssc:
            return "ssc";
        case FamilyKind::Smc:
            return "smc";
    }
    return "unknown";
}

inline std::optional<FamilyKind> parse_family(std::string_view s) {
    if (s == "gossip" || s == "gos") {
        return FamilyKind::Gossip;
    }
    if (s == "ssc" || s == "dsc") {
        return FamilyKind::Ssc;
    }
    if (s == "smc") {
        return FamilyKind::Smc;
    }
    return std::nullopt;
}

//=========================================================================
// Gossip
//=========================================================================

/// {sqrt(1-alpha) I, sqrt(alpha) U_swap(j,k)} on the full network.
inline KrausChannel gossip_channel(const SitePair &pair, int m, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("gossip alpha must lie in (0,1)");
    }
    check_pair(pair, m);
    const std::size_t dim = std::size_t{1} << m;
    std::vector<Matrix> ops;
    ops.push_back(std::sqrt(1.0 - alpha) * identity(dim));
    ops.push_back(std::sqrt(alpha) * embed_neighborhood(swap_gate(), pair, m));
    return KrausChannel(std::move(ops), "gossip");
}

//=========================================================================
// Dicke-preparing (SSC) pair map
//=========================================================================

/// Columns are the ordered pair basis {|00>, (|01>+|10>)/sqrt2, (|01>-|10>)/sqrt2, |11>}
/// written in the computational basis.
inline Matrix dicke_pair_basis() {
    const double r = 1.0 / std::sqrt(2.0);
    Matrix b = Matrix::Zero(4, 4);
    b(0, 0) = 1.0;
    b(1, 1) = r;
    b(2, 1) = r;
    b(1, 2) = r;
    b(2, 2) = -r;
    b(3, 3) = 1.0;
    return b;
}

/// Change from the ordered pair basis to the computational basis.
inline Matrix from_dicke_pair_basis(const Matrix &m) {
    const Matrix b = dicke_pair_basis();
    return b * m * b.adjoint();
}

/// Neighborhood-local {M1, M2}: M1 moves the antisymmetric vector onto the
/// symmetric one and kills the rest; M2 projects onto span{|00>, (|01>+|10>)/sqrt2, |11>}.
inline KrausChannel ssc_pair_channel() {
    Matrix m1 = Matrix::Zero(4, 4);
    m1(1, 2) = 1.0;
    Matrix m2 = Matrix::Zero(4, 4);
    m2(0, 0) = 1.0;
    m2(1, 1) = 1.0;
    m2(3, 3) = 1.0;
    return KrausChannel({from_dicke_pair_basis(m1), from_dicke_pair_basis(m2)}, "ssc-pair");
}

inline KrausChannel ssc_channel(const SitePair &pair, int m) {
    check_pair(pair, m);
    const auto local = ssc_pair_channel();
    std::vector<Matrix> ops;
    for (const auto &a : local.kraus_ops()) {
        ops.push_back(embed_neighborhood(a, pair, m));
    }
    return KrausChannel(std::move(ops), "ssc");
}

/// Measurement {Pi1, Pi2} followed by the correction U1 on outcome 1.
struct FeedbackDecomposition {
    Operator projector_1;
    Operator projector_2;
    Operator correction_unitary;
};

inline FeedbackDecomposition ssc_feedback_decomposition() {
    const auto ch = ssc_pair_channel();
    const Matrix &m2 = ch.kraus_ops()[1];
    // U1 swaps the symmetric and antisymmetric vectors; completed as the
    // identity on |00> and |11>.
    Matrix u1 = Matrix::Zero(4, 4);
    u1(0, 0) = 1.0;
    u1(1, 2) = 1.0;
    u1(2, 1) = 1.0;
    u1(3, 3) = 1.0;
    FeedbackDecomposition fd{identity(4) - m2, m2, from_dicke_pair_basis(u1)};
    if (max_abs(fd.correction_unitary * fd.projector_1 - ch.kraus_ops()[0]) > 1e-12) {
        throw InvariantViolation("feedback decomposition does not reproduce M1");
    }
    return fd;
}

//=========================================================================
// Single-measurement consensus (SMC)
//=========================================================================

/// Unitary swapping basis vectors a and b, identity elsewhere.
inline Matrix basis_transposition(std::size_t dim, std::size_t a, std::size_t b) {
    Matrix u = identity(dim);
    if (a != b) {
        u(a, a) = 0.0;
        u(b, b) = 0.0;
        u(a, b) = 1.0;
        u(b, a) = 1.0;
    }
    return u;
}

/// Fraction of zeros in the n-bit representation of k.
inline double zero_fraction(std::size_t k, int n_sites) {
    return static_cast<double>(n_sites - std::popcount(k)) / static_cast<double>(n_sites);
}

/// Neighborhood-local SMC map on n sites: Pi_sym plus, for every basis index k
/// outside {0, 2^n-1}, sqrt(p_k0) U_k0 Pi_k and sqrt(p_k1) U_k1 Pi_k.
inline KrausChannel smc_neighborhood_channel(int n_sites) {
    if (n_sites < 2) {
        throw std::invalid_argument("smc neighborhood needs at least two sites");
    }
    const std::size_t d = std::size_t{1} << n_sites;
    const std::size_t top = d - 1;
    std::vector<Matrix> ops;
    Matrix pi_sym = Matrix::Zero(d, d);
    pi_sym(0, 0) = 1.0;
    pi_sym(top, top) = 1.0;
    ops.push_back(std::move(pi_sym));
    for (std::size_t k = 1; k < top; ++k) {
        Matrix pi_k = Matrix::Zero(d, d);
        pi_k(k, k) = 1.0;
        const double p0 = zero_fraction(k, n_sites);
        const double p1 = 1.0 - p0;
        if (p0 > 0.0) {
            ops.push_back(std::sqrt(p0) * basis_transposition(d, k, 0) * pi_k);
        }
        if (p1 > 0.0) {
            ops.push_back(std::sqrt(p1) * basis_transposition(d, k, top) * pi_k);
        }
    }
    return KrausChannel(std::move(ops), "smc-neighborhood");
}

inline KrausChannel smc_channel(const SitePair &pair, int m) {
    check_pair(pair, m);
    const auto local = smc_neighborhood_channel(2);
    std::vector<Matrix> ops;
    for (const auto &a : local.kraus_ops()) {
        ops.push_back(embed_neighborhood(a, pair, m));
    }
    return KrausChannel(std::move(ops), "smc");
}

/// Full-network channel of `family` acting on `pair`.
inline KrausChannel neighborhood_channel(const ChannelFamily &family, const SitePair &pair, int m) {
    switch (family.kind()) {
        case FamilyKind::Gossip:
            return gossip_channel(pair, m, family.alpha());
        case FamilyKind::Ssc:
            return ssc_channel(pair, m);
        case FamilyKind::Smc:
            return smc_channel(pair, m);
    }
    throw std::logic_error("unknown channel family");
}

}  // namespace qsym
