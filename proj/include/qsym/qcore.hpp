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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qsym {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// General linear operator on a (multi-)qubit space. Hermiticity and the
/// like are predicates, not invariants.
using Operator = Matrix;

namespace tol {
inline constexpr double ket_norm = 1e-12;
inline constexpr double hermitian = 1e-9;
inline constexpr double trace = 1e-9;
inline constexpr double psd_floor = -1e-9;
inline constexpr double completeness = 1e-10;
inline constexpr double unital = 1e-10;
}  // namespace tol

/// Raised when a numeric invariant (trace, positivity, completeness) breaks.
class InvariantViolation : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Controls whether density matrices are re-validated. `Checked` is the
/// default everywhere; `Unchecked` is for benchmark-style long runs.
enum class Validation { Checked, Unchecked };

inline double max_abs(const Matrix &m) {
    if (m.size() == 0) {
        return 0.0;
    }
    return m.cwiseAbs().maxCoeff();
}

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// Number of qubits for a 2^m dimensional space.
inline int qubit_count(std::size_t dim) {
    if (!is_power_of_two(dim)) {
        throw std::invalid_argument("dimension " + std::to_string(dim) + " is not a power of two");
    }
    int m = 0;
    while ((std::size_t{1} << m) < dim) {
        ++m;
    }
    return m;
}

inline Matrix identity(std::size_t dim) {
    return Matrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
}

inline double hermiticity_residual(const Matrix &m) { return max_abs(m - m.adjoint()); }

inline bool is_hermitian(const Matrix &m, double tolerance = tol::hermitian) {
    return m.rows() == m.cols() && hermiticity_residual(m) <= tolerance;
}

inline bool is_unitary(const Matrix &u, double tolerance = 1e-10) {
    return u.rows() == u.cols() && max_abs(u.adjoint() * u - identity(u.rows())) <= tolerance;
}

//=========================================================================
// Ket
//=========================================================================

/// Unit vector in a 2^m dimensional space. Construction normalizes.
class Ket {
   public:
    explicit Ket(Vector amplitudes) : amps_(std::move(amplitudes)) {
        if (!is_power_of_two(static_cast<std::size_t>(amps_.size()))) {
            throw std::invalid_argument("ket dimension must be a power of two");
        }
        const double n = amps_.norm();
        if (n == 0.0) {
            throw std::invalid_argument("cannot normalize the zero vector");
        }
        amps_ /= n;
    }

    /// Computational basis vector |index>.
    static Ket basis(std::size_t dim, std::size_t index) {
        if (index >= dim) {
            throw std::out_of_range("basis index out of range");
        }
        Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
        v(static_cast<Eigen::Index>(index)) = 1.0;
        return Ket(std::move(v));
    }

    /// Basis vector from a bit string such as "011"; site 1 is the leftmost
    /// character and the most significant bit.
    static Ket from_bits(const std::string &bits) {
        if (bits.empty()) {
            throw std::invalid_argument("empty bit string");
        }
        std::size_t index = 0;
        for (char c : bits) {
            if (c != '0' && c != '1') {
                throw std::invalid_argument("bit string may only contain 0 and 1: " + bits);
            }
            index = (index << 1) | static_cast<std::size_t>(c == '1');
        }
        return basis(std::size_t{1} << bits.size(), index);
    }

    std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
    const Vector &amplitudes() const { return amps_; }
    Complex operator[](std::size_t i) const { return amps_(static_cast<Eigen::Index>(i)); }

    /// |psi><psi|
    Matrix projector() const { return amps_ * amps_.adjoint(); }

   private:
    Vector amps_;
};

inline Complex inner(const Ket &a, const Ket &b) { return a.amplitudes().dot(b.amplitudes()); }

//=========================================================================
// DensityMatrix
//=========================================================================

struct DensityReport {
    double hermitian_residual;
    double trace_residual;
    double min_eigenvalue;
    bool valid;
};

inline DensityReport inspect_density(const Matrix &m) {
    DensityReport r{};
    r.hermitian_residual = hermiticity_residual(m);
    r.trace_residual = std::abs(m.trace() - Complex(1.0, 0.0));
    Matrix h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    r.min_eigenvalue = es.eigenvalues().minCoeff();
    r.valid = r.hermitian_residual <= tol::hermitian && r.trace_residual <= tol::trace &&
              r.min_eigenvalue >= tol::psd_floor;
    return r;
}

/// Trace-one positive-semidefinite operator on 2^m dimensions. Checked
/// construction throws InvariantViolation when the matrix is not a state.
class DensityMatrix {
   public:
    explicit DensityMatrix(Matrix entries, Validation v = Validation::Checked)
        : rho_(std::move(entries)) {
        if (rho_.rows() != rho_.cols() || !is_power_of_two(static_cast<std::size_t>(rho_.rows()))) {
            throw std::invalid_argument("density matrix must be square with power-of-two dimension");
        }
        if (v == Validation::Checked) {
            const auto r = inspect_density(rho_);
            if (!r.valid) {
                throw InvariantViolation("not a density matrix: hermitian residual " +
                                         std::to_string(r.hermitian_residual) + ", trace residual " +
                                         std::to_string(r.trace_residual) + ", min eigenvalue " +
                                         std::to_string(r.min_eigenvalue));
            }
        }
    }

    explicit DensityMatrix(const Ket &psi) : rho_(psi.projector()) {}

    static DensityMatrix maximally_mixed(std::size_t dim) {
        return DensityMatrix(identity(dim) / static_cast<double>(dim));
    }

    static DensityMatrix from_bits(const std::string &bits) { return DensityMatrix(Ket::from_bits(bits)); }

    std::size_t dim() const { return static_cast<std::size_t>(rho_.rows()); }
    int qubits() const { return qubit_count(dim()); }
    const Matrix &matrix() const { return rho_; }
    Complex operator()(std::size_t i, std::size_t j) const {
        return rho_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }

    /// Real diagonal, i.e. computational-basis populations.
    std::vector<double> populations() const {
        std::vector<double> p(dim());
        for (std::size_t i = 0; i < p.size(); ++i) {
            p[i] = rho_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
        }
        return p;
    }

   private:
    Matrix rho_;
};

//=========================================================================
// Kraus channels
//=========================================================================

/// Operator-sum channel rho -> sum_k A_k rho A_k^dagger.
class KrausChannel {
   public:
    KrausChannel(std::vector<Matrix> ops, std::string label = {})
        : ops_(std::move(ops)), label_(std::move(label)) {
        if (ops_.empty()) {
            throw std::invalid_argument("a Kraus channel needs at least one operator");
        }
        const auto d = ops_.front().rows();
        for (const auto &a : ops_) {
            if (a.rows() != d || a.cols() != d) {
                throw std::invalid_argument("Kraus operators must be square and of equal dimension");
            }
        }
    }

    std::size_t dim() const { return static_cast<std::size_t>(ops_.front().rows()); }
    std::span<const Matrix> kraus_ops() const { return ops_; }
    std::size_t size() const { return ops_.size(); }
    const std::string &label() const { return label_; }

   private:
    std::vector<Matrix> ops_;
    std::string label_;
};

struct CptpReport {
    double completeness_residual;
    bool is_unital;
    bool is_valid() const { return completeness_residual <= tol::completeness; }
};

inline CptpReport check_cptp(const KrausChannel &ch) {
    const auto d = ch.dim();
    Matrix sum_left = Matrix::Zero(d, d);
    Matrix sum_right = Matrix::Zero(d, d);
    for (const auto &a : ch.kraus_ops()) {
        sum_left += a.adjoint() * a;
        sum_right += a * a.adjoint();
    }
    const auto id = identity(d);
    return {max_abs(sum_left - id), max_abs(sum_right - id) <= tol::unital};
}

//=========================================================================
// Core operations
//=========================================================================

/// Kronecker product a (x) b.
inline Operator tensor(const Operator &a, const Operator &b) {
    if (a.rows() != a.cols() || b.rows() != b.cols()) {
        throw std::invalid_argument("tensor expects square operands");
    }
    const auto na = a.rows();
    const auto nb = b.rows();
    Operator out(na * nb, na * nb);
    for (Eigen::Index i = 0; i < na; ++i) {
        for (Eigen::Index j = 0; j < na; ++j) {
            out.block(i * nb, j * nb, nb, nb) = a(i, j) * b;
        }
    }
    return out;
}

inline Ket tensor(const Ket &a, const Ket &b) {
    Vector v(static_cast<Eigen::Index>(a.dim() * b.dim()));
    for (std::size_t i = 0; i < a.dim(); ++i) {
        v.segment(static_cast<Eigen::Index>(i * b.dim()), static_cast<Eigen::Index>(b.dim())) =
            a[i] * b.amplitudes();
    }
    return Ket(std::move(v));
}

inline DensityMatrix tensor(const DensityMatrix &a, const DensityMatrix &b) {
    return DensityMatrix(tensor(a.matrix(), b.matrix()));
}

/// Reduced state on the `keep` sites (1-based, any order; output follows
/// ascending site order).
inline DensityMatrix partial_trace(const DensityMatrix &rho, int m, std::vector<int> keep) {
    if (keep.empty()) {
        throw std::invalid_argument("partial_trace needs at least one kept site");
    }
    if (rho.dim() != (std::size_t{1} << m)) {
        throw std::invalid_argument("partial_trace: state dimension does not match m");
    }
    std::sort(keep.begin(), keep.end());
    if (std::adjacent_find(keep.begin(), keep.end()) != keep.end()) {
        throw std::invalid_argument("partial_trace: duplicate site");
    }
    for (int s : keep) {
        if (s < 1 || s > m) {
            throw std::out_of_range("partial_trace: site out of range");
        }
    }
    std::size_t keep_mask = 0;
    for (int s : keep) {
        keep_mask |= std::size_t{1} << (m - s);
    }
    const auto compress = [&](std::size_t x) {
        std::size_t r = 0;
        for (int s : keep) {
            r = (r << 1) | ((x >> (m - s)) & 1U);
        }
        return r;
    };
    const std::size_t full = rho.dim();
    const std::size_t out_dim = std::size_t{1} << keep.size();
    Matrix out = Matrix::Zero(out_dim, out_dim);
    for (std::size_t i = 0; i < full; ++i) {
        for (std::size_t j = 0; j < full; ++j) {
            if ((i & ~keep_mask) != (j & ~keep_mask)) {
                continue;
            }
            out(compress(i), compress(j)) += rho(i, j);
        }
    }
    return DensityMatrix(std::move(out));
}

/// Tr(rho^2)
inline double purity(const DensityMatrix &rho) {
    // Tr(rho^2) = sum_ij |rho_ij|^2 for Hermitian rho.
    return rho.matrix().cwiseAbs2().sum();
}

/// Tr(rho X) for Hermitian X.
inline double expectation(const DensityMatrix &rho, const Operator &x) {
    if (x.rows() != static_cast<Eigen::Index>(rho.dim()) || x.cols() != x.rows()) {
        throw std::invalid_argument("expectation: dimension mismatch");
    }
    if (!is_hermitian(x)) {
        throw std::invalid_argument("expectation: observable is not Hermitian");
    }
    const Complex v = (rho.matrix() * x).trace();
    if (std::abs(v.imag()) > 1e-9) {
        throw InvariantViolation("expectation has imaginary part " + std::to_string(v.imag()));
    }
    return v.real();
}

/// Raw operator-sum action without state validation.
inline Matrix apply_kraus(const KrausChannel &ch, const Matrix &rho) {
    Matrix out = Matrix::Zero(rho.rows(), rho.cols());
    for (const auto &a : ch.kraus_ops()) {
        out.noalias() += a * rho * a.adjoint();
    }
    return out;
}

inline DensityMatrix apply_channel(const KrausChannel &ch, const DensityMatrix &rho,
                                   Validation v = Validation::Checked) {
    if (ch.dim() != rho.dim()) {
        throw std::invalid_argument("apply_channel: channel dimension " + std::to_string(ch.dim()) +
                                    " does not match state dimension " + std::to_string(rho.dim()));
    }
    Matrix out = apply_kraus(ch, rho.matrix());
    out = 0.5 * (out + out.adjoint()).eval();
    return DensityMatrix(std::move(out), v);
}

/// Heisenberg-picture dual X -> sum_k A_k^dagger X A_k.
inline Operator dual_apply(const KrausChannel &ch, const Operator &x) {
    if (static_cast<std::size_t>(x.rows()) != ch.dim() || x.rows() != x.cols()) {
        throw std::invalid_argument("dual_apply: dimension mismatch");
    }
    Operator out = Operator::Zero(x.rows(), x.cols());
    for (const auto &a : ch.kraus_ops()) {
        out.noalias() += a.adjoint() * x * a;
    }
    return out;
}

inline double fidelity(const DensityMatrix &rho, const Ket &psi) {
    return (psi.amplitudes().adjoint() * rho.matrix() * psi.amplitudes())(0, 0).real();
}

}  // namespace qsym
