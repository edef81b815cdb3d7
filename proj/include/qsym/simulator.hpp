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

#include "qsym/dynamics.hpp"
#include "qsym/network.hpp"
#include "qsym/qcore.hpp"
#include "qsym/symmetry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <locale>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace qsym {

//=========================================================================
// Random numbers
//=========================================================================

/// 64-bit seed for stream `index` derived from `master`. Streams with
/// different indices are independent of evaluation order.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                      0x9e3779b9U};
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

class Rng {
   public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(derive_seed(seed, 0)) {}

    /// Independent generator for sub-stream `index` of this generator's seed.
    Rng stream(std::uint64_t index) const { return Rng(derive_seed(seed_, index + 1)); }

    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
    double exponential() { return std::exponential_distribution<double>(1.0)(engine_); }

    /// Index drawn from a discrete distribution `weights` (need not be normalized).
    std::size_t choose(const std::vector<double> &weights) {
        std::discrete_distribution<std::size_t> d(weights.begin(), weights.end());
        return d(engine_);
    }

    std::uint64_t seed() const { return seed_; }
    std::mt19937_64 &engine() { return engine_; }

   private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

/// Haar-distributed unitary from the QR decomposition of a complex Gaussian
/// matrix, with R's diagonal phases absorbed into Q.
inline Matrix random_unitary(Rng &rng, std::size_t dim) {
    Matrix g(dim, dim);
    const double s = 1.0 / std::sqrt(2.0);
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
            const double re = rng.normal();
            const double im = rng.normal();
            g(i, j) = Complex(s * re, s * im);
        }
    }
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
        const Complex d = r(j, j);
        const double a = std::abs(d);
        if (a > 0.0) {
            q.col(j) *= d / a;
        }
    }
    return q;
}

/// Random state: spectrum uniform on the probability simplex, eigenbasis Haar.
inline DensityMatrix random_density(Rng &rng, std::size_t dim) {
    if (dim < 2) {
        throw std::invalid_argument("random_density needs dim >= 2");
    }
    std::vector<double> spectrum(dim);
    double total = 0.0;
    for (auto &p : spectrum) {
        p = rng.exponential();
        total += p;
    }
    Vector diag(static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) {
        diag(static_cast<Eigen::Index>(i)) = spectrum[i] / total;
    }
    const Matrix u = random_unitary(rng, dim);
    Matrix rho = u * diag.asDiagonal() * u.adjoint();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return DensityMatrix(std::move(rho));
}

inline DensityMatrix random_density(std::uint64_t seed, std::size_t dim) {
    Rng rng(seed);
    return random_density(rng, dim);
}

//=========================================================================
// Schedules
//=========================================================================

enum class ScheduleMode { Cyclic, Random };

/// Neighborhood selection: a repeating cyclic order (0-based neighborhood
/// indices) or i.i.d. draws from fixed probabilities.
class Schedule {
   public:
    static Schedule cyclic(std::vector<std::size_t> order) {
        if (order.empty()) {
            throw std::invalid_argument("cyclic schedule needs a nonempty order");
        }
        Schedule s(ScheduleMode::Cyclic);
        s.order_ = std::move(order);
        return s;
    }

    /// Cyclic over all neighborhoods in listed order.
    static Schedule cyclic_all(const NetworkTopology &t) {
        std::vector<std::size_t> order(t.neighborhoods().size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            order[i] = i;
        }
        return cyclic(std::move(order));
    }

    static Schedule random(std::vector<double> probabilities, std::uint64_t seed) {
        if (probabilities.empty()) {
            throw std::invalid_argument("random schedule needs probabilities");
        }
        double total = 0.0;
        for (double q : probabilities) {
            if (!(q > 0.0)) {
                throw std::invalid_argument("random schedule probabilities must be positive");
            }
            total += q;
        }
        if (std::abs(total - 1.0) > 1e-12) {
            throw std::invalid_argument("random schedule probabilities must sum to 1");
        }
        Schedule s(ScheduleMode::Random);
        s.probs_ = std::move(probabilities);
        s.seed_ = seed;
        return s;
    }

    static Schedule random_for(const NetworkTopology &t, std::uint64_t seed) {
        return random(t.selection_probabilities(), seed);
    }

    ScheduleMode mode() const { return mode_; }
    const std::vector<std::size_t> &order() const { return order_; }
    const std::vector<double> &probabilities() const { return probs_; }
    std::uint64_t seed() const { return seed_; }

    /// Rejects schedules that reference missing neighborhoods or skip one.
    void validate_for(const NetworkTopology &t) const {
        const std::size_t n = t.neighborhoods().size();
        if (mode_ == ScheduleMode::Cyclic) {
            std::vector<bool> covered(n, false);
            for (std::size_t i : order_) {
                if (i >= n) {
                    throw std::out_of_range("schedule references neighborhood " + std::to_string(i + 1) +
                                            " but the topology has " + std::to_string(n));
                }
                covered[i] = true;
            }
            if (std::find(covered.begin(), covered.end(), false) != covered.end()) {
                throw std::invalid_argument("cyclic schedule must cover every neighborhood");
            }
        } else if (probs_.size() != n) {
            throw std::invalid_argument("random schedule needs one probability per neighborhood");
        }
    }

   private:
    explicit Schedule(ScheduleMode mode) : mode_(mode) {}
    ScheduleMode mode_;
    std::vector<std::size_t> order_;
    std::vector<double> probs_;
    std::uint64_t seed_ = 0;
};

/// Stateful cursor over a schedule.
class ScheduleCursor {
   public:
    explicit ScheduleCursor(const Schedule &s) : schedule_(s), rng_(s.seed()) {}

    std::size_t next() {
        if (schedule_.mode() == ScheduleMode::Cyclic) {
            const auto &o = schedule_.order();
            return o[pos_++ % o.size()];
        }
        return rng_.choose(schedule_.probabilities());
    }

   private:
    const Schedule &schedule_;
    Rng rng_;
    std::size_t pos_ = 0;
};

//=========================================================================
// Trajectories
//=========================================================================

struct TrajectoryRecord {
    int step;
    double purity;
    double s_expectation;
    double v_total;
    double v_smc;
    std::vector<double> dicke_populations;
    double smc_population;
};

inline TrajectoryRecord make_record(const DensityMatrix &rho, int m, int step) {
    TrajectoryRecord r;
    r.step = step;
    r.purity = purity(rho);
    // S is diagonal, so Tr(S rho) only needs the populations.
    const auto pops = rho.populations();
    double s = 0.0;
    for (std::size_t x = 0; x < pops.size(); ++x) {
        s += 2.0 * (m - excitations(x)) * pops[x];
    }
    r.s_expectation = s;
    r.dicke_populations.resize(static_cast<std::size_t>(m + 1));
    double vt = 0.0;
    for (int k = 0; k <= m; ++k) {
        const double p = dicke_population(rho, m, k);
        r.dicke_populations[static_cast<std::size_t>(k)] = p;
        vt += 1.0 - p;
    }
    r.v_total = vt;
    r.v_smc = v_smc(rho, m);
    r.smc_population = 1.0 - r.v_smc;
    return r;
}

struct RunOptions {
    Validation validation = Validation::Checked;
    /// Stop once the family's Lyapunov value stays below 1e-10 for 2m steps.
    bool early_stop = false;
};

inline constexpr double kEarlyStopThreshold = 1e-10;

struct Trajectory {
    std::vector<TrajectoryRecord> records;
    DensityMatrix final_state;
    std::vector<std::string> warnings;
    bool stopped_early = false;
};

/// Distance-to-target used for monitoring: v_total - m for SSC, v_smc for
/// SMC, and the SSC residual for gossip (which has no dedicated Lyapunov
/// function here).
inline double lyapunov_value(FamilyKind kind, const DensityMatrix &rho, int m) {
    switch (kind) {
        case FamilyKind::Ssc:
            return v_total(rho, m) - m;
        case FamilyKind::Smc:
            return v_smc(rho, m);
        case FamilyKind::Gossip:
            return is_ssc(rho, m, 0.0).residual;
    }
    return 0.0;
}

/// Prebuilt full-network channels, one per neighborhood.
inline std::vector<KrausChannel> build_channels(const NetworkTopology &t, const ChannelFamily &family) {
    std::vector<KrausChannel> out;
    out.reserve(t.neighborhoods().size());
    for (const auto &p : t.neighborhoods()) {
        out.push_back(neighborhood_channel(family, p, t.sites()));
    }
    return out;
}

/// Applies one neighborhood channel per step and records diagnostics after
/// each step. Records are numbered 1..steps.
inline Trajectory run(const DensityMatrix &rho0, const NetworkTopology &topology, const ChannelFamily &family,
                      const Schedule &schedule, int steps, const RunOptions &options = {}) {
    if (steps < 1) {
        throw std::invalid_argument("run needs steps >= 1");
    }
    if (rho0.dim() != topology.dim()) {
        throw std::invalid_argument("initial state dimension does not match the topology");
    }
    schedule.validate_for(topology);
    Trajectory traj{{}, rho0, {}, false};
    if (!is_connected(topology)) {
        traj.warnings.emplace_back("topology is not connected; convergence is not guaranteed");
    }
    const int m = topology.sites();
    const auto channels = build_channels(topology, family);
    ScheduleCursor cursor(schedule);
    traj.records.reserve(static_cast<std::size_t>(steps));
    int below = 0;
    for (int t = 1; t <= steps; ++t) {
        traj.final_state = apply_channel(channels[cursor.next()], traj.final_state, options.validation);
        traj.records.push_back(make_record(traj.final_state, m, t));
        if (options.early_stop) {
            below = lyapunov_value(family.kind(), traj.final_state, m) < kEarlyStopThreshold ? below + 1 : 0;
            if (below >= 2 * m) {
                traj.stopped_early = true;
                break;
            }
        }
    }
    return traj;
}

/// Fraction of seeded random-schedule trials whose Lyapunov value is below
/// `gamma` after `horizon` steps. Trial i uses the stream derive_seed(seed, i).
inline double convergence_probability(const DensityMatrix &rho0, const NetworkTopology &topology,
                                      const ChannelFamily &family, double gamma, int horizon, int trials,
                                      std::uint64_t seed, unsigned threads = 0) {
    if (!(gamma > 0.0)) {
        throw std::invalid_argument("gamma must be positive");
    }
    if (trials < 1) {
        throw std::invalid_argument("trials must be >= 1");
    }
    if (horizon < 0) {
        throw std::invalid_argument("horizon must be >= 0");
    }
    if (rho0.dim() != topology.dim()) {
        throw std::invalid_argument("initial state dimension does not match the topology");
    }
    const int m = topology.sites();
    const auto probs = topology.selection_probabilities();
    const auto channels = build_channels(topology, family);
    std::vector<char> hit(static_cast<std::size_t>(trials), 0);

    auto trial = [&](int i) {
        const auto schedule = Schedule::random(probs, derive_seed(seed, static_cast<std::uint64_t>(i)));
        ScheduleCursor cursor(schedule);
        DensityMatrix rho = rho0;
        for (int t = 0; t < horizon; ++t) {
            rho = apply_channel(channels[cursor.next()], rho, Validation::Unchecked);
        }
        hit[static_cast<std::size_t>(i)] = lyapunov_value(family.kind(), rho, m) < gamma ? 1 : 0;
    };

    if (threads == 0) {
        threads = std::max(1U, std::thread::hardware_concurrency());
    }
    threads = std::min<unsigned>(threads, static_cast<unsigned>(trials));
    if (threads <= 1) {
        for (int i = 0; i < trials; ++i) {
            trial(i);
        }
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < threads; ++w) {
            pool.emplace_back([&, w] {
                for (int i = static_cast<int>(w); i < trials; i += static_cast<int>(threads)) {
                    trial(i);
                }
            });
        }
        for (auto &th : pool) {
            th.join();
        }
    }
    int count = 0;
    for (char h : hit) {
        count += h;
    }
    return static_cast<double>(count) / static_cast<double>(trials);
}

//=========================================================================
// Measurements and corrections
//=========================================================================

inline constexpr double kMinOutcomeProbability = 1e-12;

struct LocalMeasurement {
    int outcome;  // +1 for |0>, -1 for |1>
    DensityMatrix post_state;
};

struct GlobalMeasurement {
    int excitation_k;
    DensityMatrix post_state;
};

inline DensityMatrix project_and_normalize(const DensityMatrix &rho, const Operator &p) {
    Matrix out = p * rho.matrix() * p;
    const double tr = out.trace().real();
    out /= tr;
    out = 0.5 * (out + out.adjoint()).eval();
    return DensityMatrix(std::move(out));
}

/// Projective sigma_z measurement of one site.
inline LocalMeasurement measure_local_z(const DensityMatrix &rho, int site, int m, Rng &rng) {
    if (site < 1 || site > m) {
        throw std::out_of_range("measure_local_z: site out of range");
    }
    Matrix p0(2, 2);
    p0 << 1, 0, 0, 0;
    const Operator proj_up = embed_local(p0, site, m);
    const double prob_up = (proj_up * rho.matrix()).trace().real();
    bool up;
    if (prob_up < kMinOutcomeProbability) {
        up = false;
    } else if (1.0 - prob_up < kMinOutcomeProbability) {
        up = true;
    } else {
        up = rng.uniform() < prob_up;
    }
    const Operator proj = up ? proj_up : Operator(identity(rho.dim()) - proj_up);
    return {up ? +1 : -1, project_and_normalize(rho, proj)};
}

/// Projective measurement of S; reports the excitation number k (eigenvalue 2(m-k)).
inline GlobalMeasurement measure_global_S(const DensityMatrix &rho, int m, Rng &rng) {
    if (rho.dim() != (std::size_t{1} << m)) {
        throw std::invalid_argument("measure_global_S: dimension mismatch");
    }
    const auto pops = rho.populations();
    std::vector<double> probs(static_cast<std::size_t>(m + 1), 0.0);
    for (std::size_t x = 0; x < pops.size(); ++x) {
        probs[static_cast<std::size_t>(excitations(x))] += pops[x];
    }
    for (auto &p : probs) {
        if (p < kMinOutcomeProbability) {
            p = 0.0;
        }
    }
    const auto k = static_cast<int>(rng.choose(probs));
    return {k, project_and_normalize(rho, excitation_projector(m, k))};
}

/// sigma_x conjugation on one site.
inline DensityMatrix apply_flip(const DensityMatrix &rho, int site, int m) {
    const Operator x = embed_local(pauli::X(), site, m);
    return DensityMatrix(x * rho.matrix() * x);
}

//=========================================================================
// Dicke state preparation
//=========================================================================

struct PreparationLog {
    std::optional<int> s_outcome;
    /// Per-site sigma_z outcomes; empty when the S measurement already hit.
    std::vector<int> local_outcomes;
    std::vector<int> flipped_sites;
};

struct PreparationResult {
    DensityMatrix final_state;
    std::vector<TrajectoryRecord> trajectory;
    /// Fidelity with the target after each SSC step (index 0 = after stage 1).
    std::vector<double> fidelity_trajectory;
    PreparationLog log;
    double fidelity;
};

/// Stage 1 steers into H_target (optionally via an S measurement, otherwise by
/// measuring every site and flipping the lowest-indexed sites with the wrong
/// outcome); stage 2 runs the SSC maps cyclically over the topology.
inline PreparationResult prepare_dicke(const DensityMatrix &rho0, int target_k, const NetworkTopology &topology,
                                       Rng &rng, bool use_s_measurement, int steps,
                                       Validation validation = Validation::Checked) {
    const int m = topology.sites();
    DickeIndex target(m, target_k);
    if (rho0.dim() != topology.dim()) {
        throw std::invalid_argument("prepare_dicke: initial state dimension does not match the topology");
    }
    if (steps < 0) {
        throw std::invalid_argument("prepare_dicke: steps must be >= 0");
    }
    const Ket target_ket = dicke_ket(m, target.k);
    PreparationLog log;
    DensityMatrix rho = rho0;
    bool in_subspace = false;
    if (use_s_measurement) {
        auto g = measure_global_S(rho, m, rng);
        log.s_outcome = g.excitation_k;
        if (g.excitation_k == target.k) {
            rho = std::move(g.post_state);
            in_subspace = true;
        }
    }
    if (!in_subspace) {
        for (int site = 1; site <= m; ++site) {
            auto r = measure_local_z(rho, site, m, rng);
            log.local_outcomes.push_back(r.outcome);
            rho = std::move(r.post_state);
        }
        const int ones = static_cast<int>(std::count(log.local_outcomes.begin(), log.local_outcomes.end(), -1));
        const int q = target.k - ones;
        // q > 0: raise |0> sites; q < 0: lower |1> sites.
        const int wanted = q > 0 ? +1 : -1;
        int remaining = std::abs(q);
        for (int site = 1; site <= m && remaining > 0; ++site) {
            if (log.local_outcomes[static_cast<std::size_t>(site - 1)] == wanted) {
                rho = apply_flip(rho, site, m);
                log.flipped_sites.push_back(site);
                --remaining;
            }
        }
    }

    PreparationResult result{rho, {}, {fidelity(rho, target_ket)}, std::move(log), 0.0};
    if (steps > 0) {
        if (!is_connected(topology)) {
            throw std::invalid_argument("prepare_dicke needs a connected topology");
        }
        RunOptions opts;
        opts.validation = validation;
        auto traj = run(rho, topology, ChannelFamily::ssc(), Schedule::cyclic_all(topology), steps, opts);
        result.trajectory = std::move(traj.records);
        result.final_state = std::move(traj.final_state);
        for (const auto &rec : result.trajectory) {
            result.fidelity_trajectory.push_back(rec.dicke_populations[static_cast<std::size_t>(target.k)]);
        }
    }
    result.fidelity = fidelity(result.final_state, target_ket);
    return result;
}

//=========================================================================
// CSV output
//=========================================================================

inline std::string csv_header(int m) {
    std::string h = "step,purity,s_expectation,v_total,v_smc,smc_population";
    for (int k = 0; k <= m; ++k) {
        h += ",pop_dicke_" + std::to_string(k);
    }
    return h;
}

/// One header line plus one row per record, 12 significant digits.
inline void write_trajectory_csv(std::ostream &os, const std::vector<TrajectoryRecord> &records, int m) {
    os << csv_header(m) << '\n';
    std::ostringstream row;
    row.imbue(std::locale::classic());
    row << std::setprecision(12);
    for (const auto &r : records) {
        row.str({});
        row << r.step << ',' << r.purity << ',' << r.s_expectation << ',' << r.v_total << ',' << r.v_smc << ','
            << r.smc_population;
        for (double p : r.dicke_populations) {
            row << ',' << p;
        }
        os << row.str() << '\n';
    }
}

}  // namespace qsym
