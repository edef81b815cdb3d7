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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include "qsym/cli.hpp"
#include "qsym/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

using namespace qsym;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

/// Random density matrix supported on the excitation-k block (Ginibre).
DensityMatrix random_in_block(Rng &rng, int m, int k) {
    const auto idx = excitation_indices(m, k);
    const auto n = static_cast<Eigen::Index>(idx.size());
    Matrix g(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            g(i, j) = Complex(rng.normal(), rng.normal());
        }
    }
    Matrix small = g * g.adjoint();
    small /= small.trace().real();
    Matrix rho = Matrix::Zero(std::size_t{1} << m, std::size_t{1} << m);
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b < n; ++b) {
            rho(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(a)]),
                static_cast<Eigen::Index>(idx[static_cast<std::size_t>(b)])) = small(a, b);
        }
    }
    return DensityMatrix(std::move(rho));
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Outcome ac1_cptp() {
    double worst = 0.0;
    for (int m = 2; m <= 6; ++m) {
        const auto pairs = NetworkTopology::complete(m).neighborhoods();
        for (const auto &p : pairs) {
            for (const auto &ch : {gossip_channel(p, m, kDefaultGossipAlpha), ssc_channel(p, m), smc_channel(p, m)}) {
                worst = std::max(worst, check_cptp(ch).completeness_residual);
            }
        }
    }
    return {worst <= 1e-10, "worst completeness residual " + fmt(worst) + " (tol 1e-10)"};
}

Outcome ac2_gossip() {
    const NetworkTopology topo(3, {{1, 2}, {2, 3}});
    const auto schedule = Schedule::cyclic_all(topo);
    std::vector<DensityMatrix> inputs{DensityMatrix::from_bits("001")};
    for (std::uint64_t s = 1; s <= 10; ++s) {
        inputs.push_back(random_density(s, 8));
    }
    double fp_err = 0.0;
    double pop_drift = 0.0;
    double purity_rise = 0.0;
    for (const auto &rho0 : inputs) {
        const auto traj = run(rho0, topo, ChannelFamily::gossip(0.5), schedule, 500);
        fp_err = std::max(fp_err, max_abs(traj.final_state.matrix() - gossip_fixed_point(rho0, 3).matrix()));
        std::vector<double> p0(4);
        for (int k = 0; k <= 3; ++k) {
            p0[static_cast<std::size_t>(k)] = dicke_population(rho0, 3, k);
        }
        double prev = purity(rho0);
        for (const auto &r : traj.records) {
            for (int k = 0; k <= 3; ++k) {
                pop_drift = std::max(pop_drift, std::abs(r.dicke_populations[static_cast<std::size_t>(k)] -
                                                         p0[static_cast<std::size_t>(k)]));
            }
            purity_rise = std::max(purity_rise, r.purity - prev);
            prev = r.purity;
        }
    }
    const bool pass = fp_err <= 1e-6 && pop_drift <= 1e-9 && purity_rise <= 1e-12;
    return {pass, "fixed-point error " + fmt(fp_err) + " (tol 1e-6), Dicke drift " + fmt(pop_drift) +
                      " (tol 1e-9), max purity rise " + fmt(purity_rise)};
}

Outcome ac3_ssc() {
    Rng rng(3003);
    double worst_v = 0.0;
    double worst_fid = 0.0;
    double worst_s = 0.0;
    for (int m = 3; m <= 5; ++m) {
        const auto topo = NetworkTopology::path(m);
        const auto schedule = Schedule::cyclic_all(topo);
        const Operator s_op = global_observable_S(m);
        auto check = [&](const DensityMatrix &rho0, int block) {
            const auto traj = run(rho0, topo, ChannelFamily::ssc(), schedule, 1000);
            worst_v = std::max(worst_v, traj.records.back().v_total - m);
            const double s0 = expectation(rho0, s_op);
            for (const auto &r : traj.records) {
                worst_s = std::max(worst_s, std::abs(r.s_expectation - s0));
            }
            if (block >= 0) {
                worst_fid = std::max(worst_fid, 1.0 - fidelity(traj.final_state, dicke_ket(m, block)));
            }
        };
        for (int i = 0; i < 20; ++i) {
            check(random_density(rng, std::size_t{1} << m), -1);
        }
        for (int k = 0; k <= m; ++k) {
            check(random_in_block(rng, m, k), k);
        }
    }
    const bool pass = worst_v <= 1e-6 && worst_fid <= 1e-6 && worst_s <= 1e-9;
    return {pass, "max v_total-m " + fmt(worst_v) + " (tol 1e-6), max 1-fidelity on blocks " + fmt(worst_fid) +
                      " (tol 1e-6), S drift " + fmt(worst_s) + " (tol 1e-9)"};
}

Outcome ac4_pair() {
    const auto out = apply_channel(ssc_pair_channel(), DensityMatrix::from_bits("01"));
    const double r = max_abs(out.matrix() - dicke_ket(2, 1).projector());
    return {r <= 1e-12, "residual " + fmt(r) + " (tol 1e-12)"};
}

Outcome ac5_smc() {
    Rng rng(5005);
    double worst_pop = 0.0;
    double worst_pair = 0.0;
    double worst_s = 0.0;
    for (int m = 3; m <= 4; ++m) {
        const auto topo = NetworkTopology::path(m);
        const Operator s_op = global_observable_S(m);
        for (int random_mode = 0; random_mode <= 1; ++random_mode) {
            for (int i = 0; i < 20; ++i) {
                const auto rho0 = random_density(rng, std::size_t{1} << m);
                const auto schedule = random_mode ? Schedule::random_for(topo, derive_seed(55, i))
                                                  : Schedule::cyclic_all(topo);
                const auto traj = run(rho0, topo, ChannelFamily::smc(), schedule, 1000);
                worst_pop = std::max(worst_pop, 1.0 - traj.records.back().smc_population);
                worst_pair = std::max(worst_pair, is_smc(traj.final_state, m, 1e-6).pairwise_residual);
                const double s0 = expectation(rho0, s_op);
                for (const auto &r : traj.records) {
                    worst_s = std::max(worst_s, std::abs(r.s_expectation - s0));
                }
            }
        }
    }
    const bool pass = worst_pop <= 1e-6 && worst_pair <= 1e-6 && worst_s <= 1e-9;
    return {pass, "max 1-smc_population " + fmt(worst_pop) + " (tol 1e-6), pairwise residual " + fmt(worst_pair) +
                      " (tol 1e-6), S drift " + fmt(worst_s) + " (tol 1e-9)"};
}

Outcome ac6_ordering() {
    const NetworkTopology topo(3, {{1, 2}, {2, 3}});
    const auto schedule = Schedule::cyclic_all(topo);
    int ordered = 0;
    std::vector<double> gos, ssc, smc;
    for (std::uint64_t s = 0; s < 100; ++s) {
        const auto rho0 = random_density(derive_seed(6006, s), 8);
        const double g = purity(run(rho0, topo, ChannelFamily::gossip(), schedule, 300).final_state);
        const double a = purity(run(rho0, topo, ChannelFamily::ssc(), schedule, 300).final_state);
        const double b = purity(run(rho0, topo, ChannelFamily::smc(), schedule, 300).final_state);
        gos.push_back(g);
        ssc.push_back(a);
        smc.push_back(b);
        ordered += (b >= a && a >= g) ? 1 : 0;
    }
    const double mg = median(gos), ma = median(ssc), mb = median(smc);
    const bool pass = ordered >= 90 && mb > ma && ma > mg;
    return {pass, "SMC>=SSC>=GOS in " + std::to_string(ordered) + "/100 (need 90), medians SMC " + fmt(mb) +
                      " SSC " + fmt(ma) + " GOS " + fmt(mg)};
}

Outcome ac7_randomized() {
    const auto topo = NetworkTopology::path(3);
    const auto rho0 = random_density(std::uint64_t{7007}, 8);
    std::string detail;
    bool pass = true;
    for (const auto &fam : {ChannelFamily::ssc(), ChannelFamily::smc()}) {
        std::vector<double> p;
        for (int h : {50, 100, 200}) {
            p.push_back(convergence_probability(rho0, topo, fam, 0.01, h, 200, 77));
        }
        const bool mono = p[1] >= p[0] - 0.03 && p[2] >= p[1] - 0.03;
        pass = pass && p[2] >= 0.99 && mono;
        detail += std::string(detail.empty() ? "" : "; ") + std::string(family_name(fam.kind())) + " P(50,100,200) = " +
                  fmt(p[0]) + ", " + fmt(p[1]) + ", " + fmt(p[2]);
    }
    return {pass, detail + " (need P(200) >= 0.99, monotone within 0.03)"};
}

Outcome ac8_prepare() {
    const auto topo = NetworkTopology::path(3);
    const Ket w = dicke_ket(3, 1);
    Rng rng(8008);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const auto rho0 = random_density(rng, 8);
        const auto res = prepare_dicke(rho0, 1, topo, rng, i % 2 == 1, 500);
        worst = std::max(worst, 1.0 - res.fidelity);
    }
    const auto fixed = prepare_dicke(DensityMatrix(w), 1, topo, rng, true, 500);
    const double invariance =
        std::max(1.0 - fixed.fidelity, max_abs(fixed.final_state.matrix() - w.projector()));
    const bool pass = worst <= 1e-6 && invariance <= 1e-12;
    return {pass, "max 1-fidelity " + fmt(worst) + " (tol 1e-6), W-state invariance residual " + fmt(invariance) +
                      " (tol 1e-12)"};
}

Outcome ac9_identities() {
    Rng rng(9009);
    double dual = 0.0;
    for (int t = 0; t < 100; ++t) {
        const int m = 2 + t % 3;
        const auto pairs = NetworkTopology::complete(m).neighborhoods();
        const auto &p = pairs[static_cast<std::size_t>(t) % pairs.size()];
        const KrausChannel ch = t % 3 == 0 ? gossip_channel(p, m, 0.3) : t % 3 == 1 ? ssc_channel(p, m) : smc_channel(p, m);
        const std::size_t d = std::size_t{1} << m;
        Matrix x(d, d);
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                x(i, j) = Complex(rng.normal(), rng.normal());
            }
        }
        const auto rho = random_density(rng, d);
        const Complex lhs = (x * apply_kraus(ch, rho.matrix())).trace();
        const Complex rhs = (dual_apply(ch, x) * rho.matrix()).trace();
        dual = std::max(dual, std::abs(lhs - rhs));
    }
    // Schmidt: build with part A = sites 1..|A|, then permute sites so A is
    // any subset; Dicke states must be recovered for every bipartition.
    double schmidt = 0.0;
    for (int m = 2; m <= 6; ++m) {
        for (unsigned mask = 1; mask + 1 < (1U << m); ++mask) {
            std::vector<int> pi;
            for (int s = 1; s <= m; ++s) {
                if (mask & (1U << (s - 1))) {
                    pi.push_back(s);
                }
            }
            const int ma = static_cast<int>(pi.size());
            for (int s = 1; s <= m; ++s) {
                if (!(mask & (1U << (s - 1)))) {
                    pi.push_back(s);
                }
            }
            // Inverse of pi places logical site i at physical site pi(i).
            std::vector<int> inv(static_cast<std::size_t>(m));
            for (int i = 0; i < m; ++i) {
                inv[static_cast<std::size_t>(pi[static_cast<std::size_t>(i)] - 1)] = i + 1;
            }
            const Matrix u = permutation_unitary(inv, m);
            for (int k = 0; k <= m; ++k) {
                const Vector psi = u * schmidt_reconstruct(m, k, ma).amplitudes();
                schmidt = std::max(schmidt, 1.0 - std::norm(dicke_ket(m, k).amplitudes().dot(psi)));
            }
        }
    }
    const bool pass = dual <= 1e-10 && schmidt <= 1e-12;
    return {pass, "duality residual " + fmt(dual) + " (tol 1e-10), Schmidt 1-fidelity " + fmt(schmidt) +
                      " (tol 1e-12)"};
}

Outcome ac10_determinism() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "qsym_acceptance_determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    {
        std::ofstream(dir / "cfg.json") << R"({
  "topology": {"m": 4, "edges": [[1, 2], [2, 3], [3, 4]]},
  "family": "smc",
  "schedule": {"mode": "random"},
  "steps": 200,
  "initial_state": {"type": "random"},
  "seed": 1234
})";
    }
    std::vector<std::string> csv;
    for (const char *sub : {"a", "b"}) {
        cli::Options o;
        o.config_path = (dir / "cfg.json").string();
        o.output_dir = (dir / sub).string();
        std::ostringstream out, err;
        if (cli::cmd_run(o, out, err) != cli::kExitOk) {
            return {false, "run failed: " + err.str()};
        }
        std::ifstream f(dir / sub / "trajectory.csv", std::ios::binary);
        std::stringstream ss;
        ss << f.rdbuf();
        csv.push_back(ss.str());
    }
    fs::remove_all(dir);
    const bool pass = !csv[0].empty() && csv[0] == csv[1];
    return {pass, std::to_string(csv[0].size()) + " bytes, identical " + (pass ? "yes" : "no")};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"AC1 CPTP validity, m=2..6, all families", ac1_cptp},
        {"AC2 gossip baseline", ac2_gossip},
        {"AC3 SSC convergence, m=3..5", ac3_ssc},
        {"AC4 SSC single-pair exactness", ac4_pair},
        {"AC5 SMC convergence, m=3..4", ac5_smc},
        {"AC6 purity ordering SMC>=SSC>=GOS", ac6_ordering},
        {"AC7 randomized convergence probability", ac7_randomized},
        {"AC8 W-state preparation", ac8_prepare},
        {"AC9 duality and Schmidt identities", ac9_identities},
        {"AC10 determinism", ac10_determinism},
    };
    int failed = 0;
    for (const auto &[name, fn] : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << name << ": " << o.detail << " [" << fmt(secs) << " s]"
                  << std::endl;
        failed += o.pass ? 0 : 1;
    }
    std::cout << (10 - failed) << "/10 criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
