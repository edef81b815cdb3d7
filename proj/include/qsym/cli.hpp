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

#include "qsym/config.hpp"
#include "qsym/dynamics.hpp"
#include "qsym/simulator.hpp"
#include "qsym/symmetry.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

// Subcommand implementations. Each returns a process exit code:
//   0 success, 1 config/usage error, 2 numeric invariant violation.

namespace qsym::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumeric = 2;

/// Tolerance for the predicates reported in summaries.
inline constexpr double kReportTolerance = 1e-6;

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string output_dir;
    bool early_stop = false;
};

namespace detail {

inline ExperimentConfig load(const Options &o, bool allow_zero_steps = false) {
    if (o.config_path.empty()) {
        throw ConfigError("", 0, "--config is required");
    }
    ParseOptions po;
    po.allow_zero_steps = allow_zero_steps;
    auto cfg = load_config(o.config_path, po);
    if (o.seed) {
        cfg.seed = *o.seed;
    }
    cfg.early_stop = cfg.early_stop || o.early_stop;
    return cfg;
}

/// CSV destination for `run`-like commands; empty means standard output.
inline std::string csv_path(const ExperimentConfig &cfg, const Options &o, const std::string &default_name) {
    if (!o.output_dir.empty()) {
        const std::string name =
            cfg.output.empty() ? default_name : std::filesystem::path(cfg.output).filename().string();
        return (std::filesystem::path(o.output_dir) / name).string();
    }
    if (!cfg.output.empty()) {
        std::filesystem::path p(cfg.output);
        return (p.is_relative() ? cfg.base_dir / p : p).string();
    }
    return {};
}

inline void write_csv_file(const std::string &path, const std::vector<TrajectoryRecord> &records, int m) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) {
        std::filesystem::create_directories(parent);
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw ConfigError("output", 0, "cannot write '" + path + "'");
    }
    write_trajectory_csv(f, records, m);
}

inline void summary(std::ostream &out, const DensityMatrix &rho, int m) {
    const auto ssc = is_ssc(rho, m, kReportTolerance);
    const auto smc = is_smc(rho, m, kReportTolerance);
    std::ostringstream s;
    s << std::setprecision(12);
    s << "# final_purity " << purity(rho) << '\n';
    s << "# final_s_expectation " << expectation(rho, global_observable_S(m)) << '\n';
    s << "# final_v_total " << v_total(rho, m) << '\n';
    s << "# final_v_smc " << v_smc(rho, m) << '\n';
    s << "# ssc " << (ssc.holds ? "true" : "false") << " residual " << ssc.residual << '\n';
    s << "# smc " << (smc.holds ? "true" : "false") << " population " << smc.population << " pairwise_residual "
      << smc.pairwise_residual << '\n';
    out << s.str();
}

/// Runs `body`, mapping exceptions onto exit codes.
inline int guarded(std::ostream &err, const std::function<int()> &body) {
    try {
        return body();
    } catch (const ConfigError &e) {
        err << e.what() << '\n';
        return kExitConfig;
    } catch (const InvariantViolation &e) {
        err << "numeric invariant violated: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::invalid_argument &e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::out_of_range &e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
}

inline void require_steps(const ExperimentConfig &cfg) {
    if (cfg.steps < 1) {
        throw ConfigError("steps", 0, "steps must be >= 1");
    }
}

}  // namespace detail

inline int cmd_run(const Options &o, std::ostream &out, std::ostream &err) {
    return detail::guarded(err, [&] {
        const auto cfg = detail::load(o);
        detail::require_steps(cfg);
        const int m = cfg.topology.sites();
        RunOptions ro;
        ro.early_stop = cfg.early_stop;
        const auto traj = run(cfg.initial_state(), cfg.topology, cfg.family, cfg.schedule(), cfg.steps, ro);
        for (const auto &w : traj.warnings) {
            err << "warning: " << w << '\n';
        }
        const auto path = detail::csv_path(cfg, o, "trajectory.csv");
        if (path.empty()) {
            write_trajectory_csv(out, traj.records, m);
        } else {
            detail::write_csv_file(path, traj.records, m);
            out << "# csv " << path << '\n';
        }
        out << "# family " << family_name(cfg.family.kind()) << " steps " << traj.records.size()
            << (traj.stopped_early ? " (early stop)" : "") << '\n';
        detail::summary(out, traj.final_state, m);
        return kExitOk;
    });
}

inline int cmd_compare(const Options &o, std::ostream &out, std::ostream &err) {
    return detail::guarded(err, [&] {
        const auto cfg = detail::load(o);
        detail::require_steps(cfg);
        const int m = cfg.topology.sites();
        const auto rho0 = cfg.initial_state();
        const auto schedule = cfg.schedule();
        std::filesystem::path dir = !o.output_dir.empty()       ? std::filesystem::path(o.output_dir)
                                    : !cfg.output.empty()       ? cfg.base_dir / cfg.output
                                                                : std::filesystem::path(".");
        const std::array<std::pair<const char *, ChannelFamily>, 3> runs{
            {{"gos", ChannelFamily::gossip(cfg.family.kind() == FamilyKind::Gossip ? cfg.family.alpha()
                                                                                    : kDefaultGossipAlpha)},
             {"ssc", ChannelFamily::ssc()},
             {"smc", ChannelFamily::smc()}}};
        std::ostringstream table;
        table << std::setprecision(6) << std::fixed;
        table << "# initial_purity " << purity(rho0) << '\n';
        table << "# algorithm  final_purity  final_v_total  final_v_smc  ssc_residual\n";
        for (const auto &[name, fam] : runs) {
            RunOptions ro;
            ro.early_stop = cfg.early_stop;
            const auto traj = run(rho0, cfg.topology, fam, schedule, cfg.steps, ro);
            const auto path = (dir / (std::string(name) + ".csv")).string();
            detail::write_csv_file(path, traj.records, m);
            const auto &rho = traj.final_state;
            table << "# " << std::left << std::setw(10) << name << ' ' << std::setw(13) << purity(rho) << ' '
                  << std::setw(14) << v_total(rho, m) << ' ' << std::setw(12) << std::max(0.0, v_smc(rho, m)) << ' '
                  << is_ssc(rho, m, 0.0).residual << '\n';
        }
        out << table.str();
        out << "# csv " << dir.string() << "/{gos,ssc,smc}.csv\n";
        return kExitOk;
    });
}

inline int cmd_prepare(const Options &o, std::ostream &out, std::ostream &err) {
    return detail::guarded(err, [&] {
        const auto cfg = detail::load(o, /*allow_zero_steps=*/true);
        if (!cfg.prepare) {
            throw ConfigError("prepare", 0, "prepare needs a 'prepare' section with target_k");
        }
        const int m = cfg.topology.sites();
        Rng rng(cfg.seed);
        const auto res = prepare_dicke(cfg.initial_state(), cfg.prepare->target_k, cfg.topology, rng,
                                       cfg.prepare->use_s_measurement, cfg.steps);
        std::ostringstream s;
        s << std::setprecision(12);
        if (res.log.s_outcome) {
            s << "# s_measurement k=" << *res.log.s_outcome << " eigenvalue=" << 2 * (m - *res.log.s_outcome)
              << '\n';
        }
        if (!res.log.local_outcomes.empty()) {
            s << "# local_outcomes";
            for (int v : res.log.local_outcomes) {
                s << ' ' << (v > 0 ? "+1" : "-1");
            }
            s << '\n';
            s << "# flipped_sites";
            for (int v : res.log.flipped_sites) {
                s << ' ' << v;
            }
            s << '\n';
        }
        const auto path = detail::csv_path(cfg, o, "fidelity.csv");
        std::ostringstream csv;
        csv << std::setprecision(12);
        csv << "step,fidelity\n";
        for (std::size_t i = 0; i < res.fidelity_trajectory.size(); ++i) {
            csv << i << ',' << res.fidelity_trajectory[i] << '\n';
        }
        if (path.empty()) {
            out << csv.str();
        } else {
            std::ofstream f(path, std::ios::binary);
            if (!f) {
                throw ConfigError("output", 0, "cannot write '" + path + "'");
            }
            f << csv.str();
            s << "# csv " << path << '\n';
        }
        s << "# target_k " << cfg.prepare->target_k << '\n';
        s << "# final_fidelity " << res.fidelity << '\n';
        out << s.str();
        return kExitOk;
    });
}

inline int cmd_convergence(const Options &o, std::ostream &out, std::ostream &err) {
    return detail::guarded(err, [&] {
        const auto cfg = detail::load(o, /*allow_zero_steps=*/true);
        const auto spec = cfg.convergence.value_or(ConvergenceSpec{});
        const double p = convergence_probability(cfg.initial_state(), cfg.topology, cfg.family, spec.gamma,
                                                 spec.horizon, spec.trials, cfg.seed);
        std::ostringstream s;
        s << std::setprecision(12);
        s << "# family " << family_name(cfg.family.kind()) << " gamma " << spec.gamma << " horizon " << spec.horizon
          << " trials " << spec.trials << '\n';
        s << "probability " << p << '\n';
        out << s.str();
        return kExitOk;
    });
}

//=========================================================================
// verify
//=========================================================================

struct VerifyRow {
    std::string check;
    double worst;
    double tolerance;
    bool pass;
};

/// Self-test of every neighborhood channel of `kind` on the complete graph.
inline std::vector<VerifyRow> verify_family(FamilyKind kind, int m, std::uint64_t seed, int samples = 50) {
    const auto topo = NetworkTopology::complete(m);
    const ChannelFamily fam = kind == FamilyKind::Gossip ? ChannelFamily::gossip()
                              : kind == FamilyKind::Ssc  ? ChannelFamily::ssc()
                                                         : ChannelFamily::smc();
    const auto channels = build_channels(topo, fam);
    Rng rng(seed);
    std::vector<DensityMatrix> states;
    std::vector<Operator> observables;
    for (int i = 0; i < samples; ++i) {
        states.push_back(random_density(rng, topo.dim()));
        const Matrix h = random_unitary(rng, topo.dim());
        observables.push_back(0.5 * (h + h.adjoint()));
    }
    const Operator s_op = global_observable_S(m);

    double completeness = 0.0;
    bool all_unital = true;
    double duality = 0.0;
    double trace_err = 0.0;
    double min_eig = 0.0;
    double s_drift = 0.0;
    double lyap_rise = 0.0;
    double pop_drift = 0.0;
    for (const auto &ch : channels) {
        const auto rep = check_cptp(ch);
        completeness = std::max(completeness, rep.completeness_residual);
        all_unital = all_unital && rep.is_unital;
        for (std::size_t i = 0; i < states.size(); ++i) {
            const auto &rho = states[i];
            const Matrix out = apply_kraus(ch, rho.matrix());
            const auto insp = inspect_density(out);
            trace_err = std::max(trace_err, insp.trace_residual);
            min_eig = std::min(min_eig, insp.min_eigenvalue);
            const Complex lhs = (observables[i] * out).trace();
            const Complex rhs = (dual_apply(ch, observables[i]) * rho.matrix()).trace();
            duality = std::max(duality, std::abs(lhs - rhs));
            const DensityMatrix next(0.5 * (out + out.adjoint()), Validation::Unchecked);
            switch (kind) {
                case FamilyKind::Gossip:
                    lyap_rise = std::max(lyap_rise, purity(next) - purity(rho));
                    for (int k = 0; k <= m; ++k) {
                        pop_drift = std::max(pop_drift,
                                             std::abs(dicke_population(next, m, k) - dicke_population(rho, m, k)));
                    }
                    break;
                case FamilyKind::Ssc:
                    s_drift = std::max(s_drift, std::abs(expectation(next, s_op) - expectation(rho, s_op)));
                    lyap_rise = std::max(lyap_rise, v_total(next, m) - v_total(rho, m));
                    break;
                case FamilyKind::Smc:
                    s_drift = std::max(s_drift, std::abs(expectation(next, s_op) - expectation(rho, s_op)));
                    lyap_rise = std::max(lyap_rise, v_smc(next, m) - v_smc(rho, m));
                    break;
            }
        }
    }
    std::vector<VerifyRow> rows;
    rows.push_back({"completeness_residual", completeness, 1e-12, completeness <= 1e-12});
    rows.push_back({"trace_preservation", trace_err, 1e-9, trace_err <= 1e-9});
    rows.push_back({"positivity (min eigenvalue)", min_eig, -1e-9, min_eig >= -1e-9});
    rows.push_back({"duality_residual", duality, 1e-10, duality <= 1e-10});
    switch (kind) {
        case FamilyKind::Gossip:
            rows.push_back({"unital", all_unital ? 1.0 : 0.0, 1.0, all_unital});
            rows.push_back({"purity_increase", lyap_rise, 1e-12, lyap_rise <= 1e-12});
            rows.push_back({"dicke_population_drift", pop_drift, 1e-10, pop_drift <= 1e-10});
            break;
        case FamilyKind::Ssc:
            rows.push_back({"s_expectation_drift", s_drift, 1e-10, s_drift <= 1e-10});
            rows.push_back({"v_total_increase", lyap_rise, 1e-12, lyap_rise <= 1e-12});
            break;
        case FamilyKind::Smc:
            rows.push_back({"s_expectation_drift", s_drift, 1e-10, s_drift <= 1e-10});
            rows.push_back({"v_smc_increase", lyap_rise, 1e-12, lyap_rise <= 1e-12});
            break;
    }
    return rows;
}

inline int cmd_verify(const std::string &family, int m, std::optional<std::uint64_t> seed, std::ostream &out,
                      std::ostream &err) {
    return detail::guarded(err, [&] {
        const auto kind = parse_family(family);
        if (!kind) {
            throw ConfigError("family", 0, "unknown family '" + family + "' (expected gossip, ssc or smc)");
        }
        if (m < 2 || m > 6) {
            throw ConfigError("m", 0, "verify supports 2 <= m <= 6");
        }
        const auto rows = verify_family(*kind, m, seed.value_or(7));
        bool ok = true;
        std::ostringstream s;
        s << "verify " << family_name(*kind) << " m=" << m << " (complete graph, "
          << NetworkTopology::complete(m).neighborhoods().size() << " neighborhoods, 50 random states)\n";
        s << std::left << std::setw(30) << "check" << std::setw(16) << "worst" << std::setw(12) << "tolerance"
          << "result\n";
        for (const auto &r : rows) {
            ok = ok && r.pass;
            std::ostringstream w;
            w << std::setprecision(4) << std::scientific << r.worst;
            std::ostringstream t;
            t << std::setprecision(0) << std::scientific << r.tolerance;
            s << std::left << std::setw(30) << r.check << std::setw(16)
              << (r.check == "unital" ? (r.pass ? "true" : "false") : w.str()) << std::setw(12)
              << (r.check == "unital" ? "-" : t.str()) << (r.pass ? "PASS" : "FAIL") << '\n';
        }
        out << s.str();
        return ok ? kExitOk : kExitNumeric;
    });
}

}  // namespace qsym::cli
