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

#include "qsym/simulator.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace qsym;
using qsym::testing::MatrixNear;

TEST(Rng, derived_streams_are_deterministic_and_distinct) {
    EXPECT_EQ(derive_seed(1, 0), derive_seed(1, 0));
    EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
    EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
    Rng a(9);
    Rng b(9);
    for (int i = 0; i < 5; ++i) {
        EXPECT_EQ(a.uniform(), b.uniform());
    }
}

TEST(RandomDensity, valid_and_deterministic) {
    for (std::size_t d : {2U, 4U, 8U, 16U}) {
        const auto rho = random_density(std::uint64_t{17}, d);
        EXPECT_TRUE(inspect_density(rho.matrix()).valid);
        EXPECT_TRUE(MatrixNear(rho.matrix(), random_density(std::uint64_t{17}, d).matrix(), 0.0));
        EXPECT_LT(purity(rho), 1.0 - 1e-6);
    }
    EXPECT_FALSE(MatrixNear(random_density(std::uint64_t{1}, 4).matrix(), random_density(std::uint64_t{2}, 4).matrix(),
                            1e-6));
}

TEST(RandomDensity, mean_is_maximally_mixed) {
    Rng rng(2024);
    Matrix mean = Matrix::Zero(4, 4);
    const int n = 1000;
    for (int i = 0; i < n; ++i) {
        mean += random_density(rng, 4).matrix();
    }
    mean /= n;
    EXPECT_LE(max_abs(mean - identity(4) / 4.0), 0.05);
}

TEST(RandomUnitary, is_unitary) {
    Rng rng(3);
    EXPECT_TRUE(is_unitary(random_unitary(rng, 8), 1e-12));
}

TEST(Schedule, cursor_and_validation) {
    const auto t = NetworkTopology::path(4);
    const auto s = Schedule::cyclic({2, 0, 1});
    ScheduleCursor c(s);
    EXPECT_EQ(c.next(), 2U);
    EXPECT_EQ(c.next(), 0U);
    EXPECT_EQ(c.next(), 1U);
    EXPECT_EQ(c.next(), 2U);
    EXPECT_NO_THROW(s.validate_for(t));
    EXPECT_THROW(Schedule::cyclic({0, 1}).validate_for(t), std::invalid_argument);
    EXPECT_THROW(Schedule::cyclic({0, 1, 3}).validate_for(t), std::out_of_range);
    EXPECT_THROW(Schedule::cyclic({}), std::invalid_argument);
    EXPECT_THROW(Schedule::random({0.5, 0.6}, 1), std::invalid_argument);
    EXPECT_THROW(Schedule::random({0.5, 0.5}, 1).validate_for(t), std::invalid_argument);
}

TEST(Schedule, random_frequencies_follow_probabilities) {
    const auto s = Schedule::random({0.2, 0.8}, 11);
    ScheduleCursor c(s);
    int ones = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        ones += c.next() == 1 ? 1 : 0;
    }
    EXPECT_NEAR(static_cast<double>(ones) / n, 0.8, 0.01);
}

TEST(Run, toy_ssc_example_converges) {
    const auto topo = NetworkTopology::path(3);
    const auto rho0 = random_density(std::uint64_t{7}, 8);
    const auto traj = run(rho0, topo, ChannelFamily::ssc(), Schedule::random_for(topo, 21), 300);
    ASSERT_EQ(traj.records.size(), 300U);
    EXPECT_EQ(traj.records.front().step, 1);
    EXPECT_EQ(traj.records.back().step, 300);
    EXPECT_TRUE(traj.warnings.empty());
    EXPECT_TRUE(is_ssc(traj.final_state, 3, 1e-6).holds);
    const double s0 = expectation(rho0, global_observable_S(3));
    for (const auto &r : traj.records) {
        EXPECT_NEAR(r.s_expectation, s0, 1e-9);
    }
    // Dicke populations are conserved by SSC only in sum per excitation block.
    for (int k = 0; k <= 3; ++k) {
        EXPECT_NEAR(traj.records.back().dicke_populations[static_cast<std::size_t>(k)],
                    excitation_projector(3, k).cwiseProduct(rho0.matrix().transpose()).sum().real(), 1e-6);
    }
}

TEST(Run, lyapunov_values_are_monotone) {
    const auto topo = NetworkTopology::path(4);
    const auto rho0 = random_density(std::uint64_t{99}, 16);
    const auto ssc = run(rho0, topo, ChannelFamily::ssc(), Schedule::random_for(topo, 3), 200);
    const auto smc = run(rho0, topo, ChannelFamily::smc(), Schedule::random_for(topo, 3), 200);
    const auto gos = run(rho0, topo, ChannelFamily::gossip(), Schedule::random_for(topo, 3), 200);
    for (std::size_t i = 1; i < 200; ++i) {
        EXPECT_LE(ssc.records[i].v_total, ssc.records[i - 1].v_total + 1e-12);
        EXPECT_LE(smc.records[i].v_smc, smc.records[i - 1].v_smc + 1e-12);
        EXPECT_LE(gos.records[i].purity, gos.records[i - 1].purity + 1e-12);
    }
}

TEST(Run, early_stop_and_errors) {
    const auto topo = NetworkTopology::path(2);
    RunOptions opts;
    opts.early_stop = true;
    const auto traj =
        run(DensityMatrix::from_bits("01"), topo, ChannelFamily::ssc(), Schedule::cyclic_all(topo), 100, opts);
    EXPECT_TRUE(traj.stopped_early);
    EXPECT_EQ(traj.records.size(), 4U);
    EXPECT_THROW(run(DensityMatrix::from_bits("01"), topo, ChannelFamily::ssc(), Schedule::cyclic_all(topo), 0),
                 std::invalid_argument);
    EXPECT_THROW(run(DensityMatrix::from_bits("011"), topo, ChannelFamily::ssc(), Schedule::cyclic_all(topo), 1),
                 std::invalid_argument);
}

TEST(Run, disconnected_topology_warns) {
    const NetworkTopology topo(4, {{1, 2}, {3, 4}});
    const auto traj = run(DensityMatrix::from_bits("0101"), topo, ChannelFamily::ssc(), Schedule::cyclic_all(topo), 10);
    ASSERT_EQ(traj.warnings.size(), 1U);
    EXPECT_FALSE(is_ssc(traj.final_state, 4, 1e-6).holds);
}

TEST(Run, same_seed_same_trajectory) {
    const auto topo = NetworkTopology::complete(3);
    const auto rho0 = random_density(std::uint64_t{5}, 8);
    const auto a = run(rho0, topo, ChannelFamily::smc(), Schedule::random_for(topo, 8), 50);
    const auto b = run(rho0, topo, ChannelFamily::smc(), Schedule::random_for(topo, 8), 50);
    EXPECT_TRUE(MatrixNear(a.final_state.matrix(), b.final_state.matrix(), 0.0));
}

TEST(Convergence, edge_cases) {
    const auto topo = NetworkTopology::path(3);
    const auto rho0 = random_density(std::uint64_t{12}, 8);
    EXPECT_EQ(convergence_probability(rho0, topo, ChannelFamily::ssc(), 100.0, 5, 10, 1), 1.0);
    EXPECT_EQ(convergence_probability(rho0, topo, ChannelFamily::ssc(), 1e-3, 0, 10, 1), 0.0);
    EXPECT_EQ(convergence_probability(rho0, topo, ChannelFamily::ssc(), 1e-3, 300, 20, 1), 1.0);
    EXPECT_THROW(convergence_probability(rho0, topo, ChannelFamily::ssc(), 0.0, 5, 10, 1), std::invalid_argument);
    EXPECT_THROW(convergence_probability(rho0, topo, ChannelFamily::ssc(), 0.1, 5, 0, 1), std::invalid_argument);
}

TEST(Convergence, thread_count_does_not_change_result) {
    const auto topo = NetworkTopology::path(3);
    const auto rho0 = random_density(std::uint64_t{12}, 8);
    const double one = convergence_probability(rho0, topo, ChannelFamily::smc(), 1e-2, 6, 40, 77, 1);
    const double four = convergence_probability(rho0, topo, ChannelFamily::smc(), 1e-2, 6, 40, 77, 4);
    EXPECT_EQ(one, four);
}

TEST(Measurement, local_z_statistics_and_collapse) {
    // |psi> = sqrt(0.3)|0> + sqrt(0.7)|1> on site 1 of two qubits.
    Vector amp(4);
    amp << std::sqrt(0.3), 0, std::sqrt(0.7), 0;
    const DensityMatrix rho{Ket(amp)};
    Rng rng(31);
    int up = 0;
    const int n = 5000;
    for (int i = 0; i < n; ++i) {
        const auto r = measure_local_z(rho, 1, 2, rng);
        if (r.outcome == +1) {
            ++up;
            EXPECT_TRUE(MatrixNear(r.post_state.matrix(), DensityMatrix::from_bits("00").matrix(), 1e-12));
        } else {
            EXPECT_TRUE(MatrixNear(r.post_state.matrix(), DensityMatrix::from_bits("10").matrix(), 1e-12));
        }
    }
    EXPECT_NEAR(static_cast<double>(up) / n, 0.3, 0.03);
    const auto certain = measure_local_z(DensityMatrix::from_bits("01"), 2, 2, rng);
    EXPECT_EQ(certain.outcome, -1);
    EXPECT_THROW(measure_local_z(rho, 3, 2, rng), std::out_of_range);
}

TEST(Measurement, global_s_projects_onto_excitation_block) {
    Rng rng(4);
    const auto rho = DensityMatrix::maximally_mixed(8);
    std::vector<int> counts(4, 0);
    for (int i = 0; i < 4000; ++i) {
        const auto g = measure_global_S(rho, 3, rng);
        ++counts[static_cast<std::size_t>(g.excitation_k)];
        EXPECT_NEAR(dicke_population(g.post_state, 3, g.excitation_k) * binomial(3, g.excitation_k), 1.0, 1e-12);
    }
    EXPECT_NEAR(counts[0] / 4000.0, 1.0 / 8, 0.02);
    EXPECT_NEAR(counts[1] / 4000.0, 3.0 / 8, 0.03);
}

TEST(Flip, sigma_x_on_one_site) {
    EXPECT_TRUE(MatrixNear(apply_flip(DensityMatrix::from_bits("000"), 2, 3).matrix(),
                           DensityMatrix::from_bits("010").matrix(), 0.0));
}

TEST(Prepare, flips_from_basis_state) {
    Rng rng(1);
    const auto topo = NetworkTopology::path(3);
    const auto res = prepare_dicke(DensityMatrix::from_bits("000"), 2, topo, rng, false, 0);
    EXPECT_EQ(res.log.local_outcomes, (std::vector<int>{1, 1, 1}));
    EXPECT_EQ(res.log.flipped_sites, (std::vector<int>{1, 2}));
    EXPECT_NEAR(dicke_population(res.final_state, 3, 2) * 3, 1.0, 1e-12);
    EXPECT_FALSE(res.log.s_outcome.has_value());
}

TEST(Prepare, lowers_excess_excitations) {
    Rng rng(1);
    const auto topo = NetworkTopology::path(4);
    const auto res = prepare_dicke(DensityMatrix::from_bits("1111"), 1, topo, rng, false, 400);
    EXPECT_EQ(res.log.flipped_sites, (std::vector<int>{1, 2, 3}));
    EXPECT_NEAR(res.fidelity, 1.0, 1e-6);
    EXPECT_EQ(res.fidelity_trajectory.size(), 401U);
    for (std::size_t i = 1; i < res.fidelity_trajectory.size(); ++i) {
        EXPECT_GE(res.fidelity_trajectory[i], res.fidelity_trajectory[i - 1] - 1e-12);
    }
}

TEST(Prepare, s_measurement_hit_skips_local_stage) {
    Rng rng(1);
    const auto topo = NetworkTopology::path(3);
    const auto res = prepare_dicke(DensityMatrix::from_bits("100"), 1, topo, rng, true, 300);
    EXPECT_EQ(res.log.s_outcome, 1);
    EXPECT_TRUE(res.log.local_outcomes.empty());
    EXPECT_NEAR(res.fidelity, 1.0, 1e-6);
}

TEST(Prepare, random_initial_states_reach_target) {
    Rng rng(8);
    const auto topo = NetworkTopology::path(4);
    for (int trial = 0; trial < 5; ++trial) {
        const auto rho0 = random_density(rng, 16);
        for (bool use_s : {false, true}) {
            const auto res = prepare_dicke(rho0, 2, topo, rng, use_s, 600);
            EXPECT_NEAR(res.fidelity, 1.0, 1e-6);
        }
    }
    EXPECT_THROW(prepare_dicke(DensityMatrix::from_bits("000"), 4, NetworkTopology::path(3), rng, false, 1),
                 std::out_of_range);
}

TEST(Csv, header_and_rows) {
    EXPECT_EQ(csv_header(2), "step,purity,s_expectation,v_total,v_smc,smc_population,pop_dicke_0,pop_dicke_1,pop_dicke_2");
    const auto topo = NetworkTopology::path(2);
    const auto traj = run(DensityMatrix::from_bits("01"), topo, ChannelFamily::ssc(), Schedule::cyclic_all(topo), 3);
    std::ostringstream os;
    write_trajectory_csv(os, traj.records, 2);
    std::istringstream is(os.str());
    std::string line;
    int lines = 0;
    while (std::getline(is, line)) {
        EXPECT_EQ(std::count(line.begin(), line.end(), ','), 8);
        ++lines;
    }
    EXPECT_EQ(lines, 4);
}
