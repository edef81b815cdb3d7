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

#include "qsym/cli.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

int main(int argc, char **argv) {
    CLI::App app{"qsym: symmetrizing quantum dynamics on qubit networks"};
    app.fallthrough();
    app.require_subcommand(0, 1);

    qsym::cli::Options opts;
    std::uint64_t seed = 0;
    bool print_schema = false;
    app.add_option("--config", opts.config_path, "experiment configuration (JSON)");
    auto *seed_opt = app.add_option("--seed", seed, "overrides the config's top-level seed");
    app.add_option("--output-dir", opts.output_dir, "directory for CSV output");
    app.add_flag("--early-stop", opts.early_stop, "stop once the Lyapunov value stays below 1e-10 for 2m steps");
    app.add_flag("--print-schema", print_schema, "print the configuration JSON schema and exit");

    auto *run = app.add_subcommand("run", "simulate one trajectory and write CSV + summary");
    auto *compare = app.add_subcommand("compare", "run gossip, SSC and SMC from the same initial state");
    auto *prepare = app.add_subcommand("prepare", "measurement-assisted Dicke state preparation");
    auto *convergence = app.add_subcommand("convergence", "Monte-Carlo estimate of P[V < gamma] at a horizon");
    auto *verify = app.add_subcommand("verify", "self-test the channels of a family on the complete graph");
    std::string verify_family;
    int verify_m = 0;
    verify->add_option("family", verify_family, "gossip | ssc | smc")->required();
    verify->add_option("m", verify_m, "number of qubits (2..6)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : qsym::cli::kExitConfig;
    }

    if (print_schema) {
        std::cout << qsym::kConfigSchema;
        return qsym::cli::kExitOk;
    }
    if (*seed_opt) {
        opts.seed = seed;
    }
    if (*run) {
        return qsym::cli::cmd_run(opts, std::cout, std::cerr);
    }
    if (*compare) {
        return qsym::cli::cmd_compare(opts, std::cout, std::cerr);
    }
    if (*prepare) {
        return qsym::cli::cmd_prepare(opts, std::cout, std::cerr);
    }
    if (*convergence) {
        return qsym::cli::cmd_convergence(opts, std::cout, std::cerr);
    }
    if (*verify) {
        return qsym::cli::cmd_verify(verify_family, verify_m, opts.seed, std::cout, std::cerr);
    }
    std::cerr << app.help();
    return qsym::cli::kExitConfig;
}
