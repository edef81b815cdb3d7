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
#include "qsym/matrix_io.hpp"
#include "qsym/network.hpp"
#include "qsym/simulator.hpp"
#include "qsym/symmetry.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qsym {

/// Experiment configuration error. `key` is the dotted path of the offending
/// entry and `line` its 1-based line in the source text (0 if unknown).
class ConfigError : public std::runtime_error {
   public:
    ConfigError(std::string key, int line, const std::string &what)
        : std::runtime_error(format(key, line, what)), key_(std::move(key)), line_(line) {}

    const std::string &key() const { return key_; }
    int line() const { return line_; }

   private:
    static std::string format(const std::string &key, int line, const std::string &what) {
        std::string s = "config error";
        if (line > 0) {
            s += " at line " + std::to_string(line);
        }
        if (!key.empty()) {
            s += " (key '" + key + "')";
        }
        return s + ": " + what;
    }
    std::string key_;
    int line_;
};

enum class InitialKind { Basis, Dicke, Random, MatrixFile };

struct InitialStateSpec {
    InitialKind kind = InitialKind::Random;
    std::string bits;
    int k = 0;
    std::optional<std::uint64_t> seed;
    std::string path;
};

struct PrepareSpec {
    int target_k = 0;
    bool use_s_measurement = false;
};

struct ConvergenceSpec {
    double gamma = 0.01;
    int horizon = 200;
    int trials = 200;
};

struct ExperimentConfig {
    NetworkTopology topology;
    ChannelFamily family;
    ScheduleMode schedule_mode = ScheduleMode::Cyclic;
    /// 0-based neighborhood indices.
    std::vector<std::size_t> order;
    std::optional<std::uint64_t> schedule_seed;
    int steps = 0;
    InitialStateSpec initial;
    std::uint64_t seed = 0;
    std::string output;
    std::optional<PrepareSpec> prepare;
    std::optional<ConvergenceSpec> convergence;
    bool early_stop = false;
    std::filesystem::path base_dir;

    Schedule schedule() const {
        if (schedule_mode == ScheduleMode::Cyclic) {
            return order.empty() ? Schedule::cyclic_all(topology) : Schedule::cyclic(order);
        }
        return Schedule::random_for(topology, schedule_seed.value_or(seed));
    }

    DensityMatrix initial_state() const {
        const int m = topology.sites();
        switch (initial.kind) {
            case InitialKind::Basis:
                return DensityMatrix::from_bits(initial.bits);
            case InitialKind::Dicke:
                return DensityMatrix(dicke_ket(m, initial.k));
            case InitialKind::Random:
                return random_density(initial.seed.value_or(seed), topology.dim());
            case InitialKind::MatrixFile: {
                std::filesystem::path p(initial.path);
                if (p.is_relative()) {
                    p = base_dir / p;
                }
                Matrix rho = read_matrix_file(p.string());
                if (rho.rows() != static_cast<Eigen::Index>(topology.dim())) {
                    throw std::invalid_argument("initial state matrix has dimension " + std::to_string(rho.rows()) +
                                                ", expected " + std::to_string(topology.dim()));
                }
                return DensityMatrix(std::move(rho));
            }
        }
        throw std::logic_error("unknown initial state kind");
    }
};

//=========================================================================
// Schema
//=========================================================================

inline constexpr std::string_view kConfigSchema = R"schema({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "title": "qsym experiment configuration",
  "type": "object",
  "additionalProperties": false,
  "required": ["topology", "family"],
  "properties": {
    "topology": {
      "type": "object",
      "additionalProperties": false,
      "required": ["m", "edges"],
      "properties": {
        "m": {"type": "integer", "minimum": 2, "maximum": 10},
        "edges": {"type": "array", "minItems": 1,
                  "items": {"type": "array", "items": {"type": "integer", "minimum": 1},
                            "minItems": 2, "maxItems": 2}},
        "probabilities": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0},
                          "description": "one per edge, summing to 1; uniform if omitted"}
      }
    },
    "family": {"enum": ["gossip", "ssc", "smc"]},
    "alpha": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1, "default": 0.5},
    "schedule": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "mode": {"enum": ["cyclic", "random"], "default": "cyclic"},
        "order": {"type": "array", "items": {"type": "integer", "minimum": 1},
                  "description": "1-based edge indices repeated cyclically; all edges in order if omitted"},
        "seed": {"type": "integer", "minimum": 0, "description": "random mode; defaults to the top-level seed"}
      }
    },
    "steps": {"type": "integer", "minimum": 1},
    "initial_state": {
      "type": "object",
      "additionalProperties": false,
      "required": ["type"],
      "properties": {
        "type": {"enum": ["basis", "dicke", "random", "matrix"]},
        "bits": {"type": "string", "pattern": "^[01]+$", "description": "basis: site 1 first"},
        "k": {"type": "integer", "minimum": 0, "description": "dicke: excitation count"},
        "seed": {"type": "integer", "minimum": 0, "description": "random: defaults to the top-level seed"},
        "path": {"type": "string", "description": "matrix: file with {rows, cols, data: [[re, im], ...]}"}
      }
    },
    "seed": {"type": "integer", "minimum": 0, "default": 0},
    "output": {"type": "string", "description": "CSV path (run) or directory (compare)"},
    "early_stop": {"type": "boolean", "default": false},
    "prepare": {
      "type": "object",
      "additionalProperties": false,
      "required": ["target_k"],
      "properties": {
        "target_k": {"type": "integer", "minimum": 0},
        "use_s_measurement": {"type": "boolean", "default": false}
      }
    },
    "convergence": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "gamma": {"type": "number", "exclusiveMinimum": 0, "default": 0.01},
        "horizon": {"type": "integer", "minimum": 0, "default": 200},
        "trials": {"type": "integer", "minimum": 1, "default": 200}
      }
    }
  }
}
)schema";

//=========================================================================
// Parsing
//=========================================================================

namespace detail {

/// Line of the last component of `path` in `text`, searching each component
/// after the position of its parent.
inline int locate_key(std::string_view text, const std::vector<std::string> &path) {
    std::size_t pos = 0;
    bool found_any = false;
    for (const auto &part : path) {
        const auto found = text.find("\"" + part + "\"", pos);
        if (found == std::string_view::npos) {
            break;
        }
        pos = found;
        found_any = true;
    }
    if (!found_any) {
        return 0;
    }
    int line = 1;
    for (std::size_t i = 0; i < pos; ++i) {
        line += text[i] == '\n';
    }
    return line;
}

inline std::string join(const std::vector<std::string> &path) {
    std::string s;
    for (const auto &p : path) {
        s += s.empty() ? p : "." + p;
    }
    return s;
}

class Reader {
   public:
    explicit Reader(std::string_view text) : text_(text) {}

    [[noreturn]] void fail(const std::vector<std::string> &path, const std::string &what) const {
        throw ConfigError(join(path), locate_key(text_, path), what);
    }

    void only_keys(const nlohmann::json &obj, const std::vector<std::string> &path,
                   std::initializer_list<std::string_view> allowed) const {
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            bool ok = false;
            for (auto a : allowed) {
                ok = ok || it.key() == a;
            }
            if (!ok) {
                auto p = path;
                p.push_back(it.key());
                fail(p, "unknown key");
            }
        }
    }

    const nlohmann::json &object(const nlohmann::json &parent, const std::vector<std::string> &path) const {
        const auto &v = parent.at(path.back());
        if (!v.is_object()) {
            fail(path, "expected an object");
        }
        return v;
    }

    long long integer(const nlohmann::json &parent, const std::vector<std::string> &path) const {
        const auto &v = parent.at(path.back());
        if (!v.is_number_integer()) {
            fail(path, "expected an integer");
        }
        return v.get<long long>();
    }

    double number(const nlohmann::json &parent, const std::vector<std::string> &path) const {
        const auto &v = parent.at(path.back());
        if (!v.is_number()) {
            fail(path, "expected a number");
        }
        return v.get<double>();
    }

    std::string string(const nlohmann::json &parent, const std::vector<std::string> &path) const {
        const auto &v = parent.at(path.back());
        if (!v.is_string()) {
            fail(path, "expected a string");
        }
        return v.get<std::string>();
    }

    bool boolean(const nlohmann::json &parent, const std::vector<std::string> &path) const {
        const auto &v = parent.at(path.back());
        if (!v.is_boolean()) {
            fail(path, "expected true or false");
        }
        return v.get<bool>();
    }

    std::uint64_t seed(const nlohmann::json &parent, const std::vector<std::string> &path) const {
        const auto &v = parent.at(path.back());
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
            fail(path, "expected a non-negative integer seed");
        }
        return v.get<std::uint64_t>();
    }

   private:
    std::string_view text_;
};

}  // namespace detail

struct ParseOptions {
    /// `prepare` may run stage 1 only.
    bool allow_zero_steps = false;
    std::filesystem::path base_dir;
};

inline ExperimentConfig parse_config(std::string_view text, const ParseOptions &opts = {}) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error &e) {
        // Byte offset to line number.
        int line = 1;
        for (std::size_t i = 0; i < e.byte && i < text.size(); ++i) {
            line += text[i] == '\n';
        }
        throw ConfigError("", line, std::string("malformed JSON: ") + e.what());
    }
    const detail::Reader rd(text);
    if (!doc.is_object()) {
        throw ConfigError("", 1, "top level must be an object");
    }
    rd.only_keys(doc, {}, {"topology", "family", "alpha", "schedule", "steps", "initial_state", "seed", "output",
                           "early_stop", "prepare", "convergence"});

    // topology
    if (!doc.contains("topology")) {
        throw ConfigError("topology", 0, "missing required key");
    }
    const auto &topo = rd.object(doc, {"topology"});
    rd.only_keys(topo, {"topology"}, {"m", "edges", "probabilities"});
    if (!topo.contains("m")) {
        rd.fail({"topology"}, "missing topology.m");
    }
    if (!topo.contains("edges")) {
        rd.fail({"topology"}, "missing topology.edges");
    }
    const auto m = rd.integer(topo, {"topology", "m"});
    if (m < 2 || m > 10) {
        rd.fail({"topology", "m"}, "m must lie in 2..10");
    }
    const auto &edges = topo.at("edges");
    if (!edges.is_array() || edges.empty()) {
        rd.fail({"topology", "edges"}, "expected a nonempty list of [j, k] pairs");
    }
    std::vector<SitePair> pairs;
    std::set<SitePair> seen;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const auto &e = edges[i];
        const std::string where = "edge " + std::to_string(i + 1);
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
            rd.fail({"topology", "edges"}, where + " is not a pair of integers");
        }
        const auto a = e[0].get<long long>();
        const auto b = e[1].get<long long>();
        if (a < 1 || b < 1 || a > m || b > m) {
            rd.fail({"topology", "edges"}, where + " references a site outside 1.." + std::to_string(m));
        }
        if (a == b) {
            rd.fail({"topology", "edges"}, where + " joins a site to itself");
        }
        SitePair p(static_cast<int>(a), static_cast<int>(b));
        if (!seen.insert(p).second) {
            rd.fail({"topology", "edges"}, where + " duplicates an earlier edge");
        }
        pairs.push_back(p);
    }
    std::optional<std::vector<double>> probs;
    if (topo.contains("probabilities")) {
        const auto &pj = topo.at("probabilities");
        if (!pj.is_array() || pj.size() != pairs.size()) {
            rd.fail({"topology", "probabilities"}, "expected one number per edge");
        }
        std::vector<double> q;
        double total = 0.0;
        for (const auto &v : pj) {
            if (!v.is_number() || !(v.get<double>() > 0.0)) {
                rd.fail({"topology", "probabilities"}, "probabilities must be positive numbers");
            }
            q.push_back(v.get<double>());
            total += q.back();
        }
        if (std::abs(total - 1.0) > 1e-12) {
            rd.fail({"topology", "probabilities"}, "probabilities must sum to 1");
        }
        probs = std::move(q);
    }
    NetworkTopology topology(static_cast<int>(m), std::move(pairs), std::move(probs));

    // family
    if (!doc.contains("family")) {
        throw ConfigError("family", 0, "missing required key");
    }
    const auto fam_name = rd.string(doc, {"family"});
    const auto kind = parse_family(fam_name);
    if (!kind) {
        rd.fail({"family"}, "unknown family '" + fam_name + "' (expected gossip, ssc or smc)");
    }
    double alpha = kDefaultGossipAlpha;
    if (doc.contains("alpha")) {
        alpha = rd.number(doc, {"alpha"});
        if (!(alpha > 0.0 && alpha < 1.0)) {
            rd.fail({"alpha"}, "alpha must lie strictly between 0 and 1");
        }
    }
    const ChannelFamily family = *kind == FamilyKind::Gossip ? ChannelFamily::gossip(alpha)
                                 : *kind == FamilyKind::Ssc  ? ChannelFamily::ssc()
                                                             : ChannelFamily::smc();

    ExperimentConfig cfg{topology, family};
    cfg.base_dir = opts.base_dir;

    if (doc.contains("seed")) {
        cfg.seed = rd.seed(doc, {"seed"});
    }

    // schedule
    if (doc.contains("schedule")) {
        const auto &sj = rd.object(doc, {"schedule"});
        rd.only_keys(sj, {"schedule"}, {"mode", "order", "seed"});
        if (sj.contains("mode")) {
            const auto mode = rd.string(sj, {"schedule", "mode"});
            if (mode == "cyclic") {
                cfg.schedule_mode = ScheduleMode::Cyclic;
            } else if (mode == "random") {
                cfg.schedule_mode = ScheduleMode::Random;
            } else {
                rd.fail({"schedule", "mode"}, "expected 'cyclic' or 'random'");
            }
        }
        if (sj.contains("order")) {
            const auto &oj = sj.at("order");
            if (!oj.is_array() || oj.empty()) {
                rd.fail({"schedule", "order"}, "expected a nonempty list of edge indices");
            }
            std::vector<bool> covered(topology.neighborhoods().size(), false);
            for (const auto &v : oj) {
                if (!v.is_number_integer() || v.get<long long>() < 1 ||
                    v.get<long long>() > static_cast<long long>(covered.size())) {
                    rd.fail({"schedule", "order"},
                            "edge indices must be integers in 1.." + std::to_string(covered.size()));
                }
                const auto idx = static_cast<std::size_t>(v.get<long long>() - 1);
                cfg.order.push_back(idx);
                covered[idx] = true;
            }
            for (std::size_t i = 0; i < covered.size(); ++i) {
                if (!covered[i]) {
                    rd.fail({"schedule", "order"}, "order never selects edge " + std::to_string(i + 1));
                }
            }
        }
        if (sj.contains("seed")) {
            cfg.schedule_seed = rd.seed(sj, {"schedule", "seed"});
        }
    }

    // steps
    if (doc.contains("steps")) {
        const auto steps = rd.integer(doc, {"steps"});
        if (steps < (opts.allow_zero_steps ? 0 : 1)) {
            rd.fail({"steps"}, opts.allow_zero_steps ? "steps must be >= 0" : "steps must be >= 1");
        }
        if (steps > 100000000) {
            rd.fail({"steps"}, "steps is unreasonably large");
        }
        cfg.steps = static_cast<int>(steps);
    } else if (!opts.allow_zero_steps) {
        throw ConfigError("steps", 0, "missing required key");
    }

    // initial state
    if (doc.contains("initial_state")) {
        const auto &ij = rd.object(doc, {"initial_state"});
        rd.only_keys(ij, {"initial_state"}, {"type", "bits", "k", "seed", "path"});
        if (!ij.contains("type")) {
            rd.fail({"initial_state"}, "missing initial_state.type");
        }
        const auto type = rd.string(ij, {"initial_state", "type"});
        if (type == "basis") {
            cfg.initial.kind = InitialKind::Basis;
            if (!ij.contains("bits")) {
                rd.fail({"initial_state"}, "basis state needs 'bits'");
            }
            cfg.initial.bits = rd.string(ij, {"initial_state", "bits"});
            if (cfg.initial.bits.size() != static_cast<std::size_t>(m) ||
                cfg.initial.bits.find_first_not_of("01") != std::string::npos) {
                rd.fail({"initial_state", "bits"}, "expected " + std::to_string(m) + " characters of 0/1");
            }
        } else if (type == "dicke") {
            cfg.initial.kind = InitialKind::Dicke;
            if (!ij.contains("k")) {
                rd.fail({"initial_state"}, "dicke state needs 'k'");
            }
            const auto k = rd.integer(ij, {"initial_state", "k"});
            if (k < 0 || k > m) {
                rd.fail({"initial_state", "k"}, "k must lie in 0.." + std::to_string(m));
            }
            cfg.initial.k = static_cast<int>(k);
        } else if (type == "random") {
            cfg.initial.kind = InitialKind::Random;
            if (ij.contains("seed")) {
                cfg.initial.seed = rd.seed(ij, {"initial_state", "seed"});
            }
        } else if (type == "matrix") {
            cfg.initial.kind = InitialKind::MatrixFile;
            if (!ij.contains("path")) {
                rd.fail({"initial_state"}, "matrix state needs 'path'");
            }
            cfg.initial.path = rd.string(ij, {"initial_state", "path"});
        } else {
            rd.fail({"initial_state", "type"}, "expected basis, dicke, random or matrix");
        }
    }

    if (doc.contains("output")) {
        cfg.output = rd.string(doc, {"output"});
    }
    if (doc.contains("early_stop")) {
        cfg.early_stop = rd.boolean(doc, {"early_stop"});
    }

    if (doc.contains("prepare")) {
        const auto &pj = rd.object(doc, {"prepare"});
        rd.only_keys(pj, {"prepare"}, {"target_k", "use_s_measurement"});
        PrepareSpec p;
        if (!pj.contains("target_k")) {
            rd.fail({"prepare"}, "missing prepare.target_k");
        }
        const auto k = rd.integer(pj, {"prepare", "target_k"});
        if (k < 0 || k > m) {
            rd.fail({"prepare", "target_k"}, "target_k must lie in 0.." + std::to_string(m));
        }
        p.target_k = static_cast<int>(k);
        if (pj.contains("use_s_measurement")) {
            p.use_s_measurement = rd.boolean(pj, {"prepare", "use_s_measurement"});
        }
        cfg.prepare = p;
    }

    if (doc.contains("convergence")) {
        const auto &cj = rd.object(doc, {"convergence"});
        rd.only_keys(cj, {"convergence"}, {"gamma", "horizon", "trials"});
        ConvergenceSpec c;
        if (cj.contains("gamma")) {
            c.gamma = rd.number(cj, {"convergence", "gamma"});
            if (!(c.gamma > 0.0)) {
                rd.fail({"convergence", "gamma"}, "gamma must be positive");
            }
        }
        if (cj.contains("horizon")) {
            const auto h = rd.integer(cj, {"convergence", "horizon"});
            if (h < 0) {
                rd.fail({"convergence", "horizon"}, "horizon must be >= 0");
            }
            c.horizon = static_cast<int>(h);
        }
        if (cj.contains("trials")) {
            const auto t = rd.integer(cj, {"convergence", "trials"});
            if (t < 1) {
                rd.fail({"convergence", "trials"}, "trials must be >= 1");
            }
            c.trials = static_cast<int>(t);
        }
        cfg.convergence = c;
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::string &path, ParseOptions opts = {}) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("", 0, "cannot open config file '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    if (opts.base_dir.empty()) {
        opts.base_dir = std::filesystem::path(path).parent_path();
    }
    return parse_config(ss.str(), opts);
}

}  // namespace qsym
