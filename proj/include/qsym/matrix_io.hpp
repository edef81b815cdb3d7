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

#include <json.hpp>

#include <fstream>
#include <stdexcept>
#include <string>

// Matrix file schema:
//   {"rows": R, "cols": C, "data": [[re, im], ...]}
// where data lists the R*C entries in row-major order.

namespace qsym {

inline nlohmann::json matrix_to_json(const Matrix &m) {
    nlohmann::json data = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            data.push_back({m(i, j).real(), m(i, j).imag()});
        }
    }
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

inline Matrix matrix_from_json(const nlohmann::json &j) {
    if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data")) {
        throw std::invalid_argument("matrix object needs rows, cols and data");
    }
    if (!j["rows"].is_number_integer() || !j["cols"].is_number_integer() || !j["data"].is_array()) {
        throw std::invalid_argument("matrix rows/cols must be integers and data an array");
    }
    const auto rows = j["rows"].get<long long>();
    const auto cols = j["cols"].get<long long>();
    if (rows < 1 || cols < 1) {
        throw std::invalid_argument("matrix rows and cols must be positive");
    }
    const auto &data = j["data"];
    if (static_cast<long long>(data.size()) != rows * cols) {
        throw std::invalid_argument("matrix data has " + std::to_string(data.size()) + " entries, expected " +
                                    std::to_string(rows * cols));
    }
    Matrix m(rows, cols);
    std::size_t n = 0;
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j2 = 0; j2 < cols; ++j2, ++n) {
            const auto &e = data[n];
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
                throw std::invalid_argument("matrix entry " + std::to_string(n) + " is not a [re, im] pair");
            }
            m(i, j2) = Complex(e[0].get<double>(), e[1].get<double>());
        }
    }
    return m;
}

inline Matrix read_matrix_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open matrix file " + path);
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error &e) {
        throw std::invalid_argument("matrix file " + path + ": " + e.what());
    }
    return matrix_from_json(j);
}

inline void write_matrix_file(const std::string &path, const Matrix &m) {
    std::ofstream out(path);
    if (!out) {
        throw std::invalid_argument("cannot write matrix file " + path);
    }
    out << matrix_to_json(m).dump(2) << '\n';
}

}  // namespace qsym
