// Copyright 2026 The sparsedet Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SPARSEDET_IO_HPP_
#define SPARSEDET_IO_HPP_

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sparsedet/errors.hpp"
#include "sparsedet/gaussian_model.hpp"
#include "sparsedet/linalg.hpp"
#include "sparsedet/oracle.hpp"
#include "sparsedet/set_function.hpp"
#include "sparsedet/supsub.hpp"

namespace sparsedet {

// Shortest round-trip-safe decimal rendering of a double.
inline std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

inline void write_matrix_csv(const std::string& path, const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0)
    throw ParameterError("write_matrix_csv: empty matrix");
  std::ofstream out(path);
  if (!out) throw ParameterError("write_matrix_csv: cannot open " + path);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      out << format_g17(m(r, c));
      out << (c + 1 < m.cols() ? ',' : '\n');
    }
  }
  if (!out) throw ParameterError("write_matrix_csv: write failed: " + path);
}

inline Matrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("read_matrix_csv: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ParameterError("read_matrix_csv: bad number '" + cell + "' in " +
                             path);
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParameterError("read_matrix_csv: ragged rows in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParameterError("read_matrix_csv: no data in " + path);
  Matrix m(static_cast<Eigen::Index>(rows.size()),
           static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows.front().size(); ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          rows[r][c];
  return m;
}

inline void write_vector_csv(const std::string& path, const Vector& v) {
  Matrix column(v.size(), 1);
  column.col(0) = v;
  write_matrix_csv(path, column);
}

inline Vector read_vector_csv(const std::string& path) {
  const Matrix m = read_matrix_csv(path);
  if (m.cols() != 1)
    throw ParameterError("read_vector_csv: expected one column in " + path);
  return m.col(0);
}

namespace detail {

inline nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const nlohmann::json& j,
                               const std::string& field) {
  if (!j.is_array() || j.empty() || !j.front().is_array())
    throw ParameterError("pair JSON: field '" + field +
                         "' must be an array of rows");
  const std::size_t cols = j.front().size();
  Matrix m(static_cast<Eigen::Index>(j.size()),
           static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (j[r].size() != cols)
      throw ParameterError("pair JSON: ragged rows in '" + field + "'");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          j[r][c].get<double>();
  }
  return m;
}

inline nlohmann::json vector_to_json(const Vector& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

inline Vector vector_from_json(const nlohmann::json& j,
                               const std::string& field) {
  if (!j.is_array())
    throw ParameterError("pair JSON: field '" + field + "' must be an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

}  // namespace detail

inline nlohmann::json pair_to_json(const GaussianPair& pair) {
  nlohmann::json j;
  j["m"] = pair.dim();
  j["theta0"] = detail::vector_to_json(pair.theta0());
  j["theta1"] = detail::vector_to_json(pair.theta1());
  j["sigma0"] = detail::matrix_to_json(pair.sigma0());
  j["sigma1"] = detail::matrix_to_json(pair.sigma1());
  j["prior0"] = pair.prior0();
  return j;
}

// Accepts both descriptor fields (strings naming CSV files, resolved
// relative to base_dir) and embedded JSON arrays.
inline GaussianPair pair_from_json(const nlohmann::json& j,
                                   const std::string& base_dir = "") {
  for (const char* field : {"m", "theta0", "theta1", "sigma0", "sigma1"})
    if (!j.contains(field))
      throw ParameterError(std::string("pair JSON: missing field '") + field +
                           "'");
  const auto resolve = [&base_dir](const std::string& name) {
    std::filesystem::path p(name);
    if (p.is_relative() && !base_dir.empty())
      p = std::filesystem::path(base_dir) / p;
    return p.string();
  };
  const auto load_matrix = [&](const char* field) -> Matrix {
    const nlohmann::json& v = j.at(field);
    if (v.is_string()) return read_matrix_csv(resolve(v.get<std::string>()));
    return detail::matrix_from_json(v, field);
  };
  const auto load_vector = [&](const char* field) -> Vector {
    const nlohmann::json& v = j.at(field);
    if (v.is_string()) return read_vector_csv(resolve(v.get<std::string>()));
    return detail::vector_from_json(v, field);
  };
  const int m = j.at("m").get<int>();
  GaussianPair pair(load_vector("theta0"), load_vector("theta1"),
                    load_matrix("sigma0"), load_matrix("sigma1"),
                    j.value("prior0", 0.3));
  if (pair.dim() != m)
    throw ParameterError("pair JSON: 'm' does not match the array sizes");
  return pair;
}

// Writes the four CSV files next to the descriptor and the descriptor JSON
// { "m", "theta0": path, "theta1": path, "sigma0": path, "sigma1": path,
//   "prior0" } referencing them by relative name.
inline void save_pair_json(const std::string& path, const GaussianPair& pair) {
  const std::filesystem::path descriptor(path);
  const std::filesystem::path dir = descriptor.has_parent_path()
                                        ? descriptor.parent_path()
                                        : std::filesystem::path(".");
  write_vector_csv((dir / "theta0.csv").string(), pair.theta0());
  write_vector_csv((dir / "theta1.csv").string(), pair.theta1());
  write_matrix_csv((dir / "sigma0.csv").string(), pair.sigma0());
  write_matrix_csv((dir / "sigma1.csv").string(), pair.sigma1());
  nlohmann::json j;
  j["m"] = pair.dim();
  j["theta0"] = "theta0.csv";
  j["theta1"] = "theta1.csv";
  j["sigma0"] = "sigma0.csv";
  j["sigma1"] = "sigma1.csv";
  j["prior0"] = pair.prior0();
  std::ofstream out(path);
  if (!out) throw ParameterError("save_pair_json: cannot open " + path);
  out << j.dump(2) << '\n';
  if (!out) throw ParameterError("save_pair_json: write failed: " + path);
}

inline GaussianPair load_pair_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("load_pair_json: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ParameterError("load_pair_json: invalid JSON in " + path + ": " +
                         e.what());
  }
  const std::filesystem::path p(path);
  return pair_from_json(
      j, p.has_parent_path() ? p.parent_path().string() : std::string{});
}

inline nlohmann::json error_report_to_json(const ErrorReport& report) {
  nlohmann::json j;
  j["pe"] = report.pe;
  j["pm"] = report.pm;
  j["pfa_target"] = report.pfa_target;
  j["trials"] = report.trials;
  j["ci95_halfwidth"] = report.ci95_halfwidth;
  return j;
}

inline nlohmann::json trace_to_json(const GreedyTrace& trace) {
  nlohmann::json steps = nlohmann::json::array();
  for (const GreedyStep& s : trace.steps) {
    nlohmann::json step;
    step["index"] = s.index;
    step["value"] = s.value;
    step["gain"] = s.gain;
    step["evals"] = s.evals;
    steps.push_back(std::move(step));
  }
  nlohmann::json j;
  j["steps"] = std::move(steps);
  j["final"] = trace.final.sorted();
  j["value"] = trace.value();
  return j;
}

// One entry per accepted iteration: {"iter", "objective", "variant", "set"}.
inline nlohmann::json supsub_log_to_json(const SupSubResult& result) {
  nlohmann::json log = nlohmann::json::array();
  for (const SupSubIteration& it : result.log) {
    nlohmann::json entry;
    entry["iter"] = it.iteration;
    entry["objective"] = it.objective;
    entry["variant"] = it.variant;
    entry["set"] = it.set;
    log.push_back(std::move(entry));
  }
  nlohmann::json j;
  j["iterations"] = result.iterations;
  j["converged"] = result.converged;
  j["objective"] = result.objective;
  j["selection"] = result.selection.sorted();
  j["evaluations"] = result.evaluations;
  j["log"] = std::move(log);
  return j;
}

}  // namespace sparsedet

#endif  // SPARSEDET_IO_HPP_
