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

#include <filesystem>
#include <fstream>

#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using Catch::Approx;
using namespace sparsedet;
namespace fs = std::filesystem;

namespace {

// Unique per-test scratch directory, removed on scope exit.
struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("sparsedet_io_test_" + std::to_string(++counter));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

Matrix nasty_matrix() {
  Matrix m(3, 2);
  m << std::acos(-1.0), 1.0 / 3.0, -1e-300, 1e100, 0.1, -0.0;
  return m;
}

}  // namespace

TEST_CASE("format_g17 is round-trip safe") {
  for (double v : {std::acos(-1.0), 1.0 / 3.0, 1e-300, 1e100, 0.1, -2.5,
                   123456789.123456789}) {
    CHECK(std::stod(format_g17(v)) == v);
  }
  CHECK(format_g17(1.0) == "1");
}

TEST_CASE("matrix CSV round-trip is bit exact") {
  TempDir dir;
  const Matrix m = nasty_matrix();
  write_matrix_csv(dir.file("m.csv"), m);
  const Matrix back = read_matrix_csv(dir.file("m.csv"));
  REQUIRE(back.rows() == m.rows());
  REQUIRE(back.cols() == m.cols());
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 2; ++c) CHECK(back(r, c) == m(r, c));
}

TEST_CASE("matrix CSV rejects malformed input") {
  TempDir dir;
  SECTION("missing file") {
    CHECK_THROWS_AS(read_matrix_csv(dir.file("absent.csv")), ParameterError);
  }
  SECTION("ragged rows") {
    write_text(dir.file("ragged.csv"), "1,2,3\n4,5\n");
    CHECK_THROWS_WITH(read_matrix_csv(dir.file("ragged.csv")),
                      Catch::Matchers::ContainsSubstring("ragged"));
  }
  SECTION("bad number") {
    write_text(dir.file("bad.csv"), "1,two\n");
    CHECK_THROWS_WITH(read_matrix_csv(dir.file("bad.csv")),
                      Catch::Matchers::ContainsSubstring("bad number"));
  }
  SECTION("no data") {
    write_text(dir.file("empty.csv"), "\n\n");
    CHECK_THROWS_AS(read_matrix_csv(dir.file("empty.csv")), ParameterError);
  }
  SECTION("empty matrix write") {
    CHECK_THROWS_AS(write_matrix_csv(dir.file("none.csv"), Matrix(0, 0)),
                    ParameterError);
  }
}

TEST_CASE("vector CSV helpers enforce a single column") {
  TempDir dir;
  Vector v(4);
  v << 1.5, -2.25, 1.0 / 7.0, 0.0;
  write_vector_csv(dir.file("v.csv"), v);
  const Vector back = read_vector_csv(dir.file("v.csv"));
  REQUIRE(back.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(back(i) == v(i));
  write_matrix_csv(dir.file("wide.csv"), Matrix::Identity(2, 2));
  CHECK_THROWS_AS(read_vector_csv(dir.file("wide.csv")), ParameterError);
}

TEST_CASE("pair descriptor saves CSV sidecars and loads them back") {
  TempDir dir;
  const GaussianPair pair = support::uncommon_pair(5, 911);
  const std::string descriptor = dir.file("pair.json");
  save_pair_json(descriptor, pair);
  for (const char* name :
       {"theta0.csv", "theta1.csv", "sigma0.csv", "sigma1.csv"})
    CHECK(fs::exists(dir.path / name));

  // The descriptor references the sidecars by relative name.
  std::ifstream in(descriptor);
  nlohmann::json j;
  in >> j;
  CHECK(j.at("m").get<int>() == 5);
  CHECK(j.at("sigma0").get<std::string>() == "sigma0.csv");
  CHECK(j.at("theta1").get<std::string>() == "theta1.csv");
  CHECK(j.at("prior0").get<double>() == pair.prior0());

  const GaussianPair back = load_pair_json(descriptor);
  CHECK(back.dim() == 5);
  CHECK(back.theta0() == pair.theta0());
  CHECK(back.theta1() == pair.theta1());
  CHECK(back.sigma0() == pair.sigma0());
  CHECK(back.sigma1() == pair.sigma1());
  CHECK(back.prior0() == pair.prior0());
}

TEST_CASE("pair JSON accepts embedded arrays") {
  const GaussianPair pair = support::common_pair(4, 919);
  const nlohmann::json j = pair_to_json(pair);
  const GaussianPair back = pair_from_json(j);
  CHECK(back.theta0() == pair.theta0());
  CHECK(back.sigma1() == pair.sigma1());
  CHECK(back.prior0() == pair.prior0());
}

TEST_CASE("pair JSON validation") {
  const GaussianPair pair = support::common_pair(3, 929);
  SECTION("missing fields") {
    nlohmann::json j = pair_to_json(pair);
    j.erase("sigma1");
    CHECK_THROWS_WITH(pair_from_json(j),
                      Catch::Matchers::ContainsSubstring("sigma1"));
  }
  SECTION("dimension mismatch") {
    nlohmann::json j = pair_to_json(pair);
    j["m"] = 4;
    CHECK_THROWS_AS(pair_from_json(j), ParameterError);
  }
  SECTION("prior defaults to 0.3 when absent") {
    nlohmann::json j = pair_to_json(pair);
    j.erase("prior0");
    CHECK(pair_from_json(j).prior0() == Approx(0.3));
  }
  SECTION("malformed matrix field") {
    nlohmann::json j = pair_to_json(pair);
    j["sigma0"] = 7;
    CHECK_THROWS_AS(pair_from_json(j), ParameterError);
  }
  SECTION("unreadable JSON file") {
    TempDir dir;
    write_text(dir.file("broken.json"), "{not json");
    CHECK_THROWS_AS(load_pair_json(dir.file("broken.json")), ParameterError);
    CHECK_THROWS_AS(load_pair_json(dir.file("missing.json")), ParameterError);
  }
}

TEST_CASE("greedy trace serialization") {
  Vector c(4);
  c << 3.0, 1.0, 4.0, 2.0;
  const GreedyTrace t = greedy_maximize(modular_objective(c), 2);
  const nlohmann::json j = trace_to_json(t);
  REQUIRE(j.at("steps").size() == 2);
  CHECK(j.at("steps")[0].at("index").get<int>() == 2);
  CHECK(j.at("steps")[0].at("value").get<double>() == Approx(4.0));
  CHECK(j.at("steps")[1].at("gain").get<double>() == Approx(3.0));
  CHECK(j.at("steps")[0].at("evals").get<int>() == 4);
  CHECK(j.at("final").get<std::vector<int>>() == std::vector<int>{0, 2});
  CHECK(j.at("value").get<double>() == Approx(7.0));
}

TEST_CASE("iterative-maximization log serialization") {
  const GaussianPair pair = support::uncommon_pair(6, 937);
  const SupSubResult r = supsub_maximize(bhattacharyya_decomposition(pair), 2);
  const nlohmann::json j = supsub_log_to_json(r);
  CHECK(j.at("iterations").get<int>() == r.iterations);
  CHECK(j.at("converged").get<bool>() == r.converged);
  CHECK(j.at("objective").get<double>() == r.objective);
  CHECK(j.at("selection").get<std::vector<int>>() == r.selection.sorted());
  CHECK(j.at("evaluations").get<long>() == r.evaluations);
  REQUIRE(j.at("log").size() == r.log.size());
  for (std::size_t t = 0; t < r.log.size(); ++t) {
    CHECK(j.at("log")[t].at("iter").get<int>() == r.log[t].iteration);
    CHECK(j.at("log")[t].at("objective").get<double>() == r.log[t].objective);
    CHECK(j.at("log")[t].at("variant").get<int>() == r.log[t].variant);
    CHECK(j.at("log")[t].at("set").get<std::vector<int>>() == r.log[t].set);
  }
}

TEST_CASE("error report serialization") {
  const ErrorReport report{0.125, 0.25, 0.1, 5000, 0.004};
  const nlohmann::json j = error_report_to_json(report);
  CHECK(j.at("pe").get<double>() == 0.125);
  CHECK(j.at("pm").get<double>() == 0.25);
  CHECK(j.at("pfa_target").get<double>() == 0.1);
  CHECK(j.at("trials").get<long>() == 5000);
  CHECK(j.at("ci95_halfwidth").get<double>() == 0.004);
}
