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

#ifndef SPARSEDET_SCENARIOS_HPP_
#define SPARSEDET_SCENARIOS_HPP_

#include <cmath>
#include <optional>
#include <string>
#include <utility>

#include "sparsedet/errors.hpp"
#include "sparsedet/gaussian_model.hpp"
#include "sparsedet/io.hpp"
#include "sparsedet/linalg.hpp"
#include "sparsedet/rng.hpp"

namespace sparsedet {

// Equicorrelation covariance: ones on the diagonal, rho elsewhere.
// Positive definite iff −1/(m−1) < rho < 1.
inline Matrix uniform_corr(int m, double rho) {
  if (m < 1) throw ParameterError("uniform_corr: m must be >= 1");
  const double lower = m > 1 ? -1.0 / static_cast<double>(m - 1) : -1.0;
  if (!(rho > lower) || !(rho < 1.0))
    throw ParameterError("uniform_corr: rho must lie in (" +
                         format_g17(lower) + ", 1)");
  Matrix sigma = Matrix::Constant(m, m, rho);
  sigma.diagonal().setOnes();
  return sigma;
}

// Block precision matrix: blkdiag(T, I) with T = Toeplitz(1, rho, rho², …)
// of size m − ⌊m/2⌋ and an identity block of size ⌊m/2⌋.  Returns the
// precision (inverse covariance); invert on demand for the covariance.
inline Matrix block_precision(int m, double rho) {
  if (m < 1) throw ParameterError("block_precision: m must be >= 1");
  if (!(std::abs(rho) < 1.0))
    throw ParameterError("block_precision: |rho| must be < 1");
  const int t_size = m - m / 2;
  Matrix prec = Matrix::Identity(m, m);
  for (int i = 0; i < t_size; ++i)
    for (int j = 0; j < t_size; ++j)
      prec(i, j) = std::pow(rho, std::abs(i - j));
  return prec;
}

// Three-sensor pair with precision [[1,rho,0],[rho,1,0],[0,0,1]], zero mean
// under H0 and all-ones mean under H1.  The covariance is built analytically
// so the inverse relation is exact.
inline GaussianPair counterexample3(double rho, double prior0 = 0.3) {
  if (!(rho >= 0.0) || !(rho < 1.0))
    throw ParameterError("counterexample3: rho must lie in [0, 1)");
  Matrix sigma = Matrix::Identity(3, 3);
  const double denom = 1.0 - rho * rho;
  sigma(0, 0) = 1.0 / denom;
  sigma(1, 1) = 1.0 / denom;
  sigma(0, 1) = -rho / denom;
  sigma(1, 0) = -rho / denom;
  return GaussianPair(Vector::Zero(3), Vector::Ones(3), sigma, sigma, prior0);
}

// Random symmetric Toeplitz covariance: first row r₀ = 1,
// r_k ~ uniform(−0.5, 0.5)·0.9^k, rejection-resampled until positive
// definite (at most 100 attempts).  Deterministic in the seed.
inline Matrix toeplitz_random_cov(int m, std::uint64_t seed) {
  if (m < 1) throw ParameterError("toeplitz_random_cov: m must be >= 1");
  Rng rng(seed);
  for (int attempt = 0; attempt < 100; ++attempt) {
    Matrix sigma(m, m);
    sigma.diagonal().setOnes();
    double decay = 1.0;
    for (int k = 1; k < m; ++k) {
      decay *= 0.9;
      const double r = rng.uniform(-0.5, 0.5) * decay;
      for (int i = 0; i + k < m; ++i) {
        sigma(i, i + k) = r;
        sigma(i + k, i) = r;
      }
    }
    try {
      CholeskyFactor check(sigma);
      return sigma;
    } catch (const NumericalError&) {
      continue;
    }
  }
  throw NumericalError(
      "toeplitz_random_cov: no positive definite draw within 100 attempts");
}

// Superposition of m unit-power sources on a half-wavelength uniform linear
// array with real cosine steering: Σ = Σ_k v_k v_kᵀ + 0.01·I, each v_k the
// unit-normalized vector [cos(π·j·sin φ_k)]_j at a seeded random angle
// φ_k ~ uniform(−π/2, π/2).  Entry 0 of every steering vector is 1, so the
// norm never degenerates.
inline Matrix array_sources_cov(int m, std::uint64_t seed) {
  if (m < 1) throw ParameterError("array_sources_cov: m must be >= 1");
  const double pi = std::acos(-1.0);
  Rng rng(seed);
  Matrix sigma = 0.01 * Matrix::Identity(m, m);
  for (int k = 0; k < m; ++k) {
    const double phi = rng.uniform(-0.5 * pi, 0.5 * pi);
    Vector v(m);
    for (int j = 0; j < m; ++j)
      v(j) = std::cos(pi * static_cast<double>(j) * std::sin(phi));
    v /= v.norm();
    sigma += v * v.transpose();
  }
  return sigma;
}

// Standard normal draw normalized to unit Euclidean norm; deterministic in
// the seed (zero-norm draws are resampled).
inline Vector random_unit_mean(int m, std::uint64_t seed) {
  if (m < 1) throw ParameterError("random_unit_mean: m must be >= 1");
  Rng rng(seed);
  Vector v = rng.normal_vector(m);
  while (v.norm() < 1e-12) v = rng.normal_vector(m);
  return v / v.norm();
}

enum class ScenarioKind {
  kToeplitzRandom,
  kUniformCorr,
  kBlockPrecision,
  kCounterexample3,
  kArraySources,
  kCustomFile,
};

inline std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::kToeplitzRandom: return "toeplitz_random";
    case ScenarioKind::kUniformCorr: return "uniform_corr";
    case ScenarioKind::kBlockPrecision: return "block_precision";
    case ScenarioKind::kCounterexample3: return "counterexample3";
    case ScenarioKind::kArraySources: return "array_sources";
    case ScenarioKind::kCustomFile: return "custom_file";
  }
  throw ParameterError("unknown scenario kind");
}

inline ScenarioKind scenario_kind_from_string(const std::string& s) {
  if (s == "toeplitz_random") return ScenarioKind::kToeplitzRandom;
  if (s == "uniform_corr") return ScenarioKind::kUniformCorr;
  if (s == "block_precision") return ScenarioKind::kBlockPrecision;
  if (s == "counterexample3") return ScenarioKind::kCounterexample3;
  if (s == "array_sources") return ScenarioKind::kArraySources;
  if (s == "custom_file") return ScenarioKind::kCustomFile;
  throw ParameterError("unknown scenario kind '" + s + "'");
}

// Declarative description of one instance family.  `uncommon_covariance`
// draws two independent covariances (zero means) and applies only to the
// random families; the deterministic kinds define their own means.
struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::kToeplitzRandom;
  int m = 15;
  std::optional<double> rho;  // defaults: uniform_corr 0.43, block 0.18
  std::uint64_t seed = 0;
  double prior0 = 0.3;
  bool uncommon_covariance = false;
  std::string file;  // custom_file only: path to a pair JSON
};

// Materializes the spec for one Monte Carlo trial.  Per-trial randomness is
// counter-derived from (spec.seed, trial), so trials are independent and
// reproducible in any order.
inline GaussianPair make_gaussian_pair(const ScenarioSpec& spec,
                                       long trial = 0) {
  if (spec.m < 1) throw ParameterError("scenario: m must be >= 1");
  if (!(spec.prior0 > 0.0) || !(spec.prior0 < 1.0))
    throw ParameterError("scenario: prior0 must lie in (0, 1)");
  if (spec.uncommon_covariance && spec.kind != ScenarioKind::kToeplitzRandom &&
      spec.kind != ScenarioKind::kArraySources)
    throw ParameterError(
        "scenario: uncommon covariance mode requires toeplitz_random or "
        "array_sources");
  const std::uint64_t base =
      derive_seed(spec.seed, static_cast<std::uint64_t>(trial));
  switch (spec.kind) {
    case ScenarioKind::kUniformCorr: {
      const Matrix sigma = uniform_corr(spec.m, spec.rho.value_or(0.43));
      return GaussianPair(random_unit_mean(spec.m, derive_seed(base, 1)),
                          random_unit_mean(spec.m, derive_seed(base, 2)),
                          sigma, sigma, spec.prior0);
    }
    case ScenarioKind::kToeplitzRandom: {
      if (spec.uncommon_covariance)
        return GaussianPair(Vector::Zero(spec.m), Vector::Zero(spec.m),
                            toeplitz_random_cov(spec.m, derive_seed(base, 1)),
                            toeplitz_random_cov(spec.m, derive_seed(base, 2)),
                            spec.prior0);
      const Matrix sigma = toeplitz_random_cov(spec.m, derive_seed(base, 1));
      return GaussianPair(random_unit_mean(spec.m, derive_seed(base, 2)),
                          random_unit_mean(spec.m, derive_seed(base, 3)),
                          sigma, sigma, spec.prior0);
    }
    case ScenarioKind::kBlockPrecision: {
      const Matrix sigma =
          invert_pd(block_precision(spec.m, spec.rho.value_or(0.18)));
      return GaussianPair(Vector::Zero(spec.m), Vector::Ones(spec.m), sigma,
                          sigma, spec.prior0);
    }
    case ScenarioKind::kCounterexample3: {
      if (spec.m != 3)
        throw ParameterError("scenario: counterexample3 requires m = 3");
      if (!spec.rho)
        throw ParameterError("scenario: counterexample3 requires rho");
      return counterexample3(*spec.rho, spec.prior0);
    }
    case ScenarioKind::kArraySources: {
      if (spec.uncommon_covariance)
        return GaussianPair(Vector::Zero(spec.m), Vector::Zero(spec.m),
                            array_sources_cov(spec.m, derive_seed(base, 1)),
                            array_sources_cov(spec.m, derive_seed(base, 2)),
                            spec.prior0);
      const Matrix sigma = array_sources_cov(spec.m, derive_seed(base, 1));
      return GaussianPair(random_unit_mean(spec.m, derive_seed(base, 2)),
                          random_unit_mean(spec.m, derive_seed(base, 3)),
                          sigma, sigma, spec.prior0);
    }
    case ScenarioKind::kCustomFile: {
      if (spec.file.empty())
        throw ParameterError("scenario: custom_file requires a file path");
      GaussianPair pair = load_pair_json(spec.file);
      if (pair.dim() != spec.m)
        throw ParameterError("scenario: custom_file dimension " +
                             std::to_string(pair.dim()) +
                             " does not match m = " + std::to_string(spec.m));
      return pair;
    }
  }
  throw ParameterError("scenario: unknown kind");
}

}  // namespace sparsedet

#endif  // SPARSEDET_SCENARIOS_HPP_
