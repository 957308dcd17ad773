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
//
// Shared test helpers.  The oracles here deliberately take the naive path —
// explicit inverses, determinants, double-loop gathers — so they share no
// code with the library's factorization-based implementations.

#ifndef SPARSEDET_TESTS_SUPPORT_HPP_
#define SPARSEDET_TESTS_SUPPORT_HPP_

#include <cmath>
#include <random>
#include <vector>

#include "sparsedet/sparsedet.hpp"

namespace support {

using sparsedet::GaussianPair;
using sparsedet::Matrix;
using sparsedet::Selection;
using sparsedet::Vector;

inline Selection sel(std::vector<int> indices, int m) {
  return Selection(std::move(indices), m);
}

// --- instance generators (std::mt19937, independent of the library RNG) ---

inline Matrix random_pd(int m, unsigned seed, double jitter = 0.5) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> normal;
  Matrix a(m, m);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) a(r, c) = normal(gen);
  Matrix sigma = a * a.transpose() / static_cast<double>(m);
  sigma.diagonal().array() += jitter;
  return sigma;
}

inline Vector random_vector(int m, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> normal;
  Vector v(m);
  for (int i = 0; i < m; ++i) v(i) = normal(gen);
  return v;
}

inline GaussianPair common_pair(int m, unsigned seed, double prior0 = 0.5) {
  const Matrix sigma = random_pd(m, seed);
  return GaussianPair(random_vector(m, seed + 1), random_vector(m, seed + 2),
                      sigma, sigma, prior0);
}

inline GaussianPair uncommon_pair(int m, unsigned seed, double prior0 = 0.5) {
  return GaussianPair(Vector::Zero(m), Vector::Zero(m), random_pd(m, seed),
                      random_pd(m, seed + 1), prior0);
}

// --- naive dense oracles ---

inline Matrix gather(const Matrix& m, const std::vector<int>& idx) {
  Matrix out(idx.size(), idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r)
    for (std::size_t c = 0; c < idx.size(); ++c)
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          m(idx[r], idx[c]);
  return out;
}

inline Vector gather(const Vector& v, const std::vector<int>& idx) {
  Vector out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i)
    out(static_cast<Eigen::Index>(i)) = v(idx[i]);
  return out;
}

inline double naive_snr(const GaussianPair& pair,
                        const std::vector<int>& idx) {
  if (idx.empty()) return 0.0;
  const Vector d = gather(Vector(pair.theta1() - pair.theta0()), idx);
  return d.dot(gather(pair.sigma0(), idx).inverse() * d);
}

// KL(p1 || p0) restricted to idx, via explicit inverses and determinants.
inline double naive_kl(const GaussianPair& pair, const std::vector<int>& idx) {
  if (idx.empty()) return 0.0;
  const auto k = static_cast<double>(idx.size());
  const Matrix s0 = gather(pair.sigma0(), idx);
  const Matrix s1 = gather(pair.sigma1(), idx);
  const Vector d = gather(Vector(pair.theta0() - pair.theta1()), idx);
  const Matrix s0_inv = s0.inverse();
  return 0.5 * ((s0_inv * s1).trace() - k +
                std::log(s0.determinant() / s1.determinant()) +
                d.dot(s0_inv * d));
}

inline double naive_kl_swapped(const GaussianPair& pair,
                               const std::vector<int>& idx) {
  const GaussianPair swapped(pair.theta1(), pair.theta0(), pair.sigma1(),
                             pair.sigma0(), pair.prior0());
  return naive_kl(swapped, idx);
}

inline double naive_bhattacharyya(const GaussianPair& pair,
                                  const std::vector<int>& idx) {
  if (idx.empty()) return 0.0;
  const Matrix s0 = gather(pair.sigma0(), idx);
  const Matrix s1 = gather(pair.sigma1(), idx);
  const Matrix avg = 0.5 * (s0 + s1);
  const Vector d = gather(Vector(pair.theta1() - pair.theta0()), idx);
  return d.dot(avg.inverse() * d) / 8.0 +
         0.5 * std::log(avg.determinant() /
                        std::sqrt(s0.determinant() * s1.determinant()));
}

inline double naive_logdet(const Matrix& m) {
  return std::log(m.determinant());
}

// --- subset enumeration ---

inline std::vector<std::vector<int>> all_subsets(int m) {
  std::vector<std::vector<int>> out;
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    std::vector<int> s;
    for (int i = 0; i < m; ++i)
      if (mask & (1u << i)) s.push_back(i);
    out.push_back(std::move(s));
  }
  return out;
}

inline std::vector<std::vector<int>> subsets_of_size(int m, int k) {
  std::vector<std::vector<int>> out;
  for (const std::vector<int>& s : all_subsets(m))
    if (static_cast<int>(s.size()) == k) out.push_back(s);
  return out;
}

}  // namespace support

#endif  // SPARSEDET_TESTS_SUPPORT_HPP_
