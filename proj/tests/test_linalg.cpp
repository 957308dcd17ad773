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

#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using Catch::Approx;
using namespace sparsedet;

TEST_CASE("CholeskyFactor matches dense determinant and solves") {
  const Matrix m = support::random_pd(7, 101);
  const CholeskyFactor chol(m);

  CHECK(chol.log_det() == Approx(std::log(m.determinant())).epsilon(1e-10));

  const Matrix l = chol.matrix_l();
  CHECK((l * l.transpose() - m).cwiseAbs().maxCoeff() < 1e-10);
  for (int r = 0; r < 7; ++r)
    for (int c = r + 1; c < 7; ++c) CHECK(l(r, c) == 0.0);

  const Vector b = support::random_vector(7, 103);
  const Vector x = chol.solve(b);
  CHECK((m * x - b).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(chol.quad_form_inverse(b) ==
        Approx(b.dot(m.inverse() * b)).epsilon(1e-9));
}

TEST_CASE("CholeskyFactor reports the offending pivot") {
  Matrix m = Matrix::Identity(3, 3);
  m(2, 2) = -1.0;  // breaks at the third pivot
  try {
    CholeskyFactor chol(m);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("index 2") != std::string::npos);
  }
  CHECK_THROWS_AS(CholeskyFactor(Matrix::Zero(2, 3)), DimensionError);
}

TEST_CASE("submatrix and subvector gather entries element-wise") {
  const Matrix m = support::random_pd(5, 107);
  const std::vector<int> idx{1, 3, 4};
  const Matrix sub = submatrix(m, idx);
  REQUIRE(sub.rows() == 3);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) CHECK(sub(r, c) == m(idx[r], idx[c]));

  const Vector v = support::random_vector(5, 109);
  const Vector subv = subvector(v, idx);
  for (int i = 0; i < 3; ++i) CHECK(subv(i) == v(idx[i]));
}

TEST_CASE("invert_pd and symmetric_sqrt are inverses and roots") {
  const Matrix m = support::random_pd(6, 113);
  const Matrix inv = invert_pd(m);
  CHECK((m * inv - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(is_symmetric(inv, 1e-10));

  const Matrix root = symmetric_sqrt(m);
  CHECK(is_symmetric(root, 1e-10));
  CHECK((root * root - m).cwiseAbs().maxCoeff() < 1e-9);

  Matrix indefinite = Matrix::Identity(2, 2);
  indefinite(1, 1) = -0.5;
  CHECK_THROWS_AS(symmetric_sqrt(indefinite), NumericalError);
}

TEST_CASE("PrincipalMinorChain tracks log det of shift*I + scale*B_A") {
  auto base = std::make_shared<const Matrix>(support::random_pd(8, 127));
  const double scale = 2.5, shift = 1.0;
  PrincipalMinorChain chain(base, scale, shift);

  std::vector<int> picked;
  for (int index : {3, 0, 6, 2, 7}) {
    const auto ext = chain.probe(index);
    CHECK(ext.schur > 0.0);
    chain.append(index, &ext);
    picked.push_back(index);
    Matrix dense = scale * support::gather(*base, picked);
    dense.diagonal().array() += shift;
    CHECK(chain.log_det() ==
          Approx(std::log(dense.determinant())).epsilon(1e-9));
  }
  CHECK(chain.indices() == picked);
}

TEST_CASE("PrincipalMinorChain probes are pure and appends validate pivots") {
  auto base = std::make_shared<const Matrix>(support::random_pd(6, 131));
  PrincipalMinorChain chain(base, 1.0, 0.0);
  chain.append(1);
  chain.append(4);
  const double logdet_before = chain.log_det();

  const auto first = chain.probe(0);
  const auto second = chain.probe(0);
  CHECK(first.schur == second.schur);
  CHECK((first.solved - second.solved).cwiseAbs().maxCoeff() == 0.0);
  CHECK(chain.log_det() == logdet_before);
  CHECK(chain.size() == 2);

  // A base with a negative direction produces a non-positive pivot.
  auto bad = std::make_shared<const Matrix>(-Matrix::Identity(2, 2));
  PrincipalMinorChain failing(bad, 1.0, 0.5);
  CHECK_THROWS_AS(failing.append(0), NumericalError);
}

TEST_CASE("PrincipalMinorChain probe cost grows quadratically") {
  auto base = std::make_shared<const Matrix>(support::random_pd(24, 137));
  PrincipalMinorChain chain(base, 1.0, 0.0);
  for (int i = 0; i < 5; ++i) chain.append(i);
  const std::uint64_t before_small = chain.op_count();
  chain.probe(20);
  const std::uint64_t small_cost = chain.op_count() - before_small;
  for (int i = 5; i < 10; ++i) chain.append(i);
  const std::uint64_t before_large = chain.op_count();
  chain.probe(20);
  const std::uint64_t large_cost = chain.op_count() - before_large;
  // size 5 -> size 10 should roughly quadruple the probe work
  const double ratio =
      static_cast<double>(large_cost) / static_cast<double>(small_cost);
  CHECK(ratio > 2.0);
  CHECK(ratio < 6.0);
}

TEST_CASE("QuadFormChain matches dense quadratic forms") {
  auto base = std::make_shared<const Matrix>(support::random_pd(8, 139));
  auto rhs = std::make_shared<const Vector>(support::random_vector(8, 149));
  QuadFormChain chain(base, rhs);

  std::vector<int> picked;
  for (int index : {5, 2, 7, 0}) {
    const auto probe = chain.probe(index);
    std::vector<int> extended = picked;
    extended.push_back(index);
    const Matrix dense = support::gather(*base, extended);
    const Vector b = support::gather(*rhs, extended);
    CHECK(probe.quad_form == Approx(b.dot(dense.inverse() * b)).epsilon(1e-9));
    chain.append(index, &probe);
    picked = extended;
    CHECK(chain.quad_form() == Approx(probe.quad_form));
    CHECK(chain.log_det() ==
          Approx(std::log(dense.determinant())).epsilon(1e-9));
  }
}

TEST_CASE("MultiQuadChain tracks every column's quadratic form") {
  const int m = 7;
  auto base = std::make_shared<const Matrix>(support::random_pd(m, 151));
  auto rhs = std::make_shared<const Matrix>(support::random_pd(m, 157));
  MultiQuadChain multi(base, rhs);

  std::vector<int> picked;
  for (int index : {2, 6, 1}) {
    const auto probe = multi.probe(index);
    std::vector<int> extended = picked;
    extended.push_back(index);
    const Matrix dense_inv = support::gather(*base, extended).inverse();
    for (int j = 0; j < m; ++j) {
      const Vector col = support::gather(Vector(rhs->col(j)), extended);
      CHECK(probe.quads[static_cast<std::size_t>(j)] ==
            Approx(col.dot(dense_inv * col)).epsilon(1e-9));
    }
    multi.append(index, &probe);
    picked = extended;
    CHECK(multi.quad_forms() == probe.quads);
  }

  // Cross-check column 3 against a scalar QuadFormChain over the same picks.
  auto col3 = std::make_shared<const Vector>(rhs->col(3));
  QuadFormChain scalar(base, col3);
  for (int index : picked) scalar.append(index);
  CHECK(multi.quad_forms()[3] == Approx(scalar.quad_form()).epsilon(1e-12));
}
