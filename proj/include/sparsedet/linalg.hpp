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

#ifndef SPARSEDET_LINALG_HPP_
#define SPARSEDET_LINALG_HPP_

#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "sparsedet/errors.hpp"

namespace sparsedet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Relative symmetry test: max |M_ij - M_ji| <= rel_tol * max |M_ij|.
inline bool is_symmetric(const Matrix& m, double rel_tol = 1e-12) {
  if (m.rows() != m.cols()) return false;
  const double scale = m.cwiseAbs().maxCoeff();
  const double tol = rel_tol * (scale > 0.0 ? scale : 1.0);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i + 1; j < m.cols(); ++j)
      if (std::abs(m(i, j) - m(j, i)) > tol) return false;
  return true;
}

// Gathers the principal submatrix m[idx, idx] in the order given.
inline Matrix submatrix(const Matrix& m, const std::vector<int>& idx) {
  Matrix out(idx.size(), idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r)
    for (std::size_t c = 0; c < idx.size(); ++c)
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          m(idx[r], idx[c]);
  return out;
}

inline Vector subvector(const Vector& v, const std::vector<int>& idx) {
  Vector out(idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r)
    out(static_cast<Eigen::Index>(r)) = v(idx[r]);
  return out;
}

// Plain lower-triangular Cholesky factorization of a symmetric positive
// definite matrix.  Unlike Eigen's LLT this reports the offending pivot on
// breakdown, which the library's error contract requires.
class CholeskyFactor {
 public:
  CholeskyFactor() = default;

  explicit CholeskyFactor(const Matrix& m) {
    if (m.rows() != m.cols())
      throw DimensionError("CholeskyFactor: matrix must be square");
    const int n = static_cast<int>(m.rows());
    l_ = Matrix::Zero(n, n);
    log_det_ = 0.0;
    for (int j = 0; j < n; ++j) {
      double d = m(j, j);
      for (int c = 0; c < j; ++c) {
        double s = m(j, c);
        for (int k = 0; k < c; ++k) s -= l_(j, k) * l_(c, k);
        l_(j, c) = s / l_(c, c);
        d -= l_(j, c) * l_(j, c);
      }
      if (!(d > 0.0) || !std::isfinite(d))
        throw NumericalError(
            "Cholesky factorization failed: non-positive pivot at index " +
            std::to_string(j));
      l_(j, j) = std::sqrt(d);
      log_det_ += std::log(d);
    }
  }

  int size() const { return static_cast<int>(l_.rows()); }

  // log det of the factored matrix.
  double log_det() const { return log_det_; }

  // Solves L y = b.
  Vector solve_lower(const Vector& b) const {
    Vector y = b;
    for (int r = 0; r < size(); ++r) {
      for (int c = 0; c < r; ++c) y(r) -= l_(r, c) * y(c);
      y(r) /= l_(r, r);
    }
    return y;
  }

  // Solves (L Lᵀ) x = b.
  Vector solve(const Vector& b) const {
    Vector y = solve_lower(b);
    for (int r = size() - 1; r >= 0; --r) {
      for (int c = r + 1; c < size(); ++c) y(r) -= l_(c, r) * y(c);
      y(r) /= l_(r, r);
    }
    return y;
  }

  // bᵀ (L Lᵀ)⁻¹ b without forming the inverse.
  double quad_form_inverse(const Vector& b) const {
    return solve_lower(b).squaredNorm();
  }

  const Matrix& matrix_l() const { return l_; }

 private:
  Matrix l_;
  double log_det_ = 0.0;
};

// log det of a symmetric positive definite matrix via Cholesky.
inline double log_det_pd(const Matrix& m) { return CholeskyFactor(m).log_det(); }

// Inverse of a symmetric positive definite matrix, computed column-wise from
// the Cholesky factor.  Reserved for genuine basis changes (e.g. turning a
// generated precision matrix into a covariance); quadratic forms and
// log-determinants never go through here.
inline Matrix invert_pd(const Matrix& m) {
  CholeskyFactor chol(m);
  const int n = chol.size();
  Matrix inv(n, n);
  for (int j = 0; j < n; ++j) {
    Vector e = Vector::Zero(n);
    e(j) = 1.0;
    inv.col(j) = chol.solve(e);
  }
  // Symmetrize to remove round-off drift between the two triangles.
  return 0.5 * (inv + inv.transpose());
}

// Symmetric positive (semi)definite square root via eigendecomposition.
inline Matrix symmetric_sqrt(const Matrix& m) {
  if (!is_symmetric(m))
    throw ParameterError("symmetric_sqrt: matrix must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  if (eig.info() != Eigen::Success)
    throw NumericalError("symmetric_sqrt: eigendecomposition failed");
  Vector lambda = eig.eigenvalues();
  if (lambda.minCoeff() <= 0.0)
    throw NumericalError("symmetric_sqrt: matrix is not positive definite");
  return eig.eigenvectors() * lambda.cwiseSqrt().asDiagonal() *
         eig.eigenvectors().transpose();
}

// Incrementally grown Cholesky factor of shift·I + scale·B[A, A], where B is
// a fixed base matrix and A an ordered index set that grows one element per
// commit.  A probe computes the next factor row and Schur pivot in O(|A|²)
// without mutating the chain, which is what makes greedy candidate scans
// cheap.  Multiply-add counts are tracked so tests can assert cost scaling
// instead of wall time.
class PrincipalMinorChain {
 public:
  PrincipalMinorChain(std::shared_ptr<const Matrix> base, double scale,
                      double shift)
      : base_(std::move(base)), scale_(scale), shift_(shift) {
    const int m = static_cast<int>(base_->rows());
    l_ = Matrix::Zero(m, m);
    idx_.reserve(m);
  }

  struct Extension {
    Vector solved;  // y = L⁻¹ c where c is the gathered cross column
    double schur;   // pivot: (shift + scale·B_ii) − ‖y‖²
  };

  // Computes the extension for appending `index`; does not mutate the chain.
  Extension probe(int index) const {
    const int k = size();
    Extension ext;
    ext.solved.resize(k);
    // Gather the cross column and forward-solve in one pass.
    for (int r = 0; r < k; ++r) {
      double s = scale_ * (*base_)(idx_[r], index);
      for (int c = 0; c < r; ++c) s -= l_(r, c) * ext.solved(c);
      ext.solved(r) = s / l_(r, r);
      ops_ += static_cast<std::uint64_t>(r) + 1;
    }
    const double diag = shift_ + scale_ * (*base_)(index, index);
    ext.schur = diag - ext.solved.squaredNorm();
    ops_ += static_cast<std::uint64_t>(k);
    return ext;
  }

  // Appends `index`, reusing a previously computed extension when provided.
  void append(int index, const Extension* precomputed = nullptr) {
    Extension local;
    const Extension* ext = precomputed;
    if (ext == nullptr) {
      local = probe(index);
      ext = &local;
    }
    if (!(ext->schur > 0.0) || !std::isfinite(ext->schur))
      throw NumericalError(
          "incremental Cholesky failed: non-positive pivot at index " +
          std::to_string(index));
    const int k = size();
    for (int c = 0; c < k; ++c) l_(k, c) = ext->solved(c);
    l_(k, k) = std::sqrt(ext->schur);
    log_det_ += std::log(ext->schur);
    idx_.push_back(index);
  }

  int size() const { return static_cast<int>(idx_.size()); }
  const std::vector<int>& indices() const { return idx_; }

  // log det of shift·I + scale·B[A, A].
  double log_det() const { return log_det_; }

  // Cumulative multiply-add count across probes and appends.
  std::uint64_t op_count() const { return ops_; }

 private:
  std::shared_ptr<const Matrix> base_;
  double scale_;
  double shift_;
  Matrix l_;
  std::vector<int> idx_;
  double log_det_ = 0.0;
  mutable std::uint64_t ops_ = 0;
};

// PrincipalMinorChain plus tracking of the quadratic form bᵀ (B[A,A])⁻¹ b_A,
// maintained through the solved vector z = L⁻¹ b_A (the form equals ‖z‖²).
class QuadFormChain {
 public:
  QuadFormChain(std::shared_ptr<const Matrix> base,
                std::shared_ptr<const Vector> rhs)
      : chain_(std::move(base), 1.0, 0.0), rhs_(std::move(rhs)) {
    z_.resize(rhs_->size());
  }

  struct Probe {
    double quad_form;  // value after appending the candidate
    double z_new;      // new component of z
    PrincipalMinorChain::Extension ext;
  };

  Probe probe(int index) const {
    Probe p;
    p.ext = chain_.probe(index);
    if (!(p.ext.schur > 0.0) || !std::isfinite(p.ext.schur))
      throw NumericalError(
          "quadratic-form chain: non-positive pivot at index " +
          std::to_string(index));
    const int k = chain_.size();
    double cross = 0.0;
    for (int r = 0; r < k; ++r) cross += p.ext.solved(r) * z_(r);
    p.z_new = ((*rhs_)(index)-cross) / std::sqrt(p.ext.schur);
    p.quad_form = sum_ + p.z_new * p.z_new;
    return p;
  }

  void append(int index, const Probe* precomputed = nullptr) {
    Probe local;
    const Probe* p = precomputed;
    if (p == nullptr) {
      local = probe(index);
      p = &local;
    }
    const int k = chain_.size();
    chain_.append(index, &p->ext);
    z_(k) = p->z_new;
    sum_ = p->quad_form;
  }

  double quad_form() const { return sum_; }
  double log_det() const { return chain_.log_det(); }
  int size() const { return chain_.size(); }
  const std::vector<int>& indices() const { return chain_.indices(); }
  std::uint64_t op_count() const { return chain_.op_count(); }

 private:
  PrincipalMinorChain chain_;
  std::shared_ptr<const Vector> rhs_;
  Vector z_;
  double sum_ = 0.0;
};

// QuadFormChain generalized to many right-hand sides sharing one Cholesky
// factor: tracks bⱼᵀ (B[A,A])⁻¹ (bⱼ)_A for every column bⱼ of `rhs`.  One
// probe costs a single O(k²) factor extension plus O(k) per column.
class MultiQuadChain {
 public:
  MultiQuadChain(std::shared_ptr<const Matrix> base,
                 std::shared_ptr<const Matrix> rhs)
      : chain_(std::move(base), 1.0, 0.0), rhs_(std::move(rhs)) {
    const int n = static_cast<int>(rhs_->cols());
    z_.resize(static_cast<Eigen::Index>(rhs_->rows()), n);
    sums_.assign(static_cast<std::size_t>(n), 0.0);
  }

  struct Probe {
    Vector z_new;               // new z component, one per column
    std::vector<double> quads;  // quadratic forms after the append
    PrincipalMinorChain::Extension ext;
  };

  Probe probe(int index) const {
    Probe p;
    p.ext = chain_.probe(index);
    if (!(p.ext.schur > 0.0) || !std::isfinite(p.ext.schur))
      throw NumericalError(
          "multi quadratic-form chain: non-positive pivot at index " +
          std::to_string(index));
    const int k = chain_.size();
    const int n = static_cast<int>(rhs_->cols());
    const double root = std::sqrt(p.ext.schur);
    p.z_new.resize(n);
    p.quads.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      double cross = 0.0;
      for (int r = 0; r < k; ++r) cross += p.ext.solved(r) * z_(r, j);
      p.z_new(j) = ((*rhs_)(index, j) - cross) / root;
      p.quads[static_cast<std::size_t>(j)] =
          sums_[static_cast<std::size_t>(j)] + p.z_new(j) * p.z_new(j);
    }
    ops_ += static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(k + 1);
    return p;
  }

  void append(int index, const Probe* precomputed = nullptr) {
    Probe local;
    const Probe* p = precomputed;
    if (p == nullptr) {
      local = probe(index);
      p = &local;
    }
    const int k = chain_.size();
    chain_.append(index, &p->ext);
    for (int j = 0; j < static_cast<int>(rhs_->cols()); ++j)
      z_(k, j) = p->z_new(j);
    sums_ = p->quads;
  }

  const std::vector<double>& quad_forms() const { return sums_; }
  double log_det() const { return chain_.log_det(); }
  int size() const { return chain_.size(); }
  const std::vector<int>& indices() const { return chain_.indices(); }
  std::uint64_t op_count() const { return chain_.op_count() + ops_; }

 private:
  PrincipalMinorChain chain_;
  std::shared_ptr<const Matrix> rhs_;
  Matrix z_;
  std::vector<double> sums_;
  mutable std::uint64_t ops_ = 0;
};

}  // namespace sparsedet

#endif  // SPARSEDET_LINALG_HPP_
