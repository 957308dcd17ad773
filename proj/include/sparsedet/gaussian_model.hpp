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

#ifndef SPARSEDET_GAUSSIAN_MODEL_HPP_
#define SPARSEDET_GAUSSIAN_MODEL_HPP_

#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "sparsedet/errors.hpp"
#include "sparsedet/linalg.hpp"
#include "sparsedet/selection.hpp"

namespace sparsedet {

// Binary Gaussian hypothesis pair: y ~ N(theta_h, sigma_h) under hypothesis
// h ∈ {0, 1}, with prior weight prior0 on hypothesis 0.  Construction
// validates dimensions, symmetry (relative 1e-12) and positive definiteness
// (Cholesky succeeds).
class GaussianPair {
 public:
  GaussianPair(Vector theta0, Vector theta1, Matrix sigma0, Matrix sigma1,
               double prior0 = 0.5)
      : theta0_(std::move(theta0)),
        theta1_(std::move(theta1)),
        sigma0_(std::move(sigma0)),
        sigma1_(std::move(sigma1)),
        prior0_(prior0) {
    const Eigen::Index m = theta0_.size();
    if (m < 1) throw DimensionError("GaussianPair: dimension must be >= 1");
    if (theta1_.size() != m || sigma0_.rows() != m || sigma0_.cols() != m ||
        sigma1_.rows() != m || sigma1_.cols() != m)
      throw DimensionError("GaussianPair: mismatched dimensions");
    if (!is_symmetric(sigma0_) || !is_symmetric(sigma1_))
      throw ParameterError("GaussianPair: covariance must be symmetric");
    if (!(prior0_ > 0.0 && prior0_ < 1.0))
      throw ParameterError("GaussianPair: prior0 must lie in (0, 1)");
    // Positive definiteness via factorization success.
    CholeskyFactor c0(sigma0_);
    CholeskyFactor c1(sigma1_);
  }

  int dim() const { return static_cast<int>(theta0_.size()); }
  const Vector& theta0() const { return theta0_; }
  const Vector& theta1() const { return theta1_; }
  const Matrix& sigma0() const { return sigma0_; }
  const Matrix& sigma1() const { return sigma1_; }
  double prior0() const { return prior0_; }

  Vector mean_difference() const { return theta1_ - theta0_; }

  // True when sigma0 and sigma1 agree within a relative max-norm tolerance.
  bool common_covariance(double rel_tol = 1e-10) const {
    const double scale = sigma0_.cwiseAbs().maxCoeff();
    const double tol = rel_tol * (scale > 0.0 ? scale : 1.0);
    return (sigma0_ - sigma1_).cwiseAbs().maxCoeff() <= tol;
  }

 private:
  Vector theta0_, theta1_;
  Matrix sigma0_, sigma1_;
  double prior0_;
};

inline GaussianPair swap_hypotheses(const GaussianPair& p) {
  return GaussianPair(p.theta1(), p.theta0(), p.sigma1(), p.sigma0(),
                      1.0 - p.prior0());
}

// Means/covariances gathered on an index subset, in the subset's order.
// Empty selections yield size-0 structures; callers decide what that means.
struct RestrictedPair {
  Vector theta0, theta1;
  Matrix sigma0, sigma1;
};

inline RestrictedPair restrict_pair(const GaussianPair& pair,
                                    const Selection& a) {
  if (a.ground_size() != pair.dim())
    throw DimensionError("restrict_pair: selection ground size mismatch");
  const std::vector<int>& idx = a.indices();
  return RestrictedPair{subvector(pair.theta0(), idx),
                        subvector(pair.theta1(), idx),
                        submatrix(pair.sigma0(), idx),
                        submatrix(pair.sigma1(), idx)};
}

namespace detail {
inline void require_common_covariance(const GaussianPair& pair,
                                      const std::string& op) {
  if (!pair.common_covariance())
    throw ParameterError(op + ": requires a common covariance pair");
}
}  // namespace detail

// Deflection SNR of the restricted problem: s(A) = θ_Aᵀ Σ_A⁻¹ θ_A with
// θ = theta1 − theta0 and Σ the common covariance.  s(∅) = 0.
inline double snr(const GaussianPair& pair, const Selection& a) {
  detail::require_common_covariance(pair, "snr");
  if (a.ground_size() != pair.dim())
    throw DimensionError("snr: selection ground size mismatch");
  if (a.is_empty()) return 0.0;
  const std::vector<int>& idx = a.indices();
  CholeskyFactor chol(submatrix(pair.sigma0(), idx));
  return chol.quad_form_inverse(subvector(pair.mean_difference(), idx));
}

// Bhattacharyya distance of the restricted pair,
//   B = ⅛ θᵀ Σ̄_A⁻¹ θ + ½ ln( det Σ̄_A / sqrt(det Σ0_A · det Σ1_A) ),
// with Σ̄ = ½(Σ0 + Σ1) and θ the restricted mean difference.  B(∅) = 0.
inline double bhattacharyya(const GaussianPair& pair, const Selection& a) {
  if (a.ground_size() != pair.dim())
    throw DimensionError("bhattacharyya: selection ground size mismatch");
  if (a.is_empty()) return 0.0;
  const std::vector<int>& idx = a.indices();
  const Matrix avg =
      0.5 * (submatrix(pair.sigma0(), idx) + submatrix(pair.sigma1(), idx));
  CholeskyFactor chol_avg(avg);
  CholeskyFactor chol0(submatrix(pair.sigma0(), idx));
  CholeskyFactor chol1(submatrix(pair.sigma1(), idx));
  const double quad =
      chol_avg.quad_form_inverse(subvector(pair.mean_difference(), idx));
  return 0.125 * quad +
         0.5 * (chol_avg.log_det() -
                0.5 * (chol0.log_det() + chol1.log_det()));
}

// Kullback-Leibler divergence K(H1 ‖ H0) of the restricted pair,
//   K = ½ ( tr(Σ0_A⁻¹ Σ1_A) + θᵀ Σ0_A⁻¹ θ − |A| + ln det Σ0_A − ln det Σ1_A ).
// K(∅) = 0.
inline double kl_divergence(const GaussianPair& pair, const Selection& a) {
  if (a.ground_size() != pair.dim())
    throw DimensionError("kl_divergence: selection ground size mismatch");
  if (a.is_empty()) return 0.0;
  const std::vector<int>& idx = a.indices();
  const Matrix s0 = submatrix(pair.sigma0(), idx);
  const Matrix s1 = submatrix(pair.sigma1(), idx);
  CholeskyFactor chol0(s0);
  CholeskyFactor chol1(s1);
  const int k = static_cast<int>(idx.size());
  double trace = 0.0;
  for (int j = 0; j < k; ++j) trace += chol0.solve(s1.col(j))(j);
  const double quad =
      chol0.quad_form_inverse(subvector(pair.mean_difference(), idx));
  return 0.5 * (trace + quad - k + chol0.log_det() - chol1.log_det());
}

// Symmetrized divergence D_J = K(H1 ‖ H0) + K(H0 ‖ H1).
inline double j_divergence(const GaussianPair& pair, const Selection& a) {
  return kl_divergence(pair, a) + kl_divergence(swap_hypotheses(pair), a);
}

// Diagonal-shift split Σ = a·I + S with a = beta·λ_min(Σ), beta ∈ (0, 1).
// S stays positive definite (its smallest eigenvalue is (1−beta)·λ_min).
struct ShiftDecomposition {
  double a = 0.0;
  double beta = 0.0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double kappa = 0.0;  // condition number λ_max / λ_min
  Matrix s_matrix;
};

inline ShiftDecomposition shift_decompose(const Matrix& sigma,
                                          double beta = 0.5) {
  if (!(beta > 0.0 && beta < 1.0))
    throw ParameterError("shift_decompose: beta must lie in (0, 1)");
  if (!is_symmetric(sigma))
    throw ParameterError("shift_decompose: matrix must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma);
  if (eig.info() != Eigen::Success)
    throw NumericalError("shift_decompose: eigendecomposition failed");
  ShiftDecomposition d;
  d.beta = beta;
  d.lambda_min = eig.eigenvalues().minCoeff();
  d.lambda_max = eig.eigenvalues().maxCoeff();
  if (!(d.lambda_min > 0.0))
    throw NumericalError("shift_decompose: matrix is not positive definite");
  d.kappa = d.lambda_max / d.lambda_min;
  d.a = beta * d.lambda_min;
  d.s_matrix = sigma - d.a * Matrix::Identity(sigma.rows(), sigma.cols());
  return d;
}

}  // namespace sparsedet

#endif  // SPARSEDET_GAUSSIAN_MODEL_HPP_
