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

#ifndef SPARSEDET_OBJECTIVES_HPP_
#define SPARSEDET_OBJECTIVES_HPP_

#include <memory>
#include <string>
#include <utility>

#include "sparsedet/gaussian_model.hpp"
#include "sparsedet/linalg.hpp"
#include "sparsedet/selection.hpp"
#include "sparsedet/set_function.hpp"

namespace sparsedet {
namespace detail {

// Incremental SNR cursor: maintains the Cholesky factor of Σ_A and the
// solved vector for θ_A, so each probe costs O(|A|²) instead of a fresh
// factorization.
class SnrCursor final : public GreedyCursor {
 public:
  SnrCursor(std::shared_ptr<const Matrix> sigma,
            std::shared_ptr<const Vector> theta)
      : chain_(sigma, std::move(theta)),
        selection_(Selection::empty(static_cast<int>(sigma->rows()))) {}

  double probe(int candidate) const override {
    return chain_.probe(candidate).quad_form;
  }
  void commit(int candidate) override {
    selection_.append(candidate);  // validates before the chain mutates
    chain_.append(candidate);
  }
  double value() const override { return chain_.quad_form(); }
  const Selection& selection() const override { return selection_; }

 private:
  QuadFormChain chain_;
  Selection selection_;
};

}  // namespace detail

// Deflection SNR s(A) = θ_Aᵀ Σ_A⁻¹ θ_A as a set function; s(∅) = 0 exactly.
// Requires a common covariance pair.
inline SetFunction snr_objective(const GaussianPair& pair) {
  detail::require_common_covariance(pair, "snr_objective");
  auto shared = std::make_shared<const GaussianPair>(pair);
  std::shared_ptr<const Matrix> sigma(shared, &shared->sigma0());
  auto theta = std::make_shared<const Vector>(shared->mean_difference());
  return SetFunction(
      "snr", shared->dim(),
      [shared](const Selection& a) { return snr(*shared, a); },
      /*diverges_at_empty=*/false,
      [sigma, theta]() -> std::unique_ptr<GreedyCursor> {
        return std::make_unique<detail::SnrCursor>(sigma, theta);
      });
}

// KL divergence of the restricted pair, K(H1 ‖ H0), as a set function.
inline SetFunction kl_objective(const GaussianPair& pair) {
  auto shared = std::make_shared<const GaussianPair>(pair);
  return SetFunction("kl", shared->dim(), [shared](const Selection& a) {
    return kl_divergence(*shared, a);
  });
}

// Bhattacharyya distance of the restricted pair as a set function.
inline SetFunction bhattacharyya_objective(const GaussianPair& pair) {
  auto shared = std::make_shared<const GaussianPair>(pair);
  return SetFunction("bhattacharyya", shared->dim(),
                     [shared](const Selection& a) {
                       return bhattacharyya(*shared, a);
                     });
}

// Symmetrized divergence J(A) = K(H1 ‖ H0) + K(H0 ‖ H1) as a set function.
inline SetFunction j_divergence_objective(const GaussianPair& pair) {
  auto shared = std::make_shared<const GaussianPair>(pair);
  return SetFunction("j_divergence", shared->dim(),
                     [shared](const Selection& a) {
                       return j_divergence(*shared, a);
                     });
}

// Additive (modular) set function with the given per-element weights.
inline SetFunction modular_objective(const Vector& weights,
                                     std::string name = "modular") {
  auto w = std::make_shared<const Vector>(weights);
  return SetFunction(std::move(name), static_cast<int>(w->size()),
                     [w](const Selection& a) {
                       double s = 0.0;
                       for (int i : a.indices()) s += (*w)(i);
                       return s;
                     });
}

}  // namespace sparsedet

#endif  // SPARSEDET_OBJECTIVES_HPP_
