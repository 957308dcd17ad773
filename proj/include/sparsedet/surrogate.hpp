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

#ifndef SPARSEDET_SURROGATE_HPP_
#define SPARSEDET_SURROGATE_HPP_

#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "sparsedet/gaussian_model.hpp"
#include "sparsedet/linalg.hpp"
#include "sparsedet/objectives.hpp"
#include "sparsedet/selection.hpp"
#include "sparsedet/set_function.hpp"

namespace sparsedet {

// Incremental engine for the log-determinant relaxation of the deflection
// SNR.  With Σ = a·I + S (diagonal-shift split) the relaxed objective is
//   f(A) = ln det S⁻¹ + ln det(I + a⁻¹ S_A) + ln s(A),
// where s(A) = θ_Aᵀ Σ_A⁻¹ θ_A.  Both the determinant factor and the
// quadratic form are maintained through growing Cholesky factors, so a probe
// costs O(|A|²).  f(∅) is −infinity in the limit; callers adopt the f(∅)=0
// convention via SetFunction's diverges_at_empty flag.
class SurrogateState {
 public:
  SurrogateState(std::shared_ptr<const Matrix> sigma,
                 std::shared_ptr<const Matrix> s_matrix,
                 std::shared_ptr<const Vector> theta, double a)
      : constant_(-log_det_pd(*s_matrix)),
        gamma_(s_matrix, 1.0 / a, 1.0),
        quad_(std::move(sigma), std::move(theta)) {}

  struct Advance {
    double value;  // relaxed objective after appending the candidate
    double snr;    // deflection SNR after appending the candidate
    PrincipalMinorChain::Extension gamma_ext;
    QuadFormChain::Probe quad_probe;
  };

  Advance advance(int candidate) const {
    Advance adv;
    adv.gamma_ext = gamma_.probe(candidate);
    if (!(adv.gamma_ext.schur > 0.0) || !std::isfinite(adv.gamma_ext.schur))
      throw NumericalError(
          "surrogate state: non-positive determinant pivot at index " +
          std::to_string(candidate));
    adv.quad_probe = quad_.probe(candidate);
    adv.snr = adv.quad_probe.quad_form;
    adv.value = constant_ + gamma_.log_det() + std::log(adv.gamma_ext.schur) +
                std::log(adv.snr);
    return adv;
  }

  void commit(int candidate, const Advance* precomputed = nullptr) {
    Advance local;
    const Advance* adv = precomputed;
    if (adv == nullptr) {
      local = advance(candidate);
      adv = &local;
    }
    gamma_.append(candidate, &adv->gamma_ext);
    quad_.append(candidate, &adv->quad_probe);
  }

  // 0 at ∅ by convention (the limit is −infinity).
  double value() const {
    if (size() == 0) return 0.0;
    return constant_ + gamma_.log_det() + std::log(quad_.quad_form());
  }
  double snr() const { return quad_.quad_form(); }
  double constant() const { return constant_; }
  int size() const { return gamma_.size(); }
  const std::vector<int>& indices() const { return gamma_.indices(); }
  std::uint64_t op_count() const {
    return gamma_.op_count() + quad_.op_count();
  }

 private:
  double constant_;  // ln det S⁻¹
  PrincipalMinorChain gamma_;
  QuadFormChain quad_;
};

namespace detail {

class SurrogateCursor final : public GreedyCursor {
 public:
  SurrogateCursor(std::shared_ptr<const Matrix> sigma,
                  std::shared_ptr<const Matrix> s_matrix,
                  std::shared_ptr<const Vector> theta, double a, int m)
      : state_(std::move(sigma), std::move(s_matrix), std::move(theta), a),
        selection_(Selection::empty(m)) {}

  double probe(int candidate) const override {
    cache_ = state_.advance(candidate);
    cached_candidate_ = candidate;
    return cache_.value;
  }
  void commit(int candidate) override {
    selection_.append(candidate);  // validates before the chain mutates
    state_.commit(candidate,
                  cached_candidate_ == candidate ? &cache_ : nullptr);
    cached_candidate_ = -1;
  }
  double value() const override { return state_.value(); }
  const Selection& selection() const override { return selection_; }

 private:
  SurrogateState state_;
  Selection selection_;
  mutable SurrogateState::Advance cache_;
  mutable int cached_candidate_ = -1;
};

class LogDetCursor final : public GreedyCursor {
 public:
  explicit LogDetCursor(std::shared_ptr<const Matrix> sigma)
      : chain_(sigma, 1.0, 0.0),
        selection_(Selection::empty(static_cast<int>(sigma->rows()))) {}

  double probe(int candidate) const override {
    const PrincipalMinorChain::Extension ext = chain_.probe(candidate);
    if (!(ext.schur > 0.0) || !std::isfinite(ext.schur))
      throw NumericalError("log-det cursor: non-positive pivot at index " +
                           std::to_string(candidate));
    return chain_.log_det() + std::log(ext.schur);
  }
  void commit(int candidate) override {
    selection_.append(candidate);  // validates before the chain mutates
    chain_.append(candidate);
  }
  double value() const override { return chain_.log_det(); }
  const Selection& selection() const override { return selection_; }

 private:
  PrincipalMinorChain chain_;
  Selection selection_;
};

class TraceSurrogateCursor final : public GreedyCursor {
 public:
  TraceSurrogateCursor(std::shared_ptr<const Matrix> sigma,
                       std::shared_ptr<const Matrix> s_matrix,
                       std::shared_ptr<const Matrix> psi, double a,
                       double constant, int m)
      : gamma_(std::move(s_matrix), 1.0 / a, 1.0),
        quads_(std::move(sigma), std::move(psi)),
        constant_(constant),
        m_(m),
        selection_(Selection::empty(m)) {}

  double probe(int candidate) const override {
    gamma_cache_ = gamma_.probe(candidate);
    if (!(gamma_cache_.schur > 0.0) || !std::isfinite(gamma_cache_.schur))
      throw NumericalError(
          "trace surrogate: non-positive determinant pivot at index " +
          std::to_string(candidate));
    quad_cache_ = quads_.probe(candidate);
    cached_candidate_ = candidate;
    double v = static_cast<double>(m_) *
               (constant_ + gamma_.log_det() + std::log(gamma_cache_.schur));
    for (double q : quad_cache_.quads) v += std::log(q);
    return v;
  }
  void commit(int candidate) override {
    selection_.append(candidate);  // validates before the chains mutate
    if (cached_candidate_ == candidate) {
      gamma_.append(candidate, &gamma_cache_);
      quads_.append(candidate, &quad_cache_);
    } else {
      gamma_.append(candidate);
      quads_.append(candidate);
    }
    cached_candidate_ = -1;
  }
  double value() const override {
    if (selection_.is_empty()) return 0.0;
    double v = static_cast<double>(m_) * (constant_ + gamma_.log_det());
    for (double q : quads_.quad_forms()) v += std::log(q);
    return v;
  }
  const Selection& selection() const override { return selection_; }

 private:
  PrincipalMinorChain gamma_;
  MultiQuadChain quads_;
  double constant_;
  int m_;
  Selection selection_;
  mutable PrincipalMinorChain::Extension gamma_cache_;
  mutable MultiQuadChain::Probe quad_cache_;
  mutable int cached_candidate_ = -1;
};

class SumCursor final : public GreedyCursor {
 public:
  SumCursor(std::vector<double> weights,
            std::vector<std::unique_ptr<GreedyCursor>> children, int m)
      : weights_(std::move(weights)),
        children_(std::move(children)),
        selection_(Selection::empty(m)) {}

  double probe(int candidate) const override {
    double v = 0.0;
    for (std::size_t j = 0; j < children_.size(); ++j)
      v += weights_[j] * children_[j]->probe(candidate);
    return v;
  }
  void commit(int candidate) override {
    selection_.append(candidate);  // validates before the children mutate
    for (auto& child : children_) child->commit(candidate);
  }
  double value() const override {
    double v = 0.0;
    for (std::size_t j = 0; j < children_.size(); ++j)
      v += weights_[j] * children_[j]->value();
    return v;
  }
  const Selection& selection() const override { return selection_; }

 private:
  std::vector<double> weights_;
  std::vector<std::unique_ptr<GreedyCursor>> children_;
  Selection selection_;
};

}  // namespace detail

// Gaussian entropy-style objective ln det(Σ_A); submodular and normalized
// (value 0 at ∅).  Probes run off an incremental Cholesky factor.
inline SetFunction logdet_objective(const Matrix& sigma,
                                    std::string name = "logdet") {
  if (!is_symmetric(sigma))
    throw ParameterError("logdet_objective: matrix must be symmetric");
  CholeskyFactor validate(sigma);  // fail fast on non-PD input
  auto shared = std::make_shared<const Matrix>(sigma);
  const int m = static_cast<int>(shared->rows());
  return SetFunction(
      std::move(name), m,
      [shared](const Selection& a) {
        if (a.is_empty()) return 0.0;
        return log_det_pd(submatrix(*shared, a.indices()));
      },
      /*diverges_at_empty=*/false,
      [shared]() -> std::unique_ptr<GreedyCursor> {
        return std::make_unique<detail::LogDetCursor>(shared);
      });
}

// Weighted sum of set functions over a shared ground set; cursors fan out to
// the children so incremental probes stay incremental.
struct WeightedTerm {
  double weight;
  SetFunction term;
};

inline SetFunction combine(std::string name, std::vector<WeightedTerm> terms) {
  if (terms.empty()) throw ParameterError("combine: no terms");
  const int m = terms.front().term.ground_size();
  bool diverges = false;
  for (const WeightedTerm& t : terms) {
    if (t.term.ground_size() != m)
      throw DimensionError("combine: mismatched ground sizes");
    diverges = diverges || t.term.diverges_at_empty();
  }
  auto shared =
      std::make_shared<const std::vector<WeightedTerm>>(std::move(terms));
  return SetFunction(
      std::move(name), m,
      [shared](const Selection& a) {
        double v = 0.0;
        for (const WeightedTerm& t : *shared) v += t.weight * t.term.evaluate(a);
        return v;
      },
      diverges,
      [shared, m]() -> std::unique_ptr<GreedyCursor> {
        std::vector<double> weights;
        std::vector<std::unique_ptr<GreedyCursor>> children;
        weights.reserve(shared->size());
        children.reserve(shared->size());
        for (const WeightedTerm& t : *shared) {
          weights.push_back(t.weight);
          children.push_back(t.term.make_cursor());
        }
        return std::make_unique<detail::SumCursor>(std::move(weights),
                                                   std::move(children), m);
      });
}

// Log-det relaxation of the deflection SNR, packaged as a set function with
// its diagonal-shift certificate.  The additive constant ln det S⁻¹ makes
// values comparable across subset sizes of one instance.
struct SurrogateHandles {
  SetFunction objective;
  ShiftDecomposition decomposition;
  double log_det_s_inverse;
};

inline SurrogateHandles snr_surrogate(const GaussianPair& pair,
                                      double beta = 0.5) {
  detail::require_common_covariance(pair, "snr_surrogate");
  ShiftDecomposition decomp = shift_decompose(pair.sigma0(), beta);
  auto sigma = std::make_shared<const Matrix>(pair.sigma0());
  auto s_matrix = std::make_shared<const Matrix>(decomp.s_matrix);
  auto theta = std::make_shared<const Vector>(pair.mean_difference());
  const double constant = -log_det_pd(*s_matrix);
  const double a = decomp.a;
  const int m = pair.dim();
  SetFunction::Evaluator eval = [sigma, s_matrix, theta, constant,
                                 a](const Selection& sel) {
    if (sel.is_empty()) return 0.0;
    const std::vector<int>& idx = sel.indices();
    CholeskyFactor sigma_chol(submatrix(*sigma, idx));
    const double s = sigma_chol.quad_form_inverse(subvector(*theta, idx));
    Matrix scaled = submatrix(*s_matrix, idx) / a;
    scaled.diagonal().array() += 1.0;
    return constant + log_det_pd(scaled) + std::log(s);
  };
  SetFunction::CursorFactory factory = [sigma, s_matrix, theta, a,
                                        m]() -> std::unique_ptr<GreedyCursor> {
    return std::make_unique<detail::SurrogateCursor>(sigma, s_matrix, theta,
                                                     a, m);
  };
  return SurrogateHandles{SetFunction("snr_surrogate", m, std::move(eval),
                                      /*diverges_at_empty=*/true,
                                      std::move(factory)),
                          std::move(decomp), constant};
}

// Greedy ascent on the SNR relaxation, recording the true deflection SNR of
// every intermediate selection alongside the relaxed values.  The same probe
// sweep yields a second solution for free: the final step's best-SNR
// candidate appended to the chain prefix.  Callers can report whichever of
// the two selections detects better.
struct SurrogateGreedyResult {
  GreedyTrace trace;              // steps report the relaxed objective
  std::vector<double> snr_chain;  // deflection SNR after each step
  Selection snr_alternative;      // chain prefix + best-SNR final pick
  double snr_alternative_value;   // deflection SNR of snr_alternative
};

inline SurrogateGreedyResult surrogate_greedy(const GaussianPair& pair, int k,
                                              double beta = 0.5) {
  detail::require_common_covariance(pair, "surrogate_greedy");
  if (k < 1 || k > pair.dim())
    throw ParameterError("surrogate_greedy: subset size out of range");
  ShiftDecomposition decomp = shift_decompose(pair.sigma0(), beta);
  auto sigma = std::make_shared<const Matrix>(pair.sigma0());
  auto s_matrix = std::make_shared<const Matrix>(decomp.s_matrix);
  auto theta = std::make_shared<const Vector>(pair.mean_difference());
  SurrogateState state(sigma, s_matrix, theta, decomp.a);
  SurrogateGreedyResult result{GreedyTrace{{}, Selection::empty(pair.dim())},
                               {},
                               Selection::empty(pair.dim()),
                               0.0};
  double previous = 0.0;
  int snr_best_index = -1;
  double snr_best_value = 0.0;
  for (int step = 0; step < k; ++step) {
    double best_value = -std::numeric_limits<double>::infinity();
    int best_index = -1;
    SurrogateState::Advance best;
    int evals = 0;
    snr_best_index = -1;
    snr_best_value = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < pair.dim(); ++i) {
      if (result.trace.final.contains(i)) continue;
      SurrogateState::Advance adv = state.advance(i);
      ++evals;
      if (adv.value > best_value + kGainTolerance) {
        best_value = adv.value;
        best_index = i;
      }
      if (adv.snr > snr_best_value + kGainTolerance) {
        snr_best_value = adv.snr;
        snr_best_index = i;
      }
      if (best_index == i) best = std::move(adv);
    }
    if (best_index < 0)
      throw NumericalError("surrogate_greedy: no evaluable candidate");
    state.commit(best_index, &best);
    result.trace.steps.push_back(
        GreedyStep{best_index, best_value, best_value - previous, evals});
    result.trace.final.append(best_index);
    result.snr_chain.push_back(best.snr);
    previous = best_value;
  }
  std::vector<int> alt(result.trace.final.indices());
  alt.back() = snr_best_index;
  result.snr_alternative = Selection(std::move(alt), pair.dim());
  result.snr_alternative_value = snr_best_value;
  return result;
}

// Log-det relaxation of the trace term tr(Σb_A⁻¹ Σo_A), used where the
// exact trace couples into difference-of-submodular objectives.  Writing
// Ψ = Σo^{1/2} (symmetric square root, columns ψ₁..ψ_M) the exact trace is
// Σᵢ (ψᵢ)_Aᵀ Σb_A⁻¹ (ψᵢ)_A; each quadratic form is relaxed exactly like the
// SNR objective under the split Σb = a·I + S:
//   q̃(A) = M·(ln det S⁻¹ + ln det(I + a⁻¹ S_A)) + Σᵢ ln (ψᵢ)_Aᵀ Σb_A⁻¹ (ψᵢ)_A.
// Diverges at ∅ (same convention as snr_surrogate).
inline SetFunction trace_surrogate(const Matrix& sigma_base,
                                   const Matrix& sigma_other,
                                   double beta = 0.5,
                                   std::string name = "trace_surrogate") {
  if (sigma_base.rows() != sigma_other.rows() ||
      sigma_base.cols() != sigma_other.cols())
    throw DimensionError("trace_surrogate: matrix dimension mismatch");
  ShiftDecomposition decomp = shift_decompose(sigma_base, beta);
  auto sigma = std::make_shared<const Matrix>(sigma_base);
  auto s_matrix = std::make_shared<const Matrix>(decomp.s_matrix);
  auto psi = std::make_shared<const Matrix>(symmetric_sqrt(sigma_other));
  const double a = decomp.a;
  const double constant = -log_det_pd(*s_matrix);
  const int m = static_cast<int>(sigma_base.rows());
  SetFunction::Evaluator eval = [sigma, s_matrix, psi, a, constant,
                                 m](const Selection& sel) {
    if (sel.is_empty()) return 0.0;
    const std::vector<int>& idx = sel.indices();
    CholeskyFactor sigma_chol(submatrix(*sigma, idx));
    Matrix scaled = submatrix(*s_matrix, idx) / a;
    scaled.diagonal().array() += 1.0;
    double v = static_cast<double>(m) * (constant + log_det_pd(scaled));
    for (int j = 0; j < m; ++j) {
      const Vector column = psi->col(j);
      v += std::log(sigma_chol.quad_form_inverse(subvector(column, idx)));
    }
    return v;
  };
  SetFunction::CursorFactory factory =
      [sigma, s_matrix, psi, a, constant,
       m]() -> std::unique_ptr<GreedyCursor> {
    return std::make_unique<detail::TraceSurrogateCursor>(
        sigma, s_matrix, psi, a, constant, m);
  };
  return SetFunction(std::move(name), m, std::move(eval),
                     /*diverges_at_empty=*/true, std::move(factory));
}

// Exact trace term tr(Σb_A⁻¹ Σo_A) as a set function; 0 at ∅.
inline SetFunction trace_term(const Matrix& sigma_base,
                              const Matrix& sigma_other,
                              std::string name = "trace_term") {
  if (sigma_base.rows() != sigma_other.rows() ||
      sigma_base.cols() != sigma_other.cols())
    throw DimensionError("trace_term: matrix dimension mismatch");
  CholeskyFactor validate(sigma_base);  // fail fast on non-PD input
  auto base = std::make_shared<const Matrix>(sigma_base);
  auto other = std::make_shared<const Matrix>(sigma_other);
  const int m = static_cast<int>(sigma_base.rows());
  return SetFunction(std::move(name), m, [base, other](const Selection& a) {
    if (a.is_empty()) return 0.0;
    const std::vector<int>& idx = a.indices();
    CholeskyFactor chol(submatrix(*base, idx));
    const Matrix sub = submatrix(*other, idx);
    double trace = 0.0;
    for (int j = 0; j < static_cast<int>(idx.size()); ++j) {
      const Vector column = sub.col(j);
      trace += chol.solve(column)(j);
    }
    return trace;
  });
}

// Difference-of-submodular split of the Bhattacharyya distance (covariance
// part): g = ½ ln det Σ̄_A, h = ¼(ln det Σ0_A + ln det Σ1_A), Σ̄ = ½(Σ0+Σ1).
inline DsDecomposition bhattacharyya_decomposition(const GaussianPair& pair) {
  const Matrix avg = 0.5 * (pair.sigma0() + pair.sigma1());
  SetFunction g =
      combine("bhattacharyya_g",
              {WeightedTerm{0.5, logdet_objective(avg, "logdet_avg")}});
  SetFunction h = combine(
      "bhattacharyya_h",
      {WeightedTerm{0.25, logdet_objective(pair.sigma0(), "logdet_h0")},
       WeightedTerm{0.25, logdet_objective(pair.sigma1(), "logdet_h1")}});
  return DsDecomposition{std::move(g), std::move(h), "bhattacharyya"};
}

// Difference-of-submodular split of the covariance KL objective with the
// trace term replaced by its log-det relaxation:
//   g = ½ ln det Σ0_A + ½ q̃(A),   h = ½ ln det Σ1_A.
// The |A|/2 term is modular and constant under a fixed subset size, so it is
// dropped.  g inherits the divergence-at-∅ convention from q̃.
inline DsDecomposition kl_sub_decomposition(const GaussianPair& pair,
                                            double beta = 0.5) {
  SetFunction g = combine(
      "kl_sub_g",
      {WeightedTerm{0.5, logdet_objective(pair.sigma0(), "logdet_h0")},
       WeightedTerm{0.5, trace_surrogate(pair.sigma0(), pair.sigma1(), beta)}});
  SetFunction h =
      combine("kl_sub_h",
              {WeightedTerm{0.5, logdet_objective(pair.sigma1(), "logdet_h1")}});
  return DsDecomposition{std::move(g), std::move(h), "kl_sub"};
}

// Difference-of-submodular split of the exact covariance KL objective:
//   KL(A) = ½[tr(Σ0_A⁻¹ Σ1_A) − |A| + ln det Σ0_A − ln det Σ1_A]
//         = g(A) − h(A),
//   g = ½ ln det Σ0_A,   h = ½ ln det Σ1_A + |A|/2 − ½ tr(Σ0_A⁻¹ Σ1_A).
// h is submodular because the trace term is supermodular.
inline DsDecomposition kl_direct_decomposition(const GaussianPair& pair) {
  const int m = pair.dim();
  SetFunction g =
      combine("kl_direct_g",
              {WeightedTerm{0.5, logdet_objective(pair.sigma0(), "logdet_h0")}});
  SetFunction h = combine(
      "kl_direct_h",
      {WeightedTerm{0.5, logdet_objective(pair.sigma1(), "logdet_h1")},
       WeightedTerm{0.5, modular_objective(Vector::Ones(m), "cardinality")},
       WeightedTerm{-0.5, trace_term(pair.sigma0(), pair.sigma1())}});
  return DsDecomposition{std::move(g), std::move(h), "kl_direct"};
}

// Submodular relaxation of the symmetrized divergence: both trace terms of
//   J(A) = ½[tr(Σ0_A⁻¹ Σ1_A) + tr(Σ1_A⁻¹ Σ0_A)] − |A|
// are replaced by their log-det relaxations and the modular |A| is dropped.
inline SetFunction jdiv_surrogate(const GaussianPair& pair, double beta = 0.5) {
  return combine(
      "jdiv_surrogate",
      {WeightedTerm{0.5, trace_surrogate(pair.sigma0(), pair.sigma1(), beta,
                                         "trace_surrogate_01")},
       WeightedTerm{0.5, trace_surrogate(pair.sigma1(), pair.sigma0(), beta,
                                         "trace_surrogate_10")}});
}

}  // namespace sparsedet

#endif  // SPARSEDET_SURROGATE_HPP_
