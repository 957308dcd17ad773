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

#ifndef SPARSEDET_SET_FUNCTION_HPP_
#define SPARSEDET_SET_FUNCTION_HPP_

#include <functional>
#include <limits>
#include <memory>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "sparsedet/errors.hpp"
#include "sparsedet/gaussian_model.hpp"
#include "sparsedet/selection.hpp"

namespace sparsedet {

// Absolute tolerance when comparing candidate gains; gains closer than this
// are ties and the smallest index wins.
inline constexpr double kGainTolerance = 1e-12;

// Stateful search cursor over a growing selection.  probe(i) returns the
// function value of selection ∪ {i} without mutating the cursor, so probes
// over distinct candidates may run concurrently on one frozen cursor;
// commit(i) extends the selection and requires exclusive access.
class GreedyCursor {
 public:
  virtual ~GreedyCursor() = default;
  virtual double probe(int candidate) const = 0;
  virtual void commit(int candidate) = 0;
  virtual double value() const = 0;
  virtual const Selection& selection() const = 0;
};

// Evaluable set function over a fixed ground set, normalized to
// evaluate(∅) = 0.  When `diverges_at_empty` is set, the reported value at ∅
// is a normalization convention for a function whose true limit there is
// −infinity (log-determinants of singular bordered matrices); marginal gains
// out of the empty set are then treated as +infinity by the sweep utilities
// and by lazy gain caching.
//
// Handles without a dedicated cursor factory get a restart cursor that
// re-evaluates from scratch per probe.  Candidate subsampling (stochastic
// variants) can be layered on top of the cursor interface by callers; it is
// not provided here.
class SetFunction {
 public:
  using Evaluator = std::function<double(const Selection&)>;
  using CursorFactory = std::function<std::unique_ptr<GreedyCursor>()>;

  SetFunction(std::string name, int ground_size, Evaluator evaluate,
              bool diverges_at_empty = false,
              CursorFactory cursor_factory = nullptr)
      : name_(std::move(name)),
        ground_size_(ground_size),
        evaluate_(std::move(evaluate)),
        diverges_at_empty_(diverges_at_empty),
        cursor_factory_(std::move(cursor_factory)) {
    if (ground_size_ < 1)
      throw DimensionError("SetFunction: ground size must be >= 1");
    if (!evaluate_) throw ParameterError("SetFunction: missing evaluator");
  }

  const std::string& name() const { return name_; }
  int ground_size() const { return ground_size_; }
  bool diverges_at_empty() const { return diverges_at_empty_; }

  double evaluate(const Selection& a) const {
    if (a.ground_size() != ground_size_)
      throw DimensionError("SetFunction::evaluate: ground size mismatch");
    return evaluate_(a);
  }

  // f(base ∪ {i}) − f(base); +infinity out of ∅ for diverging handles.
  double marginal_gain(const Selection& base, int i) const {
    if (base.is_empty() && diverges_at_empty_)
      return std::numeric_limits<double>::infinity();
    return evaluate(base.with(i)) - evaluate(base);
  }

  std::unique_ptr<GreedyCursor> make_cursor() const;

 private:
  std::string name_;
  int ground_size_;
  Evaluator evaluate_;
  bool diverges_at_empty_;
  CursorFactory cursor_factory_;
};

namespace detail {

class RestartCursor final : public GreedyCursor {
 public:
  RestartCursor(SetFunction::Evaluator evaluate, int ground_size)
      : evaluate_(std::move(evaluate)), current_(Selection::empty(ground_size)) {}

  double probe(int candidate) const override {
    return evaluate_(current_.with(candidate));
  }
  void commit(int candidate) override {
    value_ = evaluate_(current_.with(candidate));
    current_.append(candidate);
  }
  double value() const override { return value_; }
  const Selection& selection() const override { return current_; }

 private:
  SetFunction::Evaluator evaluate_;
  Selection current_;
  double value_ = 0.0;
};

}  // namespace detail

inline std::unique_ptr<GreedyCursor> SetFunction::make_cursor() const {
  if (cursor_factory_) return cursor_factory_();
  return std::make_unique<detail::RestartCursor>(evaluate_, ground_size_);
}

// A submodular/supermodular difference target: objective(A) = g(A) − h(A).
struct DsDecomposition {
  SetFunction g;
  SetFunction h;
  std::string label;

  double objective(const Selection& a) const {
    return g.evaluate(a) - h.evaluate(a);
  }
};

// One accepted greedy step.
struct GreedyStep {
  int index;     // chosen element
  double value;  // objective value after the step
  double gain;   // value − previous value
  int evals;     // candidate evaluations spent on this step
};

// Full record of a greedy run; `final` duplicates the returned selection so
// serialized traces are self-contained.
struct GreedyTrace {
  std::vector<GreedyStep> steps;
  Selection final;

  double value() const { return steps.empty() ? 0.0 : steps.back().value; }
  long total_evals() const {
    long n = 0;
    for (const GreedyStep& s : steps) n += s.evals;
    return n;
  }
};

namespace detail {

inline void check_subset_size(const SetFunction& f, int k,
                              const std::string& op) {
  if (k < 1 || k > f.ground_size())
    throw ParameterError(op + ": subset size " + std::to_string(k) +
                         " out of range [1, " +
                         std::to_string(f.ground_size()) + "]");
}

inline double checked_probe(const GreedyCursor& cursor, int candidate,
                            const std::string& name) {
  try {
    return cursor.probe(candidate);
  } catch (const std::exception& e) {
    throw EvaluationError(name + ": evaluation failed at candidate " +
                          std::to_string(candidate) + ": " + e.what());
  }
}

}  // namespace detail

// Plain greedy ascent: k steps of argmax_a f(A ∪ {a}).  Ties within
// kGainTolerance resolve to the smallest index.  Runs exactly k steps
// regardless of gain signs (cardinality-constrained argmax).
inline GreedyTrace greedy_maximize(const SetFunction& f, int k) {
  detail::check_subset_size(f, k, "greedy_maximize");
  std::unique_ptr<GreedyCursor> cursor = f.make_cursor();
  GreedyTrace trace{{}, Selection::empty(f.ground_size())};
  double previous = 0.0;
  for (int step = 0; step < k; ++step) {
    double best_value = -std::numeric_limits<double>::infinity();
    int best_index = -1;
    int evals = 0;
    for (int i = 0; i < f.ground_size(); ++i) {
      if (cursor->selection().contains(i)) continue;
      const double v = detail::checked_probe(*cursor, i, f.name());
      ++evals;
      if (v > best_value + kGainTolerance) {
        best_value = v;
        best_index = i;
      }
    }
    if (best_index < 0)
      throw NumericalError("greedy_maximize: no evaluable candidate");
    cursor->commit(best_index);
    trace.steps.push_back(
        GreedyStep{best_index, best_value, best_value - previous, evals});
    trace.final.append(best_index);
    previous = best_value;
  }
  return trace;
}

// Lazy greedy (priority queue of cached gains).  For submodular f this
// returns exactly the same chain as greedy_maximize, including the
// smallest-index tie rule: once the queue's top is fresh, every entry whose
// cached bound could still tie within kGainTolerance is refreshed before the
// winner is picked.  Cached gains only overestimate under submodularity, so
// no candidate outside that refresh window can tie or win.  For functions
// whose value at ∅ is a divergence convention, gains measured at ∅ are not
// cacheable (the true gain there is +infinity), so all bounds are reset
// after the first commit.  Behavior on non-submodular inputs is unspecified.
inline GreedyTrace lazy_greedy_maximize(const SetFunction& f, int k) {
  detail::check_subset_size(f, k, "lazy_greedy_maximize");
  std::unique_ptr<GreedyCursor> cursor = f.make_cursor();
  GreedyTrace trace{{}, Selection::empty(f.ground_size())};

  struct Entry {
    double bound;  // cached gain (upper bound for later rounds)
    int index;
    int round;  // round the bound was computed in
  };
  struct Order {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.bound != b.bound) return a.bound < b.bound;
      return a.index > b.index;  // smaller index surfaces first
    }
  };
  const double inf = std::numeric_limits<double>::infinity();
  std::priority_queue<Entry, std::vector<Entry>, Order> heap;
  for (int i = 0; i < f.ground_size(); ++i) heap.push(Entry{inf, i, -1});

  double previous = 0.0;
  for (int step = 0; step < k; ++step) {
    if (step == 1 && f.diverges_at_empty()) {
      // Gains measured against the empty set are not upper bounds for later
      // rounds; start over with uncomputed bounds.
      std::priority_queue<Entry, std::vector<Entry>, Order> fresh;
      while (!heap.empty()) {
        fresh.push(Entry{inf, heap.top().index, -1});
        heap.pop();
      }
      heap.swap(fresh);
    }
    int evals = 0;
    const auto refresh = [&](int index) {
      const double gain =
          detail::checked_probe(*cursor, index, f.name()) - previous;
      ++evals;
      return Entry{gain, index, step};
    };
    int chosen = -1;
    double chosen_gain = 0.0;
    while (chosen < 0) {
      Entry top = heap.top();
      heap.pop();
      if (top.round != step) {
        heap.push(refresh(top.index));
        continue;
      }
      // Fresh maximum; refresh everything that could still tie.
      std::vector<Entry> contenders{top};
      while (!heap.empty() && heap.top().bound >= top.bound - kGainTolerance) {
        Entry e = heap.top();
        heap.pop();
        contenders.push_back(e.round == step ? e : refresh(e.index));
      }
      int best = top.index;
      for (const Entry& e : contenders)
        if (e.bound >= top.bound - kGainTolerance && e.index < best)
          best = e.index;
      for (const Entry& e : contenders)
        if (e.index != best) heap.push(e);
      chosen = best;
      for (const Entry& e : contenders)
        if (e.index == best) chosen_gain = e.bound;
    }
    cursor->commit(chosen);
    previous += chosen_gain;
    trace.steps.push_back(GreedyStep{chosen, previous, chosen_gain, evals});
    trace.final.append(chosen);
  }
  return trace;
}

struct ThresholdResult {
  Selection selection;
  double value;
  bool feasible;
  GreedyTrace trace;
};

// Greedy steps until the objective reaches `lambda` or `max_k` elements are
// selected.  Infeasible runs return the max_k-element chain flagged
// feasible = false.
inline ThresholdResult greedy_until_threshold(const SetFunction& f,
                                              double lambda, int max_k) {
  detail::check_subset_size(f, max_k, "greedy_until_threshold");
  if (lambda < 0.0)
    throw ParameterError("greedy_until_threshold: lambda must be >= f(empty) = 0");
  GreedyTrace trace{{}, Selection::empty(f.ground_size())};
  if (0.0 >= lambda)
    return ThresholdResult{trace.final, 0.0, true, std::move(trace)};
  std::unique_ptr<GreedyCursor> cursor = f.make_cursor();
  double previous = 0.0;
  for (int step = 0; step < max_k; ++step) {
    double best_value = -std::numeric_limits<double>::infinity();
    int best_index = -1;
    int evals = 0;
    for (int i = 0; i < f.ground_size(); ++i) {
      if (cursor->selection().contains(i)) continue;
      const double v = detail::checked_probe(*cursor, i, f.name());
      ++evals;
      if (v > best_value + kGainTolerance) {
        best_value = v;
        best_index = i;
      }
    }
    if (best_index < 0)
      throw NumericalError("greedy_until_threshold: no evaluable candidate");
    cursor->commit(best_index);
    trace.steps.push_back(
        GreedyStep{best_index, best_value, best_value - previous, evals});
    trace.final.append(best_index);
    previous = best_value;
    if (previous >= lambda)
      return ThresholdResult{trace.final, previous, true, std::move(trace)};
  }
  return ThresholdResult{trace.final, previous, false, std::move(trace)};
}

// Certified approximate-submodularity constant for the SNR objective under a
// diagonal-shift split Σ = a·I + S:
//   ε ≤ 4·C₁·(a + κ·λ_max/β),  C₁ = ‖S⁻¹θ‖².
struct EpsilonCertificate {
  double epsilon;
  double c1;
  double a;
  double beta;
  double kappa;
  double lambda_max;
};

inline EpsilonCertificate epsilon_bound(const ShiftDecomposition& decomp,
                                        const Vector& theta) {
  if (theta.size() != decomp.s_matrix.rows())
    throw DimensionError("epsilon_bound: theta dimension mismatch");
  CholeskyFactor chol(decomp.s_matrix);
  const double c1 = chol.solve(theta).squaredNorm();
  EpsilonCertificate cert;
  cert.c1 = c1;
  cert.a = decomp.a;
  cert.beta = decomp.beta;
  cert.kappa = decomp.kappa;
  cert.lambda_max = decomp.lambda_max;
  cert.epsilon =
      4.0 * c1 * (decomp.a + decomp.kappa * decomp.lambda_max / decomp.beta);
  return cert;
}

// Certified upper bound on the optimal value implied by an ε-submodular
// greedy run: optimum ≤ (f_greedy + K·ε) / (1 − 1/e).
inline double near_optimality_gap(double f_greedy, int k, double epsilon) {
  if (k < 1) throw ParameterError("near_optimality_gap: k must be >= 1");
  if (epsilon < 0.0)
    throw ParameterError("near_optimality_gap: epsilon must be >= 0");
  return (f_greedy + static_cast<double>(k) * epsilon) /
         (1.0 - std::exp(-1.0));
}

namespace detail {

inline std::vector<double> value_table(const SetFunction& f,
                                       const std::string& op) {
  const int m = f.ground_size();
  if (m > 15)
    throw ParameterError(op + ": exhaustive sweep limited to ground sets of "
                              "at most 15 elements");
  const std::uint32_t full = std::uint32_t{1} << m;
  std::vector<double> val(full);
  for (std::uint32_t mask = 0; mask < full; ++mask)
    val[mask] = f.evaluate(Selection::from_mask(mask, m));
  return val;
}

}  // namespace detail

// Smallest ε such that gain(v | B) ≤ gain(v | A) + ε over all A ⊆ B ⊂ V,
// v ∉ B, measured exhaustively; 0 iff the instance is submodular.  Gains out
// of ∅ are +infinity for diverging handles (see SetFunction), which removes
// the empty anchor exactly where the normalized value at ∅ is conventional.
inline double empirical_epsilon(const SetFunction& f) {
  const int m = f.ground_size();
  const std::vector<double> val = detail::value_table(f, "empirical_epsilon");
  const std::uint32_t full = std::uint32_t{1} << m;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> gain(full), min_gain(full);
  double eps = 0.0;
  for (int v = 0; v < m; ++v) {
    const std::uint32_t bit = std::uint32_t{1} << v;
    for (std::uint32_t mask = 0; mask < full; ++mask) {
      if (mask & bit) continue;
      gain[mask] = (mask == 0 && f.diverges_at_empty())
                       ? inf
                       : val[mask | bit] - val[mask];
      min_gain[mask] = gain[mask];
      // Increasing mask order: all sub-masks are already final.
      for (int j = 0; j < m; ++j)
        if (mask & (std::uint32_t{1} << j))
          min_gain[mask] =
              std::min(min_gain[mask], min_gain[mask ^ (std::uint32_t{1} << j)]);
      if (mask != 0 && std::isfinite(gain[mask]))
        eps = std::max(eps, gain[mask] - min_gain[mask]);
    }
  }
  return std::max(0.0, eps);
}

// Smallest marginal gain over all (A, v ∉ A), measured exhaustively;
// >= 0 iff the instance is monotone non-decreasing.  Gains out of ∅ follow
// the same divergence semantics as empirical_epsilon.
inline double worst_marginal_gain(const SetFunction& f) {
  const int m = f.ground_size();
  const std::vector<double> val =
      detail::value_table(f, "worst_marginal_gain");
  const std::uint32_t full = std::uint32_t{1} << m;
  double worst = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < full; ++mask) {
    if (mask == 0 && f.diverges_at_empty()) continue;
    for (int v = 0; v < m; ++v) {
      const std::uint32_t bit = std::uint32_t{1} << v;
      if (mask & bit) continue;
      worst = std::min(worst, val[mask | bit] - val[mask]);
    }
  }
  return worst;
}

}  // namespace sparsedet

#endif  // SPARSEDET_SET_FUNCTION_HPP_
