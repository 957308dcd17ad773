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

#ifndef SPARSEDET_SUPSUB_HPP_
#define SPARSEDET_SUPSUB_HPP_

#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sparsedet/errors.hpp"
#include "sparsedet/selection.hpp"
#include "sparsedet/set_function.hpp"

namespace sparsedet {

// Tight modular upper bound m_A ≥ h anchored at A, for submodular h.
// Variant 1:  m_A(C) = h(A) − Σ_{j∈A∖C} h({j}|A∖{j}) + Σ_{j∈C∖A} h({j}|∅).
// Variant 2:  m_A(C) = h(A) − Σ_{j∈A∖C} h({j}|V∖{j}) + (addition terms).
// Variant 2's addition terms are conditioned on the receiving set rather
// than fixed per element: standalone evaluation telescopes the outside-anchor
// additions in ascending index order starting from A∩C, and the inner greedy
// conditions each candidate on its current selection.  Both forms dominate h
// and are tight at the anchor; variant 2's addition side is exact.
class ModularBound {
 public:
  ModularBound(SetFunction h, Selection anchor, int variant)
      : h_(std::move(h)), anchor_(std::move(anchor)), variant_(variant) {
    if (variant_ != 1 && variant_ != 2)
      throw ParameterError("modular_upper_bound: variant must be 1 or 2");
    if (anchor_.ground_size() != h_.ground_size())
      throw DimensionError("modular_upper_bound: anchor ground size mismatch");
    if (h_.diverges_at_empty())
      throw ParameterError(
          "modular_upper_bound: h must be finite at the empty set");
    const int m = h_.ground_size();
    anchor_value_ = eval(anchor_);
    removal_.assign(static_cast<std::size_t>(m), 0.0);
    if (variant_ == 1) {
      for (int j : anchor_.indices())
        removal_[static_cast<std::size_t>(j)] =
            anchor_value_ - eval(without(anchor_, j));
      addition_.assign(static_cast<std::size_t>(m), 0.0);
      for (int j = 0; j < m; ++j)
        if (!anchor_.contains(j))
          addition_[static_cast<std::size_t>(j)] =
              eval(Selection::empty(m).with(j));
    } else {
      const Selection full = Selection::full(m);
      const double full_value = eval(full);
      for (int j : anchor_.indices())
        removal_[static_cast<std::size_t>(j)] =
            full_value - eval(without(full, j));
    }
  }

  // Bound value at an arbitrary set.
  double evaluate(const Selection& c) const {
    if (c.ground_size() != h_.ground_size())
      throw DimensionError("ModularBound::evaluate: ground size mismatch");
    double v = anchor_value_;
    for (int j : anchor_.indices())
      if (!c.contains(j)) v -= removal_[static_cast<std::size_t>(j)];
    if (variant_ == 1) {
      for (int j : c.indices())
        if (!anchor_.contains(j)) v += addition_[static_cast<std::size_t>(j)];
    } else {
      std::vector<int> shared;
      for (int j : c.indices())
        if (anchor_.contains(j)) shared.push_back(j);
      Selection grown(std::move(shared), h_.ground_size());
      double base = eval(grown);
      for (int j : c.sorted()) {
        if (anchor_.contains(j)) continue;
        const double next = eval(grown.with(j));
        v += next - base;
        grown.append(j);
        base = next;
      }
    }
    return v;
  }

  // Increase of the bound when j joins the inner set.  Anchor members cost
  // their removal weight; outside-anchor candidates cost the fixed singleton
  // weight (variant 1) or the caller-supplied h({j}|current) (variant 2).
  double addition_increment(int j, double h_conditional_gain) const {
    if (anchor_.contains(j)) return removal_[static_cast<std::size_t>(j)];
    return variant_ == 1 ? addition_[static_cast<std::size_t>(j)]
                         : h_conditional_gain;
  }

  // True when addition increments need h({j}|current) from the caller.
  bool needs_conditional() const { return variant_ == 2; }

  const Selection& anchor() const { return anchor_; }
  int variant() const { return variant_; }
  double constant() const { return anchor_value_; }
  const std::vector<double>& removal_weights() const { return removal_; }
  const std::vector<double>& addition_weights() const { return addition_; }
  long construction_evals() const { return construction_evals_; }

 private:
  double eval(const Selection& s) const {
    ++construction_evals_;
    return h_.evaluate(s);
  }

  static Selection without(const Selection& s, int j) {
    std::vector<int> kept;
    kept.reserve(s.indices().size());
    for (int i : s.indices())
      if (i != j) kept.push_back(i);
    return Selection(std::move(kept), s.ground_size());
  }

  SetFunction h_;
  Selection anchor_;
  int variant_;
  double anchor_value_ = 0.0;
  std::vector<double> removal_;
  std::vector<double> addition_;  // variant 1 only
  mutable long construction_evals_ = 0;
};

inline ModularBound modular_upper_bound(const SetFunction& h,
                                        const Selection& anchor, int variant) {
  return ModularBound(h, anchor, variant);
}

namespace detail {

struct InnerResult {
  Selection selection;
  long evals;
};

// Greedy maximization of g(C) − m_A(C) at |C| = k.  Variant-2 bounds get
// their addition terms from an h cursor running in lockstep (gain of the
// candidate conditioned on the current inner selection).
inline InnerResult maximize_bounded_difference(const SetFunction& g,
                                               const SetFunction& h,
                                               const ModularBound& bound,
                                               int k) {
  const int m = g.ground_size();
  std::unique_ptr<GreedyCursor> g_cursor = g.make_cursor();
  std::unique_ptr<GreedyCursor> h_cursor;
  double h_value = 0.0;
  if (bound.needs_conditional()) h_cursor = h.make_cursor();
  InnerResult result{Selection::empty(m), 0};
  double g_value = 0.0;
  for (int step = 0; step < k; ++step) {
    double best_score = -std::numeric_limits<double>::infinity();
    int best_index = -1;
    for (int j = 0; j < m; ++j) {
      if (result.selection.contains(j)) continue;
      const double g_after = checked_probe(*g_cursor, j, g.name());
      ++result.evals;
      double h_gain = 0.0;
      if (h_cursor && !bound.anchor().contains(j)) {
        h_gain = checked_probe(*h_cursor, j, h.name()) - h_value;
        ++result.evals;
      }
      const double score =
          (g_after - g_value) - bound.addition_increment(j, h_gain);
      if (score > best_score + kGainTolerance) {
        best_score = score;
        best_index = j;
      }
    }
    if (best_index < 0)
      throw NumericalError("supsub inner greedy: no evaluable candidate");
    g_cursor->commit(best_index);
    g_value = g_cursor->value();
    if (h_cursor) {
      h_cursor->commit(best_index);
      h_value = h_cursor->value();
    }
    result.selection.append(best_index);
  }
  return result;
}

}  // namespace detail

struct SupSubOptions {
  int variant_policy = 0;  // 0 = run both bounds per iteration, else 1 or 2
  int max_iterations = 50;
  double tolerance = 1e-9;  // accepted objectives may dip by at most this
  std::optional<Selection> initial;  // anchor for iteration 1; default ∅
};

struct SupSubIteration {
  int iteration;
  double objective;  // true g − h of the accepted set
  int variant;       // bound variant that produced it
  std::vector<int> set;
};

struct SupSubResult {
  Selection selection;
  double objective;
  int iterations;
  bool converged;  // true only on a fixed point (candidate == anchor)
  std::vector<SupSubIteration> log;
  long evaluations;
};

// Iterative maximization of g − h under |A| = k: each round replaces h by a
// tight modular upper bound anchored at the current set and solves the
// resulting submodular maximization greedily.  Under "both" policy the
// candidates from both bound variants are scored by the true objective and
// the better one kept (ties prefer a fixed point, then variant 1).  The
// first iteration from an empty anchor is accepted unconditionally (the
// empty set is infeasible under the cardinality constraint).  A candidate
// that strictly lowers the objective stops the run unconverged: iterating
// again from the same anchor would reproduce it.
inline SupSubResult supsub_maximize(const DsDecomposition& dec, int k,
                                    SupSubOptions options = {}) {
  if (dec.g.ground_size() != dec.h.ground_size())
    throw DimensionError("supsub_maximize: decomposition ground sizes differ");
  detail::check_subset_size(dec.g, k, "supsub_maximize");
  if (options.variant_policy < 0 || options.variant_policy > 2)
    throw ParameterError("supsub_maximize: variant policy must be 0, 1, or 2");
  if (options.max_iterations < 1)
    throw ParameterError("supsub_maximize: iteration cap must be >= 1");
  const int m = dec.g.ground_size();
  Selection anchor = options.initial.value_or(Selection::empty(m));
  if (anchor.ground_size() != m)
    throw DimensionError("supsub_maximize: initial selection ground size mismatch");
  const bool cold_start = anchor.is_empty();
  double current = cold_start ? 0.0 : dec.objective(anchor);

  std::vector<int> variants;
  if (options.variant_policy == 0)
    variants = {1, 2};
  else
    variants = {options.variant_policy};

  SupSubResult result{anchor, current, 0, false, {}, 0};
  for (int t = 1; t <= options.max_iterations; ++t) {
    result.iterations = t;
    Selection best_set = anchor;
    double best_objective = -std::numeric_limits<double>::infinity();
    int best_variant = 0;
    for (int v : variants) {
      ModularBound bound(dec.h, anchor, v);
      result.evaluations += bound.construction_evals();
      detail::InnerResult inner =
          detail::maximize_bounded_difference(dec.g, dec.h, bound, k);
      result.evaluations += inner.evals;
      const double objective = dec.objective(inner.selection);
      result.evaluations += 2;
      const bool first = best_variant == 0;
      const bool strictly_better = objective > best_objective + kGainTolerance;
      const bool tie = std::abs(objective - best_objective) <= kGainTolerance;
      const bool prefer_fixed_point = tie &&
                                      inner.selection.set_equals(anchor) &&
                                      !best_set.set_equals(anchor);
      if (first || strictly_better || prefer_fixed_point) {
        best_set = inner.selection;
        best_objective = objective;
        best_variant = v;
      }
    }
    if (best_set.set_equals(anchor)) {
      result.converged = true;
      break;
    }
    const bool accept =
        (t == 1 && cold_start) || best_objective >= current - options.tolerance;
    if (!accept) break;
    anchor = best_set;
    current = best_objective;
    result.log.push_back(
        SupSubIteration{t, best_objective, best_variant, anchor.sorted()});
  }
  result.selection = anchor;
  result.objective = current;
  return result;
}

}  // namespace sparsedet

#endif  // SPARSEDET_SUPSUB_HPP_
