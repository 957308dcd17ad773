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

#ifndef SPARSEDET_EXPERIMENT_HPP_
#define SPARSEDET_EXPERIMENT_HPP_

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "sparsedet/io.hpp"
#include "sparsedet/objectives.hpp"
#include "sparsedet/oracle.hpp"
#include "sparsedet/scenarios.hpp"
#include "sparsedet/set_function.hpp"
#include "sparsedet/supsub.hpp"
#include "sparsedet/surrogate.hpp"

namespace sparsedet {

enum class Method {
  kGreedySnr,
  kSurrogate,
  kKlGreedy,
  kSupsubKl,
  kSupsubSurrogate,
  kSupsubBhatt,
  kJdivGreedy,
  kExhaustive,
};

inline constexpr Method kAllMethods[] = {
    Method::kGreedySnr,   Method::kSurrogate,       Method::kKlGreedy,
    Method::kSupsubKl,    Method::kSupsubSurrogate, Method::kSupsubBhatt,
    Method::kJdivGreedy,  Method::kExhaustive,
};

inline std::string to_string(Method m) {
  switch (m) {
    case Method::kGreedySnr: return "greedy_snr";
    case Method::kSurrogate: return "surrogate";
    case Method::kKlGreedy: return "kl_greedy";
    case Method::kSupsubKl: return "supsub_kl";
    case Method::kSupsubSurrogate: return "supsub_surrogate";
    case Method::kSupsubBhatt: return "supsub_bhatt";
    case Method::kJdivGreedy: return "jdiv_greedy";
    case Method::kExhaustive: return "exhaustive";
  }
  throw ParameterError("unknown method");
}

inline Method method_from_string(const std::string& s) {
  for (Method m : kAllMethods)
    if (to_string(m) == s) return m;
  throw ParameterError("unknown method '" + s + "'");
}

// One selection run.  Objectives are method-native: deflection SNR for
// greedy_snr and exhaustive (common covariance), the relaxed log-det value
// for surrogate, divergences or difference-of-submodular objectives for the
// rest.  supsub_kl applies the bounds directly to the exact KL split;
// supsub_surrogate uses the relaxed-trace split.
struct MethodRun {
  Selection selection;
  double objective;
  long evals;
  std::optional<SupSubResult> supsub;
};

inline MethodRun run_method(const GaussianPair& pair, Method method, int k) {
  switch (method) {
    case Method::kGreedySnr: {
      GreedyTrace t = greedy_maximize(snr_objective(pair), k);
      return MethodRun{t.final, t.value(), t.total_evals(), std::nullopt};
    }
    case Method::kSurrogate: {
      SurrogateGreedyResult r = surrogate_greedy(pair, k);
      return MethodRun{r.trace.final, r.trace.value(), r.trace.total_evals(),
                       std::nullopt};
    }
    case Method::kKlGreedy: {
      GreedyTrace t = greedy_maximize(kl_objective(pair), k);
      return MethodRun{t.final, t.value(), t.total_evals(), std::nullopt};
    }
    case Method::kSupsubKl: {
      SupSubResult r = supsub_maximize(kl_direct_decomposition(pair), k);
      return MethodRun{r.selection, r.objective, r.evaluations, std::move(r)};
    }
    case Method::kSupsubSurrogate: {
      SupSubResult r = supsub_maximize(kl_sub_decomposition(pair), k);
      return MethodRun{r.selection, r.objective, r.evaluations, std::move(r)};
    }
    case Method::kSupsubBhatt: {
      SupSubResult r = supsub_maximize(bhattacharyya_decomposition(pair), k);
      return MethodRun{r.selection, r.objective, r.evaluations, std::move(r)};
    }
    case Method::kJdivGreedy: {
      GreedyTrace t = greedy_maximize(jdiv_surrogate(pair), k);
      return MethodRun{t.final, t.value(), t.total_evals(), std::nullopt};
    }
    case Method::kExhaustive: {
      const SetFunction f = pair.common_covariance() ? snr_objective(pair)
                                                     : kl_objective(pair);
      ExhaustiveResult r = exhaustive_best(f, k);
      return MethodRun{std::move(r.selection), r.value, r.evaluated,
                       std::nullopt};
    }
  }
  throw ParameterError("unknown method");
}

struct ExperimentConfig {
  ScenarioSpec scenario;
  std::vector<Method> methods;
  std::vector<int> k_values;
  long trials = 100;
  std::uint64_t seed = 0;
  std::optional<double> pfa;  // enables Monte Carlo error columns
  std::string output_dir = "out";
  long mc_trials = 10000;  // Monte Carlo trials per cell when pfa is set
};

inline nlohmann::json scenario_to_json(const ScenarioSpec& s) {
  nlohmann::json j;
  j["kind"] = to_string(s.kind);
  j["m"] = s.m;
  if (s.rho) j["rho"] = *s.rho;
  j["seed"] = s.seed;
  j["prior0"] = s.prior0;
  if (s.uncommon_covariance) j["uncommon_covariance"] = true;
  if (!s.file.empty()) j["file"] = s.file;
  return j;
}

inline ScenarioSpec scenario_from_json(const nlohmann::json& j) {
  if (!j.contains("kind"))
    throw ParameterError("scenario JSON: missing 'kind'");
  ScenarioSpec s;
  s.kind = scenario_kind_from_string(j.at("kind").get<std::string>());
  s.m = j.value("m", s.kind == ScenarioKind::kCounterexample3 ? 3 : 15);
  if (j.contains("rho")) s.rho = j.at("rho").get<double>();
  s.seed = j.value("seed", std::uint64_t{0});
  s.prior0 = j.value("prior0", 0.3);
  s.uncommon_covariance = j.value("uncommon_covariance", false);
  s.file = j.value("file", std::string{});
  return s;
}

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["version"] = 1;
  j["scenario"] = scenario_to_json(c.scenario);
  nlohmann::json methods = nlohmann::json::array();
  for (Method m : c.methods) methods.push_back(to_string(m));
  j["methods"] = std::move(methods);
  j["k_values"] = c.k_values;
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  if (c.pfa) j["pfa"] = *c.pfa;
  j["output_dir"] = c.output_dir;
  j["mc_trials"] = c.mc_trials;
  return j;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.contains("version") || !j.at("version").is_number_integer() ||
      j.at("version").get<int>() != 1)
    throw ParameterError("config JSON: requires \"version\": 1");
  if (!j.contains("scenario"))
    throw ParameterError("config JSON: missing 'scenario'");
  if (!j.contains("methods"))
    throw ParameterError("config JSON: missing 'methods'");
  if (!j.contains("k_values"))
    throw ParameterError("config JSON: missing 'k_values'");
  ExperimentConfig c;
  c.scenario = scenario_from_json(j.at("scenario"));
  for (const auto& s : j.at("methods"))
    c.methods.push_back(method_from_string(s.get<std::string>()));
  c.k_values = j.at("k_values").get<std::vector<int>>();
  c.trials = j.value("trials", 100L);
  c.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("pfa")) c.pfa = j.at("pfa").get<double>();
  c.output_dir = j.value("output_dir", std::string{"out"});
  c.mc_trials = j.value("mc_trials", 10000L);
  return c;
}

inline void validate_config(const ExperimentConfig& c) {
  if (c.methods.empty())
    throw ParameterError("config: methods must be nonempty");
  if (c.k_values.empty())
    throw ParameterError("config: k_values must be nonempty");
  if (c.scenario.m < 1) throw ParameterError("config: scenario m must be >= 1");
  for (int k : c.k_values)
    if (k < 1 || k > c.scenario.m)
      throw ParameterError("config: k = " + std::to_string(k) +
                           " outside [1, " + std::to_string(c.scenario.m) +
                           "]");
  if (c.trials < 1) throw ParameterError("config: trials must be >= 1");
  if (c.pfa && (!(*c.pfa > 0.0) || !(*c.pfa < 1.0)))
    throw ParameterError("config: pfa must lie in (0, 1)");
  if (c.pfa && c.mc_trials < 1000)
    throw ParameterError("config: mc_trials must be >= 1000");
  for (Method m : c.methods) {
    if (m != Method::kExhaustive) continue;
    for (int k : c.k_values)
      if (binomial_count(c.scenario.m, k) > kExhaustiveGuard)
        throw ParameterError(
            "config: exhaustive infeasible at k = " + std::to_string(k) +
            " (combination count guard)");
  }
}

struct CellRecord {
  long trial;
  Method method;
  int k;
  double objective = std::numeric_limits<double>::quiet_NaN();
  double snr_value = std::numeric_limits<double>::quiet_NaN();
  double pe = std::numeric_limits<double>::quiet_NaN();
  double pm = std::numeric_limits<double>::quiet_NaN();
  long runtime_ns = 0;
  long evals = 0;
  std::string error;
};

namespace detail {

inline std::string sanitize_csv_field(std::string s) {
  for (char& ch : s) {
    if (ch == ',') ch = ';';
    if (ch == '\n' || ch == '\r') ch = ' ';
    if (ch == '"') ch = '\'';
  }
  return s;
}

inline CellRecord run_cell(const ExperimentConfig& config,
                           const GaussianPair& pair, long trial, Method method,
                           int k) {
  CellRecord rec;
  rec.trial = trial;
  rec.method = method;
  rec.k = k;
  const auto start = std::chrono::steady_clock::now();
  try {
    MethodRun run = run_method(pair, method, k);
    rec.objective = run.objective;
    rec.evals = run.evals;
    if (pair.common_covariance()) rec.snr_value = snr(pair, run.selection);
    if (config.pfa) {
      const std::uint64_t cell_seed = derive_seed(
          derive_seed(derive_seed(config.seed, static_cast<std::uint64_t>(trial)),
                      static_cast<std::uint64_t>(method)),
          static_cast<std::uint64_t>(k));
      const ErrorReport report = monte_carlo_errors(
          pair, run.selection, config.mc_trials, cell_seed, *config.pfa);
      rec.pe = report.pe;
      rec.pm = report.pm;
    } else if (pair.common_covariance()) {
      rec.pe = pe_mean_shift(pair, run.selection);
    }
  } catch (const std::exception& e) {
    rec.error = sanitize_csv_field(e.what());
  }
  rec.runtime_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return rec;
}

}  // namespace detail

// Runs the full (trial × method × K) grid.  Trials are independent and
// dispatched to a small worker pool; every worker writes only its own
// preallocated slots, so the record order is deterministic and, apart from
// runtime_ns, so is the content.  Per-cell failures land in the record's
// error field and the run continues.
inline std::vector<CellRecord> run_selection(const ExperimentConfig& config,
                                             int threads = 1) {
  validate_config(config);
  const long per_trial =
      static_cast<long>(config.methods.size() * config.k_values.size());
  std::vector<CellRecord> records(
      static_cast<std::size_t>(config.trials * per_trial));
  std::atomic<long> next{0};
  const auto worker = [&]() {
    for (long t = next.fetch_add(1); t < config.trials;
         t = next.fetch_add(1)) {
      std::optional<GaussianPair> pair;
      std::string scenario_error;
      try {
        pair.emplace(make_gaussian_pair(config.scenario, t));
      } catch (const std::exception& e) {
        scenario_error = detail::sanitize_csv_field(e.what());
      }
      long slot = t * per_trial;
      for (Method method : config.methods) {
        for (int k : config.k_values) {
          if (pair) {
            records[static_cast<std::size_t>(slot)] =
                detail::run_cell(config, *pair, t, method, k);
          } else {
            CellRecord rec;
            rec.trial = t;
            rec.method = method;
            rec.k = k;
            rec.error = scenario_error;
            records[static_cast<std::size_t>(slot)] = rec;
          }
          ++slot;
        }
      }
    }
  };
  const int workers = std::clamp(threads, 1, 256);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  return records;
}

struct SummaryRow {
  Method method;
  int k;
  long cells;
  long failures;
  double mean_objective, ci95_objective;
  double mean_snr, ci95_snr;
  double mean_pe, ci95_pe;
};

namespace detail {

inline std::pair<double, double> mean_ci95(const std::vector<double>& xs) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (xs.empty()) return {nan, nan};
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  return {mean, 1.96 * sd / std::sqrt(static_cast<double>(xs.size()))};
}

}  // namespace detail

// Per-(method, K) means with 95% confidence halfwidths, computed over the
// finite entries of each column; failed cells count toward `failures`.
inline std::vector<SummaryRow> summarize(
    const std::vector<CellRecord>& records) {
  if (records.empty()) throw ParameterError("summarize: no records");
  std::map<std::pair<int, int>, std::size_t> index;
  std::vector<SummaryRow> rows;
  std::vector<std::vector<double>> objective, snr_col, pe_col;
  for (const CellRecord& rec : records) {
    const std::pair<int, int> key{static_cast<int>(rec.method), rec.k};
    auto found = index.find(key);
    if (found == index.end()) {
      found = index.emplace(key, rows.size()).first;
      rows.push_back(SummaryRow{rec.method, rec.k, 0, 0, 0, 0, 0, 0, 0, 0});
      objective.emplace_back();
      snr_col.emplace_back();
      pe_col.emplace_back();
    }
    const std::size_t i = found->second;
    ++rows[i].cells;
    if (!rec.error.empty()) ++rows[i].failures;
    if (std::isfinite(rec.objective)) objective[i].push_back(rec.objective);
    if (std::isfinite(rec.snr_value)) snr_col[i].push_back(rec.snr_value);
    if (std::isfinite(rec.pe)) pe_col[i].push_back(rec.pe);
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::tie(rows[i].mean_objective, rows[i].ci95_objective) =
        detail::mean_ci95(objective[i]);
    std::tie(rows[i].mean_snr, rows[i].ci95_snr) =
        detail::mean_ci95(snr_col[i]);
    std::tie(rows[i].mean_pe, rows[i].ci95_pe) = detail::mean_ci95(pe_col[i]);
  }
  return rows;
}

enum class RecordColumn { kObjective, kSnr, kPe };

inline std::string to_string(RecordColumn c) {
  switch (c) {
    case RecordColumn::kObjective: return "objective";
    case RecordColumn::kSnr: return "snr";
    case RecordColumn::kPe: return "pe";
  }
  throw ParameterError("unknown record column");
}

struct RatioHistogram {
  Method method;
  Method baseline;
  RecordColumn column;
  double lo, hi;           // observed ratio range
  std::vector<long> counts;  // fixed bin count over [lo, hi]
  long used;               // (trial, K) pairs that produced a ratio
  long skipped;            // pairs dropped (non-finite or zero baseline)
};

// Histogram of per-(trial, K) ratios method/baseline over one record column,
// pooled across all subset sizes; 20 deterministic bins over the observed
// range.
inline RatioHistogram ratio_histogram(const std::vector<CellRecord>& records,
                                      Method method, Method baseline,
                                      RecordColumn column = RecordColumn::kSnr,
                                      int bins = 20) {
  if (bins < 1) throw ParameterError("ratio_histogram: bins must be >= 1");
  const auto value_of = [column](const CellRecord& rec) {
    switch (column) {
      case RecordColumn::kObjective: return rec.objective;
      case RecordColumn::kSnr: return rec.snr_value;
      case RecordColumn::kPe: return rec.pe;
    }
    return std::numeric_limits<double>::quiet_NaN();
  };
  std::map<std::pair<long, int>, double> base;
  bool baseline_present = false;
  for (const CellRecord& rec : records) {
    if (rec.method != baseline) continue;
    baseline_present = true;
    base.emplace(std::make_pair(rec.trial, rec.k), value_of(rec));
  }
  if (!baseline_present)
    throw ParameterError("ratio_histogram: baseline method '" +
                         to_string(baseline) + "' missing from records");
  std::vector<double> ratios;
  long skipped = 0;
  for (const CellRecord& rec : records) {
    if (rec.method != method) continue;
    const auto found = base.find(std::make_pair(rec.trial, rec.k));
    if (found == base.end()) {
      ++skipped;
      continue;
    }
    const double num = value_of(rec), den = found->second;
    if (!std::isfinite(num) || !std::isfinite(den) || den == 0.0) {
      ++skipped;
      continue;
    }
    ratios.push_back(num / den);
  }
  RatioHistogram hist{method,
                      baseline,
                      column,
                      0.0,
                      0.0,
                      std::vector<long>(static_cast<std::size_t>(bins), 0),
                      static_cast<long>(ratios.size()),
                      skipped};
  if (ratios.empty()) return hist;
  hist.lo = *std::min_element(ratios.begin(), ratios.end());
  hist.hi = *std::max_element(ratios.begin(), ratios.end());
  for (double r : ratios) {
    int b = 0;
    if (hist.hi > hist.lo)
      b = std::min(bins - 1, static_cast<int>((r - hist.lo) /
                                              (hist.hi - hist.lo) *
                                              static_cast<double>(bins)));
    ++hist.counts[static_cast<std::size_t>(b)];
  }
  return hist;
}

// Near-optimality reporting for greedy SNR selection: the certified epsilon
// for the instance plus, per subset size, the greedy value, the implied
// upper bound on the optimum, and the guaranteed fraction attained.  A zero
// upper bound (zero mean shift) reports the clean 1−1/e factor.
struct BoundRow {
  int k;
  double f_greedy;
  double upper_bound;
  double fraction;
};

struct BoundReport {
  EpsilonCertificate certificate;
  std::vector<BoundRow> rows;
};

inline BoundReport bound_report(const GaussianPair& pair, double beta,
                                const std::vector<int>& k_values) {
  detail::require_common_covariance(pair, "bound_report");
  if (k_values.empty())
    throw ParameterError("bound_report: k_values must be nonempty");
  int k_max = 0;
  for (int k : k_values) {
    if (k < 1 || k > pair.dim())
      throw ParameterError("bound_report: k = " + std::to_string(k) +
                           " outside [1, " + std::to_string(pair.dim()) + "]");
    k_max = std::max(k_max, k);
  }
  const ShiftDecomposition decomp = shift_decompose(pair.sigma0(), beta);
  const EpsilonCertificate cert =
      epsilon_bound(decomp, pair.mean_difference());
  const GreedyTrace trace = greedy_maximize(snr_objective(pair), k_max);
  BoundReport report{cert, {}};
  for (int k : k_values) {
    const double f = trace.steps[static_cast<std::size_t>(k - 1)].value;
    const double upper = near_optimality_gap(f, k, cert.epsilon);
    const double fraction = upper > 0.0 ? f / upper : 1.0 - std::exp(-1.0);
    report.rows.push_back(BoundRow{k, f, upper, fraction});
  }
  return report;
}

inline void write_records_csv(const std::string& path,
                              const std::vector<CellRecord>& records) {
  std::ofstream out(path);
  if (!out) throw ParameterError("write_records_csv: cannot open " + path);
  out << "trial,method,k,objective,snr,pe,pm,runtime_ns,evals,error\n";
  for (const CellRecord& rec : records) {
    out << rec.trial << ',' << to_string(rec.method) << ',' << rec.k << ','
        << format_g17(rec.objective) << ',' << format_g17(rec.snr_value) << ','
        << format_g17(rec.pe) << ',' << format_g17(rec.pm) << ','
        << rec.runtime_ns << ',' << rec.evals << ',' << rec.error << '\n';
  }
  if (!out) throw ParameterError("write_records_csv: write failed: " + path);
}

inline void write_summary_csv(const std::string& path,
                              const std::vector<SummaryRow>& rows) {
  std::ofstream out(path);
  if (!out) throw ParameterError("write_summary_csv: cannot open " + path);
  out << "method,k,cells,failures,mean_objective,ci95_objective,mean_snr,"
         "ci95_snr,mean_pe,ci95_pe\n";
  for (const SummaryRow& r : rows) {
    out << to_string(r.method) << ',' << r.k << ',' << r.cells << ','
        << r.failures << ',' << format_g17(r.mean_objective) << ','
        << format_g17(r.ci95_objective) << ',' << format_g17(r.mean_snr) << ','
        << format_g17(r.ci95_snr) << ',' << format_g17(r.mean_pe) << ','
        << format_g17(r.ci95_pe) << '\n';
  }
}

inline void write_histograms_csv(const std::string& path,
                                 const std::vector<RatioHistogram>& hists) {
  std::ofstream out(path);
  if (!out) throw ParameterError("write_histograms_csv: cannot open " + path);
  out << "method,baseline,column,bin_index,bin_lo,bin_hi,count\n";
  for (const RatioHistogram& h : hists) {
    const int bins = static_cast<int>(h.counts.size());
    const double width =
        bins > 0 && h.hi > h.lo
            ? (h.hi - h.lo) / static_cast<double>(bins)
            : 0.0;
    for (int b = 0; b < bins; ++b) {
      out << to_string(h.method) << ',' << to_string(h.baseline) << ','
          << to_string(h.column) << ',' << b << ','
          << format_g17(h.lo + width * b) << ','
          << format_g17(b + 1 == bins ? h.hi : h.lo + width * (b + 1)) << ','
          << h.counts[static_cast<std::size_t>(b)] << '\n';
    }
  }
}

}  // namespace sparsedet

#endif  // SPARSEDET_EXPERIMENT_HPP_
