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
// Command-line front end: `select` runs one method on one instance, `experiment`
// runs the full (trial x method x K) grid to CSV, `bound` prints the certified
// near-optimality table, and `generate` emits scenario matrices.
// Exit codes: 0 success, 2 configuration error, 3 numerical failure in all cells.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sparsedet/sparsedet.hpp"

namespace {

constexpr int kExitSuccess = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitNumericalFailure = 3;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int threads = 1;
};

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw sparsedet::ParameterError("cannot open config file: " + path);
  return nlohmann::json::parse(in);
}

// --seed reseeds both the experiment master seed and the scenario generator;
// --out overrides the configured output directory.
void apply_overrides(const CommonArgs& args, sparsedet::ExperimentConfig* config) {
  if (args.seed) {
    config->seed = *args.seed;
    config->scenario.seed = *args.seed;
  }
  if (!args.out_dir.empty()) config->output_dir = args.out_dir;
}

sparsedet::ExperimentConfig load_config(const CommonArgs& args) {
  sparsedet::ExperimentConfig config =
      sparsedet::config_from_json(read_json_file(args.config_path));
  apply_overrides(args, &config);
  return config;
}

// bound/generate accept a reduced config: scenario always, k_values only for
// bound, methods not needed.  A "version" key, when present, must still be 1.
void check_version_if_present(const nlohmann::json& j) {
  if (j.contains("version") &&
      (!j.at("version").is_number_integer() || j.at("version").get<int>() != 1))
    throw sparsedet::ParameterError("config JSON: requires \"version\": 1");
}

sparsedet::ScenarioSpec load_scenario(const nlohmann::json& j,
                                      const CommonArgs& args) {
  check_version_if_present(j);
  if (!j.contains("scenario"))
    throw sparsedet::ParameterError("config JSON: missing 'scenario'");
  sparsedet::ScenarioSpec spec = sparsedet::scenario_from_json(j.at("scenario"));
  if (args.seed) spec.seed = *args.seed;
  return spec;
}

std::string output_directory(const CommonArgs& args,
                             const nlohmann::json& config_json) {
  if (!args.out_dir.empty()) return args.out_dir;
  return config_json.value("output_dir", std::string{"out"});
}

int run_select(const CommonArgs& args) {
  sparsedet::ExperimentConfig config = load_config(args);
  if (config.methods.size() != 1 || config.k_values.size() != 1)
    throw sparsedet::ParameterError(
        "select: config must list exactly one method and one k value");
  sparsedet::validate_config(config);
  const sparsedet::GaussianPair pair =
      sparsedet::make_gaussian_pair(config.scenario, 0);
  const sparsedet::Method method = config.methods.front();
  const int k = config.k_values.front();

  const auto start = std::chrono::steady_clock::now();
  const sparsedet::MethodRun run = sparsedet::run_method(pair, method, k);
  const long runtime_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                              std::chrono::steady_clock::now() - start)
                              .count();

  nlohmann::json out;
  out["method"] = sparsedet::to_string(method);
  out["k"] = k;
  out["selection"] = run.selection.sorted();
  out["objective"] = run.objective;
  out["evals"] = run.evals;
  out["runtime_ns"] = runtime_ns;
  if (pair.common_covariance()) {
    out["snr"] = sparsedet::snr(pair, run.selection);
    if (!config.pfa) out["pe"] = sparsedet::pe_mean_shift(pair, run.selection);
  }
  if (config.pfa) {
    const std::uint64_t cell_seed = sparsedet::derive_seed(
        sparsedet::derive_seed(
            sparsedet::derive_seed(config.seed, 0),
            static_cast<std::uint64_t>(method)),
        static_cast<std::uint64_t>(k));
    const sparsedet::ErrorReport report = sparsedet::monte_carlo_errors(
        pair, run.selection, config.mc_trials, cell_seed, *config.pfa);
    out["pe"] = report.pe;
    out["pm"] = report.pm;
    out["pe_ci95"] = report.ci95_halfwidth;
  }
  if (run.supsub) out["supsub"] = sparsedet::supsub_log_to_json(*run.supsub);

  // The relaxed-objective greedy yields a second selection from the same
  // probes (final step's best-SNR candidate); report both and the better pe.
  if (method == sparsedet::Method::kSurrogate) {
    const sparsedet::SurrogateGreedyResult dual =
        sparsedet::surrogate_greedy(pair, k);
    nlohmann::json alt;
    alt["selection"] = dual.snr_alternative.sorted();
    alt["snr"] = dual.snr_alternative_value;
    if (!config.pfa) {
      alt["pe"] = sparsedet::pe_mean_shift(pair, dual.snr_alternative);
      out["better_pe"] =
          std::min(out["pe"].get<double>(), alt["pe"].get<double>());
    }
    out["alternative"] = std::move(alt);
  }

  std::cout << out.dump(2) << '\n';
  if (!args.out_dir.empty()) {
    std::filesystem::create_directories(args.out_dir);
    const std::string path =
        (std::filesystem::path(args.out_dir) / "select.json").string();
    std::ofstream file(path);
    file << out.dump(2) << '\n';
    if (!file)
      throw sparsedet::ParameterError("select: cannot write " + path);
  }
  return kExitSuccess;
}

int run_experiment(const CommonArgs& args) {
  const sparsedet::ExperimentConfig config = load_config(args);
  const std::vector<sparsedet::CellRecord> records =
      sparsedet::run_selection(config, args.threads);

  std::filesystem::create_directories(config.output_dir);
  const auto path = [&](const char* name) {
    return (std::filesystem::path(config.output_dir) / name).string();
  };
  sparsedet::write_records_csv(path("records.csv"), records);
  sparsedet::write_summary_csv(path("summary.csv"), sparsedet::summarize(records));

  sparsedet::Method baseline = config.methods.front();
  for (sparsedet::Method m : config.methods)
    if (m == sparsedet::Method::kGreedySnr) baseline = m;
  bool any_snr = false;
  for (const sparsedet::CellRecord& rec : records)
    if (std::isfinite(rec.snr_value)) any_snr = true;
  const sparsedet::RecordColumn column = any_snr
                                             ? sparsedet::RecordColumn::kSnr
                                             : sparsedet::RecordColumn::kObjective;
  std::vector<sparsedet::RatioHistogram> hists;
  for (sparsedet::Method m : config.methods)
    if (m != baseline)
      hists.push_back(sparsedet::ratio_histogram(records, m, baseline, column));
  sparsedet::write_histograms_csv(path("histograms.csv"), hists);

  long failures = 0;
  for (const sparsedet::CellRecord& rec : records)
    if (!rec.error.empty()) ++failures;
  std::cout << "wrote " << records.size() << " records to "
            << path("records.csv") << " (" << failures << " failed cells)\n"
            << "wrote " << path("summary.csv") << " and "
            << path("histograms.csv") << '\n';
  if (!records.empty() && failures == static_cast<long>(records.size())) {
    std::cerr << "experiment: numerical failure in all cells\n";
    return kExitNumericalFailure;
  }
  return kExitSuccess;
}

int run_bound(const CommonArgs& args) {
  const nlohmann::json j = read_json_file(args.config_path);
  const sparsedet::ScenarioSpec spec = load_scenario(j, args);
  if (!j.contains("k_values"))
    throw sparsedet::ParameterError("bound: config JSON: missing 'k_values'");
  const auto k_values = j.at("k_values").get<std::vector<int>>();
  const double beta = j.value("beta", 0.5);

  const sparsedet::GaussianPair pair = sparsedet::make_gaussian_pair(spec, 0);
  const sparsedet::BoundReport report =
      sparsedet::bound_report(pair, beta, k_values);

  const sparsedet::EpsilonCertificate& cert = report.certificate;
  std::printf("epsilon = %.10g  (c1 = %.10g, a = %.10g, beta = %.10g, "
              "kappa = %.10g, lambda_max = %.10g)\n",
              cert.epsilon, cert.c1, cert.a, cert.beta, cert.kappa,
              cert.lambda_max);
  std::printf("%6s %18s %18s %20s\n", "K", "f_greedy", "upper_bound",
              "guaranteed_fraction");
  for (const sparsedet::BoundRow& row : report.rows)
    std::printf("%6d %18.10g %18.10g %20.10g\n", row.k, row.f_greedy,
                row.upper_bound, row.fraction);

  if (!args.out_dir.empty()) {
    nlohmann::json out;
    out["epsilon"] = cert.epsilon;
    out["c1"] = cert.c1;
    out["a"] = cert.a;
    out["beta"] = cert.beta;
    out["kappa"] = cert.kappa;
    out["lambda_max"] = cert.lambda_max;
    nlohmann::json rows = nlohmann::json::array();
    for (const sparsedet::BoundRow& row : report.rows)
      rows.push_back({{"k", row.k},
                      {"f_greedy", row.f_greedy},
                      {"upper_bound", row.upper_bound},
                      {"fraction", row.fraction}});
    out["rows"] = std::move(rows);
    std::filesystem::create_directories(args.out_dir);
    const std::string path =
        (std::filesystem::path(args.out_dir) / "bound.json").string();
    std::ofstream file(path);
    file << out.dump(2) << '\n';
    if (!file) throw sparsedet::ParameterError("bound: cannot write " + path);
  }
  return kExitSuccess;
}

int run_generate(const CommonArgs& args) {
  const nlohmann::json j = read_json_file(args.config_path);
  const sparsedet::ScenarioSpec spec = load_scenario(j, args);
  const sparsedet::GaussianPair pair = sparsedet::make_gaussian_pair(spec, 0);

  const std::string dir = output_directory(args, j);
  std::filesystem::create_directories(dir);
  sparsedet::save_pair_json(
      (std::filesystem::path(dir) / "pair.json").string(), pair);
  std::cout << "wrote scenario '" << sparsedet::to_string(spec.kind)
            << "' (m = " << pair.dim() << ") to " << dir
            << "/{sigma0,sigma1,theta0,theta1}.csv and pair.json\n";
  return kExitSuccess;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "sparsedet: sparse measurement selection for Gaussian detection"};
  app.require_subcommand(1);

  CommonArgs args;
  const auto add_common = [&args](CLI::App* sub) {
    sub->add_option("--config", args.config_path,
                    "path to config JSON (\"version\": 1)")
        ->required();
    sub->add_option("--out", args.out_dir,
                    "output directory (overrides config output_dir)");
    sub->add_option("--seed", args.seed,
                    "override experiment and scenario seeds");
    sub->add_option("--threads", args.threads, "worker threads for trials")
        ->check(CLI::Range(1, 256));
  };

  CLI::App* select =
      app.add_subcommand("select", "run one method on one instance");
  CLI::App* experiment =
      app.add_subcommand("experiment", "run the full trial/method/K grid");
  CLI::App* bound =
      app.add_subcommand("bound", "print the certified near-optimality table");
  CLI::App* generate =
      app.add_subcommand("generate", "emit scenario matrices and pair JSON");
  for (CLI::App* sub : {select, experiment, bound, generate}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitSuccess : kExitConfigError;
  }

  try {
    if (select->parsed()) return run_select(args);
    if (experiment->parsed()) return run_experiment(args);
    if (bound->parsed()) return run_bound(args);
    if (generate->parsed()) return run_generate(args);
    std::cerr << "no subcommand given\n";
    return kExitConfigError;
  } catch (const sparsedet::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumericalFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
}
