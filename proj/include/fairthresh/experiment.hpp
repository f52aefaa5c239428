#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fairthresh/data.hpp"
#include "fairthresh/metrics.hpp"
#include "fairthresh/policy.hpp"

namespace fairthresh {

// Everything one reproducible run needs. Defaults match the bundled
// credit-score benchmark; the CLI fills dataset-dependent defaults before
// validation.
struct RunConfig {
  std::string dataset = "fico-synthetic";  // "fico-synthetic" | "lawschool"
  std::string law_csv;                     // required for lawschool
  std::string cdf_csv;                     // optional custom CDF table
  std::size_t samples = 5000;              // synthetic sample count

  double lambda = 1.0;
  double alpha = 100.0;
  double beta = 2.0;

  std::string method = "lp";  // "lp" | "baseline"
  FitSpec fit;

  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  bool if_include_sensitive = true;
  std::size_t if_subsample = 0;  // 0: exact O(N^2) scan
  CreditSampleOptions credit;

  void validate() const;
  nlohmann::json to_json() const;
  std::string config_hash() const;  // FNV-1a of the canonical JSON
};

// Dataset splits plus the models used to score and move on them.
struct SeedData {
  SplitResult splits;
  ScoreModel score;
  CostModel cost;
};

SeedData prepare_seed_data(const RunConfig& config, std::uint64_t seed);

// Metrics of one fitted policy on one seed's test split.
struct SeedEvaluation {
  std::uint64_t seed = 0;
  double f1 = 0.0;
  double if_ratio_outcome = 0.0;
  double if_ratio_brc = 0.0;
  std::optional<double> s_dp;
  std::optional<double> eo_dp;
  std::optional<double> ed_dp;
  std::optional<double> fit_objective;

  nlohmann::json to_json() const;
};

FairPolicy fit_for_config(const RunConfig& config, const SeedData& data,
                          std::uint64_t seed);

SeedEvaluation evaluate_policy(const RunConfig& config, const SeedData& data,
                               const FairPolicy& policy, std::uint64_t seed);

struct ExperimentResult {
  std::vector<SeedEvaluation> evals;
  std::vector<FairPolicy> policies;  // one per seed
  FairnessReport report;
};

// Refit + evaluate per seed (fresh data each seed) and aggregate.
ExperimentResult run_experiment(const RunConfig& config);

// Evaluate one fixed policy over the config's seeds.
ExperimentResult run_evaluation(const RunConfig& config,
                                const FairPolicy& policy);

FairnessReport aggregate(const std::vector<SeedEvaluation>& evals);

// One column of a sweep table.
struct SweepColumn {
  std::string label;
  ExperimentResult result;
};

struct ReproduceResult {
  std::string target;
  RunConfig base_config;
  std::vector<SweepColumn> columns;  // baseline first

  nlohmann::json to_json() const;
  std::string to_text() const;  // rows: metrics, columns: methods
};

// Bundled sweeps: "fico-if", "law-if" (density-cap sweep against the
// single-threshold baseline) and "fico-sp", "law-sp" (rate-gap sweep at cap 1
// against the two-threshold baseline).
ReproduceResult run_reproduce(const std::string& target, RunConfig base);

// Write config/report/table/policies/versions under out_dir; returns the
// list of files written (relative to out_dir).
std::vector<std::string> write_reproduce_outputs(const ReproduceResult& result,
                                                 const std::string& out_dir);

}  // namespace fairthresh
