#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairthresh/estimation.hpp"
#include "fairthresh/lp.hpp"
#include "fairthresh/models.hpp"
#include "fairthresh/rng.hpp"
#include "fairthresh/threshold_dist.hpp"

namespace fairthresh {

enum class GroupMode { none, parity, equal_opportunity, equalized_odds };

std::string to_string(GroupMode m);
GroupMode group_mode_from_string(const std::string& s);

// Decision rule applied to the sampled threshold: `best_response` accepts
// when the post-response score clears it (score + cap >= t), `raw_score`
// compares the unimproved score (the literal sampling pseudocode).
enum class SamplingRule { best_response, raw_score };

struct FitSpec {
  int bins = 80;
  std::optional<double> budget_brc;      // M_c
  std::optional<double> budget_outcome;  // M_p
  std::optional<double> cap_override;    // density cap L given directly
  GroupMode group_mode = GroupMode::none;
  double omega = 0.0;
  std::uint64_t seed = 0;
  SamplingRule sampling = SamplingRule::best_response;
};

struct PolicyComponent {
  int group;  // -1: applies to every group
  double prior;
  CostModel cost;
  ScoreBounds bounds;
  ThresholdDistribution dist;
};

struct FitMeta {
  std::string method;
  int bins = 0;
  GroupMode group_mode = GroupMode::none;
  double omega = 0.0;
  std::uint64_t seed = 0;
  SamplingRule sampling = SamplingRule::best_response;
  std::optional<double> budget_brc;
  std::optional<double> budget_outcome;
  std::optional<double> cap;         // density cap L (absent for dirac fits)
  std::optional<double> objective;   // LP objective = expected train error
  std::optional<double> train_f1;    // grid-search baselines
  std::optional<double> validation_f1;
  std::string lp_status;
};

struct FairPolicy {
  ScoreModel score;
  std::vector<PolicyComponent> components;
  FitMeta meta;

  const PolicyComponent& component_for(int group) const;

  nlohmann::json to_json() const;
  static FairPolicy from_json(const nlohmann::json& j);
};

// Density cap implied by a fit spec: the direct override if given, otherwise
// the joint cap of the requested fairness budgets.
double resolve_cap(const FitSpec& spec, const CostModel& cost,
                   const ScoreModel& score);

// Assembled LP of a single-distribution fit, exposed for auditing.
struct IndividualLpParts {
  ScoreBounds bounds;
  std::vector<double> edges;
  BinWeights weights;
  double cap = 0.0;
  lp::LpProblem problem;
};

IndividualLpParts prepare_individual_lp(std::span<const ScoredSample> train,
                                        const FitSpec& spec,
                                        const CostModel& cost,
                                        const ScoreModel& score);

// Assembled LP of a per-group fit with pairwise rate constraints.
struct GroupLpParts {
  std::vector<int> group_ids;
  std::vector<double> priors;
  std::vector<CostModel> costs;
  std::vector<ScoreBounds> bounds;
  std::vector<std::vector<double>> edges;
  std::vector<BinWeights> error_weights;
  std::vector<double> caps;
  lp::LpProblem problem;
};

GroupLpParts prepare_group_lp(std::span<const ScoredSample> train,
                              const FitSpec& spec,
                              const std::map<int, CostModel>& costs,
                              const ScoreModel& score);

// Minimize the expected post-best-response error over densities with
// mass 1 and the fairness density cap.
FairPolicy fit_individual(std::span<const ScoredSample> train,
                          const FitSpec& spec, const CostModel& cost,
                          const ScoreModel& score);

// Per-group densities minimizing the prior-weighted error under per-group
// mass/cap constraints and pairwise positive-rate gap constraints (|gap| <=
// omega; rates conditioned on the label for the equal-opportunity and
// equalized-odds modes).
FairPolicy fit_group(std::span<const ScoredSample> train, const FitSpec& spec,
                     const std::map<int, CostModel>& costs,
                     const ScoreModel& score);
FairPolicy fit_group(std::span<const ScoredSample> train, const FitSpec& spec,
                     const CostModel& cost, const ScoreModel& score);

// Deterministic-threshold baseline: exhaustive grid search over all observed
// post-response scores plus the bin edges, maximizing training macro-F1
// subject to the group-rate constraint. One threshold when group_mode is
// none, one per group otherwise (two groups supported).
FairPolicy fit_deterministic_baseline(std::span<const ScoredSample> train,
                                      std::span<const ScoredSample> validation,
                                      const FitSpec& spec,
                                      const CostModel& cost,
                                      const ScoreModel& score);

// One sampled decision (threshold draw per call); deterministic given the
// rng state.
int predict_score(const FairPolicy& policy, double score, int group, Rng& rng);
int predict(const FairPolicy& policy, std::span<const double> features,
            int group, Rng& rng);

// Analytic per-row fairness functionals of the policy.
double policy_expected_outcome(const FairPolicy& policy, double score,
                               int group);
double policy_expected_brc(const FairPolicy& policy, double score, int group);

// Plug-in expected misclassification rate of the policy on a sample.
double expected_error(const FairPolicy& policy,
                      std::span<const ScoredSample> samples);

// Fitted positive rate of one group's distribution against bin weights.
double fitted_positive_rate(const BinWeights& weights,
                            const ThresholdDistribution& dist);

}  // namespace fairthresh
