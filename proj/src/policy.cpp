#include "fairthresh/policy.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "fairthresh/error.hpp"
#include "fairthresh/response.hpp"
#include "fairthresh/version.hpp"

namespace fairthresh {

std::string to_string(GroupMode m) {
  switch (m) {
    case GroupMode::none: return "none";
    case GroupMode::parity: return "parity";
    case GroupMode::equal_opportunity: return "eqopp";
    case GroupMode::equalized_odds: return "eqodds";
  }
  return "none";
}

GroupMode group_mode_from_string(const std::string& s) {
  if (s == "none") return GroupMode::none;
  if (s == "parity") return GroupMode::parity;
  if (s == "eqopp") return GroupMode::equal_opportunity;
  if (s == "eqodds") return GroupMode::equalized_odds;
  throw ConfigError("unknown group mode: " + s);
}

double resolve_cap(const FitSpec& spec, const CostModel& cost,
                   const ScoreModel& score) {
  if (spec.cap_override) {
    if (!(*spec.cap_override > 0.0)) {
      throw ConfigError("density cap must be positive");
    }
    return *spec.cap_override;
  }
  return density_caps({spec.budget_brc, spec.budget_outcome}, cost, score)
      .joint;
}

namespace {

std::vector<double> scores_of(std::span<const ScoredSample> samples) {
  std::vector<double> s;
  s.reserve(samples.size());
  for (const auto& x : samples) s.push_back(x.score);
  return s;
}

void check_threshold_support(const ScoreBounds& bounds, const CostModel& cost) {
  if (!(bounds.upper > bounds.lower + cost.cap())) {
    throw InfeasibleError(
        "cost cap " + std::to_string(cost.cap()) +
        " leaves no admissible thresholds inside the score range [" +
        std::to_string(bounds.lower) + ", " + std::to_string(bounds.upper) +
        "]");
  }
}

void check_cap_feasible(double cap_l, double support_len,
                        const std::string& scope) {
  if (cap_l * support_len < 1.0 - 1e-12) {
    throw InfeasibleError(
        "density cap L=" + std::to_string(cap_l) + " is infeasible" + scope +
        "; the minimum feasible cap is 1/(D - C - cap) = " +
        std::to_string(1.0 / support_len));
  }
}

FitMeta base_meta(const FitSpec& spec, const std::string& method) {
  FitMeta meta;
  meta.method = method;
  meta.bins = spec.bins;
  meta.group_mode = spec.group_mode;
  meta.omega = spec.omega;
  meta.seed = spec.seed;
  meta.sampling = spec.sampling;
  meta.budget_brc = spec.budget_brc;
  meta.budget_outcome = spec.budget_outcome;
  return meta;
}

}  // namespace

IndividualLpParts prepare_individual_lp(std::span<const ScoredSample> train,
                                        const FitSpec& spec,
                                        const CostModel& cost,
                                        const ScoreModel& score) {
  if (train.empty()) throw EstimationError("cannot fit on an empty sample");
  const auto scores = scores_of(train);
  IndividualLpParts parts{ScoreBounds::from_scores(scores),
                          {},
                          BinWeights{},
                          resolve_cap(spec, cost, score),
                          lp::LpProblem{}};
  check_threshold_support(parts.bounds, cost);
  const double lo = parts.bounds.lower + cost.cap();
  const double hi = parts.bounds.upper;
  check_cap_feasible(parts.cap, hi - lo, "");
  parts.edges = uniform_edges(lo, hi, spec.bins);
  parts.weights = compute_error_weights(train, parts.edges, cost);

  const std::size_t k = parts.edges.size() - 1;
  parts.problem.objective = parts.weights.error;
  parts.problem.eq_rows.assign(1, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < k; ++i) {
    parts.problem.eq_rows[0][i] = parts.edges[i + 1] - parts.edges[i];
  }
  parts.problem.eq_rhs = {1.0};
  parts.problem.upper.assign(k, parts.cap);
  parts.problem.validate();
  return parts;
}

FairPolicy fit_individual(std::span<const ScoredSample> train,
                          const FitSpec& spec, const CostModel& cost,
                          const ScoreModel& score) {
  auto parts = prepare_individual_lp(train, spec, cost, score);
  const auto sol = lp::solve(parts.problem);
  if (sol.status != lp::LpStatus::optimal) {
    throw InfeasibleError("individual-fairness LP returned " +
                          lp::to_string(sol.status));
  }
  auto dist = ThresholdDistribution::piecewise(parts.edges, sol.x);

  FitMeta meta = base_meta(spec, "lp-individual");
  meta.cap = parts.cap;
  meta.objective = sol.objective_value;
  meta.lp_status = lp::to_string(sol.status);

  FairPolicy policy{score,
                    {PolicyComponent{-1, 1.0, cost, parts.bounds, dist}},
                    std::move(meta)};
  return policy;
}

GroupLpParts prepare_group_lp(std::span<const ScoredSample> train,
                              const FitSpec& spec,
                              const std::map<int, CostModel>& costs,
                              const ScoreModel& score) {
  if (train.empty()) throw EstimationError("cannot fit on an empty sample");

  std::set<int> ids;
  for (const auto& s : train) ids.insert(s.group);
  if (ids.count(-1) && ids.size() > 1) {
    throw ConfigError("group fit: some samples have no group id");
  }

  GroupLpParts parts;
  std::vector<std::vector<ScoredSample>> by_group;
  for (int id : ids) {
    parts.group_ids.push_back(id);
    by_group.emplace_back();
  }
  for (const auto& s : train) {
    const std::size_t gi = static_cast<std::size_t>(
        std::lower_bound(parts.group_ids.begin(), parts.group_ids.end(),
                         s.group) -
        parts.group_ids.begin());
    by_group[gi].push_back(s);
  }

  const std::size_t n_groups = parts.group_ids.size();
  const std::size_t k = static_cast<std::size_t>(spec.bins);
  auto cost_for = [&](int id) -> const CostModel& {
    auto it = costs.find(id);
    if (it == costs.end()) it = costs.find(-1);
    if (it == costs.end()) {
      throw ConfigError("no cost model for group " + std::to_string(id));
    }
    return it->second;
  };

  for (std::size_t gi = 0; gi < n_groups; ++gi) {
    const auto& cost = cost_for(parts.group_ids[gi]);
    parts.costs.push_back(cost);
    const auto scores = scores_of(by_group[gi]);
    parts.bounds.push_back(ScoreBounds::from_scores(scores));
    check_threshold_support(parts.bounds[gi], cost);
    const double lo = parts.bounds[gi].lower + cost.cap();
    const double hi = parts.bounds[gi].upper;
    const double cap_l = resolve_cap(spec, cost, score);
    check_cap_feasible(cap_l, hi - lo,
                       " for group " + std::to_string(parts.group_ids[gi]));
    parts.caps.push_back(cap_l);
    parts.edges.push_back(uniform_edges(lo, hi, spec.bins));
    parts.error_weights.push_back(
        compute_error_weights(by_group[gi], parts.edges[gi], cost));
    parts.priors.push_back(static_cast<double>(by_group[gi].size()) /
                           static_cast<double>(train.size()));
  }

  // Stacked variables: group-major blocks of K densities each.
  const std::size_t n_vars = n_groups * k;
  auto& problem = parts.problem;
  problem.objective.assign(n_vars, 0.0);
  problem.upper.assign(n_vars, 0.0);
  for (std::size_t gi = 0; gi < n_groups; ++gi) {
    for (std::size_t i = 0; i < k; ++i) {
      problem.objective[gi * k + i] =
          parts.priors[gi] * parts.error_weights[gi].error[i];
      problem.upper[gi * k + i] = parts.caps[gi];
    }
    std::vector<double> row(n_vars, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      row[gi * k + i] = parts.edges[gi][i + 1] - parts.edges[gi][i];
    }
    problem.eq_rows.push_back(std::move(row));
    problem.eq_rhs.push_back(1.0);
  }

  // Pairwise rate-gap rows, one family per conditioning label set.
  std::vector<std::vector<BinWeights>> families;
  if (spec.group_mode == GroupMode::parity) {
    auto& fam = families.emplace_back();
    for (std::size_t gi = 0; gi < n_groups; ++gi) {
      fam.push_back(compute_positive_weights(by_group[gi], parts.edges[gi],
                                             parts.costs[gi]));
    }
  } else if (spec.group_mode == GroupMode::equal_opportunity ||
             spec.group_mode == GroupMode::equalized_odds) {
    auto& fam1 = families.emplace_back();
    for (std::size_t gi = 0; gi < n_groups; ++gi) {
      fam1.push_back(conditional_positive_weights(by_group[gi], parts.edges[gi],
                                                  parts.costs[gi], 1));
    }
    if (spec.group_mode == GroupMode::equalized_odds) {
      auto& fam0 = families.emplace_back();
      for (std::size_t gi = 0; gi < n_groups; ++gi) {
        fam0.push_back(conditional_positive_weights(
            by_group[gi], parts.edges[gi], parts.costs[gi], 0));
      }
    }
  }
  if (!families.empty() && spec.omega < 0.0) {
    throw ConfigError("omega must be non-negative");
  }
  for (const auto& fam : families) {
    for (std::size_t a = 0; a < n_groups; ++a) {
      for (std::size_t b = a + 1; b < n_groups; ++b) {
        std::vector<double> row(n_vars, 0.0);
        for (std::size_t i = 0; i < k; ++i) {
          row[a * k + i] = fam[a].positive[i];
          row[b * k + i] = -fam[b].positive[i];
        }
        auto neg = row;
        for (double& v : neg) v = -v;
        problem.le_rows.push_back(std::move(row));
        problem.le_rhs.push_back(spec.omega);
        problem.le_rows.push_back(std::move(neg));
        problem.le_rhs.push_back(spec.omega);
      }
    }
  }
  problem.validate();
  return parts;
}

FairPolicy fit_group(std::span<const ScoredSample> train, const FitSpec& spec,
                     const std::map<int, CostModel>& costs,
                     const ScoreModel& score) {
  auto parts = prepare_group_lp(train, spec, costs, score);
  const auto sol = lp::solve(parts.problem);
  if (sol.status != lp::LpStatus::optimal) {
    throw InfeasibleError(
        "group-fairness LP returned " + lp::to_string(sol.status) +
        " at omega=" + std::to_string(spec.omega) +
        "; a larger omega relaxes the rate constraint");
  }

  const std::size_t k = static_cast<std::size_t>(spec.bins);
  FitMeta meta = base_meta(spec, "lp-group");
  meta.cap = *std::min_element(parts.caps.begin(), parts.caps.end());
  meta.objective = sol.objective_value;
  meta.lp_status = lp::to_string(sol.status);

  FairPolicy policy{score, {}, std::move(meta)};
  for (std::size_t gi = 0; gi < parts.group_ids.size(); ++gi) {
    std::vector<double> dens(sol.x.begin() + static_cast<long>(gi * k),
                             sol.x.begin() + static_cast<long>((gi + 1) * k));
    policy.components.push_back(PolicyComponent{
        parts.group_ids[gi], parts.priors[gi], parts.costs[gi],
        parts.bounds[gi],
        ThresholdDistribution::piecewise(parts.edges[gi], std::move(dens))});
  }
  return policy;
}

FairPolicy fit_group(std::span<const ScoredSample> train, const FitSpec& spec,
                     const CostModel& cost, const ScoreModel& score) {
  return fit_group(train, spec, std::map<int, CostModel>{{-1, cost}}, score);
}

namespace {

// Per-group acceptance statistics over a sorted candidate threshold grid.
struct BaselineGrid {
  std::vector<double> candidates;
  std::vector<std::size_t> tp;  // accepted positives per candidate
  std::vector<std::size_t> fp;  // accepted negatives per candidate
  std::size_t npos = 0;
  std::size_t nneg = 0;

  std::size_t size() const { return candidates.size(); }
};

BaselineGrid make_grid(std::span<const ScoredSample> samples,
                       const CostModel& cost, int bins) {
  BaselineGrid g;
  std::vector<double> pos_reach, neg_reach, all;
  for (const auto& s : samples) {
    const double r = s.score + cost.cap();
    (s.label == 1 ? pos_reach : neg_reach).push_back(r);
    all.push_back(r);
  }
  g.npos = pos_reach.size();
  g.nneg = neg_reach.size();
  std::sort(pos_reach.begin(), pos_reach.end());
  std::sort(neg_reach.begin(), neg_reach.end());

  const auto bounds = ScoreBounds::from_scores(scores_of(samples));
  const double lo = bounds.lower + cost.cap();
  const double hi = bounds.upper;
  if (hi > lo) {
    const auto edges = uniform_edges(lo, hi, bins);
    all.insert(all.end(), edges.begin(), edges.end());
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  g.candidates = std::move(all);

  g.tp.reserve(g.size());
  g.fp.reserve(g.size());
  for (double t : g.candidates) {
    g.tp.push_back(g.npos - static_cast<std::size_t>(std::lower_bound(
                                pos_reach.begin(), pos_reach.end(), t) -
                            pos_reach.begin()));
    g.fp.push_back(g.nneg - static_cast<std::size_t>(std::lower_bound(
                                neg_reach.begin(), neg_reach.end(), t) -
                            neg_reach.begin()));
  }
  return g;
}

double macro_f1_from_counts(std::size_t tp, std::size_t fp, std::size_t npos,
                            std::size_t nneg) {
  const std::size_t fn = npos - tp;
  const std::size_t tn = nneg - fp;
  double sum = 0.0;
  if (2 * tp + fp + fn > 0) {
    sum += 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
  }
  if (2 * tn + fn + fp > 0) {
    sum += 2.0 * static_cast<double>(tn) / static_cast<double>(2 * tn + fn + fp);
  }
  return sum / 2.0;
}

double baseline_f1(const FairPolicy& policy,
                   std::span<const ScoredSample> samples) {
  std::size_t tp = 0, fp = 0, npos = 0, nneg = 0;
  for (const auto& s : samples) {
    const auto& comp = policy.component_for(s.group);
    const bool accepted = s.score + comp.cost.cap() >= comp.dist.t0();
    (s.label == 1 ? npos : nneg) += 1;
    if (accepted) (s.label == 1 ? tp : fp) += 1;
  }
  return macro_f1_from_counts(tp, fp, npos, nneg);
}

}  // namespace

FairPolicy fit_deterministic_baseline(std::span<const ScoredSample> train,
                                      std::span<const ScoredSample> validation,
                                      const FitSpec& spec,
                                      const CostModel& cost,
                                      const ScoreModel& score) {
  if (train.empty()) throw EstimationError("cannot fit on an empty sample");

  FitMeta meta = base_meta(spec, "grid-baseline");
  FairPolicy policy{score, {}, std::move(meta)};

  if (spec.group_mode == GroupMode::none) {
    const auto grid = make_grid(train, cost, spec.bins);
    double best_f1 = -1.0;
    double best_t = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double f1 =
          macro_f1_from_counts(grid.tp[i], grid.fp[i], grid.npos, grid.nneg);
      if (f1 > best_f1) {
        best_f1 = f1;
        best_t = grid.candidates[i];
      }
    }
    if (best_f1 < 0.0) throw InfeasibleError("baseline grid search found nothing");
    policy.meta.train_f1 = best_f1;
    policy.components.push_back(
        PolicyComponent{-1, 1.0, cost, ScoreBounds::from_scores(scores_of(train)),
                        ThresholdDistribution::dirac(best_t)});
  } else {
    std::set<int> ids;
    for (const auto& s : train) ids.insert(s.group);
    if (ids.size() != 2) {
      throw ConfigError(
          "group-constrained baseline supports exactly two groups, got " +
          std::to_string(ids.size()));
    }
    std::vector<int> group_ids(ids.begin(), ids.end());
    std::vector<std::vector<ScoredSample>> by_group(2);
    for (const auto& s : train) {
      by_group[s.group == group_ids[0] ? 0 : 1].push_back(s);
    }
    std::vector<BaselineGrid> grids;
    for (const auto& g : by_group) grids.push_back(make_grid(g, cost, spec.bins));

    const bool check_pos = spec.group_mode != GroupMode::parity;
    const bool check_neg = spec.group_mode == GroupMode::equalized_odds;
    if (check_pos && (grids[0].npos == 0 || grids[1].npos == 0)) {
      throw EstimationError("baseline rate constraint needs positives in both groups");
    }
    if (check_neg && (grids[0].nneg == 0 || grids[1].nneg == 0)) {
      throw EstimationError("baseline rate constraint needs negatives in both groups");
    }

    double best_f1 = -1.0;
    std::size_t best_i = 0, best_j = 0;
    for (std::size_t i = 0; i < grids[0].size(); ++i) {
      for (std::size_t j = 0; j < grids[1].size(); ++j) {
        double gap = 0.0;
        if (spec.group_mode == GroupMode::parity) {
          const double r0 = static_cast<double>(grids[0].tp[i] + grids[0].fp[i]) /
                            static_cast<double>(grids[0].npos + grids[0].nneg);
          const double r1 = static_cast<double>(grids[1].tp[j] + grids[1].fp[j]) /
                            static_cast<double>(grids[1].npos + grids[1].nneg);
          gap = std::abs(r0 - r1);
        } else {
          const double r0 = static_cast<double>(grids[0].tp[i]) /
                            static_cast<double>(grids[0].npos);
          const double r1 = static_cast<double>(grids[1].tp[j]) /
                            static_cast<double>(grids[1].npos);
          gap = std::abs(r0 - r1);
          if (check_neg) {
            const double q0 = static_cast<double>(grids[0].fp[i]) /
                              static_cast<double>(grids[0].nneg);
            const double q1 = static_cast<double>(grids[1].fp[j]) /
                              static_cast<double>(grids[1].nneg);
            gap = std::max(gap, std::abs(q0 - q1));
          }
        }
        if (gap > spec.omega + 1e-12) continue;
        const double f1 = macro_f1_from_counts(
            grids[0].tp[i] + grids[1].tp[j], grids[0].fp[i] + grids[1].fp[j],
            grids[0].npos + grids[1].npos, grids[0].nneg + grids[1].nneg);
        if (f1 > best_f1) {
          best_f1 = f1;
          best_i = i;
          best_j = j;
        }
      }
    }
    if (best_f1 < 0.0) {
      throw InfeasibleError(
          "no deterministic threshold pair satisfies the rate constraint at "
          "omega=" + std::to_string(spec.omega));
    }
    policy.meta.train_f1 = best_f1;
    const double n_total = static_cast<double>(train.size());
    for (std::size_t gi = 0; gi < 2; ++gi) {
      const double t = gi == 0 ? grids[0].candidates[best_i]
                               : grids[1].candidates[best_j];
      policy.components.push_back(PolicyComponent{
          group_ids[gi],
          static_cast<double>(by_group[gi].size()) / n_total, cost,
          ScoreBounds::from_scores(scores_of(by_group[gi])),
          ThresholdDistribution::dirac(t)});
    }
  }

  if (!validation.empty()) {
    policy.meta.validation_f1 = baseline_f1(policy, validation);
  }
  return policy;
}

const PolicyComponent& FairPolicy::component_for(int group) const {
  if (components.empty()) throw ConfigError("policy has no components");
  if (components.size() == 1 && components.front().group == -1) {
    return components.front();
  }
  for (const auto& c : components) {
    if (c.group == group) return c;
  }
  throw ConfigError("policy has no component for group " +
                    std::to_string(group));
}

int predict_score(const FairPolicy& policy, double score, int group, Rng& rng) {
  const auto& comp = policy.component_for(group);
  const double t = comp.dist.sample(rng);
  if (policy.meta.sampling == SamplingRule::raw_score) {
    return score >= t ? 1 : 0;
  }
  return score + comp.cost.cap() >= t ? 1 : 0;
}

int predict(const FairPolicy& policy, std::span<const double> features,
            int group, Rng& rng) {
  return predict_score(policy, policy.score.score(features), group, rng);
}

double policy_expected_outcome(const FairPolicy& policy, double score,
                               int group) {
  const auto& comp = policy.component_for(group);
  return expected_outcome(score, comp.dist, comp.cost);
}

double policy_expected_brc(const FairPolicy& policy, double score, int group) {
  const auto& comp = policy.component_for(group);
  return expected_brc(score, comp.dist, comp.cost);
}

double expected_error(const FairPolicy& policy,
                      std::span<const ScoredSample> samples) {
  if (samples.empty()) throw EstimationError("expected_error: empty sample");
  double total = 0.0;
  for (const auto& s : samples) {
    const double y_hat = policy_expected_outcome(policy, s.score, s.group);
    total += s.label == 1 ? 1.0 - y_hat : y_hat;
  }
  return total / static_cast<double>(samples.size());
}

double fitted_positive_rate(const BinWeights& weights,
                            const ThresholdDistribution& dist) {
  if (dist.is_dirac() || weights.positive.size() != dist.densities().size()) {
    throw ConfigError("fitted_positive_rate: mismatched weights/distribution");
  }
  double rate = 0.0;
  for (std::size_t i = 0; i < weights.positive.size(); ++i) {
    rate += weights.positive[i] * dist.densities()[i];
  }
  return rate;
}

namespace {

void put_optional(nlohmann::json& j, const char* key,
                  const std::optional<double>& v) {
  if (v) j[key] = *v;
}

std::optional<double> get_optional(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

nlohmann::json FairPolicy::to_json() const {
  nlohmann::json meta_j{{"method", meta.method},
                        {"bins", meta.bins},
                        {"group_mode", to_string(meta.group_mode)},
                        {"omega", meta.omega},
                        {"seed", meta.seed},
                        {"sampling", meta.sampling == SamplingRule::raw_score
                                         ? "raw_score"
                                         : "best_response"},
                        {"lp_status", meta.lp_status}};
  put_optional(meta_j, "budget_brc", meta.budget_brc);
  put_optional(meta_j, "budget_outcome", meta.budget_outcome);
  put_optional(meta_j, "cap", meta.cap);
  put_optional(meta_j, "objective", meta.objective);
  put_optional(meta_j, "train_f1", meta.train_f1);
  put_optional(meta_j, "validation_f1", meta.validation_f1);

  nlohmann::json comps = nlohmann::json::array();
  for (const auto& c : components) {
    comps.push_back({{"group", c.group},
                     {"prior", c.prior},
                     {"cost", c.cost.to_json()},
                     {"bounds", c.bounds.to_json()},
                     {"distribution", c.dist.to_json()}});
  }
  return {{"format", kPolicyFormat},
          {"score", score.to_json()},
          {"meta", meta_j},
          {"components", comps}};
}

FairPolicy FairPolicy::from_json(const nlohmann::json& j) {
  if (j.value("format", "") != kPolicyFormat) {
    throw DataError("unrecognized policy file format");
  }
  const auto& meta_j = j.at("meta");
  FitMeta meta;
  meta.method = meta_j.at("method").get<std::string>();
  meta.bins = meta_j.at("bins").get<int>();
  meta.group_mode = group_mode_from_string(meta_j.at("group_mode").get<std::string>());
  meta.omega = meta_j.at("omega").get<double>();
  meta.seed = meta_j.at("seed").get<std::uint64_t>();
  meta.sampling = meta_j.at("sampling").get<std::string>() == "raw_score"
                      ? SamplingRule::raw_score
                      : SamplingRule::best_response;
  meta.lp_status = meta_j.value("lp_status", "");
  meta.budget_brc = get_optional(meta_j, "budget_brc");
  meta.budget_outcome = get_optional(meta_j, "budget_outcome");
  meta.cap = get_optional(meta_j, "cap");
  meta.objective = get_optional(meta_j, "objective");
  meta.train_f1 = get_optional(meta_j, "train_f1");
  meta.validation_f1 = get_optional(meta_j, "validation_f1");

  FairPolicy policy{ScoreModel::from_json(j.at("score")), {}, std::move(meta)};
  for (const auto& c : j.at("components")) {
    policy.components.push_back(PolicyComponent{
        c.at("group").get<int>(), c.at("prior").get<double>(),
        CostModel::from_json(c.at("cost")),
        ScoreBounds::from_json(c.at("bounds")),
        ThresholdDistribution::from_json(c.at("distribution"))});
  }
  if (policy.components.empty()) throw DataError("policy file has no components");
  return policy;
}

}  // namespace fairthresh
