#include "fairthresh/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "fairthresh/error.hpp"
#include "fairthresh/response.hpp"
#include "fairthresh/rng.hpp"
#include "fairthresh/version.hpp"

namespace fairthresh {

void RunConfig::validate() const {
  if (dataset != "fico-synthetic" && dataset != "lawschool") {
    throw ConfigError("unknown dataset '" + dataset + "'");
  }
  if (dataset == "lawschool" && law_csv.empty()) {
    throw ConfigError("lawschool dataset requires a csv path");
  }
  if (samples < 1) throw ConfigError("need at least one sample");
  if (method != "lp" && method != "baseline") {
    throw ConfigError("method must be 'lp' or 'baseline'");
  }
  if (fit.bins < 1) throw ConfigError("bin count must be >= 1");
  if (fit.omega < 0.0) throw ConfigError("omega must be non-negative");
  if (seeds.empty()) throw ConfigError("need at least one seed");
  if (method == "lp" && !fit.cap_override && !fit.budget_brc &&
      !fit.budget_outcome) {
    throw ConfigError("lp fit needs --cap-l or a fairness budget (--mc/--mp)");
  }
  if (!(lambda > 0.0) || !(alpha > 0.0) || !(beta >= 1.0)) {
    throw ConfigError("cost parameters require lambda>0, alpha>0, beta>=1");
  }
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json fit_j{{"bins", fit.bins},
                       {"group_mode", to_string(fit.group_mode)},
                       {"omega", fit.omega},
                       {"sampling", fit.sampling == SamplingRule::raw_score
                                        ? "raw_score"
                                        : "best_response"}};
  if (fit.budget_brc) fit_j["mc"] = *fit.budget_brc;
  if (fit.budget_outcome) fit_j["mp"] = *fit.budget_outcome;
  if (fit.cap_override) fit_j["cap_l"] = *fit.cap_override;
  return {{"dataset", dataset},
          {"law_csv", law_csv},
          {"cdf_csv", cdf_csv},
          {"samples", samples},
          {"cost", {{"lambda", lambda}, {"alpha", alpha}, {"beta", beta}}},
          {"method", method},
          {"fit", fit_j},
          {"seeds", seeds},
          {"if_include_sensitive", if_include_sensitive},
          {"if_subsample", if_subsample},
          {"credit",
           {{"normalize_scores", credit.normalize_scores},
            {"label_mid", credit.label_mid},
            {"label_scale", credit.label_scale}}}};
}

std::string RunConfig::config_hash() const {
  const std::string dump = to_json().dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

SeedData prepare_seed_data(const RunConfig& config, std::uint64_t seed) {
  config.validate();
  CostModel cost(config.lambda, config.alpha, config.beta);
  if (config.dataset == "fico-synthetic") {
    const GroupCdfTable table = config.cdf_csv.empty()
                                    ? GroupCdfTable::builtin_credit()
                                    : GroupCdfTable::from_csv(config.cdf_csv);
    TabularDataset data =
        sample_fico(table, config.samples, seed, config.credit);
    SplitSpec spec;
    spec.seed = seed;
    return {split(data, spec), ScoreModel::coordinate(0), cost};
  }
  LawschoolData law = load_lawschool(config.law_csv, seed);
  SplitSpec spec;
  spec.seed = seed;
  return {split(law.dataset, spec), law.score, cost};
}

FairPolicy fit_for_config(const RunConfig& config, const SeedData& data,
                          std::uint64_t seed) {
  const auto train = score_samples(data.splits.train, data.score);
  FitSpec spec = config.fit;
  spec.seed = seed;
  if (config.method == "baseline") {
    const auto validation = score_samples(data.splits.validation, data.score);
    return fit_deterministic_baseline(train, validation, spec, data.cost,
                                      data.score);
  }
  if (spec.group_mode == GroupMode::none) {
    return fit_individual(train, spec, data.cost, data.score);
  }
  return fit_group(train, spec, data.cost, data.score);
}

namespace {

std::optional<std::size_t> sensitive_column(const TabularDataset& data) {
  for (std::size_t i = 0; i < data.feature_names.size(); ++i) {
    if (data.feature_names[i] == "group" || data.feature_names[i] == "racetxt") {
      return i;
    }
  }
  return std::nullopt;
}

}  // namespace

SeedEvaluation evaluate_policy(const RunConfig& config, const SeedData& data,
                               const FairPolicy& policy, std::uint64_t seed) {
  const TabularDataset& test = data.splits.test;
  if (test.size() < 2) throw DataError("test split too small to evaluate");

  std::vector<double> gamma_out, gamma_brc;
  std::vector<int> preds;
  gamma_out.reserve(test.size());
  gamma_brc.reserve(test.size());
  preds.reserve(test.size());
  Rng rng(seed, "inference");
  for (std::size_t i = 0; i < test.size(); ++i) {
    const double l = data.score.score(test.features[i]);
    const int group = test.groups[i];
    gamma_out.push_back(policy_expected_outcome(policy, l, group));
    gamma_brc.push_back(policy_expected_brc(policy, l, group));
    preds.push_back(predict_score(policy, l, group, rng));
  }

  std::vector<std::vector<double>> distance_features = test.features;
  if (!config.if_include_sensitive) {
    if (const auto col = sensitive_column(test)) {
      for (auto& row : distance_features) {
        row.erase(row.begin() + static_cast<long>(*col));
      }
    }
  }

  SeedEvaluation ev;
  ev.seed = seed;
  ev.f1 = macro_f1(preds, test.labels);
  ev.if_ratio_outcome =
      if_ratio(gamma_out, distance_features, config.if_subsample);
  ev.if_ratio_brc = if_ratio(gamma_brc, distance_features, config.if_subsample);
  ev.fit_objective = policy.meta.objective;

  std::set<int> ids(test.groups.begin(), test.groups.end());
  if (ids.size() == 2) {
    ev.s_dp = disparity(preds, test.groups, test.labels, DisparityMode::sdp);
    ev.eo_dp = disparity(preds, test.groups, test.labels, DisparityMode::eodp);
    ev.ed_dp = disparity(preds, test.groups, test.labels, DisparityMode::eddp);
  }
  return ev;
}

nlohmann::json SeedEvaluation::to_json() const {
  nlohmann::json j{{"seed", seed},
                   {"f1_macro", f1},
                   {"if_ratio_outcome", if_ratio_outcome},
                   {"if_ratio_brc", if_ratio_brc}};
  if (s_dp) j["s_dp"] = *s_dp;
  if (eo_dp) j["eo_dp"] = *eo_dp;
  if (ed_dp) j["ed_dp"] = *ed_dp;
  if (fit_objective) j["fit_objective"] = *fit_objective;
  return j;
}

FairnessReport aggregate(const std::vector<SeedEvaluation>& evals) {
  auto collect = [&](auto getter) {
    std::vector<double> vs;
    for (const auto& e : evals) {
      if (auto v = getter(e)) vs.push_back(*v);
    }
    return Aggregate::of(std::move(vs));
  };
  FairnessReport report;
  report.f1_macro = collect([](const SeedEvaluation& e) {
    return std::optional<double>(e.f1);
  });
  report.if_ratio_outcome = collect([](const SeedEvaluation& e) {
    return std::optional<double>(e.if_ratio_outcome);
  });
  report.if_ratio_brc = collect([](const SeedEvaluation& e) {
    return std::optional<double>(e.if_ratio_brc);
  });
  report.s_dp = collect([](const SeedEvaluation& e) { return e.s_dp; });
  report.eo_dp = collect([](const SeedEvaluation& e) { return e.eo_dp; });
  report.ed_dp = collect([](const SeedEvaluation& e) { return e.ed_dp; });
  return report;
}

ExperimentResult run_experiment(const RunConfig& config) {
  config.validate();
  ExperimentResult result;
  for (std::uint64_t seed : config.seeds) {
    const SeedData data = prepare_seed_data(config, seed);
    FairPolicy policy = fit_for_config(config, data, seed);
    result.evals.push_back(evaluate_policy(config, data, policy, seed));
    result.policies.push_back(std::move(policy));
  }
  result.report = aggregate(result.evals);
  return result;
}

ExperimentResult run_evaluation(const RunConfig& config,
                                const FairPolicy& policy) {
  // No fit happens here, so a missing cap/budget is not an error.
  RunConfig cfg = config;
  if (!cfg.fit.cap_override && !cfg.fit.budget_brc && !cfg.fit.budget_outcome) {
    cfg.fit.cap_override = 1.0;
  }
  cfg.validate();
  ExperimentResult result;
  for (std::uint64_t seed : cfg.seeds) {
    const SeedData data = prepare_seed_data(cfg, seed);
    result.evals.push_back(evaluate_policy(cfg, data, policy, seed));
  }
  result.report = aggregate(result.evals);
  return result;
}

namespace {

struct SweepDef {
  std::string dataset;
  std::vector<double> values;  // caps or omegas
  bool is_omega = false;
};

SweepDef sweep_for_target(const std::string& target) {
  if (target == "fico-if") return {"fico-synthetic", {1.0, 0.5, 0.25, 0.1}, false};
  if (target == "law-if") return {"lawschool", {1.0, 0.8, 0.4, 0.3}, false};
  if (target == "fico-sp") return {"fico-synthetic", {0.1, 0.08, 0.06, 0.04}, true};
  if (target == "law-sp") return {"lawschool", {0.1, 0.08, 0.06, 0.04}, true};
  throw ConfigError("unknown reproduce target '" + target +
                    "' (expected fico-if, law-if, fico-sp or law-sp)");
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

ReproduceResult run_reproduce(const std::string& target, RunConfig base) {
  const SweepDef sweep = sweep_for_target(target);
  base.dataset = sweep.dataset;
  if (sweep.dataset == "lawschool") {
    if (base.law_csv.empty()) {
      throw ConfigError("target '" + target + "' requires a law csv path");
    }
    base.alpha = 1.0;  // quadratic cost in score units
    if (base.fit.bins <= 0) base.fit.bins = 80;
  } else {
    if (base.fit.bins <= 0) base.fit.bins = 200;
  }
  base.fit.budget_brc.reset();
  base.fit.budget_outcome.reset();

  ReproduceResult result;
  result.target = target;

  // Deterministic baseline: single threshold for the cap sweeps, two
  // thresholds under the loosest rate constraint for the gap sweeps.
  RunConfig baseline = base;
  baseline.method = "baseline";
  baseline.fit.cap_override.reset();
  if (sweep.is_omega) {
    baseline.fit.group_mode = GroupMode::parity;
    baseline.fit.omega = sweep.values.front();
  } else {
    baseline.fit.group_mode = GroupMode::none;
    baseline.fit.omega = 0.0;
  }
  baseline.validate();
  result.columns.push_back({"Deterministic", run_experiment(baseline)});

  for (double value : sweep.values) {
    RunConfig variant = base;
    variant.method = "lp";
    if (sweep.is_omega) {
      variant.fit.group_mode = GroupMode::parity;
      variant.fit.omega = value;
      variant.fit.cap_override = 1.0;
      variant.validate();
      result.columns.push_back(
          {"Omega=" + format_value(value), run_experiment(variant)});
    } else {
      variant.fit.group_mode = GroupMode::none;
      variant.fit.omega = 0.0;
      variant.fit.cap_override = value;
      variant.validate();
      result.columns.push_back(
          {"L=" + format_value(value), run_experiment(variant)});
    }
  }
  result.base_config = base;
  return result;
}

namespace {

std::string format_cell(const Aggregate& a) {
  if (a.values.empty()) return "-";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f +/- %.3f", a.mean, a.stddev);
  return buf;
}

}  // namespace

std::string ReproduceResult::to_text() const {
  const bool sp = target == "fico-sp" || target == "law-sp";
  std::vector<std::pair<std::string, const Aggregate FairnessReport::*>> rows = {
      {"F1 score", &FairnessReport::f1_macro},
      {"IF ratio", &FairnessReport::if_ratio_outcome},
      {"IF ratio (BRC)", &FairnessReport::if_ratio_brc},
      {"S-DP", &FairnessReport::s_dp},
  };
  if (!sp) {
    rows.push_back({"EO-DP", &FairnessReport::eo_dp});
    rows.push_back({"ED-DP", &FairnessReport::ed_dp});
  }

  std::ostringstream out;
  out << "Target: " << target << "\n";
  const int width = 18;
  out << std::string(16, ' ');
  for (const auto& col : columns) {
    out << "| " << col.label << std::string(
        col.label.size() + 2 > static_cast<std::size_t>(width)
            ? 1
            : width - 2 - col.label.size(), ' ');
  }
  out << "\n";
  for (const auto& [label, member] : rows) {
    out << label << std::string(label.size() < 16 ? 16 - label.size() : 1, ' ');
    for (const auto& col : columns) {
      const std::string cell = format_cell(col.result.report.*member);
      out << "| " << cell
          << std::string(cell.size() + 2 > static_cast<std::size_t>(width)
                             ? 1
                             : width - 2 - cell.size(), ' ');
    }
    out << "\n";
  }
  return out.str();
}

nlohmann::json ReproduceResult::to_json() const {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& col : columns) {
    nlohmann::json evals = nlohmann::json::array();
    for (const auto& e : col.result.evals) evals.push_back(e.to_json());
    cols.push_back({{"label", col.label},
                    {"report", col.result.report.to_json()},
                    {"per_seed", evals}});
  }
  return {{"format", kReportFormat},
          {"target", target},
          {"config", base_config.to_json()},
          {"config_hash", base_config.config_hash()},
          {"seeds", base_config.seeds},
          {"columns", cols}};
}

std::vector<std::string> write_reproduce_outputs(const ReproduceResult& result,
                                                 const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::vector<std::string> written;

  auto write_file = [&](const std::string& rel, const std::string& content) {
    const fs::path path = fs::path(out_dir) / rel;
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << content;
    written.push_back(rel);
  };

  write_file("config.json", result.base_config.to_json().dump(2) + "\n");
  write_file("versions.txt", std::string("fairthresh ") + kVersion + "\n" +
                                 "policy-format " + kPolicyFormat + "\n" +
                                 "report-format " + kReportFormat + "\n" +
                                 "config-hash " +
                                 result.base_config.config_hash() + "\n");
  write_file("report.json", result.to_json().dump(2) + "\n");
  write_file("table.txt", result.to_text());
  for (const auto& col : result.columns) {
    std::string label = col.label;
    for (char& c : label) {
      if (c == '=' || c == ' ' || c == '/') c = '_';
    }
    for (std::size_t i = 0; i < col.result.policies.size(); ++i) {
      const auto& policy = col.result.policies[i];
      write_file("policies/" + label + "/seed_" +
                     std::to_string(policy.meta.seed) + ".json",
                 policy.to_json().dump(2) + "\n");
    }
  }
  return written;
}

}  // namespace fairthresh
