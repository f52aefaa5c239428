#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fairthresh/error.hpp"
#include "fairthresh/experiment.hpp"
#include "fairthresh/version.hpp"
#include "json.hpp"

namespace ft = fairthresh;
namespace fs = std::filesystem;

namespace {

struct CommonOpts {
  ft::RunConfig config;
  std::optional<double> mc, mp, cap_l;
  std::optional<double> alpha;  // default depends on the dataset
  std::string group_mode = "none";
  bool strict_alg2 = false;
  bool if_exclude_sensitive = false;
  int bins = 0;  // 0: dataset default (200 credit, 80 law school)
};

void add_dataset_options(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--dataset", opts.config.dataset,
                  "Dataset: fico-synthetic or lawschool")
      ->check(CLI::IsMember({"fico-synthetic", "lawschool"}));
  cmd->add_option("--law-csv", opts.config.law_csv,
                  "Law-school records csv (12-attribute schema)");
  cmd->add_option("--cdf", opts.config.cdf_csv,
                  "Score CDF table csv (columns group,score,cdf); "
                  "defaults to the built-in two-group table");
  cmd->add_option("--n", opts.config.samples, "Synthetic sample count");
  cmd->add_option("--lambda", opts.config.lambda, "Cost weight lambda");
  cmd->add_option("--alpha", opts.alpha,
                  "Cost scale alpha (default 100 for fico-synthetic, "
                  "1 for lawschool)");
  cmd->add_option("--beta", opts.config.beta, "Cost exponent beta");
  cmd->add_option("--seeds", opts.config.seeds, "Seeds for the run");
  cmd->add_option("--if-subsample", opts.config.if_subsample,
                  "Bound the pairwise IF scan to this many rows (0 = exact)");
  cmd->add_flag("--if-exclude-sensitive", opts.if_exclude_sensitive,
                "Exclude the sensitive attribute from pair distances");
}

void add_fit_options(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--bins", opts.bins, "Number of density bins K");
  cmd->add_option("--mc", opts.mc, "Fairness budget M_c (best-response cost)");
  cmd->add_option("--mp", opts.mp, "Fairness budget M_p (expected outcome)");
  cmd->add_option("--cap-l", opts.cap_l, "Density cap L given directly");
  cmd->add_option("--omega", opts.config.fit.omega,
                  "Allowed positive-rate gap between groups");
  cmd->add_option("--group-mode", opts.group_mode,
                  "Group constraint: none, parity, eqopp, eqodds")
      ->check(CLI::IsMember({"none", "parity", "eqopp", "eqodds"}));
  cmd->add_flag("--strict-alg2", opts.strict_alg2,
                "Sample decisions on the raw score instead of the "
                "best-responded score");
}

void finalize(CommonOpts& opts) {
  opts.config.fit.budget_brc = opts.mc;
  opts.config.fit.budget_outcome = opts.mp;
  opts.config.fit.cap_override = opts.cap_l;
  opts.config.fit.group_mode = ft::group_mode_from_string(opts.group_mode);
  opts.config.fit.sampling = opts.strict_alg2 ? ft::SamplingRule::raw_score
                                              : ft::SamplingRule::best_response;
  opts.config.if_include_sensitive = !opts.if_exclude_sensitive;
  if (opts.bins > 0) {
    opts.config.fit.bins = opts.bins;
  } else {
    opts.config.fit.bins = opts.config.dataset == "lawschool" ? 80 : 200;
  }
  if (opts.alpha) {
    opts.config.alpha = *opts.alpha;
  } else {
    opts.config.alpha = opts.config.dataset == "lawschool" ? 1.0 : 100.0;
  }
}

void write_text_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ft::DataError("cannot write " + path.string());
  out << content;
}

void write_json_file(const fs::path& path, const nlohmann::json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

int run_fit(CommonOpts& opts, const std::string& out_dir, bool deterministic,
            bool dump_weights, bool dump_lp) {
  finalize(opts);
  ft::RunConfig& config = opts.config;
  config.method = deterministic ? "baseline" : "lp";
  config.validate();

  const std::uint64_t seed = config.seeds.front();
  const ft::SeedData data = ft::prepare_seed_data(config, seed);
  const auto train = ft::score_samples(data.splits.train, data.score);
  ft::FitSpec spec = config.fit;
  spec.seed = seed;

  ft::FairPolicy policy = ft::fit_for_config(config, data, seed);

  const fs::path dir(out_dir);
  write_json_file(dir / "config.json", config.to_json());
  write_json_file(dir / "policy.json", policy.to_json());
  nlohmann::json log{{"seed", seed},
                     {"config_hash", config.config_hash()},
                     {"method", policy.meta.method},
                     {"bins", policy.meta.bins},
                     {"lp_status", policy.meta.lp_status},
                     {"version", ft::kVersion}};
  if (policy.meta.objective) log["objective"] = *policy.meta.objective;
  if (policy.meta.cap) log["cap"] = *policy.meta.cap;
  if (policy.meta.train_f1) log["train_f1"] = *policy.meta.train_f1;
  write_json_file(dir / "fit_log.json", log);

  if (dump_lp || dump_weights) {
    if (deterministic) {
      throw ft::ConfigError("--dump-lp/--dump-weights need the lp method");
    }
    if (spec.group_mode == ft::GroupMode::none) {
      auto parts = ft::prepare_individual_lp(train, spec, data.cost, data.score);
      if (dump_lp) write_json_file(dir / "lp.json", parts.problem.to_json());
      if (dump_weights) {
        auto positive =
            ft::compute_positive_weights(train, parts.edges, data.cost);
        nlohmann::json w{{"edges", parts.edges},
                         {"error", parts.weights.error},
                         {"positive", positive.positive}};
        write_json_file(dir / "weights.json", nlohmann::json::array({w}));
      }
    } else {
      auto parts = ft::prepare_group_lp(
          train, spec, std::map<int, ft::CostModel>{{-1, data.cost}},
          data.score);
      if (dump_lp) write_json_file(dir / "lp.json", parts.problem.to_json());
      if (dump_weights) {
        nlohmann::json arr = nlohmann::json::array();
        for (std::size_t gi = 0; gi < parts.group_ids.size(); ++gi) {
          arr.push_back(parts.error_weights[gi].to_json());
        }
        write_json_file(dir / "weights.json", arr);
      }
    }
  }

  std::cout << "fit: method=" << policy.meta.method;
  if (policy.meta.objective) std::cout << " objective=" << *policy.meta.objective;
  if (policy.meta.train_f1) std::cout << " train_f1=" << *policy.meta.train_f1;
  std::cout << " -> " << (dir / "policy.json").string() << "\n";
  return 0;
}

int run_evaluate(CommonOpts& opts, const std::string& policy_path,
                 const std::string& out_dir) {
  finalize(opts);
  ft::RunConfig& config = opts.config;

  std::ifstream in(policy_path);
  if (!in) throw ft::DataError("cannot open policy file: " + policy_path);
  nlohmann::json pj;
  in >> pj;
  const ft::FairPolicy policy = ft::FairPolicy::from_json(pj);

  const ft::ExperimentResult result = ft::run_evaluation(config, policy);

  nlohmann::json evals = nlohmann::json::array();
  for (const auto& e : result.evals) evals.push_back(e.to_json());
  nlohmann::json report{{"format", ft::kReportFormat},
                        {"policy", policy_path},
                        {"config", config.to_json()},
                        {"config_hash", config.config_hash()},
                        {"seeds", config.seeds},
                        {"report", result.report.to_json()},
                        {"per_seed", evals}};

  std::ostringstream text;
  auto line = [&](const std::string& label, const ft::Aggregate& a) {
    text << label << ": ";
    if (a.values.empty()) {
      text << "-\n";
      return;
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f +/- %.3f", a.mean, a.stddev);
    text << buf << "\n";
  };
  line("F1 score", result.report.f1_macro);
  line("IF ratio", result.report.if_ratio_outcome);
  line("IF ratio (BRC)", result.report.if_ratio_brc);
  line("S-DP", result.report.s_dp);
  line("EO-DP", result.report.eo_dp);
  line("ED-DP", result.report.ed_dp);

  const fs::path dir(out_dir);
  write_json_file(dir / "report.json", report);
  write_text_file(dir / "report.txt", text.str());
  std::cout << text.str();
  return 0;
}

int run_predict(const std::string& policy_path,
                const std::vector<std::string>& feature_rows, int group,
                std::uint64_t seed) {
  std::ifstream in(policy_path);
  if (!in) throw ft::DataError("cannot open policy file: " + policy_path);
  nlohmann::json pj;
  in >> pj;
  const ft::FairPolicy policy = ft::FairPolicy::from_json(pj);

  ft::Rng rng(seed, "inference");
  for (const auto& row : feature_rows) {
    std::vector<double> feats;
    std::stringstream ss(row);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        feats.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ft::DataError("unparseable feature value '" + cell + "'");
      }
    }
    std::cout << ft::predict(policy, feats, group, rng) << "\n";
  }
  return 0;
}

int run_reproduce_cmd(CommonOpts& opts, const std::string& target,
                      const std::string& out_dir) {
  finalize(opts);
  opts.config.fit.cap_override.reset();
  opts.config.fit.budget_brc.reset();
  opts.config.fit.budget_outcome.reset();
  ft::ReproduceResult result = ft::run_reproduce(target, opts.config);
  ft::write_reproduce_outputs(result, out_dir);
  std::cout << result.to_text();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randomized threshold classifiers with density-capped "
               "threshold laws, fitted by linear programming"};
  app.set_version_flag("--version", ft::kVersion);
  app.require_subcommand(1);

  CommonOpts fit_opts, eval_opts, repro_opts;
  std::string out_dir = "out";
  bool deterministic = false, dump_weights = false, dump_lp = false;

  auto* fit = app.add_subcommand("fit", "Fit a policy and write it as JSON");
  add_dataset_options(fit, fit_opts);
  add_fit_options(fit, fit_opts);
  fit->add_option("--out", out_dir, "Output directory")->required();
  fit->add_flag("--deterministic", deterministic,
                "Fit the grid-search threshold baseline instead of the LP");
  fit->add_flag("--dump-weights", dump_weights, "Also write bin weights");
  fit->add_flag("--dump-lp", dump_lp, "Also write the assembled LP");

  std::string policy_path;
  std::string eval_out = "out";
  auto* evaluate = app.add_subcommand(
      "evaluate", "Evaluate a policy file over seeded dataset draws");
  add_dataset_options(evaluate, eval_opts);
  add_fit_options(evaluate, eval_opts);
  evaluate->add_option("--policy", policy_path, "Policy JSON file")->required();
  evaluate->add_option("--out", eval_out, "Output directory")->required();

  std::string predict_policy;
  std::vector<std::string> predict_features;
  int predict_group = -1;
  std::uint64_t predict_seed = 1;
  auto* predict = app.add_subcommand(
      "predict", "Sample decisions for feature rows under a policy");
  predict->add_option("--policy", predict_policy, "Policy JSON file")
      ->required();
  predict
      ->add_option("--features", predict_features,
                   "Comma-separated feature row (repeatable)")
      ->required();
  predict->add_option("--group", predict_group, "Group id of the rows");
  predict->add_option("--seed", predict_seed, "Sampling seed");

  std::string target;
  std::string repro_out = "out";
  auto* reproduce = app.add_subcommand(
      "reproduce", "Run a bundled benchmark sweep and print its table");
  add_dataset_options(reproduce, repro_opts);
  reproduce->add_option("--bins", repro_opts.bins, "Number of density bins K");
  reproduce
      ->add_option("--target", target,
                   "One of fico-if, law-if, fico-sp, law-sp")
      ->required();
  reproduce->add_option("--out", repro_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (fit->parsed()) {
      return run_fit(fit_opts, out_dir, deterministic, dump_weights, dump_lp);
    }
    if (evaluate->parsed()) {
      return run_evaluate(eval_opts, policy_path, eval_out);
    }
    if (predict->parsed()) {
      return run_predict(predict_policy, predict_features, predict_group,
                         predict_seed);
    }
    if (reproduce->parsed()) {
      return run_reproduce_cmd(repro_opts, target, repro_out);
    }
  } catch (const ft::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ft::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 3;
  } catch (const ft::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 4;
  } catch (const ft::EstimationError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
