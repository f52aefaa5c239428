#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "fairthresh/data.hpp"
#include "fairthresh/error.hpp"
#include "fairthresh/experiment.hpp"
#include "fairthresh/lp.hpp"
#include "fairthresh/metrics.hpp"
#include "fairthresh/policy.hpp"
#include "fairthresh/response.hpp"
#include "fairthresh/version.hpp"

namespace py = pybind11;
using namespace fairthresh;

namespace {

DisparityMode disparity_mode(const std::string& mode) {
  if (mode == "sdp") return DisparityMode::sdp;
  if (mode == "eodp") return DisparityMode::eodp;
  if (mode == "eddp") return DisparityMode::eddp;
  throw ConfigError("unknown disparity mode: " + mode);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Randomized threshold classifiers with density-capped threshold "
            "laws, fitted by linear programming";
  m.attr("__version__") = kVersion;

  py::register_exception<InfeasibleError>(m, "InfeasibleError");

  py::class_<CostModel>(m, "CostModel")
      .def(py::init<double, double, double>(), py::arg("lambda_"),
           py::arg("alpha"), py::arg("beta"))
      .def_property_readonly("lambda_", &CostModel::lambda)
      .def_property_readonly("alpha", &CostModel::alpha)
      .def_property_readonly("beta", &CostModel::beta)
      .def_property_readonly("cap", &CostModel::cap)
      .def_property_readonly("slope_bound", &CostModel::slope_bound)
      .def("value", &CostModel::value, py::arg("d"));

  py::class_<ScoreModel>(m, "ScoreModel")
      .def_static("coordinate", &ScoreModel::coordinate, py::arg("index"))
      .def_static("linear", &ScoreModel::linear, py::arg("weights"),
                  py::arg("intercept"))
      .def_property_readonly("gradient_bound", &ScoreModel::gradient_bound)
      .def("score", [](const ScoreModel& s, const std::vector<double>& x) {
        return s.score(x);
      });

  m.def(
      "density_caps",
      [](std::optional<double> m_c, std::optional<double> m_p,
         const CostModel& cost, const ScoreModel& score) {
        const auto caps = density_caps({m_c, m_p}, cost, score);
        return py::make_tuple(caps.l_c, caps.l_p, caps.joint);
      },
      py::arg("m_c"), py::arg("m_p"), py::arg("cost"), py::arg("score"),
      "Returns (L_c, L_p, joint cap) for the given fairness budgets");

  py::class_<ThresholdDistribution>(m, "ThresholdDistribution")
      .def_static("dirac", &ThresholdDistribution::dirac, py::arg("t0"))
      .def_static("piecewise", &ThresholdDistribution::piecewise,
                  py::arg("edges"), py::arg("densities"))
      .def_property_readonly("is_dirac", &ThresholdDistribution::is_dirac)
      .def_property_readonly(
          "edges",
          [](const ThresholdDistribution& d) { return d.edges(); })
      .def_property_readonly(
          "densities",
          [](const ThresholdDistribution& d) { return d.densities(); })
      .def("mass_below", &ThresholdDistribution::mass_below, py::arg("t"))
      .def("max_density", &ThresholdDistribution::max_density)
      .def("sample",
           [](const ThresholdDistribution& d, std::uint64_t seed) {
             Rng rng(seed, "py-sample");
             return d.sample(rng);
           },
           py::arg("seed"));

  py::class_<BestResponse>(m, "BestResponse")
      .def_readonly("new_score", &BestResponse::new_score)
      .def_readonly("cost_paid", &BestResponse::cost_paid)
      .def_readonly("outcome", &BestResponse::outcome);

  m.def("best_respond", &best_respond, py::arg("score"), py::arg("threshold"),
        py::arg("cost"));
  m.def("expected_outcome", &expected_outcome, py::arg("score"),
        py::arg("dist"), py::arg("cost"));
  m.def("expected_brc", &expected_brc, py::arg("score"), py::arg("dist"),
        py::arg("cost"));

  py::class_<ScoredSample>(m, "ScoredSample")
      .def(py::init([](double score, int label, int group) {
             return ScoredSample{score, label, group};
           }),
           py::arg("score"), py::arg("label"), py::arg("group") = -1)
      .def_readwrite("score", &ScoredSample::score)
      .def_readwrite("label", &ScoredSample::label)
      .def_readwrite("group", &ScoredSample::group);

  py::class_<BinWeights>(m, "BinWeights")
      .def_readonly("edges", &BinWeights::edges)
      .def_readonly("error", &BinWeights::error)
      .def_readonly("positive", &BinWeights::positive)
      .def_readonly("group", &BinWeights::group);

  m.def("uniform_edges", &uniform_edges, py::arg("lo"), py::arg("hi"),
        py::arg("bins"));
  m.def("compute_error_weights",
        [](const std::vector<ScoredSample>& samples,
           const std::vector<double>& edges, const CostModel& cost) {
          return compute_error_weights(samples, edges, cost);
        });
  m.def("compute_positive_weights",
        [](const std::vector<ScoredSample>& samples,
           const std::vector<double>& edges, const CostModel& cost) {
          return compute_positive_weights(samples, edges, cost);
        });
  m.def("conditional_positive_weights",
        [](const std::vector<ScoredSample>& samples,
           const std::vector<double>& edges, const CostModel& cost,
           int on_label) {
          return conditional_positive_weights(samples, edges, cost, on_label);
        });

  py::class_<lp::LpProblem>(m, "LpProblem")
      .def(py::init<>())
      .def_readwrite("objective", &lp::LpProblem::objective)
      .def_readwrite("eq_rows", &lp::LpProblem::eq_rows)
      .def_readwrite("eq_rhs", &lp::LpProblem::eq_rhs)
      .def_readwrite("le_rows", &lp::LpProblem::le_rows)
      .def_readwrite("le_rhs", &lp::LpProblem::le_rhs)
      .def_readwrite("upper", &lp::LpProblem::upper);

  py::class_<lp::LpSolution>(m, "LpSolution")
      .def_readonly("x", &lp::LpSolution::x)
      .def_readonly("objective_value", &lp::LpSolution::objective_value)
      .def_property_readonly("status", [](const lp::LpSolution& s) {
        return lp::to_string(s.status);
      });

  m.def("lp_solve", &lp::solve, py::arg("problem"));
  m.def("lp_brute_force", &lp::brute_force_oracle, py::arg("problem"));

  py::enum_<GroupMode>(m, "GroupMode")
      .value("none", GroupMode::none)
      .value("parity", GroupMode::parity)
      .value("equal_opportunity", GroupMode::equal_opportunity)
      .value("equalized_odds", GroupMode::equalized_odds);

  py::class_<FitSpec>(m, "FitSpec")
      .def(py::init<>())
      .def_readwrite("bins", &FitSpec::bins)
      .def_readwrite("budget_brc", &FitSpec::budget_brc)
      .def_readwrite("budget_outcome", &FitSpec::budget_outcome)
      .def_readwrite("cap_override", &FitSpec::cap_override)
      .def_readwrite("group_mode", &FitSpec::group_mode)
      .def_readwrite("omega", &FitSpec::omega)
      .def_readwrite("seed", &FitSpec::seed);

  py::class_<FairPolicy>(m, "FairPolicy")
      .def_property_readonly("objective",
                             [](const FairPolicy& p) { return p.meta.objective; })
      .def_property_readonly("cap",
                             [](const FairPolicy& p) { return p.meta.cap; })
      .def_property_readonly("method",
                             [](const FairPolicy& p) { return p.meta.method; })
      .def("distribution",
           [](const FairPolicy& p, int group) {
             return p.component_for(group).dist;
           },
           py::arg("group") = -1)
      .def("expected_outcome",
           [](const FairPolicy& p, double score, int group) {
             return policy_expected_outcome(p, score, group);
           },
           py::arg("score"), py::arg("group") = -1)
      .def("expected_brc",
           [](const FairPolicy& p, double score, int group) {
             return policy_expected_brc(p, score, group);
           },
           py::arg("score"), py::arg("group") = -1)
      .def("predict",
           [](const FairPolicy& p, const std::vector<double>& features,
              int group, std::uint64_t seed) {
             Rng rng(seed, "inference");
             return predict(p, features, group, rng);
           },
           py::arg("features"), py::arg("group") = -1, py::arg("seed") = 1)
      .def("to_json",
           [](const FairPolicy& p) { return p.to_json().dump(2); })
      .def_static("from_json", [](const std::string& text) {
        return FairPolicy::from_json(nlohmann::json::parse(text));
      });

  m.def("fit_individual",
        [](const std::vector<ScoredSample>& train, const FitSpec& spec,
           const CostModel& cost, const ScoreModel& score) {
          return fit_individual(train, spec, cost, score);
        },
        py::arg("train"), py::arg("spec"), py::arg("cost"), py::arg("score"));
  m.def("fit_group",
        [](const std::vector<ScoredSample>& train, const FitSpec& spec,
           const CostModel& cost, const ScoreModel& score) {
          return fit_group(train, spec, cost, score);
        },
        py::arg("train"), py::arg("spec"), py::arg("cost"), py::arg("score"));
  m.def("fit_deterministic_baseline",
        [](const std::vector<ScoredSample>& train,
           const std::vector<ScoredSample>& validation, const FitSpec& spec,
           const CostModel& cost, const ScoreModel& score) {
          return fit_deterministic_baseline(train, validation, spec, cost,
                                            score);
        },
        py::arg("train"), py::arg("validation"), py::arg("spec"),
        py::arg("cost"), py::arg("score"));
  m.def("expected_error",
        [](const FairPolicy& policy, const std::vector<ScoredSample>& samples) {
          return expected_error(policy, samples);
        });

  m.def("macro_f1",
        [](const std::vector<int>& preds, const std::vector<int>& labels) {
          return macro_f1(preds, labels);
        });
  m.def("disparity",
        [](const std::vector<int>& preds, const std::vector<int>& groups,
           const std::vector<int>& labels, const std::string& mode) {
          return disparity(preds, groups, labels, disparity_mode(mode));
        });
  m.def("if_ratio",
        [](const std::vector<double>& gammas,
           const std::vector<std::vector<double>>& features,
           std::size_t max_rows) {
          return if_ratio(gammas, features, max_rows);
        },
        py::arg("gammas"), py::arg("features"), py::arg("max_rows") = 0);

  py::class_<TabularDataset>(m, "TabularDataset")
      .def_readonly("feature_names", &TabularDataset::feature_names)
      .def_readonly("features", &TabularDataset::features)
      .def_readonly("labels", &TabularDataset::labels)
      .def_readonly("groups", &TabularDataset::groups)
      .def("__len__", &TabularDataset::size);

  py::class_<GroupCdfTable>(m, "GroupCdfTable")
      .def_static("builtin_credit", &GroupCdfTable::builtin_credit)
      .def_static("from_csv", &GroupCdfTable::from_csv, py::arg("path"))
      .def("quantile", &GroupCdfTable::quantile, py::arg("group"), py::arg("u"))
      .def("cdf_at", &GroupCdfTable::cdf_at, py::arg("group"), py::arg("score"));

  m.def("sample_fico",
        [](const GroupCdfTable& table, std::size_t n, std::uint64_t seed) {
          return sample_fico(table, n, seed);
        },
        py::arg("table"), py::arg("n"), py::arg("seed"));
  m.def("split",
        [](const TabularDataset& data, std::uint64_t seed) {
          SplitSpec spec;
          spec.seed = seed;
          auto result = split(data, spec);
          return py::make_tuple(result.train, result.validation, result.test);
        },
        py::arg("dataset"), py::arg("seed"));
  m.def("score_samples",
        [](const TabularDataset& data, const ScoreModel& model) {
          return score_samples(data, model);
        });
  m.def("load_lawschool",
        [](const std::string& path, std::uint64_t seed) {
          auto law = load_lawschool(path, seed);
          return py::make_tuple(law.dataset, law.score, law.train_rmse);
        },
        py::arg("path"), py::arg("seed"));

  m.def("run_reproduce",
        [](const std::string& target, std::size_t samples,
           const std::vector<std::uint64_t>& seeds, const std::string& law_csv) {
          RunConfig config;
          config.samples = samples;
          config.seeds = seeds;
          config.law_csv = law_csv;
          config.fit.bins = 0;
          auto result = run_reproduce(target, config);
          return py::make_tuple(result.to_text(), result.to_json().dump(2));
        },
        py::arg("target"), py::arg("samples") = 5000,
        py::arg("seeds") = std::vector<std::uint64_t>{1, 2, 3, 4, 5},
        py::arg("law_csv") = std::string(),
        "Runs a bundled sweep; returns (table text, report json)");
}
