#include "fairthresh/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fairthresh/error.hpp"

namespace fairthresh {

void ScoreBounds::validate() const {
  if (!(lower < upper)) {
    throw ConfigError("score bounds require lower < upper, got [" +
                      std::to_string(lower) + ", " + std::to_string(upper) +
                      "]");
  }
}

ScoreBounds ScoreBounds::from_scores(std::span<const double> scores,
                                     double eps) {
  if (scores.empty()) throw DataError("cannot derive score bounds: no scores");
  auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
  ScoreBounds b{*lo - eps, *hi + eps};
  b.validate();
  return b;
}

nlohmann::json ScoreBounds::to_json() const {
  return {{"lower", lower}, {"upper", upper}};
}

ScoreBounds ScoreBounds::from_json(const nlohmann::json& j) {
  ScoreBounds b{j.at("lower").get<double>(), j.at("upper").get<double>()};
  b.validate();
  return b;
}

CostModel::CostModel(double lambda, double alpha, double beta)
    : lambda_(lambda), alpha_(alpha), beta_(beta) {
  if (!(lambda > 0.0) || !(alpha > 0.0) || !(beta >= 1.0)) {
    throw ConfigError(
        "invalid cost model: need lambda > 0, alpha > 0, beta >= 1");
  }
  cap_ = std::pow(1.0 / (alpha_ * lambda_), 1.0 / beta_);
  // g'(d) = alpha*beta*d^(beta-1) is maximal at d = cap for beta > 1 and
  // constant alpha for beta = 1.
  slope_bound_ = beta_ > 1.0 ? alpha_ * beta_ * std::pow(cap_, beta_ - 1.0)
                             : alpha_;
}

double CostModel::value(double d) const {
  if (d <= 0.0) return 0.0;
  return alpha_ * std::pow(d, beta_);
}

double CostModel::derivative(double d) const {
  if (d < 0.0) return 0.0;
  if (beta_ == 1.0) return alpha_;
  return alpha_ * beta_ * std::pow(d, beta_ - 1.0);
}

nlohmann::json CostModel::to_json() const {
  return {{"lambda", lambda_}, {"alpha", alpha_}, {"beta", beta_}};
}

CostModel CostModel::from_json(const nlohmann::json& j) {
  return CostModel(j.at("lambda").get<double>(), j.at("alpha").get<double>(),
                   j.at("beta").get<double>());
}

ScoreModel ScoreModel::coordinate(std::size_t index) {
  ScoreModel m;
  m.variant_ = Variant::coordinate;
  m.index_ = index;
  m.gradient_bound_ = 1.0;
  return m;
}

ScoreModel ScoreModel::linear(std::vector<double> weights, double intercept) {
  if (weights.empty()) throw ConfigError("linear score model needs weights");
  ScoreModel m;
  m.variant_ = Variant::linear;
  m.weights_ = std::move(weights);
  m.intercept_ = intercept;
  double sq = 0.0;
  for (double w : m.weights_) sq += w * w;
  m.gradient_bound_ = std::sqrt(sq);
  return m;
}

double ScoreModel::score(std::span<const double> features) const {
  if (variant_ == Variant::coordinate) {
    if (index_ >= features.size()) {
      throw DataError("coordinate score model: feature index out of range");
    }
    return features[index_];
  }
  if (features.size() != weights_.size()) {
    throw DataError("linear score model: feature dimension mismatch");
  }
  double s = intercept_;
  for (std::size_t i = 0; i < weights_.size(); ++i) s += weights_[i] * features[i];
  return s;
}

nlohmann::json ScoreModel::to_json() const {
  if (variant_ == Variant::coordinate) {
    return {{"variant", "coordinate"}, {"index", index_}};
  }
  return {{"variant", "linear"}, {"weights", weights_}, {"intercept", intercept_}};
}

ScoreModel ScoreModel::from_json(const nlohmann::json& j) {
  const std::string v = j.at("variant").get<std::string>();
  if (v == "coordinate") return coordinate(j.at("index").get<std::size_t>());
  if (v == "linear") {
    return linear(j.at("weights").get<std::vector<double>>(),
                  j.at("intercept").get<double>());
  }
  throw ConfigError("unknown score model variant: " + v);
}

DensityCaps density_caps(const FairnessBudget& budget, const CostModel& cost,
                         const ScoreModel& score) {
  if (!budget.m_c && !budget.m_p) {
    throw ConfigError("fairness budget needs at least one of M_c, M_p");
  }
  const double c_l = score.gradient_bound();
  if (!(c_l > 0.0)) {
    throw ConfigError("degenerate score model: zero gradient bound");
  }
  DensityCaps caps;
  double joint = std::numeric_limits<double>::infinity();
  if (budget.m_c) {
    if (!(*budget.m_c > 0.0)) throw ConfigError("M_c must be positive");
    const double l_c = std::min(cost.lambda() * *budget.m_c / c_l,
                                *budget.m_c /
                                    (c_l * cost.slope_bound() * cost.cap()));
    caps.l_c = l_c;
    joint = std::min(joint, l_c);
  }
  if (budget.m_p) {
    if (!(*budget.m_p > 0.0)) throw ConfigError("M_p must be positive");
    const double l_p = *budget.m_p / c_l;
    caps.l_p = l_p;
    joint = std::min(joint, l_p);
  }
  caps.joint = joint;
  return caps;
}

}  // namespace fairthresh
