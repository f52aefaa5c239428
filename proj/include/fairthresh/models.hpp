#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace fairthresh {

// Closed score interval [lower, upper] containing every observed score.
struct ScoreBounds {
  double lower = 0.0;
  double upper = 1.0;

  double width() const { return upper - lower; }
  void validate() const;  // throws ConfigError if lower >= upper

  // Bounds of a sample, widened by eps on both sides so boundary membership
  // is unambiguous.
  static ScoreBounds from_scores(std::span<const double> scores,
                                 double eps = 1e-9);

  nlohmann::json to_json() const;
  static ScoreBounds from_json(const nlohmann::json& j);
};

// Power-family improvement cost: moving a score up by d >= 0 costs
// g(d) = alpha * d^beta. The classification gain is worth 1/lambda units of
// cost, so no rational agent ever moves further than the cap g^{-1}(1/lambda).
class CostModel {
 public:
  CostModel(double lambda, double alpha, double beta);

  double lambda() const { return lambda_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

  // g(d) for d >= 0.
  double value(double d) const;
  // g'(d) for d >= 0.
  double derivative(double d) const;
  // Largest gap an agent will close: g^{-1}(1/lambda).
  double cap() const { return cap_; }
  // Max slope of g on [0, cap].
  double slope_bound() const { return slope_bound_; }

  nlohmann::json to_json() const;
  static CostModel from_json(const nlohmann::json& j);

 private:
  double lambda_;
  double alpha_;
  double beta_;
  double cap_;
  double slope_bound_;
};

// Map from feature vectors to scores. Either a single raw feature or an
// affine function of all features.
class ScoreModel {
 public:
  enum class Variant { coordinate, linear };

  static ScoreModel coordinate(std::size_t index);
  static ScoreModel linear(std::vector<double> weights, double intercept);

  Variant variant() const { return variant_; }
  std::size_t index() const { return index_; }
  const std::vector<double>& weights() const { return weights_; }
  double intercept() const { return intercept_; }

  double score(std::span<const double> features) const;
  // C_l: max Euclidean norm of the score gradient (exact for both variants).
  double gradient_bound() const { return gradient_bound_; }

  nlohmann::json to_json() const;
  static ScoreModel from_json(const nlohmann::json& j);

 private:
  ScoreModel() = default;
  Variant variant_ = Variant::coordinate;
  std::size_t index_ = 0;
  std::vector<double> weights_;
  double intercept_ = 0.0;
  double gradient_bound_ = 1.0;
};

// Requested Lipschitz budgets for the two individual-fairness notions.
struct FairnessBudget {
  std::optional<double> m_c;  // budget on best-response cost differences
  std::optional<double> m_p;  // budget on expected-outcome differences
};

// Density caps derived from a budget: any threshold density bounded by the
// cap certifies the corresponding Lipschitz property.
struct DensityCaps {
  std::optional<double> l_c;
  std::optional<double> l_p;
  double joint = 0.0;  // min over the caps that are present
};

// L_c = min(lambda*M_c/C_l, M_c/(C_l*C_g*cap)), L_p = M_p/C_l.
DensityCaps density_caps(const FairnessBudget& budget, const CostModel& cost,
                         const ScoreModel& score);

}  // namespace fairthresh
