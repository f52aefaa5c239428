#pragma once

#include <vector>

#include "json.hpp"

namespace fairthresh {

class Rng;

// Threshold law of a randomized threshold classifier: either a deterministic
// threshold (point mass at t0) or a piecewise-constant density over K
// equal-width bins.
class ThresholdDistribution {
 public:
  enum class Kind { dirac, piecewise };

  static ThresholdDistribution dirac(double t0);
  // edges must be strictly increasing with (near-)equal widths; densities are
  // non-negative and integrate to 1 (validated, then normalized exactly).
  static ThresholdDistribution piecewise(std::vector<double> edges,
                                         std::vector<double> densities);

  Kind kind() const { return kind_; }
  bool is_dirac() const { return kind_ == Kind::dirac; }
  double t0() const { return t0_; }
  const std::vector<double>& edges() const { return edges_; }
  const std::vector<double>& densities() const { return densities_; }

  double support_lo() const;
  double support_hi() const;
  double bin_width() const;

  // P{T <= t}.
  double mass_below(double t) const;
  // Max density; +infinity for a point mass.
  double max_density() const;

  // One threshold draw: pick a bin with probability density*width, then a
  // uniform offset within the bin.
  double sample(Rng& rng) const;

  nlohmann::json to_json() const;
  static ThresholdDistribution from_json(const nlohmann::json& j);

 private:
  ThresholdDistribution() = default;

  Kind kind_ = Kind::dirac;
  double t0_ = 0.0;
  std::vector<double> edges_;      // size K+1
  std::vector<double> densities_;  // size K
  std::vector<double> cum_;        // cumulative mass at each edge, size K+1
};

}  // namespace fairthresh
