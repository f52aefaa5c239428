#include "fairthresh/threshold_dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fairthresh/error.hpp"
#include "fairthresh/rng.hpp"

namespace fairthresh {

ThresholdDistribution ThresholdDistribution::dirac(double t0) {
  if (!std::isfinite(t0)) throw ConfigError("dirac threshold must be finite");
  ThresholdDistribution d;
  d.kind_ = Kind::dirac;
  d.t0_ = t0;
  return d;
}

ThresholdDistribution ThresholdDistribution::piecewise(
    std::vector<double> edges, std::vector<double> densities) {
  if (edges.size() < 2 || densities.size() + 1 != edges.size()) {
    throw ConfigError("piecewise distribution: need K+1 edges for K bins");
  }
  const std::size_t k = densities.size();
  const double width = (edges.back() - edges.front()) / static_cast<double>(k);
  if (!(width > 0.0)) {
    throw ConfigError("piecewise distribution: edges must increase");
  }
  for (std::size_t i = 0; i < k; ++i) {
    const double w = edges[i + 1] - edges[i];
    if (!(w > 0.0) || std::abs(w - width) > 1e-6 * width) {
      throw ConfigError("piecewise distribution: bins must have equal width");
    }
    if (!std::isfinite(densities[i]) || densities[i] < -1e-9) {
      throw ConfigError("piecewise distribution: negative density");
    }
    densities[i] = std::max(densities[i], 0.0);
  }
  double mass = 0.0;
  for (std::size_t i = 0; i < k; ++i) mass += densities[i] * (edges[i + 1] - edges[i]);
  if (std::abs(mass - 1.0) > 1e-7) {
    throw ConfigError("piecewise distribution: total mass " +
                      std::to_string(mass) + " != 1");
  }
  ThresholdDistribution d;
  d.kind_ = Kind::piecewise;
  d.edges_ = std::move(edges);
  d.densities_ = std::move(densities);
  // Normalize away solver round-off so downstream mass checks are exact.
  for (double& p : d.densities_) p /= mass;
  d.cum_.assign(k + 1, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    d.cum_[i + 1] = d.cum_[i] + d.densities_[i] * (d.edges_[i + 1] - d.edges_[i]);
  }
  d.cum_.back() = 1.0;
  return d;
}

double ThresholdDistribution::support_lo() const {
  return is_dirac() ? t0_ : edges_.front();
}

double ThresholdDistribution::support_hi() const {
  return is_dirac() ? t0_ : edges_.back();
}

double ThresholdDistribution::bin_width() const {
  if (is_dirac()) return 0.0;
  return (edges_.back() - edges_.front()) /
         static_cast<double>(densities_.size());
}

double ThresholdDistribution::mass_below(double t) const {
  if (is_dirac()) return t0_ <= t ? 1.0 : 0.0;
  if (t <= edges_.front()) return 0.0;
  if (t >= edges_.back()) return 1.0;
  const auto it = std::upper_bound(edges_.begin(), edges_.end(), t);
  const std::size_t bin = static_cast<std::size_t>(it - edges_.begin()) - 1;
  return cum_[bin] + densities_[bin] * (t - edges_[bin]);
}

double ThresholdDistribution::max_density() const {
  if (is_dirac()) return std::numeric_limits<double>::infinity();
  return *std::max_element(densities_.begin(), densities_.end());
}

double ThresholdDistribution::sample(Rng& rng) const {
  if (is_dirac()) return t0_;
  const double u = rng.uniform();
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
  std::size_t bin = it == cum_.begin()
                        ? 0
                        : static_cast<std::size_t>(it - cum_.begin()) - 1;
  // Skip zero-density bins the cumulative sum may have tied on.
  while (bin + 1 < densities_.size() && densities_[bin] == 0.0) ++bin;
  const double width = edges_[bin + 1] - edges_[bin];
  return edges_[bin] + rng.uniform() * width;
}

nlohmann::json ThresholdDistribution::to_json() const {
  if (is_dirac()) return {{"kind", "dirac"}, {"t0", t0_}};
  return {{"kind", "piecewise"}, {"edges", edges_}, {"densities", densities_}};
}

ThresholdDistribution ThresholdDistribution::from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "dirac") return dirac(j.at("t0").get<double>());
  if (kind == "piecewise") {
    return piecewise(j.at("edges").get<std::vector<double>>(),
                     j.at("densities").get<std::vector<double>>());
  }
  throw ConfigError("unknown threshold distribution kind: " + kind);
}

}  // namespace fairthresh
