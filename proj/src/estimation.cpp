#include "fairthresh/estimation.hpp"

#include <algorithm>
#include <cmath>

#include "fairthresh/error.hpp"

namespace fairthresh {

nlohmann::json BinWeights::to_json() const {
  nlohmann::json j{{"edges", edges}, {"group", group}};
  if (!error.empty()) j["error"] = error;
  if (!positive.empty()) j["positive"] = positive;
  return j;
}

std::vector<double> uniform_edges(double lo, double hi, int bins) {
  if (bins < 1) throw ConfigError("bin count must be >= 1");
  if (!(hi > lo)) throw ConfigError("bin range must have positive length");
  std::vector<double> edges(static_cast<std::size_t>(bins) + 1);
  const double width = (hi - lo) / bins;
  for (int k = 0; k <= bins; ++k) edges[static_cast<std::size_t>(k)] = lo + width * k;
  edges.back() = hi;
  return edges;
}

namespace {

void check_edges(const std::vector<double>& edges) {
  if (edges.size() < 2) throw ConfigError("need at least one bin");
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (!(edges[i] < edges[i + 1])) {
      throw ConfigError("bin edges must be strictly increasing");
    }
  }
}

// Length of bin_k intersected with {t : t <= reach}.
inline double accept_len(const std::vector<double>& edges, std::size_t k,
                         double reach) {
  return std::max(0.0, std::min(edges[k + 1], reach) - edges[k]);
}

}  // namespace

BinWeights compute_error_weights(std::span<const ScoredSample> samples,
                                 const std::vector<double>& edges,
                                 const CostModel& cost) {
  check_edges(edges);
  if (samples.empty()) {
    throw EstimationError("cannot estimate error weights from zero samples");
  }
  const std::size_t bins = edges.size() - 1;
  BinWeights w;
  w.edges = edges;
  w.error.assign(bins, 0.0);
  const double cap = cost.cap();
  for (const auto& s : samples) {
    const double reach = s.score + cap;
    for (std::size_t k = 0; k < bins; ++k) {
      const double width = edges[k + 1] - edges[k];
      const double accepted = accept_len(edges, k, reach);
      // A positive sample is misclassified by thresholds beyond its reach,
      // a negative one by thresholds within it (ties at t = reach accept).
      w.error[k] += s.label == 1 ? width - accepted : accepted;
    }
  }
  const double n = static_cast<double>(samples.size());
  for (double& a : w.error) a /= n;
  return w;
}

BinWeights compute_positive_weights(std::span<const ScoredSample> samples,
                                    const std::vector<double>& edges,
                                    const CostModel& cost) {
  check_edges(edges);
  if (samples.empty()) {
    throw EstimationError("cannot estimate positive weights from zero samples");
  }
  const std::size_t bins = edges.size() - 1;
  BinWeights w;
  w.edges = edges;
  w.positive.assign(bins, 0.0);
  const double cap = cost.cap();
  for (const auto& s : samples) {
    const double reach = s.score + cap;
    for (std::size_t k = 0; k < bins; ++k) {
      w.positive[k] += accept_len(edges, k, reach);
    }
  }
  const double n = static_cast<double>(samples.size());
  for (double& b : w.positive) b /= n;
  return w;
}

BinWeights conditional_positive_weights(std::span<const ScoredSample> samples,
                                        const std::vector<double>& edges,
                                        const CostModel& cost, int on_label) {
  std::vector<ScoredSample> kept;
  kept.reserve(samples.size());
  for (const auto& s : samples) {
    if (s.label == on_label) kept.push_back(s);
  }
  if (kept.empty()) {
    throw EstimationError("no samples with label " + std::to_string(on_label) +
                          " for conditional positive weights");
  }
  return compute_positive_weights(kept, edges, cost);
}

}  // namespace fairthresh
