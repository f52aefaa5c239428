#pragma once

#include <span>
#include <vector>

#include "fairthresh/models.hpp"
#include "json.hpp"

namespace fairthresh {

// One labeled observation reduced to its score.
struct ScoredSample {
  double score = 0.0;
  int label = 0;  // {0, 1}
  int group = -1; // -1 when the dataset has no groups
};

// Per-bin LP coefficients estimated from a sample: `error` integrates the
// post-best-response misclassification rate over each bin, `positive` the
// positive-decision rate. Both are plug-in estimates under the empirical
// measure, so they reduce to exact interval lengths per sample.
struct BinWeights {
  std::vector<double> edges;
  std::vector<double> error;     // A_k, empty if not computed
  std::vector<double> positive;  // B_k, empty if not computed
  int group = -1;

  nlohmann::json to_json() const;
};

// K+1 equally spaced edges over [lo, hi].
std::vector<double> uniform_edges(double lo, double hi, int bins);

// A_k: mean over samples of the length of the sub-interval of bin k on which
// a threshold misclassifies the sample after its best response.
BinWeights compute_error_weights(std::span<const ScoredSample> samples,
                                 const std::vector<double>& edges,
                                 const CostModel& cost);

// B_k: mean over samples of the length of the sub-interval of bin k on which
// the sample is positively classified after its best response.
BinWeights compute_positive_weights(std::span<const ScoredSample> samples,
                                    const std::vector<double>& edges,
                                    const CostModel& cost);

// Same as compute_positive_weights restricted to samples with the given label.
BinWeights conditional_positive_weights(std::span<const ScoredSample> samples,
                                        const std::vector<double>& edges,
                                        const CostModel& cost, int on_label);

}  // namespace fairthresh
