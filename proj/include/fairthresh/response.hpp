#pragma once

#include "fairthresh/models.hpp"
#include "fairthresh/threshold_dist.hpp"

namespace fairthresh {

// Outcome of one agent facing one realized threshold.
struct BestResponse {
  double new_score = 0.0;
  double cost_paid = 0.0;
  int outcome = 0;
};

// Utility-maximizing move against a fixed threshold t. An agent at score l
// moves to t exactly when t - cap <= l < t (closed on the left), stays put
// otherwise.
BestResponse best_respond(double score, double threshold,
                          const CostModel& cost);

// Probability of a positive decision after best response:
// the threshold mass at or below score + cap.
double expected_outcome(double score, const ThresholdDistribution& dist,
                        const CostModel& cost);

// Expected cost paid under best response, integrating g(t - l) over the
// reachable threshold band (l, l + cap]. Closed form for power costs.
double expected_brc(double score, const ThresholdDistribution& dist,
                    const CostModel& cost);

namespace detail {
// Adaptive Simpson quadrature fallback for non-power cost shapes; kept
// internal, the power family always uses the closed form.
double integrate_adaptive(const ThresholdDistribution& dist, double lo,
                          double hi, const CostModel& cost, double score,
                          double tol = 1e-9);
}  // namespace detail

}  // namespace fairthresh
