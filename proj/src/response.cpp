#include "fairthresh/response.hpp"

#include <algorithm>
#include <cmath>

namespace fairthresh {

BestResponse best_respond(double score, double threshold,
                          const CostModel& cost) {
  if (score >= threshold) return {score, 0.0, 1};
  if (score >= threshold - cost.cap()) {
    return {threshold, cost.value(threshold - score), 1};
  }
  return {score, 0.0, 0};
}

double expected_outcome(double score, const ThresholdDistribution& dist,
                        const CostModel& cost) {
  const double m = dist.mass_below(score + cost.cap());
  return std::clamp(m, 0.0, 1.0);
}

double expected_brc(double score, const ThresholdDistribution& dist,
                    const CostModel& cost) {
  const double cap = cost.cap();
  if (dist.is_dirac()) {
    const double t0 = dist.t0();
    if (score >= t0 - cap && score < t0) return cost.value(t0 - score);
    return 0.0;
  }
  const auto& edges = dist.edges();
  const auto& dens = dist.densities();
  const double lo = std::max(score, dist.support_lo());
  const double hi = std::min(score + cap, dist.support_hi());
  if (hi <= lo) return 0.0;
  // Closed-form per-bin integral of alpha*(t - l)^beta * p_k over the
  // overlap of bin k with (l, l + cap].
  const double alpha = cost.alpha();
  const double bp1 = cost.beta() + 1.0;
  double total = 0.0;
  const auto first = std::upper_bound(edges.begin(), edges.end(), lo);
  std::size_t k = first == edges.begin()
                      ? 0
                      : static_cast<std::size_t>(first - edges.begin()) - 1;
  for (; k < dens.size() && edges[k] < hi; ++k) {
    const double a = std::max(edges[k], lo);
    const double b = std::min(edges[k + 1], hi);
    if (b <= a || dens[k] == 0.0) continue;
    total += dens[k] * alpha *
             (std::pow(b - score, bp1) - std::pow(a - score, bp1)) / bp1;
  }
  return total;
}

namespace detail {

namespace {
double brc_integrand(const ThresholdDistribution& dist, const CostModel& cost,
                     double score, double t) {
  if (dist.is_dirac()) return 0.0;
  const auto& edges = dist.edges();
  if (t < edges.front() || t >= edges.back()) return 0.0;
  const auto it = std::upper_bound(edges.begin(), edges.end(), t);
  const std::size_t bin = static_cast<std::size_t>(it - edges.begin()) - 1;
  return dist.densities()[bin] * cost.value(t - score);
}

double simpson(const ThresholdDistribution& dist, const CostModel& cost,
               double score, double a, double b, double fa, double fm,
               double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = brc_integrand(dist, cost, score, lm);
  const double frm = brc_integrand(dist, cost, score, rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return simpson(dist, cost, score, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         simpson(dist, cost, score, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}
}  // namespace

double integrate_adaptive(const ThresholdDistribution& dist, double lo,
                          double hi, const CostModel& cost, double score,
                          double tol) {
  if (hi <= lo) return 0.0;
  const double fa = brc_integrand(dist, cost, score, lo);
  const double fm = brc_integrand(dist, cost, score, 0.5 * (lo + hi));
  const double fb = brc_integrand(dist, cost, score, hi);
  const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson(dist, cost, score, lo, hi, fa, fm, fb, whole, tol, 40);
}

}  // namespace detail

}  // namespace fairthresh
