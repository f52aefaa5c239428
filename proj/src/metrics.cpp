#include "fairthresh/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <set>

#include "fairthresh/error.hpp"

namespace fairthresh {

double macro_f1(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.empty() || predictions.size() != labels.size()) {
    throw ConfigError("macro_f1: empty or mismatched inputs");
  }
  double sum = 0.0;
  for (int cls : {0, 1}) {
    std::size_t tp = 0, fp = 0, fn = 0, present = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
      const bool p = predictions[i] == cls;
      const bool y = labels[i] == cls;
      present += p || y;
      tp += p && y;
      fp += p && !y;
      fn += !p && y;
    }
    if (present == 0) {
      std::cerr << "warning: class " << cls
                << " absent from predictions and labels; F1 taken as 0\n";
      continue;
    }
    const double denom = static_cast<double>(2 * tp + fp + fn);
    if (denom > 0.0) sum += 2.0 * static_cast<double>(tp) / denom;
  }
  return sum / 2.0;
}

double disparity(std::span<const int> predictions, std::span<const int> groups,
                 std::span<const int> labels, DisparityMode mode) {
  if (predictions.empty() || predictions.size() != groups.size() ||
      predictions.size() != labels.size()) {
    throw ConfigError("disparity: empty or mismatched inputs");
  }
  std::set<int> ids(groups.begin(), groups.end());
  if (ids.size() != 2) {
    throw ConfigError("disparity: expected exactly two groups, got " +
                      std::to_string(ids.size()));
  }
  const int g0 = *ids.begin();
  const int g1 = *std::next(ids.begin());

  auto rate = [&](int group, int label, bool condition) {
    std::size_t pos = 0, count = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
      if (groups[i] != group) continue;
      if (condition && labels[i] != label) continue;
      ++count;
      pos += predictions[i] == 1;
    }
    if (count == 0) {
      throw ConfigError("disparity: empty cell (group " +
                        std::to_string(group) +
                        (condition ? ", label " + std::to_string(label) : "") +
                        ")");
    }
    return static_cast<double>(pos) / static_cast<double>(count);
  };

  switch (mode) {
    case DisparityMode::sdp:
      return std::abs(rate(g1, 0, false) - rate(g0, 0, false));
    case DisparityMode::eodp:
      return std::abs(rate(g1, 1, true) - rate(g0, 1, true));
    case DisparityMode::eddp: {
      const double pos = std::abs(rate(g1, 1, true) - rate(g0, 1, true));
      const double neg = std::abs(rate(g1, 0, true) - rate(g0, 0, true));
      return std::max(pos, neg);
    }
  }
  return 0.0;
}

double if_ratio(std::span<const double> gammas,
                const std::vector<std::vector<double>>& features,
                std::size_t max_rows) {
  if (gammas.size() != features.size()) {
    throw ConfigError("if_ratio: gamma/feature size mismatch");
  }
  if (gammas.size() < 2) {
    throw ConfigError("if_ratio: need at least two rows");
  }
  std::vector<std::size_t> rows;
  const std::size_t n = gammas.size();
  if (max_rows > 1 && max_rows < n) {
    rows.reserve(max_rows);
    for (std::size_t i = 0; i < max_rows; ++i) {
      rows.push_back(i * n / max_rows);
    }
  } else {
    rows.resize(n);
    for (std::size_t i = 0; i < n; ++i) rows[i] = i;
  }

  double best = 0.0;
  for (std::size_t a = 0; a < rows.size(); ++a) {
    const auto& xa = features[rows[a]];
    const double ga = gammas[rows[a]];
    for (std::size_t b = a + 1; b < rows.size(); ++b) {
      const auto& xb = features[rows[b]];
      double sq = 0.0;
      for (std::size_t k = 0; k < xa.size(); ++k) {
        const double d = xa[k] - xb[k];
        sq += d * d;
      }
      const double diff = std::abs(ga - gammas[rows[b]]);
      if (sq == 0.0) {
        if (diff == 0.0) continue;
        return std::numeric_limits<double>::infinity();
      }
      const double ratio = diff / std::sqrt(sq);
      if (ratio > best) best = ratio;
    }
  }
  return best;
}

Aggregate Aggregate::of(std::vector<double> values) {
  Aggregate a;
  a.values = std::move(values);
  if (a.values.empty()) return a;
  double sum = 0.0;
  for (double v : a.values) sum += v;
  a.mean = sum / static_cast<double>(a.values.size());
  if (a.values.size() > 1) {
    double sq = 0.0;
    for (double v : a.values) sq += (v - a.mean) * (v - a.mean);
    a.stddev = std::sqrt(sq / static_cast<double>(a.values.size() - 1));
  }
  return a;
}

nlohmann::json Aggregate::to_json() const {
  return {{"mean", mean}, {"std", stddev}, {"values", values}};
}

nlohmann::json FairnessReport::to_json() const {
  return {{"f1_macro", f1_macro.to_json()},
          {"if_ratio_outcome", if_ratio_outcome.to_json()},
          {"if_ratio_brc", if_ratio_brc.to_json()},
          {"s_dp", s_dp.to_json()},
          {"eo_dp", eo_dp.to_json()},
          {"ed_dp", ed_dp.to_json()}};
}

}  // namespace fairthresh
