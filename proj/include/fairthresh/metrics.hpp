#pragma once

#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace fairthresh {

// Unweighted mean of the per-class F1 scores for classes {0, 1}. A class
// absent from both predictions and labels contributes 0 (warned on stderr).
double macro_f1(std::span<const int> predictions, std::span<const int> labels);

enum class DisparityMode { sdp, eodp, eddp };

// Empirical acceptance-rate gap between the two groups, optionally
// conditioned on the true label (eodp: y=1 only; eddp: max over y in {0,1}).
double disparity(std::span<const int> predictions, std::span<const int> groups,
                 std::span<const int> labels, DisparityMode mode);

// max over pairs i != j of |gamma_i - gamma_j| / ||x_i - x_j||_2.
// Pairs at zero distance with equal gamma are skipped; unequal gamma at zero
// distance yields +infinity. `max_rows` > 0 evaluates a deterministic evenly
// strided subsample of that many rows instead of the full scan.
double if_ratio(std::span<const double> gammas,
                const std::vector<std::vector<double>>& features,
                std::size_t max_rows = 0);

// Mean and sample standard deviation (n-1 denominator; 0 for n = 1).
struct Aggregate {
  double mean = 0.0;
  double stddev = 0.0;
  std::vector<double> values;

  static Aggregate of(std::vector<double> values);
  nlohmann::json to_json() const;
};

// All evaluation metrics of one policy over a seed sweep.
struct FairnessReport {
  Aggregate f1_macro;
  Aggregate if_ratio_outcome;
  Aggregate if_ratio_brc;
  Aggregate s_dp;
  Aggregate eo_dp;
  Aggregate ed_dp;

  nlohmann::json to_json() const;
};

}  // namespace fairthresh
