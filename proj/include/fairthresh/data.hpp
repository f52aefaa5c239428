#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fairthresh/estimation.hpp"
#include "fairthresh/models.hpp"

namespace fairthresh {

// Per-group cumulative score distribution given as sorted knots; sampling
// interpolates linearly between knots (piecewise-uniform law).
struct GroupCdfTable {
  struct Knot {
    double score = 0.0;
    double cdf = 0.0;
  };
  struct Group {
    std::string name;
    std::vector<Knot> knots;
    double prior = 0.0;
  };
  std::vector<Group> groups;

  void validate() const;
  double score_min() const;
  double score_max() const;
  // Piecewise-linear CDF of one group, clamped to [0, 1].
  double cdf_at(std::size_t group, double score) const;
  // Inverse CDF with linear interpolation.
  double quantile(std::size_t group, double u) const;

  // CSV with header group,score,cdf; group priors default to equal and can
  // be overridden by the caller.
  static GroupCdfTable from_csv(const std::string& path);
  // Built-in two-group table with a pronounced score gap between groups.
  static GroupCdfTable builtin_credit();
};

// Rows of (features, label, group) with a column schema.
struct TabularDataset {
  std::vector<std::string> feature_names;
  std::vector<std::vector<double>> features;
  std::vector<int> labels;
  std::vector<int> groups;  // -1 when the dataset has no group column
  std::vector<std::string> group_names;

  std::size_t size() const { return features.size(); }
  bool has_groups() const;
  void append(const TabularDataset& other);
};

// Train/validation/test fractions and the master seed driving the shuffle.
struct SplitSpec {
  double train = 0.6;
  double validation = 0.2;
  double test = 0.2;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SplitResult {
  TabularDataset train;
  TabularDataset validation;
  TabularDataset test;
};

// Seeded permutation followed by contiguous slicing at floor boundaries.
SplitResult split(const TabularDataset& dataset, const SplitSpec& spec);

// Synthetic credit-score sampler. Scores are drawn per group by inverse-CDF
// interpolation, optionally rescaled to [0, 100] by the table's score range,
// and labeled by a logistic qualification rule on the (rescaled) score.
struct CreditSampleOptions {
  bool normalize_scores = true;  // map table score range onto [0, 100]
  double label_mid = 45.0;       // logistic midpoint of P{Y=1 | score}
  double label_scale = 0.7;      // logistic scale; smaller = cleaner labels
};

TabularDataset sample_fico(const GroupCdfTable& table, std::size_t n,
                           std::uint64_t seed,
                           const CreditSampleOptions& options = {});

// Law-school records: loads the 12-attribute CSV, fits OLS on the training
// slice of the seeded split to predict the final-GPA z-score from the other
// features, and returns the dataset plus the fitted linear score model.
struct LawschoolData {
  TabularDataset dataset;
  ScoreModel score;
  double train_rmse = 0.0;
};

LawschoolData load_lawschool(const std::string& path, std::uint64_t seed);

// Reduce dataset rows to scored samples under a score model.
std::vector<ScoredSample> score_samples(const TabularDataset& dataset,
                                        const ScoreModel& model);

}  // namespace fairthresh
