#include "fairthresh/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "fairthresh/error.hpp"
#include "fairthresh/linalg.hpp"
#include "fairthresh/rng.hpp"

namespace fairthresh {

void GroupCdfTable::validate() const {
  if (groups.empty()) throw DataError("cdf table: no groups");
  double prior_sum = 0.0;
  for (const auto& g : groups) {
    if (g.knots.empty()) throw DataError("cdf table: group '" + g.name + "' empty");
    if (!(g.prior >= 0.0)) throw DataError("cdf table: negative prior");
    prior_sum += g.prior;
    double last_score = -std::numeric_limits<double>::infinity();
    double last_cdf = 0.0;
    for (const auto& k : g.knots) {
      if (!(k.score >= last_score)) {
        throw DataError("cdf table: scores not sorted in group '" + g.name + "'");
      }
      if (k.cdf < last_cdf - 1e-12 || k.cdf < -1e-12 || k.cdf > 1.0 + 1e-12) {
        throw DataError("cdf table: cdf not non-decreasing in [0,1] in group '" +
                        g.name + "'");
      }
      last_score = k.score;
      last_cdf = k.cdf;
    }
    if (std::abs(g.knots.back().cdf - 1.0) > 1e-9) {
      throw DataError("cdf table: cdf must end at 1 in group '" + g.name + "'");
    }
  }
  if (std::abs(prior_sum - 1.0) > 1e-9) {
    throw DataError("cdf table: group priors must sum to 1");
  }
}

double GroupCdfTable::score_min() const {
  double v = std::numeric_limits<double>::infinity();
  for (const auto& g : groups) v = std::min(v, g.knots.front().score);
  return v;
}

double GroupCdfTable::score_max() const {
  double v = -std::numeric_limits<double>::infinity();
  for (const auto& g : groups) v = std::max(v, g.knots.back().score);
  return v;
}

double GroupCdfTable::cdf_at(std::size_t group, double score) const {
  const auto& knots = groups.at(group).knots;
  if (score <= knots.front().score) {
    return score < knots.front().score ? 0.0 : knots.front().cdf;
  }
  if (score >= knots.back().score) return 1.0;
  auto it = std::upper_bound(
      knots.begin(), knots.end(), score,
      [](double s, const Knot& k) { return s < k.score; });
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  if (hi.score == lo.score) return hi.cdf;
  const double f = (score - lo.score) / (hi.score - lo.score);
  return lo.cdf + f * (hi.cdf - lo.cdf);
}

double GroupCdfTable::quantile(std::size_t group, double u) const {
  const auto& knots = groups.at(group).knots;
  if (knots.size() == 1) return knots.front().score;
  if (u <= knots.front().cdf) return knots.front().score;
  if (u >= knots.back().cdf) return knots.back().score;
  auto it = std::upper_bound(
      knots.begin(), knots.end(), u,
      [](double v, const Knot& k) { return v < k.cdf; });
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  if (hi.cdf == lo.cdf) return hi.score;
  const double f = (u - lo.cdf) / (hi.cdf - lo.cdf);
  return lo.score + f * (hi.score - lo.score);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    // trim
    const auto a = field.find_first_not_of(" \t\r");
    const auto b = field.find_last_not_of(" \t\r");
    out.push_back(a == std::string::npos ? "" : field.substr(a, b - a + 1));
  }
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_double(const std::string& s, std::size_t row, const std::string& col) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing chars");
    return v;
  } catch (const std::exception&) {
    throw DataError("unparseable value '" + s + "' at row " +
                    std::to_string(row) + ", column '" + col + "'");
  }
}

}  // namespace

GroupCdfTable GroupCdfTable::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open cdf table: " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty cdf table: " + path);
  const auto header = split_csv_line(line);
  if (header.size() != 3 || header[0] != "group" || header[1] != "score" ||
      header[2] != "cdf") {
    throw DataError("cdf table header must be 'group,score,cdf'");
  }
  GroupCdfTable table;
  std::map<std::string, std::size_t> index;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 3) {
      throw DataError("cdf table row " + std::to_string(row) + ": need 3 fields");
    }
    auto [it, inserted] = index.try_emplace(fields[0], table.groups.size());
    if (inserted) table.groups.push_back({fields[0], {}, 0.0});
    table.groups[it->second].knots.push_back(
        {parse_double(fields[1], row, "score"), parse_double(fields[2], row, "cdf")});
  }
  for (auto& g : table.groups) {
    g.prior = 1.0 / static_cast<double>(table.groups.size());
  }
  table.validate();
  return table;
}

GroupCdfTable GroupCdfTable::builtin_credit() {
  // Two-component logistic mixtures on [0, 100], truncated and renormalized.
  // The two groups are shifted against each other so that a shared threshold
  // produces a sizeable positive-rate gap.
  auto sigmoid = [](double z) { return 1.0 / (1.0 + std::exp(-z)); };
  auto mix = [&](double x, double w1, double m1, double s1, double m2,
                 double s2) {
    return w1 * sigmoid((x - m1) / s1) + (1.0 - w1) * sigmoid((x - m2) / s2);
  };
  GroupCdfTable table;
  const struct {
    const char* name;
    double w1, m1, s1, m2, s2;
  } specs[] = {
      {"group0", 0.75, 22.0, 9.0, 55.0, 12.0},
      {"group1", 0.20, 30.0, 8.0, 58.0, 13.0},
  };
  for (const auto& g : specs) {
    GroupCdfTable::Group group;
    group.name = g.name;
    group.prior = 0.5;
    const double f0 = mix(0.0, g.w1, g.m1, g.s1, g.m2, g.s2);
    const double f1 = mix(100.0, g.w1, g.m1, g.s1, g.m2, g.s2);
    for (int x = 0; x <= 100; ++x) {
      const double f = mix(static_cast<double>(x), g.w1, g.m1, g.s1, g.m2, g.s2);
      group.knots.push_back({static_cast<double>(x), (f - f0) / (f1 - f0)});
    }
    group.knots.back().cdf = 1.0;
    table.groups.push_back(std::move(group));
  }
  table.validate();
  return table;
}

bool TabularDataset::has_groups() const {
  return !groups.empty() && groups.front() >= 0;
}

void TabularDataset::append(const TabularDataset& other) {
  features.insert(features.end(), other.features.begin(), other.features.end());
  labels.insert(labels.end(), other.labels.begin(), other.labels.end());
  groups.insert(groups.end(), other.groups.begin(), other.groups.end());
}

void SplitSpec::validate() const {
  if (train < 0.0 || validation < 0.0 || test < 0.0 ||
      std::abs(train + validation + test - 1.0) > 1e-9) {
    throw ConfigError("split fractions must be non-negative and sum to 1");
  }
}

SplitResult split(const TabularDataset& dataset, const SplitSpec& spec) {
  spec.validate();
  const std::size_t n = dataset.size();
  if (n == 0) throw DataError("cannot split an empty dataset");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(spec.seed, "split");
  for (std::size_t i = n - 1; i > 0; --i) {
    std::swap(order[i], order[rng.index(i + 1)]);
  }
  const std::size_t n_train = static_cast<std::size_t>(
      std::floor(spec.train * static_cast<double>(n)));
  const std::size_t n_val = static_cast<std::size_t>(
      std::floor(spec.validation * static_cast<double>(n)));

  auto take = [&](std::size_t from, std::size_t count) {
    TabularDataset out;
    out.feature_names = dataset.feature_names;
    out.group_names = dataset.group_names;
    out.features.reserve(count);
    out.labels.reserve(count);
    out.groups.reserve(count);
    for (std::size_t i = from; i < from + count; ++i) {
      const std::size_t r = order[i];
      out.features.push_back(dataset.features[r]);
      out.labels.push_back(dataset.labels[r]);
      out.groups.push_back(dataset.groups[r]);
    }
    return out;
  };
  return {take(0, n_train), take(n_train, n_val),
          take(n_train + n_val, n - n_train - n_val)};
}

TabularDataset sample_fico(const GroupCdfTable& table, std::size_t n,
                           std::uint64_t seed,
                           const CreditSampleOptions& options) {
  table.validate();
  if (n == 0) throw ConfigError("sample_fico: need n >= 1");
  const double lo = table.score_min();
  const double hi = table.score_max();
  const bool rescale = options.normalize_scores && hi > lo;

  TabularDataset out;
  out.feature_names = {"score", "group"};
  for (const auto& g : table.groups) out.group_names.push_back(g.name);
  out.features.reserve(n);
  out.labels.reserve(n);
  out.groups.reserve(n);

  std::vector<double> prior_cum;
  double acc = 0.0;
  for (const auto& g : table.groups) {
    acc += g.prior;
    prior_cum.push_back(acc);
  }
  prior_cum.back() = 1.0;

  Rng rng(seed, "fico-data");
  auto sigmoid = [](double z) { return 1.0 / (1.0 + std::exp(-z)); };
  for (std::size_t i = 0; i < n; ++i) {
    const double ug = rng.uniform();
    std::size_t group = 0;
    while (group + 1 < prior_cum.size() && ug >= prior_cum[group]) ++group;
    double score = table.quantile(group, rng.uniform());
    if (rescale) score = 100.0 * (score - lo) / (hi - lo);
    const double q = sigmoid((score - options.label_mid) / options.label_scale);
    const int label = rng.bernoulli(q) ? 1 : 0;
    out.features.push_back({score, static_cast<double>(group)});
    out.labels.push_back(label);
    out.groups.push_back(static_cast<int>(group));
  }
  return out;
}

namespace {

const std::vector<std::string>& lawschool_columns() {
  static const std::vector<std::string> cols = {
      "decile1b", "decile3", "lsat",    "ugpa", "zfygpa", "zgpa",
      "fulltime", "fam_inc", "male",    "racetxt", "tier", "pass_bar"};
  return cols;
}

}  // namespace

LawschoolData load_lawschool(const std::string& path, std::uint64_t seed) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open law-school csv: " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty law-school csv: " + path);
  auto header = split_csv_line(line);
  // The published attribute list spells the final-GPA z-score inconsistently.
  for (auto& h : header) {
    if (h == "zgap") h = "zgpa";
  }
  std::map<std::string, std::size_t> col_index;
  for (std::size_t i = 0; i < header.size(); ++i) col_index[header[i]] = i;
  for (const auto& want : lawschool_columns()) {
    if (!col_index.count(want)) {
      throw DataError("law-school csv missing column '" + want + "'");
    }
  }

  // Feature columns: everything in the schema except the regression target
  // and the label.
  std::vector<std::string> feat_cols;
  for (const auto& c : lawschool_columns()) {
    if (c != "zgpa" && c != "pass_bar") feat_cols.push_back(c);
  }
  const std::size_t race_feature = [&] {
    for (std::size_t i = 0; i < feat_cols.size(); ++i) {
      if (feat_cols[i] == "racetxt") return i;
    }
    throw DataError("racetxt missing from feature columns");
  }();

  // First pass to collect rows; race values may be strings and are mapped to
  // ids in sorted order of their raw text.
  std::vector<std::pair<std::size_t, std::vector<std::string>>> raw;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() < header.size()) {
      throw DataError("law-school csv row " + std::to_string(row) +
                      ": expected " + std::to_string(header.size()) + " fields");
    }
    raw.emplace_back(row, std::move(fields));
  }
  if (raw.empty()) throw DataError("law-school csv has no data rows");

  std::map<std::string, int> race_ids;
  for (const auto& [r, fields] : raw) race_ids[fields[col_index["racetxt"]]] = 0;
  {
    int id = 0;
    for (auto& [name, rid] : race_ids) rid = id++;
  }

  TabularDataset dataset;
  dataset.feature_names = feat_cols;
  dataset.group_names.resize(race_ids.size());
  for (const auto& [name, rid] : race_ids) {
    dataset.group_names[static_cast<std::size_t>(rid)] = name;
  }

  std::vector<double> zgpa;
  for (const auto& [r, fields] : raw) {
    row = r;
    std::vector<double> feats(feat_cols.size(), 0.0);
    for (std::size_t i = 0; i < feat_cols.size(); ++i) {
      const auto& cell = fields[col_index[feat_cols[i]]];
      if (i == race_feature) {
        auto it = race_ids.find(cell);
        feats[i] = static_cast<double>(it->second);
      } else {
        feats[i] = parse_double(cell, row, feat_cols[i]);
      }
    }
    const auto& label_cell = fields[col_index["pass_bar"]];
    const double label_val = parse_double(label_cell, row, "pass_bar");
    if (label_val != 0.0 && label_val != 1.0) {
      throw DataError("pass_bar must be 0/1 at row " + std::to_string(row));
    }
    zgpa.push_back(parse_double(fields[col_index["zgpa"]], row, "zgpa"));
    dataset.features.push_back(std::move(feats));
    dataset.labels.push_back(static_cast<int>(label_val));
    dataset.groups.push_back(race_ids.at(fields[col_index["racetxt"]]));
  }

  // Fit the score regression on the training slice only.
  SplitSpec spec;
  spec.seed = seed;
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed, "split");
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    std::swap(order[i], order[rng.index(i + 1)]);
  }
  const std::size_t n_train = static_cast<std::size_t>(std::floor(
      spec.train * static_cast<double>(order.size())));
  if (n_train == 0) throw DataError("law-school csv too small to fit a score model");
  linalg::Matrix x_train;
  std::vector<double> y_train;
  for (std::size_t i = 0; i < n_train; ++i) {
    x_train.push_back(dataset.features[order[i]]);
    y_train.push_back(zgpa[order[i]]);
  }
  auto [weights, intercept] = linalg::ols_fit(x_train, y_train);
  ScoreModel score = ScoreModel::linear(std::move(weights), intercept);

  double sq = 0.0;
  for (std::size_t i = 0; i < n_train; ++i) {
    const double r = score.score(x_train[i]) - y_train[i];
    sq += r * r;
  }
  const double rmse = std::sqrt(sq / static_cast<double>(n_train));
  return {std::move(dataset), std::move(score), rmse};
}

std::vector<ScoredSample> score_samples(const TabularDataset& dataset,
                                        const ScoreModel& model) {
  std::vector<ScoredSample> out;
  out.reserve(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    out.push_back({model.score(dataset.features[i]), dataset.labels[i],
                   dataset.groups.empty() ? -1 : dataset.groups[i]});
  }
  return out;
}

}  // namespace fairthresh
