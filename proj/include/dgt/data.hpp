#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dgt/errors.hpp"
#include "dgt/linalg.hpp"
#include "dgt/path_tables.hpp"
#include "dgt/tree.hpp"

namespace dgt {

enum class Task { kRegression, kClassification };

inline const char* task_name(Task task) {
  return task == Task::kRegression ? "regression" : "classification";
}

// Train-split statistics: z-scoring for features, min-max for regression
// targets.
struct NormalizationStats {
  Vector feature_mean;
  Vector feature_scale;  // std, or 1 for constant features
  bool scale_target = false;
  double target_min = 0.0;
  double target_max = 1.0;

  double apply_target(double y) const {
    return scale_target ? (y - target_min) / (target_max - target_min) : y;
  }
  double inverse_target(double y) const {
    return scale_target ? y * (target_max - target_min) + target_min : y;
  }

  bool operator==(const NormalizationStats& o) const {
    return feature_mean == o.feature_mean && feature_scale == o.feature_scale &&
           scale_target == o.scale_target && target_min == o.target_min && target_max == o.target_max;
  }
};

// Feature rows plus labels. Classification labels are class indices into
// class_values.
struct Dataset {
  Task task = Task::kRegression;
  RowMatrix features;
  std::vector<double> labels;
  int num_classes = 0;
  std::vector<double> class_values;
  std::vector<std::string> feature_names;
  std::optional<NormalizationStats> normalization;

  std::size_t size() const { return static_cast<std::size_t>(features.rows()); }
  int dim() const { return static_cast<int>(features.cols()); }
  bool has_labels() const { return !labels.empty(); }
  int class_of(std::size_t i) const { return static_cast<int>(labels[i]); }

  Vector x(std::size_t i) const { return features.row(static_cast<Eigen::Index>(i)).transpose(); }

  Dataset subset(const std::vector<std::size_t>& rows) const {
    Dataset out = *this;
    out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
    out.labels.clear();
    for (std::size_t k = 0; k < rows.size(); ++k) {
      out.features.row(static_cast<Eigen::Index>(k)) = features.row(static_cast<Eigen::Index>(rows[k]));
      if (has_labels()) out.labels.push_back(labels[rows[k]]);
    }
    return out;
  }
};

struct CsvOptions {
  // Column index (negative counts from the end) or header name. Empty means
  // the file carries no label column.
  std::string label_column = "-1";
  bool has_header = true;
  Task task = Task::kRegression;
  // Known class values (from a trained model); fitted from the file when empty.
  std::vector<double> class_values;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

inline bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

inline std::size_t resolve_label_column(const std::string& spec, const std::vector<std::string>& header,
                                        std::size_t columns) {
  long index = 0;
  const auto [ptr, ec] = std::from_chars(spec.data(), spec.data() + spec.size(), index);
  if (ec == std::errc() && ptr == spec.data() + spec.size()) {
    if (index < 0) index += static_cast<long>(columns);
    if (index < 0 || index >= static_cast<long>(columns)) {
      throw DataError("label column " + spec + " out of range for " + std::to_string(columns) + " columns");
    }
    return static_cast<std::size_t>(index);
  }
  const auto it = std::find(header.begin(), header.end(), spec);
  if (it == header.end()) throw DataError("label column '" + spec + "' not found in header");
  return static_cast<std::size_t>(it - header.begin());
}

}  // namespace detail

inline Dataset parse_csv(std::istream& in, const CsvOptions& opts, const std::string& source = "<stream>") {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> line_numbers;
  std::string line;
  std::size_t line_no = 0;
  std::size_t columns = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_fields(line);
    if (opts.has_header && header.empty() && rows.empty()) {
      for (auto f : fields) header.emplace_back(f);
      columns = fields.size();
      continue;
    }
    if (columns == 0) columns = fields.size();
    if (fields.size() != columns) {
      throw DataError(source + ":" + std::to_string(line_no) + ": expected " + std::to_string(columns) +
                      " fields, found " + std::to_string(fields.size()));
    }
    std::vector<double> values(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (!detail::parse_double(fields[c], values[c])) {
        throw DataError(source + ":" + std::to_string(line_no) + ": column " + std::to_string(c + 1) +
                        ": cannot parse '" + std::string(fields[c]) + "' as a number");
      }
    }
    rows.push_back(std::move(values));
    line_numbers.push_back(line_no);
  }
  if (rows.empty()) throw DataError(source + ": no data rows");

  const bool labeled = !opts.label_column.empty();
  const std::size_t label_col = labeled ? detail::resolve_label_column(opts.label_column, header, columns) : columns;
  Dataset ds;
  ds.task = opts.task;
  const auto d = static_cast<Eigen::Index>(labeled ? columns - 1 : columns);
  if (d < 1) throw DataError(source + ": no feature columns");
  ds.features.resize(static_cast<Eigen::Index>(rows.size()), d);
  for (std::size_t c = 0; c < columns; ++c) {
    if (c == label_col) continue;
    ds.feature_names.push_back(header.empty() ? "x" + std::to_string(c) : header[c]);
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    Eigen::Index k = 0;
    for (std::size_t c = 0; c < columns; ++c) {
      if (c == label_col) continue;
      ds.features(static_cast<Eigen::Index>(r), k++) = rows[r][c];
    }
    if (labeled) ds.labels.push_back(rows[r][label_col]);
  }

  if (labeled && opts.task == Task::kClassification) {
    std::vector<double> values = opts.class_values;
    if (values.empty()) {
      values = ds.labels;
      std::sort(values.begin(), values.end());
      values.erase(std::unique(values.begin(), values.end()), values.end());
    }
    for (std::size_t r = 0; r < ds.labels.size(); ++r) {
      const auto it = std::find(values.begin(), values.end(), ds.labels[r]);
      if (it == values.end()) {
        throw DataError(source + ":" + std::to_string(line_numbers[r]) + ": unknown class label " +
                        std::to_string(ds.labels[r]));
      }
      ds.labels[r] = static_cast<double>(it - values.begin());
    }
    ds.class_values = values;
    ds.num_classes = static_cast<int>(values.size());
  }
  return ds;
}

inline Dataset load_csv(const std::string& path, const CsvOptions& opts) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return parse_csv(in, opts, path);
}

inline NormalizationStats fit_normalization(const Dataset& train) {
  if (train.size() == 0) throw PreconditionError("cannot fit normalization on an empty dataset");
  NormalizationStats stats;
  stats.feature_mean = train.features.colwise().mean().transpose();
  const RowMatrix centered = train.features.rowwise() - stats.feature_mean.transpose();
  stats.feature_scale =
      (centered.array().square().colwise().sum() / static_cast<double>(train.size())).sqrt().transpose();
  for (Eigen::Index c = 0; c < stats.feature_scale.size(); ++c) {
    if (!(stats.feature_scale(c) > 0.0)) stats.feature_scale(c) = 1.0;
  }
  if (train.task == Task::kRegression && train.has_labels()) {
    const auto [lo, hi] = std::minmax_element(train.labels.begin(), train.labels.end());
    if (*lo == *hi) throw DataError("degenerate regression target: all training labels equal " + std::to_string(*lo));
    stats.scale_target = true;
    stats.target_min = *lo;
    stats.target_max = *hi;
  }
  return stats;
}

// Applies train statistics. Re-applying the same statistics is a no-op.
inline void apply_normalization(Dataset& data, const NormalizationStats& stats) {
  if (data.normalization) {
    if (*data.normalization == stats) return;
    throw PreconditionError("dataset already normalized with different statistics");
  }
  if (data.features.cols() != stats.feature_mean.size()) throw ShapeError("normalization stats have wrong dimension");
  data.features = ((data.features.rowwise() - stats.feature_mean.transpose()).array().rowwise() /
                   stats.feature_scale.transpose().array())
                      .matrix();
  if (data.task == Task::kRegression) {
    for (double& y : data.labels) y = stats.apply_target(y);
  }
  data.normalization = stats;
}

inline NormalizationStats fit_apply_normalization(Dataset& train, const std::vector<Dataset*>& others = {}) {
  NormalizationStats stats = fit_normalization(train);
  apply_normalization(train, stats);
  for (Dataset* d : others) apply_normalization(*d, stats);
  return stats;
}

// Seeded shuffle then contiguous parts; part k > 0 gets floor(n * ratio_k)
// rows and part 0 takes the remainder.
inline std::vector<Dataset> split(const Dataset& data, const std::vector<double>& ratios, std::uint64_t seed) {
  if (ratios.size() < 2) throw ConfigError("split needs at least two ratios");
  const double total = std::accumulate(ratios.begin(), ratios.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("split ratios must sum to 1");
  const std::size_t n = data.size();
  std::vector<std::size_t> sizes(ratios.size());
  std::size_t assigned = 0;
  for (std::size_t k = 1; k < ratios.size(); ++k) {
    if (ratios[k] < 0.0) throw ConfigError("split ratios must be non-negative");
    sizes[k] = static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratios[k] + 1e-9));
    assigned += sizes[k];
  }
  if (assigned > n) throw DataError("split sizes exceed dataset size");
  sizes[0] = n - assigned;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    if (sizes[k] == 0) throw DataError("split part " + std::to_string(k) + " would be empty");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Dataset> parts;
  std::size_t at = 0;
  for (std::size_t size : sizes) {
    parts.push_back(data.subset({order.begin() + static_cast<std::ptrdiff_t>(at),
                                 order.begin() + static_cast<std::ptrdiff_t>(at + size)}));
    at += size;
  }
  return parts;
}

// Random ground-truth oblique tree used to generate realizable data.
struct OracleTreeSpec {
  int height = 2;
  int input_dim = 2;
  Task task = Task::kRegression;
  int num_classes = 2;
  // Gaussian label noise std (regression) or label flip probability
  // (classification).
  double noise = 0.0;
};

struct GeneratedData {
  Dataset data;
  ObliqueTree truth;
  std::vector<std::size_t> leaf_counts;
};

// x ~ U[-1,1]^d labelled by a random oblique tree. Node predicates pass
// through a random sample that reaches the node; every leaf holds at least
// max(10, n / 2^(h+2)) samples.
inline GeneratedData gen_oracle_tree(const OracleTreeSpec& spec, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw PreconditionError("generator needs n >= 1");
  PathTables range_check(spec.height);
  (void)range_check;
  if (spec.input_dim < 1) throw ConfigError("generator needs input_dim >= 1");
  if (spec.task == Task::kClassification && spec.num_classes < 2) throw ConfigError("need at least two classes");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  GeneratedData out;
  Dataset& ds = out.data;
  ds.task = spec.task;
  ds.features.resize(static_cast<Eigen::Index>(n), spec.input_dim);
  for (Eigen::Index r = 0; r < ds.features.rows(); ++r)
    for (Eigen::Index c = 0; c < ds.features.cols(); ++c) ds.features(r, c) = unif(rng);
  for (int c = 0; c < spec.input_dim; ++c) ds.feature_names.push_back("x" + std::to_string(c));

  const std::size_t leaves = num_leaves(spec.height);
  const double min_count = std::max(10.0, static_cast<double>(n) / static_cast<double>(std::size_t{4} << spec.height));
  ObliqueTree& tree = out.truth;
  tree.height = spec.height;
  tree.input_dim = spec.input_dim;
  tree.weights = Matrix::Zero(static_cast<Eigen::Index>(num_internal(spec.height)), spec.input_dim);
  tree.bias = Vector::Zero(static_cast<Eigen::Index>(num_internal(spec.height)));

  // Each predicate is redrawn until both children keep at least a share alpha
  // of the node's samples; alpha^h * n == min_count, so every leaf is covered.
  const double alpha = 0.5 * std::pow(min_count * static_cast<double>(leaves) / static_cast<double>(n),
                                      1.0 / static_cast<double>(std::max(spec.height, 1)));
  if (alpha > 0.5) throw DataError("oracle tree generator needs at least " +
                                   std::to_string(static_cast<std::size_t>(min_count) * leaves) + " samples");
  std::vector<std::size_t> assignment(n);
  std::vector<std::vector<std::size_t>> at_node(1);
  at_node[0].resize(n);
  std::iota(at_node[0].begin(), at_node[0].end(), 0);
  for (int depth = 0; depth < spec.height; ++depth) {
    const double need = min_count * static_cast<double>(num_leaves(spec.height - depth - 1));
    std::vector<std::vector<std::size_t>> next(at_node.size() * 2);
    for (std::size_t j = 0; j < at_node.size(); ++j) {
      const auto& members = at_node[j];
      const std::size_t row = node_row(depth, j);
      std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
      bool ok = false;
      for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
        Vector w(spec.input_dim);
        for (Eigen::Index c = 0; c < w.size(); ++c) w(c) = gauss(rng);
        w.normalize();
        const Vector anchor = ds.x(members[pick(rng)]);
        tree.weights.row(static_cast<Eigen::Index>(row)) = w.transpose();
        tree.bias(static_cast<Eigen::Index>(row)) = -w.dot(anchor);
        next[2 * j].clear();
        next[2 * j + 1].clear();
        for (std::size_t idx : members) {
          next[2 * j + static_cast<std::size_t>(step(tree.node_score(row, ds.x(idx))))].push_back(idx);
        }
        const double floor = std::max(need, alpha * static_cast<double>(members.size()));
        ok = static_cast<double>(next[2 * j].size()) >= floor && static_cast<double>(next[2 * j + 1].size()) >= floor;
      }
      if (!ok) throw DataError("oracle tree generator could not cover every leaf after 100 attempts");
    }
    at_node = std::move(next);
  }
  for (std::size_t l = 0; l < leaves; ++l) {
    out.leaf_counts.push_back(at_node[l].size());
    for (std::size_t idx : at_node[l]) assignment[idx] = l;
  }

  if (spec.task == Task::kRegression) {
    tree.num_outputs = 1;
    tree.leaves.resize(static_cast<Eigen::Index>(leaves), 1);
    std::uniform_real_distribution<double> value(0.0, 1.0);
    for (std::size_t l = 0; l < leaves; ++l) tree.leaves(static_cast<Eigen::Index>(l), 0) = value(rng);
    for (std::size_t i = 0; i < n; ++i) {
      ds.labels.push_back(tree.leaves(static_cast<Eigen::Index>(assignment[i]), 0) + spec.noise * gauss(rng));
    }
  } else {
    const int k = spec.num_classes;
    std::vector<int> classes(leaves);
    for (std::size_t l = 0; l < leaves; ++l) {
      classes[l] = l < static_cast<std::size_t>(k) ? static_cast<int>(l)
                                                   : std::uniform_int_distribution<int>(0, k - 1)(rng);
    }
    std::shuffle(classes.begin(), classes.end(), rng);
    tree.num_outputs = k;
    tree.leaves = Matrix::Zero(static_cast<Eigen::Index>(leaves), k);
    for (std::size_t l = 0; l < leaves; ++l) tree.leaves(static_cast<Eigen::Index>(l), classes[l]) = 1.0;
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      int label = classes[assignment[i]];
      if (spec.noise > 0.0 && coin(rng) < spec.noise) {
        label = (label + std::uniform_int_distribution<int>(1, k - 1)(rng)) % k;
      }
      ds.labels.push_back(label);
    }
    ds.num_classes = k;
    for (int c = 0; c < k; ++c) ds.class_values.push_back(c);
  }
  return out;
}

}  // namespace dgt
