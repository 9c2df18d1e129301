#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dgt/backprop.hpp"
#include "dgt/data.hpp"
#include "dgt/errors.hpp"
#include "dgt/losses.hpp"
#include "dgt/metrics.hpp"
#include "dgt/optimizer.hpp"
#include "dgt/path_tables.hpp"
#include "dgt/tree.hpp"
#include "dgt/tree_params.hpp"

namespace dgt {

struct TrainConfig {
  int height = 2;
  int epochs = 100;
  int batch_size = 128;
  double lr = 1e-2;
  OptimizerConfig optimizer;  // RMSprop, global-norm clip 1e-2
  bool use_scheduler = true;
  int restarts = 3;
  double l1 = 0.0;
  double l2 = 0.0;
  bool regularize_leaves = false;
  // Derived from the task when unset: squared for regression, cross-entropy
  // for classification.
  std::optional<LossKind> loss;
  // Return the epoch with the best validation metric instead of the last one.
  bool keep_best_validation = false;

  void validate() const {
    if (height < 1 || height > kMaxHeight) throw ConfigError("height out of range");
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (batch_size < 1) throw ConfigError("batch size must be >= 1");
    if (!(lr >= 0.0)) throw ConfigError("learning rate must be >= 0");
    if (optimizer.clip_mode != ClipMode::kNone && !(optimizer.clip > 0.0)) throw ConfigError("clip threshold must be > 0");
    if (!(optimizer.rho >= 0.0 && optimizer.rho < 1.0)) throw ConfigError("rho must be in [0, 1)");
    if (optimizer.momentum < 0.0) throw ConfigError("momentum must be >= 0");
    if (restarts < 1) throw ConfigError("restarts must be >= 1");
    if (l1 < 0.0 || l2 < 0.0) throw ConfigError("regularization weights must be >= 0");
  }
};

struct EpochRecord {
  int epoch = 0;
  std::size_t step = 0;  // optimizer steps taken so far
  double lr = 0.0;       // rate used by the last step of the epoch
  double train_loss = 0.0;
  std::optional<double> validation_metric;
};

struct TrainResult {
  TreeParams params;
  std::vector<EpochRecord> log;
};

inline LossKind resolve_loss(const TrainConfig& cfg, Task task) {
  const LossKind natural = task == Task::kRegression ? LossKind::kSquared : LossKind::kCrossEntropy;
  if (cfg.loss && *cfg.loss != natural) throw ConfigError("loss kind does not match the task");
  return natural;
}

inline int output_count(const Dataset& data) {
  return data.task == Task::kRegression ? 1 : data.num_classes;
}

inline LeafInit leaf_init_for(Task task) {
  return task == Task::kRegression ? LeafInit::kSmallUniform : LeafInit::kZeros;
}

// Averaged minibatch gradient of the loss (no regularizer); returns the summed
// loss of the batch under the current parameters.
inline double minibatch_gradient(const Dataset& data, const std::vector<std::size_t>& rows, const TreeParams& params,
                                 const PathTables& tables, LossKind loss, GradientSet& grads) {
  const auto b = static_cast<Eigen::Index>(rows.size());
  Matrix x_aug(params.input_dim + 1, b);
  for (Eigen::Index k = 0; k < b; ++k) {
    x_aug.col(k).head(params.input_dim) = data.features.row(static_cast<Eigen::Index>(rows[static_cast<std::size_t>(k)])).transpose();
    x_aug(params.input_dim, k) = 1.0;
  }
  const ForwardCache cache = forward_batch(x_aug, params);
  Matrix out_grads(params.num_outputs, b);
  double total = 0.0;
  for (Eigen::Index k = 0; k < b; ++k) {
    const Vector pred = params.leaves.row(static_cast<Eigen::Index>(cache.leaves[static_cast<std::size_t>(k)])).transpose();
    LossAndGrad lg = loss_and_grad(pred, data.labels[rows[static_cast<std::size_t>(k)]], loss);
    if (!std::isfinite(lg.loss)) throw NumericError("non-finite training loss");
    total += lg.loss;
    out_grads.col(k) = lg.out_grad;
  }
  grads.set_zero();
  backward_batch(cache, out_grads, params, tables, 1.0 / static_cast<double>(b), grads);
  return total;
}

// Minibatch training with the known loss: hard forward for predictions,
// dense backward pass, RMSprop with cosine restarts and clipping.
inline TrainResult train_batch(const Dataset& data, const TrainConfig& cfg, const OverparamSpec& spec,
                               std::uint64_t seed, const Dataset* validation = nullptr,
                               std::optional<TreeParams> init = std::nullopt) {
  cfg.validate();
  if (data.size() == 0) throw PreconditionError("training data is empty");
  if (!data.has_labels()) throw PreconditionError("training data has no labels");
  if (data.task == Task::kClassification && data.num_classes < 2) throw ConfigError("classification needs >= 2 classes");
  const LossKind loss = resolve_loss(cfg, data.task);
  const PathTables tables(cfg.height);

  std::mt19937_64 rng(seed);
  TrainResult result;
  if (init) {
    result.params = std::move(*init);
    result.params.validate();
    if (result.params.height != cfg.height) throw ConfigError("initial model height differs from config");
  } else {
    result.params = init_params(cfg.height, data.dim(), output_count(data), spec, leaf_init_for(data.task), rng);
  }
  TreeParams& params = result.params;
  if (params.input_dim != data.dim()) throw ShapeError("model input dimension differs from data");
  if (params.num_outputs != output_count(data)) throw ShapeError("model output count differs from data");

  const std::size_t n = data.size();
  const auto batch = static_cast<std::size_t>(cfg.batch_size);
  const std::size_t per_epoch = (n + batch - 1) / batch;
  const double total_steps = static_cast<double>(per_epoch) * cfg.epochs;
  // Runs shorter than the restart count get one cycle per step.
  const int restarts = static_cast<int>(std::min<double>(cfg.restarts, total_steps));

  OptimizerState state = OptimizerState::for_params(params);
  GradientSet grads = GradientSet::zeros_like(params);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::optional<TreeParams> best;
  double best_metric = 0.0;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    double lr = cfg.lr;
    for (std::size_t start = 0; start < n; start += batch) {
      const std::vector<std::size_t> rows(order.begin() + static_cast<std::ptrdiff_t>(start),
                                          order.begin() + static_cast<std::ptrdiff_t>(std::min(n, start + batch)));
      epoch_loss += minibatch_gradient(data, rows, params, tables, loss, grads);
      if (cfg.l1 > 0.0 || cfg.l2 > 0.0) grads += regularizer_grad(params, cfg.l1, cfg.l2, cfg.regularize_leaves);
      lr = cfg.use_scheduler ? cosine_lr(static_cast<double>(state.steps), total_steps, restarts, cfg.lr) : cfg.lr;
      optimizer_step(state, params, grads, lr, cfg.optimizer);
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.step = state.steps;
    rec.lr = lr;
    rec.train_loss = epoch_loss / static_cast<double>(n);
    if (validation != nullptr) {
      const auto predict = [&](const Vector& x) { return forward_hard(x, params, tables).value; };
      rec.validation_metric = task_metric(predict, *validation);
      if (cfg.keep_best_validation) {
        const double m = *rec.validation_metric;
        const bool better = data.task == Task::kRegression ? m < best_metric : m > best_metric;
        if (!best || better) {
          best = params;
          best_metric = m;
        }
      }
    }
    result.log.push_back(rec);
  }
  if (best) result.params = std::move(*best);
  return result;
}

}  // namespace dgt
