#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "dgt/backprop.hpp"
#include "dgt/errors.hpp"
#include "dgt/tree_params.hpp"

namespace dgt {

// lambda1 * sign(W) + 2 lambda2 * W per layer entry, with sign(0) = 0. Leaves
// are penalized only when include_leaves is set.
inline GradientSet regularizer_grad(const TreeParams& params, double l1, double l2, bool include_leaves = false) {
  if (l1 < 0.0 || l2 < 0.0) throw ConfigError("regularization weights must be non-negative");
  GradientSet g = GradientSet::zeros_like(params);
  if (l1 == 0.0 && l2 == 0.0) return g;
  auto penalize = [&](const Matrix& w, Matrix& out) {
    out = l1 * w.array().sign().matrix() + 2.0 * l2 * w;
  };
  for (std::size_t m = 0; m < params.layers.size(); ++m) penalize(params.layers[m], g.layers[m]);
  if (include_leaves) penalize(params.leaves, g.leaves);
  return g;
}

// Cosine annealing with `restarts` equal-length cycles over total_steps.
inline double cosine_lr(double step, double total_steps, int restarts, double base_lr) {
  if (restarts < 1 || total_steps < restarts) throw ConfigError("cosine schedule needs total_steps >= restarts >= 1");
  const double cycle = total_steps / restarts;
  const double offset = step - std::floor(step / cycle) * cycle;
  return base_lr * 0.5 * (1.0 + std::cos(std::numbers::pi * offset / cycle));
}

enum class ClipMode { kNone, kGlobalNorm, kValue };

struct OptimizerConfig {
  double momentum = 0.0;
  double rho = 0.99;
  double epsilon = 1e-8;
  ClipMode clip_mode = ClipMode::kGlobalNorm;
  double clip = 1e-2;
};

// RMS accumulators and momentum buffers, shaped like the model.
struct OptimizerState {
  GradientSet square_avg;
  GradientSet momentum;
  std::size_t steps = 0;

  static OptimizerState for_params(const TreeParams& params) {
    return {GradientSet::zeros_like(params), GradientSet::zeros_like(params), 0};
  }
};

struct StepInfo {
  double grad_norm = 0.0;     // before clipping
  double applied_norm = 0.0;  // after clipping
};

namespace detail {

inline void rms_update(Matrix& param, Matrix& grad, Matrix& sq, Matrix& buf, double lr, const OptimizerConfig& cfg) {
  sq = cfg.rho * sq + (1.0 - cfg.rho) * grad.cwiseAbs2();
  buf = cfg.momentum * buf + (grad.array() / (sq.array() + cfg.epsilon).sqrt()).matrix();
  param -= lr * buf;
}

}  // namespace detail

// Clip, then s <- rho s + (1-rho) g^2, b <- mu b + g / sqrt(s + eps),
// param <- param - lr b. `grads` already contains any regularizer terms.
inline StepInfo optimizer_step(OptimizerState& state, TreeParams& params, GradientSet grads, double lr,
                               const OptimizerConfig& cfg) {
  if (!grads.all_finite()) throw NumericError("non-finite gradient at optimizer step " + std::to_string(state.steps));
  StepInfo info;
  info.grad_norm = std::sqrt(grads.squared_norm());
  if (cfg.clip_mode == ClipMode::kGlobalNorm && info.grad_norm > cfg.clip) {
    grads *= cfg.clip / info.grad_norm;
  } else if (cfg.clip_mode == ClipMode::kValue) {
    for (Matrix& w : grads.layers) w = w.cwiseMax(-cfg.clip).cwiseMin(cfg.clip);
    grads.leaves = grads.leaves.cwiseMax(-cfg.clip).cwiseMin(cfg.clip);
  }
  info.applied_norm = std::sqrt(grads.squared_norm());
  for (std::size_t m = 0; m < params.layers.size(); ++m) {
    detail::rms_update(params.layers[m], grads.layers[m], state.square_avg.layers[m], state.momentum.layers[m], lr, cfg);
  }
  detail::rms_update(params.leaves, grads.leaves, state.square_avg.leaves, state.momentum.leaves, lr, cfg);
  ++state.steps;
  return info;
}

}  // namespace dgt
