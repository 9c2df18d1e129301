#pragma once

#include <cmath>
#include <string>

#include "dgt/errors.hpp"
#include "dgt/linalg.hpp"

namespace dgt {

enum class LossKind { kSquared, kCrossEntropy };

struct LossAndGrad {
  double loss = 0.0;
  Vector out_grad;  // d loss / d prediction
};

// Supervised losses on the hard prediction. For cross-entropy the prediction
// holds K leaf scores and the label is a class index.
inline LossAndGrad loss_and_grad(const Vector& prediction, double label, LossKind kind) {
  LossAndGrad out;
  if (kind == LossKind::kSquared) {
    if (prediction.size() != 1) throw ShapeError("squared loss expects a scalar prediction");
    const double r = prediction(0) - label;
    out.loss = r * r;
    out.out_grad = Vector::Constant(1, 2.0 * r);
    return out;
  }
  const auto k = prediction.size();
  const auto cls = static_cast<Eigen::Index>(label);
  if (static_cast<double>(cls) != label || cls < 0 || cls >= k) {
    throw PreconditionError("class index " + std::to_string(label) + " out of range for " +
                            std::to_string(k) + " classes");
  }
  const double top = prediction.maxCoeff();
  Vector p = (prediction.array() - top).exp().matrix();
  const double z = p.sum();
  p /= z;
  out.loss = -(prediction(cls) - top - std::log(z));
  p(cls) -= 1.0;
  out.out_grad = std::move(p);
  return out;
}

// Black-box losses used by the simulated oracles.
inline double squared_loss(double prediction, double target) {
  const double r = prediction - target;
  return r * r;
}

// Quadratic inside |r| <= xi, xi|r| - xi^2/2 outside.
inline double huber_loss(double prediction, double target, double xi) {
  const double r = std::abs(prediction - target);
  return r <= xi ? r * r : xi * r - 0.5 * xi * xi;
}

inline double zero_one_loss(int arm, int label) { return arm == label ? 0.0 : 1.0; }

}  // namespace dgt
