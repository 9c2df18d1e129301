#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "dgt/errors.hpp"
#include "dgt/linalg.hpp"
#include "dgt/path_tables.hpp"
#include "dgt/tree.hpp"
#include "dgt/tree_params.hpp"

namespace dgt {

// Gradients with the exact shapes of a TreeParams.
struct GradientSet {
  std::vector<Matrix> layers;
  Matrix leaves;

  static GradientSet zeros_like(const TreeParams& params) {
    GradientSet g;
    g.layers.reserve(params.layers.size());
    for (const Matrix& w : params.layers) g.layers.push_back(Matrix::Zero(w.rows(), w.cols()));
    g.leaves = Matrix::Zero(params.leaves.rows(), params.leaves.cols());
    return g;
  }

  void set_zero() {
    for (Matrix& w : layers) w.setZero();
    leaves.setZero();
  }

  GradientSet& operator+=(const GradientSet& other) {
    for (std::size_t m = 0; m < layers.size(); ++m) layers[m] += other.layers[m];
    leaves += other.leaves;
    return *this;
  }

  GradientSet& operator*=(double s) {
    for (Matrix& w : layers) w *= s;
    leaves *= s;
    return *this;
  }

  double squared_norm() const {
    double total = leaves.squaredNorm();
    for (const Matrix& w : layers) total += w.squaredNorm();
    return total;
  }

  bool all_finite() const {
    if (!leaves.allFinite()) return false;
    for (const Matrix& w : layers)
      if (!w.allFinite()) return false;
    return true;
  }
};

// Backward-pass view of the routing: integer path agreement scores
// q~_l = sum_i sign(a_{i,I(i,l)}) S(i,l), their softmax, and the mixture of
// scalarized leaf values under it.
struct SoftPathScores {
  Vector q_tilde;  // in [-h, h]
  Vector probs;    // softmax(q~)
  double z = 0.0;  // sum_l exp(q~_l)
  double v = 0.0;  // sum_l probs_l * leaf_scalar_l
};

inline SoftPathScores soft_path_scores(const Vector& activations, const Vector& leaf_scalar,
                                       const PathTables& tables) {
  const std::size_t leaves = tables.leaves();
  SoftPathScores s;
  s.q_tilde = Vector::Zero(static_cast<Eigen::Index>(leaves));
  for (std::size_t l = 0; l < leaves; ++l) {
    int total = 0;
    for (int i = 0; i < tables.height(); ++i) {
      total += hard_sign(activations(static_cast<Eigen::Index>(tables.pred_row(i, l)))) * tables.sign(i, l);
    }
    s.q_tilde(static_cast<Eigen::Index>(l)) = total;
  }
  const double top = s.q_tilde.maxCoeff();
  s.probs = (s.q_tilde.array() - top).exp().matrix();
  const double shifted_z = s.probs.sum();
  s.probs /= shifted_z;
  s.z = shifted_z * std::exp(top);
  s.v = s.probs.dot(leaf_scalar);
  return s;
}

// d/dq~_l of sum_l softmax(q~)_l leaf_scalar_l, i.e.
// (1/z)(leaf_scalar_l - v/z) exp(q~_l) in unnormalized terms.
inline Vector mixing_coefficients(const SoftPathScores& s, const Vector& leaf_scalar) {
  return (s.probs.array() * (leaf_scalar.array() - s.v)).matrix();
}

// Gradient w.r.t. the activation vector of sum_l coef_l q~_l with the
// straight-through rule d sign(a)/da = 1_{|a| <= 1}.
inline Vector activation_gradient(const Vector& activations, const Vector& coef, const PathTables& tables) {
  Vector grad = Vector::Zero(activations.size());
  for (std::size_t l = 0; l < tables.leaves(); ++l) {
    const double c = coef(static_cast<Eigen::Index>(l));
    if (c == 0.0) continue;
    for (int i = 0; i < tables.height(); ++i) {
      const auto row = static_cast<Eigen::Index>(tables.pred_row(i, l));
      if (std::abs(activations(row)) <= 1.0) grad(row) += c * tables.sign(i, l);
    }
  }
  return grad;
}

// Gradient of <out_grad, f(x)> w.r.t. every layer and the leaves. The leaf
// gradient is e_{l*} (x) out_grad for the hard-routed leaf l*; the layer
// gradients flow through the softmax of q~ and the straight-through sign.
inline GradientSet backprop(const VectorRef& x, const TreeParams& params, const PathTables& tables,
                            const VectorRef& out_grad) {
  check_tables(params, tables);
  if (out_grad.size() != params.num_outputs) throw ShapeError("out_grad length must equal K");
  if (x.size() != params.input_dim) throw ShapeError("feature vector has wrong length");

  std::vector<Vector> hidden;
  hidden.reserve(params.layers.size() + 1);
  hidden.push_back(with_bias(x));
  for (const Matrix& w : params.layers) hidden.push_back(w * hidden.back());
  const Vector& a = hidden.back();
  if (!a.allFinite()) throw NumericError("non-finite decision activation");

  const std::size_t leaf = route_activations(a, params.height);
  const Vector leaf_scalar = params.leaves * out_grad;
  const SoftPathScores scores = soft_path_scores(a, leaf_scalar, tables);
  Vector upstream = activation_gradient(a, mixing_coefficients(scores, leaf_scalar), tables);

  GradientSet g;
  g.layers.resize(params.layers.size());
  for (std::size_t m = params.layers.size(); m-- > 0;) {
    g.layers[m] = upstream * hidden[m].transpose();
    if (m > 0) upstream = params.layers[m].transpose() * upstream;
  }
  g.leaves = Matrix::Zero(params.leaves.rows(), params.leaves.cols());
  g.leaves.row(static_cast<Eigen::Index>(leaf)) = out_grad.transpose();
  return g;
}

// Hidden states of a minibatch; hidden[0] is the bias-augmented input and
// hidden.back() the activations.
struct ForwardCache {
  std::vector<Matrix> hidden;
  std::vector<std::size_t> leaves;

  const Matrix& activations() const { return hidden.back(); }
};

inline ForwardCache forward_batch(const Matrix& x_aug, const TreeParams& params) {
  if (x_aug.rows() != params.input_dim + 1) throw ShapeError("batch has wrong feature count");
  ForwardCache cache;
  cache.hidden.reserve(params.layers.size() + 1);
  cache.hidden.push_back(x_aug);
  for (const Matrix& w : params.layers) cache.hidden.push_back(w * cache.hidden.back());
  const Matrix& a = cache.hidden.back();
  if (!a.allFinite()) throw NumericError("non-finite decision activation");
  cache.leaves.resize(static_cast<std::size_t>(a.cols()));
  for (Eigen::Index b = 0; b < a.cols(); ++b) cache.leaves[static_cast<std::size_t>(b)] = route_activations(a.col(b), params.height);
  return cache;
}

// acc += weight * sum_b backprop(x_b, out_grads.col(b)), using one matrix
// product per layer for the whole batch.
inline void backward_batch(const ForwardCache& cache, const Matrix& out_grads, const TreeParams& params,
                           const PathTables& tables, double weight, GradientSet& acc) {
  check_tables(params, tables);
  const Matrix& a = cache.activations();
  if (out_grads.rows() != params.num_outputs || out_grads.cols() != a.cols()) {
    throw ShapeError("out_grads must be K x batch");
  }
  Matrix upstream(a.rows(), a.cols());
  for (Eigen::Index b = 0; b < a.cols(); ++b) {
    const Vector act = a.col(b);
    const Vector leaf_scalar = params.leaves * out_grads.col(b);
    const SoftPathScores scores = soft_path_scores(act, leaf_scalar, tables);
    upstream.col(b) = activation_gradient(act, mixing_coefficients(scores, leaf_scalar), tables);
    acc.leaves.row(static_cast<Eigen::Index>(cache.leaves[static_cast<std::size_t>(b)])) +=
        weight * out_grads.col(b).transpose();
  }
  upstream *= weight;
  for (std::size_t m = params.layers.size(); m-- > 0;) {
    acc.layers[m].noalias() += upstream * cache.hidden[m].transpose();
    if (m > 0) upstream = params.layers[m].transpose() * upstream;
  }
}

}  // namespace dgt
