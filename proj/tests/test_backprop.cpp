#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "test_util.hpp"

using namespace dgt;
using dgt::testing::random_params;
using dgt::testing::random_vector;

namespace {

double mix(const Vector& q, const Vector& theta) {
  const Vector e = (q.array() - q.maxCoeff()).exp().matrix();
  return e.dot(theta) / e.sum();
}

SoftPathScores scores_for(const Vector& q, const Vector& theta) {
  SoftPathScores s;
  s.q_tilde = q;
  s.probs = (q.array() - q.maxCoeff()).exp().matrix();
  s.probs /= s.probs.sum();
  s.v = s.probs.dot(theta);
  return s;
}

double clip_surrogate(const Vector& a, const PathTables& t, std::size_t leaf) {
  double c = 0.0;
  for (int i = 0; i < t.height(); ++i) {
    c += std::clamp(a(static_cast<Eigen::Index>(t.pred_row(i, leaf))), -1.0, 1.0) * t.sign(i, leaf);
  }
  return c;
}

Vector unit(Eigen::Index n, Eigen::Index k) {
  Vector e = Vector::Zero(n);
  e(k) = 1.0;
  return e;
}

}  // namespace

TEST(Mixing, MatchesFiniteDifferences) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const int leaves = 2 << (trial % 5);
    const Vector q = random_vector(leaves, rng, 3.0);
    const Vector theta = random_vector(leaves, rng, 2.0);
    const Vector coef = mixing_coefficients(scores_for(q, theta), theta);
    for (int l = 0; l < leaves; ++l) {
      const double eps = 1e-5;
      const double fd = (mix(q + eps * unit(leaves, l), theta) - mix(q - eps * unit(leaves, l), theta)) / (2 * eps);
      EXPECT_NEAR(coef(l), fd, 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST(Mixing, StumpExample) {
  const PathTables t(1);
  const Vector a = (Vector(1) << 0.5).finished();
  const Vector theta = (Vector(2) << 0.3, 1.7).finished();
  const SoftPathScores s = soft_path_scores(a, theta, t);
  EXPECT_EQ(s.q_tilde, (Vector(2) << -1, 1).finished());
  const double p0 = 1.0 / (1.0 + std::exp(2.0));
  const double p1 = 1.0 - p0;
  EXPECT_NEAR(s.probs(0), p0, 1e-15);
  const Vector coef = mixing_coefficients(s, theta);
  const Vector g = activation_gradient(a, coef, t);
  // ds/da = p0 p1 (theta1 - theta0) (S_1 - S_0)
  EXPECT_NEAR(g(0), p0 * p1 * (1.7 - 0.3) * 2.0, 1e-14);
}

TEST(StraightThrough, MatchesClipSurrogate) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int h = 1; h <= 5; ++h) {
    const PathTables t(h);
    const auto n = static_cast<Eigen::Index>(t.internal_nodes());
    for (int trial = 0; trial < 40; ++trial) {
      Vector a(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        do a(i) = u(rng);
        while (std::abs(std::abs(a(i)) - 1.0) < 1e-3);
      }
      for (std::size_t l = 0; l < t.leaves(); ++l) {
        const Vector g = activation_gradient(a, unit(static_cast<Eigen::Index>(t.leaves()), static_cast<Eigen::Index>(l)), t);
        for (Eigen::Index i = 0; i < n; ++i) {
          const double eps = 1e-6;
          const double fd = (clip_surrogate(a + eps * unit(n, i), t, l) - clip_surrogate(a - eps * unit(n, i), t, l)) / (2 * eps);
          EXPECT_NEAR(g(i), fd, 1e-6);
        }
      }
    }
  }
}

TEST(Backprop, LayerGradientsAreChainJacobians) {
  const PathTables t(3);
  TreeParams p = random_params(3, 3, 2, OverparamSpec{{5, 4}}, 7);
  for (Matrix& w : p.layers) w *= 0.4;
  std::mt19937_64 rng(3);
  const Vector x = random_vector(3, rng);
  const Vector out_grad = (Vector(2) << 0.7, -1.3).finished();
  const GradientSet g = backprop(x, p, t, out_grad);

  const Vector a = decision_activations(x, p);
  const Vector leaf_scalar = p.leaves * out_grad;
  const Vector c = activation_gradient(a, mixing_coefficients(soft_path_scores(a, leaf_scalar, t), leaf_scalar), t);
  ASSERT_GT(c.cwiseAbs().maxCoeff(), 0.0);
  for (std::size_t m = 0; m < p.layers.size(); ++m) {
    for (Eigen::Index r = 0; r < p.layers[m].rows(); ++r) {
      for (Eigen::Index k = 0; k < p.layers[m].cols(); ++k) {
        const double eps = 1e-6;
        TreeParams up = p, down = p;
        up.layers[m](r, k) += eps;
        down.layers[m](r, k) -= eps;
        const double fd = (c.dot(decision_activations(x, up)) - c.dot(decision_activations(x, down))) / (2 * eps);
        EXPECT_NEAR(g.layers[m](r, k), fd, 1e-6 * std::max(1.0, std::abs(fd)));
      }
    }
  }
}

TEST(Backprop, LeafGradientIsOneHot) {
  const PathTables t(3);
  const TreeParams p = random_params(3, 4, 3, OverparamSpec::single(), 5);
  std::mt19937_64 rng(4);
  const Vector x = random_vector(4, rng);
  const Vector out_grad = (Vector(3) << 1.5, -2, 0.25).finished();
  const GradientSet g = backprop(x, p, t, out_grad);
  const std::size_t leaf = forward_hard(x, p, t).leaf;
  Matrix expected = Matrix::Zero(8, 3);
  expected.row(static_cast<Eigen::Index>(leaf)) = out_grad.transpose();
  EXPECT_EQ(g.leaves, expected);
}

TEST(Backprop, PerturbingRoutedLeafMovesPrediction) {
  const PathTables t(2);
  TreeParams p = random_params(2, 2, 1, OverparamSpec::single(), 6);
  const Vector x = (Vector(2) << 0.3, -0.2).finished();
  const HardPrediction base = forward_hard(x, p, t);
  for (std::size_t l = 0; l < 4; ++l) {
    TreeParams q = p;
    q.leaves(static_cast<Eigen::Index>(l), 0) += 0.125;
    const double delta = forward_hard(x, q, t).value(0) - base.value(0);
    EXPECT_EQ(delta, l == base.leaf ? 0.125 : 0.0);
  }
}

TEST(Backprop, LinearInOutGrad) {
  const PathTables t(3);
  const TreeParams p = random_params(3, 3, 2, OverparamSpec{{6}}, 8);
  const Vector x = (Vector(3) << 0.1, 0.2, -0.3).finished();
  const Vector g1 = (Vector(2) << 0.5, -1).finished();
  const Vector g2 = (Vector(2) << -2, 0.75).finished();
  GradientSet sum = backprop(x, p, t, g1);
  sum += backprop(x, p, t, g2);
  const GradientSet joint = backprop(x, p, t, g1 + g2);
  for (std::size_t m = 0; m < p.layers.size(); ++m) EXPECT_LT((sum.layers[m] - joint.layers[m]).norm(), 1e-12);
  EXPECT_LT((sum.leaves - joint.leaves).norm(), 1e-12);
}

TEST(Backprop, SaturatedActivationsGiveNoLayerGradient) {
  const PathTables t(2);
  TreeParams p = random_params(2, 2, 1, OverparamSpec::single(), 9);
  p.layers[0] = (Matrix(3, 3) << 0, 0, 5, 0, 0, -3, 0, 0, 2).finished();
  const GradientSet g = backprop((Vector(2) << 0.4, 0.9).finished(), p, t, Vector::Constant(1, 1.0));
  EXPECT_EQ(g.layers[0], Matrix::Zero(3, 3));
  EXPECT_EQ(g.leaves.sum(), 1.0);
}

TEST(Backprop, NonFiniteActivationThrows) {
  const PathTables t(1);
  TreeParams p = dgt::testing::stump((Vector(3) << std::numeric_limits<double>::infinity(), 0, 0).finished(),
                                     Vector::Zero(2));
  EXPECT_THROW(backprop((Vector(2) << 1, 1).finished(), p, t, Vector::Constant(1, 1.0)), NumericError);
}

TEST(Backprop, MinibatchEqualsAverageOfExamples) {
  const PathTables t(3);
  TreeParams p = random_params(3, 4, 2, OverparamSpec{{9, 7}}, 10);
  for (Matrix& w : p.layers) w *= 0.5;
  std::mt19937_64 rng(11);
  const int b = 17;
  Matrix x_aug(5, b);
  Matrix out_grads(2, b);
  GradientSet loop = GradientSet::zeros_like(p);
  for (int k = 0; k < b; ++k) {
    const Vector x = random_vector(4, rng);
    x_aug.col(k) = with_bias(x);
    out_grads.col(k) = random_vector(2, rng);
    loop += backprop(x, p, t, out_grads.col(k));
  }
  loop *= 1.0 / b;
  GradientSet batch = GradientSet::zeros_like(p);
  backward_batch(forward_batch(x_aug, p), out_grads, p, t, 1.0 / b, batch);
  for (std::size_t m = 0; m < p.layers.size(); ++m) {
    EXPECT_LT((batch.layers[m] - loop.layers[m]).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_GT(batch.layers[m].cwiseAbs().maxCoeff(), 0.0);
  }
  EXPECT_LT((batch.leaves - loop.leaves).cwiseAbs().maxCoeff(), 1e-12);
}
