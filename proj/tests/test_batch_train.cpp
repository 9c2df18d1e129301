#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace dgt;

namespace {

Dataset constant_points(std::size_t n, double y) {
  Dataset d;
  d.features = RowMatrix::Constant(static_cast<Eigen::Index>(n), 2, 0.3);
  d.labels.assign(n, y);
  return d;
}

void expect_same(const TreeParams& a, const TreeParams& b) {
  ASSERT_EQ(a.layers.size(), b.layers.size());
  for (std::size_t m = 0; m < a.layers.size(); ++m) EXPECT_EQ(a.layers[m], b.layers[m]);
  EXPECT_EQ(a.leaves, b.leaves);
}

Dataset small_generated(std::uint64_t seed, Task task = Task::kRegression) {
  OracleTreeSpec spec;
  spec.task = task;
  spec.num_classes = 3;
  return gen_oracle_tree(spec, 300, seed).data;
}

}  // namespace

TEST(TrainBatch, IdenticalPointsConverge) {
  const Dataset d = constant_points(64, 0.7);
  TrainConfig cfg;
  cfg.height = 1;
  cfg.epochs = 200;
  const TrainResult r = train_batch(d, cfg, OverparamSpec::single(), 1);
  const PathTables t(1);
  const double err = rmse([&](const Vector& x) { return forward_hard(x, r.params, t).value; }, d);
  EXPECT_LT(err, 1e-2);
  EXPECT_EQ(r.log.size(), 200u);
}

TEST(TrainBatch, ZeroLearningRateKeepsParameters) {
  const Dataset d = small_generated(1);
  TrainConfig cfg;
  cfg.lr = 0.0;
  cfg.epochs = 5;
  std::mt19937_64 rng(9);
  const TreeParams init = init_params(2, 2, 1, OverparamSpec{{8}}, LeafInit::kSmallUniform, rng);
  const TrainResult r = train_batch(d, cfg, OverparamSpec{{8}}, 3, nullptr, init);
  expect_same(r.params, init);
}

TEST(TrainBatch, Deterministic) {
  const Dataset d = small_generated(2);
  TrainConfig cfg;
  cfg.epochs = 4;
  const TrainResult a = train_batch(d, cfg, OverparamSpec{{6, 6}}, 17);
  const TrainResult b = train_batch(d, cfg, OverparamSpec{{6, 6}}, 17);
  expect_same(a.params, b.params);
  const TrainResult c = train_batch(d, cfg, OverparamSpec{{6, 6}}, 18);
  EXPECT_NE(a.params.leaves, c.params.leaves);
}

TEST(TrainBatch, LogsValidationMetric) {
  const Dataset d = small_generated(3);
  TrainConfig cfg;
  cfg.epochs = 3;
  const TrainResult r = train_batch(d, cfg, OverparamSpec::single(), 1, &d);
  ASSERT_EQ(r.log.size(), 3u);
  EXPECT_TRUE(r.log.back().validation_metric.has_value());
  EXPECT_EQ(r.log.back().step, 9u);
}

TEST(TrainBatch, KeepBestValidation) {
  const Dataset d = small_generated(4);
  TrainConfig cfg;
  cfg.epochs = 10;
  cfg.keep_best_validation = true;
  const TrainResult r = train_batch(d, cfg, OverparamSpec::single(), 2, &d);
  double best = 1e300;
  for (const EpochRecord& e : r.log) best = std::min(best, *e.validation_metric);
  const PathTables t(2);
  EXPECT_DOUBLE_EQ(rmse([&](const Vector& x) { return forward_hard(x, r.params, t).value; }, d), best);
}

TEST(TrainBatch, Classification) {
  const Dataset d = small_generated(5, Task::kClassification);
  TrainConfig cfg;
  cfg.epochs = 60;
  const TrainResult r = train_batch(d, cfg, OverparamSpec::single(), 4);
  EXPECT_EQ(r.params.num_outputs, 3);
  const PathTables t(2);
  EXPECT_GT(accuracy([&](const Vector& x) { return forward_hard(x, r.params, t).value; }, d), 0.6);
}

TEST(TrainBatch, RejectsBadInput) {
  const Dataset d = small_generated(6);
  TrainConfig cfg;
  cfg.epochs = 0;
  EXPECT_THROW(train_batch(d, cfg, OverparamSpec::single(), 1), ConfigError);
  cfg.epochs = 1;
  cfg.loss = LossKind::kCrossEntropy;
  EXPECT_THROW(train_batch(d, cfg, OverparamSpec::single(), 1), ConfigError);
  cfg.loss.reset();
  std::mt19937_64 rng(1);
  const TreeParams wrong = init_params(2, 3, 1, OverparamSpec::single(), LeafInit::kZeros, rng);
  EXPECT_THROW(train_batch(d, cfg, OverparamSpec::single(), 1, nullptr, wrong), ShapeError);
  Dataset unlabeled = d;
  unlabeled.labels.clear();
  EXPECT_THROW(train_batch(unlabeled, cfg, OverparamSpec::single(), 1), PreconditionError);
}

TEST(TrainBatch, NonFiniteLossThrows) {
  Dataset d = constant_points(8, 0.5);
  d.labels[3] = std::numeric_limits<double>::infinity();
  TrainConfig cfg;
  cfg.height = 1;
  cfg.epochs = 1;
  EXPECT_THROW(train_batch(d, cfg, OverparamSpec::single(), 1), NumericError);
}

TEST(Overparam, TableDims) {
  EXPECT_EQ(OverparamSpec::standard_three_layer(6).dims_for(6), (std::vector<int>{1008, 1008, 63}));
  EXPECT_EQ(OverparamSpec::standard_three_layer(2).dims_for(2), (std::vector<int>{240, 240, 3}));
  EXPECT_EQ(OverparamSpec::standard_three_layer(10).dims_for(10), (std::vector<int>{2046, 2046, 1023}));
  EXPECT_THROW(OverparamSpec::standard_three_layer(3), ConfigError);
}

TEST(Overparam, InitRanges) {
  std::mt19937_64 rng(1);
  const TreeParams p = init_params(3, 4, 1, OverparamSpec{{10}}, LeafInit::kSmallUniform, rng);
  EXPECT_LE(p.layers[0].cwiseAbs().maxCoeff(), 1.0 / std::sqrt(5.0));
  EXPECT_LE(p.layers[1].cwiseAbs().maxCoeff(), 1.0 / std::sqrt(10.0));
  EXPECT_LE(p.leaves.cwiseAbs().maxCoeff(), 0.1);
  const TreeParams z = init_params(3, 4, 3, OverparamSpec::single(), LeafInit::kZeros, rng);
  EXPECT_EQ(z.leaves, Matrix::Zero(8, 3));
}
