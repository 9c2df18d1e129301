#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "test_util.hpp"

using namespace dgt;

namespace {

Dataset indexed(std::size_t n) {
  Dataset d;
  d.features.resize(static_cast<Eigen::Index>(n), 1);
  for (std::size_t i = 0; i < n; ++i) {
    d.features(static_cast<Eigen::Index>(i), 0) = static_cast<double>(i);
    d.labels.push_back(static_cast<double>(i));
  }
  return d;
}

ObliqueTree constant_tree(const Vector& value) {
  ObliqueTree t;
  t.height = 1;
  t.input_dim = 1;
  t.num_outputs = static_cast<int>(value.size());
  t.weights = Matrix::Zero(1, 1);
  t.bias = Vector::Zero(1);
  t.leaves = Matrix(2, value.size());
  t.leaves.row(0) = value.transpose();
  t.leaves.row(1) = value.transpose();
  return t;
}

Dataset noisy(std::uint64_t seed) {
  OracleTreeSpec spec;
  spec.noise = 0.1;
  return gen_oracle_tree(spec, 400, seed).data;
}

}  // namespace

TEST(Bootstrap, UniqueFraction) {
  const Dataset d = indexed(1000);
  std::mt19937_64 rng(1);
  double total = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Dataset s = bootstrap_sample(d, 1.0, rng);
    ASSERT_EQ(s.size(), 1000u);
    total += static_cast<double>(std::set<double>(s.labels.begin(), s.labels.end()).size()) / 1000.0;
  }
  EXPECT_NEAR(total / 100.0, 1.0 - std::exp(-1.0), 0.03);
}

TEST(Bootstrap, CountAndDeterminism) {
  const Dataset d = indexed(10);
  std::mt19937_64 a(4), b(4);
  const Dataset s1 = bootstrap_sample(d, 0.5, a);
  EXPECT_EQ(s1.size(), 5u);
  EXPECT_EQ(s1.labels, bootstrap_sample(d, 0.5, b).labels);
  EXPECT_EQ(bootstrap_sample(d, 0.85, a).size(), 9u);
  EXPECT_THROW(bootstrap_sample(d, 0.0, a), ConfigError);
  EXPECT_THROW(bootstrap_sample(Dataset{}, 1.0, a), PreconditionError);
}

TEST(PredictForest, Averages) {
  ForestModel m;
  for (double v : {1.0, 2.0, 3.0}) m.members.push_back(constant_tree(Vector::Constant(1, v)));
  EXPECT_DOUBLE_EQ(predict_forest(m, Vector::Zero(1))(0), 2.0);
  std::reverse(m.members.begin(), m.members.end());
  EXPECT_DOUBLE_EQ(predict_forest(m, Vector::Zero(1))(0), 2.0);
}

TEST(PredictForest, VotesAndTies) {
  ForestModel m;
  m.task = Task::kClassification;
  m.num_classes = 3;
  for (int c : {2, 2, 1}) m.members.push_back(constant_tree(Vector::Unit(3, c)));
  const Vector votes = predict_forest(m, Vector::Zero(1));
  EXPECT_EQ(votes, (Vector(3) << 0, 1, 2).finished());
  EXPECT_EQ(argmax(votes), 2);
  m.members.pop_back();
  m.members.push_back(constant_tree(Vector::Unit(3, 0)));
  m.members.push_back(constant_tree(Vector::Unit(3, 0)));
  EXPECT_EQ(argmax(predict_forest(m, Vector::Zero(1))), 0);
}

TEST(TrainForest, SingleMemberMatchesTree) {
  const Dataset d = noisy(1);
  TrainConfig cfg;
  cfg.epochs = 5;
  const ForestTrainResult f = train_forest(d, 1, cfg, OverparamSpec::single(), 1.0, 7);
  ASSERT_EQ(f.model.members.size(), 1u);
  const ObliqueTree& member = f.model.members[0];
  for (std::size_t i = 0; i < d.size(); ++i) EXPECT_EQ(predict_forest(f.model, d.x(i))(0), member.predict(d.x(i))(0));

  // The member is exactly the tree trained on its own bootstrap sample.
  std::mt19937_64 rng(f.model.member_seeds[0]);
  const Dataset sample = bootstrap_sample(d, 1.0, rng);
  const ObliqueTree direct = collapse(train_batch(sample, cfg, OverparamSpec::single(), splitmix64(f.model.member_seeds[0])).params);
  EXPECT_EQ(direct.weights, member.weights);
  EXPECT_EQ(direct.leaves, member.leaves);
}

TEST(TrainForest, ThreadCountDoesNotMatter) {
  const Dataset d = noisy(2);
  TrainConfig cfg;
  cfg.epochs = 3;
  const ForestTrainResult a = train_forest(d, 4, cfg, OverparamSpec::single(), 0.85, 3, 1);
  const ForestTrainResult b = train_forest(d, 4, cfg, OverparamSpec::single(), 0.85, 3, 3);
  ASSERT_EQ(a.model.members.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(a.model.members[i].weights, b.model.members[i].weights);
    EXPECT_EQ(a.model.members[i].leaves, b.model.members[i].leaves);
    EXPECT_EQ(a.model.member_seeds[i], b.model.member_seeds[i]);
  }
  EXPECT_NE(a.model.member_seeds[0], a.model.member_seeds[1]);
}

TEST(TrainForest, MemberFailureNamesIndex) {
  Dataset d = noisy(3);
  for (double& y : d.labels) y = std::numeric_limits<double>::infinity();
  TrainConfig cfg;
  cfg.epochs = 1;
  try {
    train_forest(d, 3, cfg, OverparamSpec::single(), 1.0, 1, 2);
    FAIL() << "expected a numeric error";
  } catch (const NumericError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("forest member 0: ", 0), 0u);
  }
  EXPECT_THROW(train_forest(d, 0, cfg, OverparamSpec::single(), 1.0, 1), ConfigError);
}
