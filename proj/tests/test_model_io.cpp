#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace dgt;

namespace {

ModelFile sample_model(std::variant<ObliqueTree, TreeParams, ForestModel> payload) {
  ModelFile m;
  m.task = Task::kRegression;
  NormalizationStats s;
  s.feature_mean = (Vector(2) << 0.1, -1.0 / 3.0).finished();
  s.feature_scale = (Vector(2) << 2.0, 1e-7).finished();
  s.scale_target = true;
  s.target_min = -1.5;
  s.target_max = 3.0 / 7.0;
  m.normalization = s;
  m.config["height"] = 2;
  m.config["lr"] = 0.01;
  m.seed = 42;
  m.payload = std::move(payload);
  return m;
}

}  // namespace

TEST(ModelIo, CollapsedRoundTripIsByteStable) {
  const TreeParams p = dgt::testing::random_params(2, 2, 1, OverparamSpec{{4}}, 3);
  const ModelFile m = sample_model(collapse(p));
  const std::string text = serialize_model(m);
  const ModelFile back = parse_model(text);
  EXPECT_EQ(serialize_model(back), text);
  const ObliqueTree& t = std::get<ObliqueTree>(back.payload);
  EXPECT_EQ(t.weights, collapse(p).weights);
  EXPECT_EQ(t.bias, collapse(p).bias);
  EXPECT_EQ(*back.normalization, *m.normalization);
  EXPECT_EQ(back.seed, 42u);
}

TEST(ModelIo, LayeredRoundTrip) {
  const TreeParams p = dgt::testing::random_params(3, 2, 2, OverparamSpec{{5, 3}}, 4);
  const std::string text = serialize_model(sample_model(p));
  const ModelFile back = parse_model(text);
  const TreeParams& q = std::get<TreeParams>(back.payload);
  ASSERT_EQ(q.layers.size(), 3u);
  for (std::size_t m = 0; m < 3; ++m) EXPECT_EQ(q.layers[m], p.layers[m]);
  EXPECT_EQ(q.leaves, p.leaves);
  EXPECT_EQ(serialize_model(back), text);
}

TEST(ModelIo, ForestRoundTripPredictsIdentically) {
  ForestModel f;
  for (std::uint64_t s = 0; s < 3; ++s) {
    f.members.push_back(collapse(dgt::testing::random_params(2, 2, 1, OverparamSpec::single(), s)));
    f.member_seeds.push_back(s * 1000003);
  }
  f.sample_fraction = 0.85;
  const ModelFile m = sample_model(f);
  const std::string text = serialize_model(m);
  const ModelFile back = parse_model(text);
  EXPECT_EQ(serialize_model(back), text);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    const Vector x = dgt::testing::random_vector(2, rng);
    EXPECT_EQ(model_scores(m, nullptr, x), model_scores(back, nullptr, x));
  }
  EXPECT_EQ(std::get<ForestModel>(back.payload).member_seeds, f.member_seeds);
}

TEST(ModelIo, FileRoundTrip) {
  dgt::testing::TempDir dir;
  const ModelFile m = sample_model(collapse(dgt::testing::random_params(2, 2, 1, OverparamSpec::single(), 5)));
  save_model(m, dir.file("m.json"));
  EXPECT_EQ(serialize_model(load_model(dir.file("m.json"))), serialize_model(m));
  EXPECT_THROW(load_model(dir.file("missing.json")), DataError);
}

TEST(ModelIo, RejectsBadInput) {
  EXPECT_THROW(parse_model("{not json"), DataError);
  const ModelFile m = sample_model(collapse(dgt::testing::random_params(1, 2, 1, OverparamSpec::single(), 6)));
  std::string text = serialize_model(m);
  const std::string key = "\"version\": 1";
  const auto at = text.find(key);
  ASSERT_NE(at, std::string::npos);
  text.replace(at, key.size(), "\"version\": 99");
  EXPECT_THROW(parse_model(text), DataError);
}
