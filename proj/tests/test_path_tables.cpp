#include <gtest/gtest.h>

#include <vector>

#include "dgt/path_tables.hpp"

using dgt::PathTables;

namespace {

std::vector<int> preds(const PathTables& t, int depth) {
  std::vector<int> out;
  for (std::size_t l = 0; l < t.leaves(); ++l) out.push_back(t.pred_index(depth, l));
  return out;
}

std::vector<int> signs(const PathTables& t, int depth) {
  std::vector<int> out;
  for (std::size_t l = 0; l < t.leaves(); ++l) out.push_back(t.sign(depth, l));
  return out;
}

}  // namespace

TEST(PathTables, HeightTwo) {
  const PathTables t(2);
  EXPECT_EQ(preds(t, 0), (std::vector<int>{0, 0, 0, 0}));
  EXPECT_EQ(preds(t, 1), (std::vector<int>{0, 0, 1, 1}));
  EXPECT_EQ(signs(t, 0), (std::vector<int>{-1, -1, 1, 1}));
  EXPECT_EQ(signs(t, 1), (std::vector<int>{-1, 1, -1, 1}));
}

TEST(PathTables, HeightOne) {
  const PathTables t(1);
  EXPECT_EQ(preds(t, 0), (std::vector<int>{0, 0}));
  EXPECT_EQ(signs(t, 0), (std::vector<int>{-1, 1}));
}

TEST(PathTables, RowsAreBreadthFirst) {
  const PathTables t(3);
  EXPECT_EQ(t.internal_nodes(), 7u);
  EXPECT_EQ(t.pred_row(0, 5), 0u);
  EXPECT_EQ(t.pred_row(1, 5), 2u);
  EXPECT_EQ(t.pred_row(2, 5), 5u);
}

TEST(PathTables, SignsSpellTheLeafIndex) {
  for (int h = 1; h <= 8; ++h) {
    const PathTables t(h);
    for (std::size_t l = 0; l < t.leaves(); ++l) {
      std::size_t rebuilt = 0;
      for (int i = 0; i < h; ++i) {
        EXPECT_EQ(static_cast<std::size_t>(t.pred_index(i, l)), rebuilt);
        rebuilt = 2 * rebuilt + (t.sign(i, l) > 0 ? 1 : 0);
      }
      EXPECT_EQ(rebuilt, l);
    }
  }
}

TEST(PathTables, RejectsBadHeight) {
  EXPECT_THROW(PathTables(0), dgt::ConfigError);
  EXPECT_THROW(PathTables(dgt::kMaxHeight + 1), dgt::ConfigError);
}
