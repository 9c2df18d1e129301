#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dgt/errors.hpp"

namespace dgt {

inline constexpr int kMaxHeight = 16;

inline std::size_t num_leaves(int height) { return std::size_t{1} << height; }
inline std::size_t num_internal(int height) { return num_leaves(height) - 1; }

// Flat breadth-first row of internal node j at depth i.
inline std::size_t node_row(int depth, std::size_t j) {
  return (std::size_t{1} << depth) - 1 + j;
}

// Predecessor indices I(i,l) and direction signs S(i,l) of a complete binary
// tree. Nodes at depth i are numbered 0..2^i-1 left to right; S is -1 when
// leaf l sits in the left subtree of I(i,l).
class PathTables {
 public:
  PathTables() = default;

  explicit PathTables(int height) : height_(height) {
    if (height < 1 || height > kMaxHeight) {
      throw ConfigError("tree height must be in [1, " + std::to_string(kMaxHeight) +
                        "], got " + std::to_string(height));
    }
    const std::size_t leaves = num_leaves(height);
    pred_.resize(static_cast<std::size_t>(height) * leaves);
    sign_.resize(pred_.size());
    for (int i = 0; i < height; ++i) {
      const int shift = height - i;
      for (std::size_t l = 0; l < leaves; ++l) {
        pred_[offset(i, l)] = static_cast<int>(l >> shift);
        sign_[offset(i, l)] = ((l >> (shift - 1)) & 1U) ? 1 : -1;
      }
    }
  }

  int height() const { return height_; }
  std::size_t leaves() const { return num_leaves(height_); }
  std::size_t internal_nodes() const { return num_internal(height_); }

  int pred_index(int depth, std::size_t leaf) const { return pred_[offset(depth, leaf)]; }
  int sign(int depth, std::size_t leaf) const { return sign_[offset(depth, leaf)]; }

  // Row of the layer product holding the depth-i ancestor of leaf l.
  std::size_t pred_row(int depth, std::size_t leaf) const {
    return node_row(depth, static_cast<std::size_t>(pred_index(depth, leaf)));
  }

 private:
  std::size_t offset(int depth, std::size_t leaf) const {
    return static_cast<std::size_t>(depth) * num_leaves(height_) + leaf;
  }

  int height_ = 0;
  std::vector<int> pred_;
  std::vector<int> sign_;
};

inline PathTables build_path_tables(int height) { return PathTables(height); }

}  // namespace dgt
