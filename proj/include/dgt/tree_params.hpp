#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "dgt/errors.hpp"
#include "dgt/linalg.hpp"
#include "dgt/path_tables.hpp"

namespace dgt {

// Hidden widths d_1..d_{L-1} of the linear layers placed in front of the
// node-decision layer. An empty list means L = 1.
struct OverparamSpec {
  std::vector<int> hidden_dims;

  int layers() const { return static_cast<int>(hidden_dims.size()) + 1; }

  // Full dimension chain d_1..d_L including the implied 2^h-1 output rows.
  std::vector<int> dims_for(int height) const {
    std::vector<int> dims = hidden_dims;
    dims.push_back(static_cast<int>(num_internal(height)));
    return dims;
  }

  static OverparamSpec single() { return {}; }

  // Fixed L = 3 widths used for each supported height.
  static OverparamSpec standard_three_layer(int height) {
    switch (height) {
      case 2: return {{240, 240}};
      case 4: return {{600, 600}};
      case 6: return {{1008, 1008}};
      case 8: return {{1530, 1530}};
      case 10: return {{2046, 2046}};
      default:
        throw ConfigError("no default hidden dimensions for height " + std::to_string(height) +
                          "; pass them explicitly");
    }
  }
};

enum class LeafInit { kSmallUniform, kZeros };

// Learnable model: W^(1) (d1 x (d+1)), ..., W^(L) ((2^h-1) x d_{L-1}) and leaf
// values (2^h x K). Bias enters through the appended constant input.
struct TreeParams {
  int height = 0;
  int input_dim = 0;
  int num_outputs = 1;
  std::vector<Matrix> layers;
  Matrix leaves;

  std::size_t num_layers() const { return layers.size(); }

  void validate() const {
    if (height < 1 || height > kMaxHeight) throw ShapeError("invalid tree height");
    if (input_dim < 1) throw ShapeError("input dimension must be positive");
    if (num_outputs < 1) throw ShapeError("number of outputs must be positive");
    if (layers.empty()) throw ShapeError("at least one layer is required");
    Eigen::Index cols = input_dim + 1;
    for (std::size_t m = 0; m < layers.size(); ++m) {
      if (layers[m].cols() != cols || layers[m].rows() < 1) {
        throw ShapeError("layer " + std::to_string(m + 1) + " has shape " +
                         std::to_string(layers[m].rows()) + "x" + std::to_string(layers[m].cols()) +
                         ", expected " + std::to_string(cols) + " columns");
      }
      cols = layers[m].rows();
    }
    if (static_cast<std::size_t>(layers.back().rows()) != num_internal(height)) {
      throw ShapeError("last layer must have 2^h-1 rows");
    }
    if (static_cast<std::size_t>(leaves.rows()) != num_leaves(height) || leaves.cols() != num_outputs) {
      throw ShapeError("leaf matrix must be 2^h x K");
    }
  }
};

// Layer entries ~ U[-1/sqrt(fan_in), 1/sqrt(fan_in)]; leaves ~ U[-0.1, 0.1]
// or zero.
template <class Rng>
TreeParams init_params(int height, int input_dim, int num_outputs, const OverparamSpec& spec,
                       LeafInit leaf_init, Rng& rng) {
  PathTables check(height);  // range check
  (void)check;
  TreeParams p;
  p.height = height;
  p.input_dim = input_dim;
  p.num_outputs = num_outputs;
  int fan_in = input_dim + 1;
  for (int rows : spec.dims_for(height)) {
    if (rows < 1) throw ConfigError("hidden dimensions must be positive");
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    Matrix w(rows, fan_in);
    for (Eigen::Index c = 0; c < w.cols(); ++c)
      for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = dist(rng);
    p.layers.push_back(std::move(w));
    fan_in = rows;
  }
  p.leaves = Matrix::Zero(static_cast<Eigen::Index>(num_leaves(height)), num_outputs);
  if (leaf_init == LeafInit::kSmallUniform) {
    std::uniform_real_distribution<double> dist(-0.1, 0.1);
    for (Eigen::Index c = 0; c < p.leaves.cols(); ++c)
      for (Eigen::Index r = 0; r < p.leaves.rows(); ++r) p.leaves(r, c) = dist(rng);
  }
  p.validate();
  return p;
}

}  // namespace dgt
