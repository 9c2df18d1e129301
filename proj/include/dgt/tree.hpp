#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "dgt/errors.hpp"
#include "dgt/linalg.hpp"
#include "dgt/path_tables.hpp"
#include "dgt/tree_params.hpp"

namespace dgt {

// sigma_step: 1 iff a >= 0.
inline int step(double a) { return a >= 0.0 ? 1 : 0; }
// 2*sigma_step(a) - 1, so sign(0) = +1.
inline int hard_sign(double a) { return a >= 0.0 ? 1 : -1; }

inline void check_tables(const TreeParams& params, const PathTables& tables) {
  if (tables.height() != params.height) {
    throw ShapeError("path tables built for height " + std::to_string(tables.height()) +
                     " but model has height " + std::to_string(params.height));
  }
}

// a = W^(L) ... W^(1) [x; 1]; entry 2^i-1+j is the activation of node (i,j).
inline Vector decision_activations(const VectorRef& x, const TreeParams& params) {
  if (x.size() != params.input_dim) {
    throw ShapeError("feature vector has length " + std::to_string(x.size()) + ", model expects " +
                     std::to_string(params.input_dim));
  }
  Vector h = with_bias(x);
  for (const Matrix& w : params.layers) h = w * h;
  return h;
}

// Column-wise activations for inputs already carrying the bias row.
inline Matrix decision_activations_batch(const Matrix& x_aug, const TreeParams& params) {
  if (x_aug.rows() != params.input_dim + 1) throw ShapeError("batch has wrong feature count");
  Matrix h = params.layers.front() * x_aug;
  for (std::size_t m = 1; m < params.layers.size(); ++m) h = params.layers[m] * h;
  return h;
}

// Leaf reached by descending with the hard step: right iff a_{i,j} >= 0.
template <class Activations>
std::size_t route_activations(const Activations& a, int height) {
  std::size_t j = 0;
  for (int i = 0; i < height; ++i) {
    j = 2 * j + static_cast<std::size_t>(step(a(static_cast<Eigen::Index>(node_row(i, j)))));
  }
  return j;
}

struct HardPrediction {
  std::size_t leaf = 0;
  Vector value;
};

inline HardPrediction forward_hard(const VectorRef& x, const TreeParams& params, const PathTables& tables) {
  check_tables(params, tables);
  const Vector a = decision_activations(x, params);
  HardPrediction out;
  out.leaf = route_activations(a, params.height);
  out.value = params.leaves.row(static_cast<Eigen::Index>(out.leaf)).transpose();
  return out;
}

// Product form: q_l = prod_i sigma(sign(a_{i,I(i,l)}) S(i,l)). The decision is
// quantized before multiplying by S so that a == 0 resolves to the right child
// in every factor.
inline int path_indicator_product(const Vector& a, const PathTables& tables, std::size_t leaf) {
  int q = 1;
  for (int i = 0; i < tables.height(); ++i) {
    const double act = a(static_cast<Eigen::Index>(tables.pred_row(i, leaf)));
    q *= step(static_cast<double>(hard_sign(act) * tables.sign(i, leaf)));
  }
  return q;
}

// Sum form: q_l = sigma(sum_i sigma(sign(a_{i,I(i,l)}) S(i,l)) - h).
inline int path_indicator_sum(const Vector& a, const PathTables& tables, std::size_t leaf) {
  int total = 0;
  for (int i = 0; i < tables.height(); ++i) {
    const double act = a(static_cast<Eigen::Index>(tables.pred_row(i, leaf)));
    total += step(static_cast<double>(hard_sign(act) * tables.sign(i, leaf)));
  }
  return step(static_cast<double>(total - tables.height()));
}

inline int path_indicator_product(const VectorRef& x, const TreeParams& params, const PathTables& tables,
                                  std::size_t leaf) {
  check_tables(params, tables);
  return path_indicator_product(decision_activations(x, params), tables, leaf);
}

inline int path_indicator_sum(const VectorRef& x, const TreeParams& params, const PathTables& tables,
                              std::size_t leaf) {
  check_tables(params, tables);
  return path_indicator_sum(decision_activations(x, params), tables, leaf);
}

// Deployment form: one halfspace per internal node, one value per leaf.
struct ObliqueTree {
  int height = 0;
  int input_dim = 0;
  int num_outputs = 1;
  Matrix weights;  // (2^h-1) x d, row node_row(i,j)
  Vector bias;     // 2^h-1
  Matrix leaves;   // 2^h x K

  double node_score(std::size_t row, const VectorRef& x) const {
    return weights.row(static_cast<Eigen::Index>(row)).dot(x) + bias(static_cast<Eigen::Index>(row));
  }

  std::size_t route(const VectorRef& x) const {
    if (x.size() != input_dim) throw ShapeError("feature vector has wrong length for tree");
    std::size_t j = 0;
    for (int i = 0; i < height; ++i) j = 2 * j + static_cast<std::size_t>(step(node_score(node_row(i, j), x)));
    return j;
  }

  Vector predict(const VectorRef& x) const {
    return leaves.row(static_cast<Eigen::Index>(route(x))).transpose();
  }
};

inline ObliqueTree collapse(const TreeParams& params) {
  params.validate();
  Matrix m = params.layers.front();
  for (std::size_t k = 1; k < params.layers.size(); ++k) m = params.layers[k] * m;
  ObliqueTree tree;
  tree.height = params.height;
  tree.input_dim = params.input_dim;
  tree.num_outputs = params.num_outputs;
  tree.weights = m.leftCols(params.input_dim);
  tree.bias = m.col(params.input_dim);
  tree.leaves = params.leaves;
  return tree;
}

// Visit counts from routing a dataset once through a tree.
struct PruneReport {
  std::vector<std::size_t> internal_visits;  // by node_row
  std::vector<std::size_t> leaf_visits;
  std::size_t reachable_internal = 0;
  std::size_t reachable_leaves = 0;
  std::size_t kept_internal = 0;  // decision nodes left after pruning
};

// Tree with unreached branches spliced out. Node 0 is the root.
class PrunedTree {
 public:
  struct Node {
    int row = -1;   // node_row of the source decision node, -1 for leaves
    int leaf = -1;  // source leaf index, -1 for decision nodes
    int left = -1;
    int right = -1;
  };

  PrunedTree() = default;

  PrunedTree(const ObliqueTree& source, const PruneReport& report) : source_(source) {
    build(0, 0, report);
  }

  const std::vector<Node>& nodes() const { return nodes_; }

  std::size_t decision_nodes() const {
    std::size_t n = 0;
    for (const Node& node : nodes_) n += node.row >= 0 ? 1 : 0;
    return n;
  }

  // Source leaf index reached by x.
  std::size_t route(const VectorRef& x) const {
    int at = 0;
    while (nodes_[static_cast<std::size_t>(at)].row >= 0) {
      const Node& node = nodes_[static_cast<std::size_t>(at)];
      at = step(source_.node_score(static_cast<std::size_t>(node.row), x)) ? node.right : node.left;
    }
    return static_cast<std::size_t>(nodes_[static_cast<std::size_t>(at)].leaf);
  }

  Vector predict(const VectorRef& x) const {
    return source_.leaves.row(static_cast<Eigen::Index>(route(x))).transpose();
  }

 private:
  // Emits the subtree rooted at (depth, j) and returns its position.
  int build(int depth, std::size_t j, const PruneReport& report) {
    if (depth == source_.height) {
      nodes_.push_back(Node{-1, static_cast<int>(j), -1, -1});
      return static_cast<int>(nodes_.size()) - 1;
    }
    const std::size_t left = 2 * j;
    const std::size_t right = 2 * j + 1;
    const std::size_t left_count = child_visits(depth + 1, left, report);
    const std::size_t right_count = child_visits(depth + 1, right, report);
    if (left_count == 0 && right_count > 0) return build(depth + 1, right, report);
    if (right_count == 0 && left_count > 0) return build(depth + 1, left, report);
    const int self = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{static_cast<int>(node_row(depth, j)), -1, -1, -1});
    const int l = build(depth + 1, left, report);
    const int r = build(depth + 1, right, report);
    nodes_[static_cast<std::size_t>(self)].left = l;
    nodes_[static_cast<std::size_t>(self)].right = r;
    return self;
  }

  std::size_t child_visits(int depth, std::size_t j, const PruneReport& report) const {
    return depth == source_.height ? report.leaf_visits[j] : report.internal_visits[node_row(depth, j)];
  }

  ObliqueTree source_;
  std::vector<Node> nodes_;
};

struct PruneResult {
  PrunedTree tree;
  PruneReport report;
};

// Counts node visits over `data` (one row per example) and splices out every
// internal node whose child subtree receives nothing.
inline PruneResult prune_unreached(const ObliqueTree& tree, const RowMatrix& data) {
  if (data.rows() == 0) throw PreconditionError("pruning requires at least one example");
  if (data.cols() != tree.input_dim) throw ShapeError("pruning data has wrong feature count");
  PruneReport report;
  report.internal_visits.assign(num_internal(tree.height), 0);
  report.leaf_visits.assign(num_leaves(tree.height), 0);
  for (Eigen::Index n = 0; n < data.rows(); ++n) {
    const Vector x = data.row(n).transpose();
    std::size_t j = 0;
    for (int i = 0; i < tree.height; ++i) {
      const std::size_t row = node_row(i, j);
      ++report.internal_visits[row];
      j = 2 * j + static_cast<std::size_t>(step(tree.node_score(row, x)));
    }
    ++report.leaf_visits[j];
  }
  for (std::size_t c : report.internal_visits) report.reachable_internal += c > 0 ? 1 : 0;
  for (std::size_t c : report.leaf_visits) report.reachable_leaves += c > 0 ? 1 : 0;
  PruneResult result{PrunedTree(tree, report), std::move(report)};
  result.report.kept_internal = result.tree.decision_nodes();
  return result;
}

inline PruneResult prune_unreached(const TreeParams& params, const RowMatrix& data) {
  return prune_unreached(collapse(params), data);
}

}  // namespace dgt
