#pragma once

#include <Eigen/Dense>

namespace dgt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using VectorRef = Eigen::Ref<const Vector>;

// [x; 1]
inline Vector with_bias(const VectorRef& x) {
  Vector out(x.size() + 1);
  out.head(x.size()) = x;
  out(x.size()) = 1.0;
  return out;
}

}  // namespace dgt
