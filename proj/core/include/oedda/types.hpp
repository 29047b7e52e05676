#pragma once

#include <Eigen/Dense>

namespace oedda {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// True when every entry of `m` is finite.
template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
  return m.allFinite();
}

}  // namespace oedda
