#pragma once

#include <Eigen/Dense>

namespace stochcat {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using VecRef = Eigen::Ref<const Eigen::VectorXd>;
using MatRef = Eigen::Ref<const Eigen::MatrixXd>;

/// Concatenate two vectors, `head` first.
inline Vec concat(const VecRef& head, const VecRef& tail) {
  Vec out(head.size() + tail.size());
  out << head, tail;
  return out;
}

}  // namespace stochcat
