#pragma once

#include <vector>

#include <Eigen/Core>

namespace spectriples {

/// Finite-difference weights for the `order`-th derivative at `x0` from the
/// given abscissae (Fornberg's recursion).
inline Eigen::VectorXd fd_weights(double x0, const Eigen::VectorXd& x, int order) {
  const Eigen::Index n = x.size();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, order + 1);
  double c1 = 1.0;
  double c4 = x(0) - x0;
  c(0, 0) = 1.0;
  for (Eigen::Index i = 1; i < n; ++i) {
    const Eigen::Index mn = std::min<Eigen::Index>(i, order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x(i) - x0;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double c3 = x(i) - x(j);
      c2 *= c3;
      if (j == i - 1) {
        for (Eigen::Index k = mn; k >= 1; --k)
          c(i, k) = c1 * (double(k) * c(i - 1, k - 1) - c5 * c(i - 1, k)) / c2;
        c(i, 0) = -c1 * c5 * c(i - 1, 0) / c2;
      }
      for (Eigen::Index k = mn; k >= 1; --k) c(j, k) = (c4 * c(j, k) - double(k) * c(j, k - 1)) / c3;
      c(j, 0) = c4 * c(j, 0) / c3;
    }
    c1 = c2;
  }
  return c.col(order);
}

}  // namespace spectriples
