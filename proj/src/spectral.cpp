#include "relpose/spectral.hpp"

#include <cmath>

#include "relpose/core.hpp"
#include "relpose/matching.hpp"

namespace relpose {

EigenPair max_eigenvector(const Eigen::MatrixXd& a, int max_iters, double tol) {
  const Eigen::Index n = a.rows();
  if (n < 1 || a.cols() != n) throw InvalidArgument("max_eigenvector needs a square matrix");
  if (max_iters < 1) throw InvalidArgument("max_iters must be at least 1");
  if ((a.array() < 0.0).any()) throw InvalidArgument("affinity matrix must be non-negative");

  EigenPair out;
  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  if (a.isZero(0.0)) {
    out.vector = std::move(x);
    out.degenerate = true;
    return out;
  }

  out.low_confidence = true;
  Eigen::VectorXd y(n);
  for (int it = 0; it < max_iters; ++it) {
    y.noalias() = a * x;
    const double norm = y.norm();
    if (norm == 0.0) break;
    y /= norm;
    const double step = (y - x).norm();
    x.swap(y);
    out.iterations = it + 1;
    if (step < tol) {
      out.low_confidence = false;
      break;
    }
  }
  out.eigenvalue = x.dot(a * x);
  out.vector = std::move(x);
  return out;
}

EigenPair max_eigenvector(const AffinityMatrix& a, int max_iters, double tol) {
  return max_eigenvector(a.values, max_iters, tol);
}

}  // namespace relpose
