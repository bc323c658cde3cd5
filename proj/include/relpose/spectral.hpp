#pragma once

#include <Eigen/Core>

namespace relpose {

struct AffinityMatrix;

struct EigenPair {
  Eigen::VectorXd vector;
  double eigenvalue = 0.0;
  int iterations = 0;
  /// Zero matrix: the uniform vector is returned with eigenvalue 0.
  bool degenerate = false;
  /// The iteration budget ran out before successive iterates agreed.
  bool low_confidence = false;
};

/// Leading eigenvector of a symmetric non-negative matrix by power iteration
/// from the uniform vector 1/sqrt(n). Stops once successive unit iterates
/// differ by less than `tol`. The result has unit norm and non-negative
/// entries; the eigenvalue is the Rayleigh quotient.
EigenPair max_eigenvector(const Eigen::MatrixXd& a, int max_iters = 100, double tol = 1e-9);
EigenPair max_eigenvector(const AffinityMatrix& a, int max_iters = 100, double tol = 1e-9);

}  // namespace relpose
