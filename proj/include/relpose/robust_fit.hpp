#pragma once

#include <stdexcept>
#include <vector>

#include "relpose/core.hpp"
#include "relpose/matching.hpp"

namespace relpose {

/// The weighted point+normal problem has no unique rigid minimizer.
class DegenerateFit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Minimizes sum_c w_c (||R p1 + t - p2||^2 + ||R n1 - n2||^2) in closed form.
/// Throws DegenerateFit with fewer than three positively weighted candidates or
/// when the weighted cross-covariance has rank <= 1.
RigidTransform closed_form_fit(const CandidateSet& cands, const std::vector<double>& weights,
                               const KeypointSet& q1, const KeypointSet& q2);

/// sum_c w_c r_c for the given transform.
double weighted_objective(const CandidateSet& cands, const std::vector<double>& weights,
                          const RigidTransform& transform, const KeypointSet& q1,
                          const KeypointSet& q2);

/// 1 / (epsilon^2 + r)^(2 - alpha).
double irls_weight(double residual, double alpha, double epsilon);

struct IrlsResult {
  RigidTransform transform;
  /// Robust weights after the last round, already multiplied by the prior.
  std::vector<double> weights;
  /// Transform after each round.
  std::vector<RigidTransform> trace;
};

/// Reweighted least squares starting from w = prior. Each round fits in closed
/// form, then sets w_c = prior_c * irls_weight(r_c).
IrlsResult irls_fit(const CandidateSet& cands, const std::vector<double>& prior,
                    const KeypointSet& q1, const KeypointSet& q2, double alpha,
                    double epsilon, int iters);

}  // namespace relpose
