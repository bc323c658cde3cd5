#pragma once

#include <Eigen/Core>

#include <vector>

#include "relpose/core.hpp"
#include "relpose/matching.hpp"

namespace relpose {

/// Joint correspondence selection and rigid fitting between two keypoint sets.
///
/// r_sm alternates spectral matching (leading eigenvector of the affinity
/// built from the current pose) with reweighted fitting on a_c =
/// x_c * sum_c' w(c,c') x_c'. The other modes are ablations: sm runs one
/// spectral pass and one weighted fit, r skips the spectral step and runs
/// IRLS from uniform weights, nr is a single unweighted closed-form fit.
///
/// Failures are reported through MatchResult::status, never thrown; invalid
/// inputs still throw InvalidArgument.
MatchResult solve(const KeypointSet& q1, const KeypointSet& q2,
                  const ConsistencyParams& gamma, const SolverConfig& config);

/// sum_{c != c'} w(c,c') x_c x_c' (delta - r(c) - r(c')), unclamped.
double objective_value(const std::vector<double>& indicator, const RigidTransform& transform,
                       const CandidateSet& cands, const KeypointSet& q1,
                       const KeypointSet& q2, const ConsistencyParams& gamma, double delta);

/// Same, from a precomputed weight matrix and residual vector.
double objective_value(const Eigen::VectorXd& indicator, const Eigen::MatrixXd& weights,
                       const std::vector<double>& residuals, double delta);

}  // namespace relpose
