#pragma once

// Reference implementations used to check the library independently.

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "relpose/core.hpp"
#include "relpose/geometry.hpp"
#include "relpose/matching.hpp"

namespace relpose::oracle {

/// Weighted point+normal cost of rotation vector `omega`, with the
/// translation eliminated through the weighted centroids.
inline double rotation_cost(const Vec3& omega, const CandidateSet& cands,
                            const std::vector<double>& w, const KeypointSet& q1,
                            const KeypointSet& q2) {
  const double angle = omega.norm();
  const Mat3 r = angle > 0 ? axis_angle(omega / angle, angle) : Mat3::Identity();
  double total = 0;
  Vec3 c1 = Vec3::Zero(), c2 = Vec3::Zero();
  for (std::size_t i = 0; i < cands.size(); ++i) {
    total += w[i];
    c1 += w[i] * q1[cands[i].source_index].position;
    c2 += w[i] * q2[cands[i].target_index].position;
  }
  c1 /= total;
  c2 /= total;
  const Vec3 t = c2 - r * c1;
  double cost = 0;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    const Keypoint& a = q1[cands[i].source_index];
    const Keypoint& b = q2[cands[i].target_index];
    cost += w[i] * ((r * a.position + t - b.position).squaredNorm() +
                    (r * a.normal - b.normal).squaredNorm());
  }
  return cost;
}

/// Global minimum of the weighted fitting objective by an axis-angle grid
/// over the rotation ball followed by pattern-search refinement of the best
/// few grid points.
inline double brute_force_fit_objective(const CandidateSet& cands, const std::vector<double>& w,
                                        const KeypointSet& q1, const KeypointSet& q2,
                                        int grid = 16) {
  const double pi = std::numbers::pi;
  struct Seed {
    double cost;
    Vec3 omega;
  };
  std::vector<Seed> seeds;
  for (int i = 0; i <= grid; ++i) {
    for (int j = 0; j <= grid; ++j) {
      for (int k = 0; k <= grid; ++k) {
        const Vec3 omega(-pi + 2 * pi * i / grid, -pi + 2 * pi * j / grid,
                         -pi + 2 * pi * k / grid);
        if (omega.norm() > pi) continue;
        seeds.push_back({rotation_cost(omega, cands, w, q1, q2), omega});
      }
    }
  }
  std::partial_sort(seeds.begin(), seeds.begin() + 6, seeds.end(),
                    [](const Seed& a, const Seed& b) { return a.cost < b.cost; });
  double best = seeds.front().cost;
  for (int s = 0; s < 6; ++s) {
    Vec3 omega = seeds[s].omega;
    double cost = seeds[s].cost;
    for (double h = 2 * pi / grid; h > 1e-10; h *= 0.5) {
      bool improved = true;
      while (improved) {
        improved = false;
        for (int axis = 0; axis < 3; ++axis) {
          for (double sign : {-1.0, 1.0}) {
            Vec3 trial = omega;
            trial[axis] += sign * h;
            const double c = rotation_cost(trial, cands, w, q1, q2);
            if (c < cost) {
              cost = c;
              omega = trial;
              improved = true;
            }
          }
        }
      }
    }
    best = std::min(best, cost);
  }
  return best;
}

/// Leading eigenpair from a full symmetric eigendecomposition, with the
/// vector oriented to have a non-negative sum.
inline std::pair<Eigen::VectorXd, double> leading_eigenpair(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  const Eigen::Index last = a.rows() - 1;
  Eigen::VectorXd v = es.eigenvectors().col(last);
  if (v.sum() < 0) v = -v;
  return {v, es.eigenvalues()(last)};
}

/// Angle between two directions, insensitive to sign.
inline double vector_angle(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double c = std::abs(a.normalized().dot(b.normalized()));
  const double s = (a.normalized() - c * b.normalized()).norm();
  return std::atan2(s, c);
}

}  // namespace relpose::oracle
