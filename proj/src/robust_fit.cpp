#include "relpose/robust_fit.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace relpose {

RigidTransform closed_form_fit(const CandidateSet& cands, const std::vector<double>& weights,
                               const KeypointSet& q1, const KeypointSet& q2) {
  if (weights.size() != cands.size()) {
    throw InvalidArgument("closed_form_fit: one weight per candidate is required");
  }
  double total = 0.0;
  std::size_t positive = 0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw InvalidArgument("closed_form_fit: weights must be finite and non-negative");
    }
    total += w;
    positive += w > 0.0 ? 1 : 0;
  }
  if (positive < 3) {
    throw DegenerateFit("closed_form_fit: fewer than 3 positively weighted candidates");
  }

  Vec3 c1 = Vec3::Zero();
  Vec3 c2 = Vec3::Zero();
  for (std::size_t i = 0; i < cands.size(); ++i) {
    const double w = weights[i] / total;
    c1 += w * q1[cands[i].source_index].position;
    c2 += w * q2[cands[i].target_index].position;
  }

  // Target-by-source cross-covariance, so that R = U diag(1, 1, s) V^T.
  Mat3 m = Mat3::Zero();
  for (std::size_t i = 0; i < cands.size(); ++i) {
    const double w = weights[i] / total;
    if (w == 0.0) continue;
    const Keypoint& a = q1[cands[i].source_index];
    const Keypoint& b = q2[cands[i].target_index];
    m += w * ((b.position - c2) * (a.position - c1).transpose() +
              b.normal * a.normal.transpose());
  }

  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 sv = svd.singularValues();
  if (!(sv(0) > 0.0) || sv(1) <= 1e-12 * sv(0)) {
    throw DegenerateFit("closed_form_fit: cross-covariance has rank <= 1");
  }
  const Mat3& u = svd.matrixU();
  const Mat3& v = svd.matrixV();
  Mat3 s = Mat3::Identity();
  s(2, 2) = (u * v.transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  const Mat3 r = u * s * v.transpose();
  return RigidTransform::orthonormalized(r, c2 - r * c1);
}

double weighted_objective(const CandidateSet& cands, const std::vector<double>& weights,
                          const RigidTransform& transform, const KeypointSet& q1,
                          const KeypointSet& q2) {
  double sum = 0.0;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    sum += weights[i] * residual(cands[i], transform, q1, q2);
  }
  return sum;
}

double irls_weight(double residual, double alpha, double epsilon) {
  return 1.0 / std::pow(epsilon * epsilon + residual, 2.0 - alpha);
}

IrlsResult irls_fit(const CandidateSet& cands, const std::vector<double>& prior,
                    const KeypointSet& q1, const KeypointSet& q2, double alpha,
                    double epsilon, int iters) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw InvalidArgument("alpha must lie in (0, 2]");
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (iters < 1) throw InvalidArgument("irls iteration count must be at least 1");

  IrlsResult out;
  out.weights = prior;
  for (int k = 0; k < iters; ++k) {
    out.transform = closed_form_fit(cands, out.weights, q1, q2);
    out.trace.push_back(out.transform);
    for (std::size_t i = 0; i < cands.size(); ++i) {
      const double r = residual(cands[i], out.transform, q1, q2);
      out.weights[i] = prior[i] * irls_weight(r, alpha, epsilon);
    }
  }
  return out;
}

}  // namespace relpose
