#include "relpose/geometry.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace relpose {

KeypointSet apply(const RigidTransform& transform, const KeypointSet& set) {
  std::vector<Keypoint> points;
  points.reserve(set.size());
  for (const Keypoint& kp : set) {
    Keypoint moved = kp;
    moved.position = transform(kp.position);
    moved.normal = transform.rotate(kp.normal);
    points.push_back(std::move(moved));
  }
  return {set.id(), std::move(points), set.descriptor_length()};
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  return {a.rotation() * b.rotation(), a.rotation() * b.translation() + a.translation()};
}

RigidTransform invert(const RigidTransform& t) {
  const Mat3 rt = t.rotation().transpose();
  return {rt, -(rt * t.translation())};
}

double rotation_error(const Mat3& estimate, const Mat3& truth) {
  if (!RigidTransform::is_rotation(estimate, 1e-6) ||
      !RigidTransform::is_rotation(truth, 1e-6)) {
    throw InvalidArgument("rotation_error expects proper rotation matrices");
  }
  // Equivalent to acos(clamp((tr - 1) / 2)); atan2 keeps precision near 0 and 180.
  const Mat3 rel = truth.transpose() * estimate;
  const double cos_part = std::clamp((rel.trace() - 1.0) / 2.0, -1.0, 1.0);
  const Vec3 axis(rel(2, 1) - rel(1, 2), rel(0, 2) - rel(2, 0), rel(1, 0) - rel(0, 1));
  const double sin_part = std::min(axis.norm() / 2.0, 1.0);
  return std::atan2(sin_part, cos_part) * 180.0 / std::numbers::pi;
}

double translation_error(const RigidTransform& estimate, const RigidTransform& truth,
                         const Vec3& source_barycenter) {
  return (estimate.translation() - truth.translation() +
          (estimate.rotation() - truth.rotation()) * source_barycenter)
      .norm();
}

double overlap_ratio(const KeypointSet& source, const KeypointSet& target,
                     const RigidTransform& ground_truth, double radius) {
  if (source.empty() || target.empty()) {
    throw InvalidArgument("overlap_ratio requires non-empty sets");
  }
  if (!(radius > 0.0)) throw InvalidArgument("overlap radius must be positive");
  const double r2 = radius * radius;
  std::size_t covered = 0;
  for (const Keypoint& s : source) {
    const Vec3 image = ground_truth(s.position);
    const bool hit = std::any_of(target.begin(), target.end(), [&](const Keypoint& t) {
      return (t.position - image).squaredNorm() <= r2;
    });
    covered += hit ? 1 : 0;
  }
  const double denom = static_cast<double>(std::min(source.size(), target.size()));
  return std::min(1.0, static_cast<double>(covered) / denom);
}

Vec3 barycenter(const KeypointSet& set) {
  if (set.empty()) throw InvalidArgument("barycenter of an empty set");
  Vec3 sum = Vec3::Zero();
  for (const Keypoint& kp : set) sum += kp.position;
  return sum / static_cast<double>(set.size());
}

Mat3 random_rotation(Rng& rng) {
  // Shoemake's uniform unit quaternion.
  const double u1 = rng.uniform();
  const double u2 = rng.uniform() * 2.0 * std::numbers::pi;
  const double u3 = rng.uniform() * 2.0 * std::numbers::pi;
  const double a = std::sqrt(1.0 - u1);
  const double b = std::sqrt(u1);
  Eigen::Quaterniond q(b * std::cos(u3), a * std::sin(u2), a * std::cos(u2),
                       b * std::sin(u3));
  q.normalize();
  return q.toRotationMatrix();
}

Mat3 random_rotation(std::uint64_t seed) {
  Rng rng(mix_seed(seed));
  return random_rotation(rng);
}

Mat3 axis_angle(const Vec3& axis, double angle_rad) {
  return Eigen::AngleAxisd(angle_rad, axis.normalized()).toRotationMatrix();
}

}  // namespace relpose
