#pragma once

#include <cstdint>

#include "relpose/core.hpp"
#include "relpose/random.hpp"

namespace relpose {

KeypointSet apply(const RigidTransform& transform, const KeypointSet& set);

/// Applies `b` first, then `a`.
RigidTransform compose(const RigidTransform& a, const RigidTransform& b);
RigidTransform invert(const RigidTransform& t);

/// Geodesic angle between two rotations, in degrees within [0, 180].
double rotation_error(const Mat3& estimate, const Mat3& truth);

/// ||t - t* + (R - R*) c|| where c is the source barycenter.
double translation_error(const RigidTransform& estimate, const RigidTransform& truth,
                         const Vec3& source_barycenter);

/// Fraction of source points whose ground-truth image lies within `radius`
/// of some target point, over min(|source|, |target|).
double overlap_ratio(const KeypointSet& source, const KeypointSet& target,
                     const RigidTransform& ground_truth, double radius);

Vec3 barycenter(const KeypointSet& set);

/// Haar-uniform rotation, deterministic per seed.
Mat3 random_rotation(std::uint64_t seed);
Mat3 random_rotation(Rng& rng);

Mat3 axis_angle(const Vec3& axis, double angle_rad);

}  // namespace relpose
