#pragma once

#include <vector>

#include "relpose/core.hpp"
#include "relpose/geometry.hpp"
#include "relpose/random.hpp"

namespace relpose::testing {

inline Vec3 random_unit(Rng& rng) {
  Vec3 v(rng.normal(), rng.normal(), rng.normal());
  return v.normalized();
}

inline KeypointSet random_set(Rng& rng, std::size_t n, std::size_t k = 8,
                              const char* id = "s") {
  std::vector<Keypoint> pts;
  for (std::size_t i = 0; i < n; ++i) {
    Keypoint kp;
    kp.position = Vec3(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-1, 1));
    kp.normal = random_unit(rng);
    kp.descriptor = Descriptor(static_cast<Eigen::Index>(k));
    for (std::size_t d = 0; d < k; ++d) kp.descriptor[static_cast<Eigen::Index>(d)] = rng.normal();
    kp.descriptor.normalize();
    pts.push_back(std::move(kp));
  }
  return KeypointSet(id, std::move(pts));
}

inline RigidTransform random_transform(Rng& rng) {
  return {random_rotation(rng), Vec3(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2))};
}

}  // namespace relpose::testing
