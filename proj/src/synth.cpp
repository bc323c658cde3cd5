#include "relpose/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "relpose/geometry.hpp"
#include "relpose/io.hpp"
#include "relpose/random.hpp"

namespace relpose {
namespace {

struct Patch {
  Vec3 origin;
  Vec3 u;
  Vec3 v;
  Vec3 normal;
  double area() const { return u.cross(v).norm(); }
};

struct Box {
  Vec3 lo;
  Vec3 hi;
  bool strictly_contains(const Vec3& p) const {
    constexpr double kEps = 1e-9;
    return (p.array() > lo.array() + kEps).all() && (p.array() < hi.array() - kEps).all();
  }
  bool covers_footprint(const Vec3& p) const {
    return p.x() > lo.x() && p.x() < hi.x() && p.y() > lo.y() && p.y() < hi.y();
  }
};

struct ScenePoint {
  Vec3 position;
  Vec3 normal;
  std::size_t orbit = 0;  // points in one orbit share a descriptor
};

struct Scene {
  std::vector<ScenePoint> points;
  std::vector<Box> boxes;
  Vec3 lo;
  Vec3 hi;
};

std::vector<Patch> room_patches(const Vec3& size) {
  const double hx = size.x() / 2.0;
  const double hy = size.y() / 2.0;
  const double h = size.z();
  return {
      {{-hx, -hy, 0}, {size.x(), 0, 0}, {0, size.y(), 0}, {0, 0, 1}},
      {{-hx, -hy, 0}, {0, size.y(), 0}, {0, 0, h}, {1, 0, 0}},
      {{hx, -hy, 0}, {0, size.y(), 0}, {0, 0, h}, {-1, 0, 0}},
      {{-hx, -hy, 0}, {size.x(), 0, 0}, {0, 0, h}, {0, 1, 0}},
      {{-hx, hy, 0}, {size.x(), 0, 0}, {0, 0, h}, {0, -1, 0}},
  };
}

std::vector<Patch> box_patches(const Box& b) {
  const Vec3 d = b.hi - b.lo;
  const Vec3 ex(d.x(), 0, 0);
  const Vec3 ey(0, d.y(), 0);
  const Vec3 ez(0, 0, d.z());
  return {
      {{b.lo.x(), b.lo.y(), b.hi.z()}, ex, ey, {0, 0, 1}},
      {b.lo, ey, ez, {-1, 0, 0}},
      {{b.hi.x(), b.lo.y(), b.lo.z()}, ey, ez, {1, 0, 0}},
      {b.lo, ex, ez, {0, -1, 0}},
      {{b.lo.x(), b.hi.y(), b.lo.z()}, ex, ez, {0, 1, 0}},
  };
}

Vec3 gaussian3(Rng& rng) { return {rng.normal(), rng.normal(), rng.normal()}; }

Vec3 random_unit(Rng& rng) {
  Vec3 g = gaussian3(rng);
  while (g.norm() < 1e-12) g = gaussian3(rng);
  return g.normalized();
}

Scene build_scene(const GenSpec& spec, Rng& rng) {
  Scene scene;
  Vec3 size = spec.room_size;
  if (spec.symmetric_room) size.y() = size.x();
  scene.lo = Vec3(-size.x() / 2.0, -size.y() / 2.0, 0.0);
  scene.hi = Vec3(size.x() / 2.0, size.y() / 2.0, size.z());

  std::vector<Patch> patches = room_patches(size);
  if (!spec.symmetric_room) {
    for (int i = 0; i < spec.clutter_boxes; ++i) {
      const Vec3 extent(rng.uniform(0.4, 1.2), rng.uniform(0.4, 1.2), rng.uniform(0.3, 1.0));
      const double cx = rng.uniform(scene.lo.x() + extent.x() / 2 + 0.2,
                                    scene.hi.x() - extent.x() / 2 - 0.2);
      const double cy = rng.uniform(scene.lo.y() + extent.y() / 2 + 0.2,
                                    scene.hi.y() - extent.y() / 2 - 0.2);
      Box b{{cx - extent.x() / 2, cy - extent.y() / 2, 0.0},
            {cx + extent.x() / 2, cy + extent.y() / 2, extent.z()}};
      scene.boxes.push_back(b);
      for (const Patch& p : box_patches(b)) patches.push_back(p);
    }
  }

  std::vector<double> cumulative;
  double total = 0.0;
  for (const Patch& p : patches) {
    total += p.area();
    cumulative.push_back(total);
  }

  const double min_d2 = spec.min_spacing * spec.min_spacing;
  auto far_enough = [&](const Vec3& q) {
    return std::none_of(scene.points.begin(), scene.points.end(), [&](const ScenePoint& s) {
      return (s.position - q).squaredNorm() < min_d2;
    });
  };
  auto hidden = [&](const Vec3& q, std::size_t patch) {
    for (const Box& b : scene.boxes) {
      if (b.strictly_contains(q)) return true;
      if (patch == 0 && b.covers_footprint(q)) return true;  // floor under a box
    }
    return false;
  };

  const std::size_t max_attempts = 200 * spec.scene_points + 1000;
  std::size_t orbit = 0;
  for (std::size_t attempt = 0; attempt < max_attempts && scene.points.size() < spec.scene_points;
       ++attempt) {
    const double pick = rng.uniform() * total;
    const std::size_t k = static_cast<std::size_t>(
        std::upper_bound(cumulative.begin(), cumulative.end(), pick) - cumulative.begin());
    const Patch& patch = patches[std::min(k, patches.size() - 1)];
    const Vec3 q = patch.origin + rng.uniform() * patch.u + rng.uniform() * patch.v;
    if (hidden(q, k)) continue;

    if (spec.symmetric_room) {
      std::vector<ScenePoint> ring;
      for (int turn = 0; turn < 4; ++turn) {
        const Mat3 rz = axis_angle(Vec3::UnitZ(), turn * std::numbers::pi / 2.0);
        ring.push_back({rz * q, rz * patch.normal, orbit});
      }
      bool ok = true;
      for (std::size_t i = 0; i < ring.size() && ok; ++i) {
        ok = far_enough(ring[i].position);
        for (std::size_t j = 0; j < i && ok; ++j) {
          ok = (ring[i].position - ring[j].position).squaredNorm() >= min_d2;
        }
      }
      if (!ok) continue;
      for (const ScenePoint& s : ring) scene.points.push_back(s);
    } else {
      if (!far_enough(q)) continue;
      scene.points.push_back({q, patch.normal, orbit});
    }
    ++orbit;
  }
  if (scene.points.size() < spec.scene_points) {
    throw InvalidArgument("scene too dense: could not place " + std::to_string(spec.scene_points) +
                          " points at min_spacing " + std::to_string(spec.min_spacing));
  }
  scene.points.resize(spec.scene_points);
  return scene;
}

Descriptor orbit_descriptor(std::uint64_t seed, std::size_t orbit, std::size_t length) {
  Rng rng(mix_seed(mix_seed(seed) ^ mix_seed(0xd1b54a32d192ed03ULL + orbit)));
  Descriptor d(static_cast<Eigen::Index>(length));
  for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = rng.normal();
  return d.normalized();
}

Descriptor noisy(const Descriptor& base, double noise, Rng& rng) {
  if (noise == 0.0) return base;
  const double sigma = noise / std::sqrt(static_cast<double>(base.size()));
  Descriptor d = base;
  for (Eigen::Index i = 0; i < d.size(); ++i) d(i) += sigma * rng.normal();
  return d;
}

// Isotropic Gaussian truncated at four standard deviations.
Vec3 position_noise(double sigma, Rng& rng) {
  if (sigma == 0.0) return Vec3::Zero();
  for (;;) {
    const Vec3 g = sigma * gaussian3(rng);
    if (g.norm() <= 4.0 * sigma) return g;
  }
}

Vec3 perturb_normal(const Vec3& n, double sigma, Rng& rng) {
  if (sigma == 0.0) return n;
  for (;;) {
    Vec3 g = sigma * gaussian3(rng);
    g -= g.dot(n) * n;
    const double angle = g.norm();
    if (angle > 4.0 * sigma || angle < 1e-15) continue;
    return (std::cos(angle) * n + std::sin(angle) * (g / angle)).normalized();
  }
}

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.index(i)]);
  }
}

}  // namespace

void GenSpec::validate() const {
  if (source_points < 4 || target_points < 4) {
    throw InvalidArgument("source_points and target_points must be at least 4");
  }
  if (!(outlier_rate >= 0.0 && outlier_rate <= 1.0)) {
    throw InvalidArgument("outlier_rate must lie in [0, 1]");
  }
  if (!(overlap_target >= 0.0 && overlap_target <= 1.0)) {
    throw InvalidArgument("overlap_target must lie in [0, 1]");
  }
  if (!(descriptor_noise >= 0.0) || !(position_noise >= 0.0) || !(normal_noise >= 0.0)) {
    throw InvalidArgument("noise levels must be non-negative");
  }
  if (descriptor_length == 0) throw InvalidArgument("descriptor_length must be positive");
  if (!(overlap_radius > 0.0)) throw InvalidArgument("overlap_radius must be positive");
  if (!(min_spacing >= 0.0)) throw InvalidArgument("min_spacing must be non-negative");
  if (!(t_max >= 0.0)) throw InvalidArgument("t_max must be non-negative");
  if ((room_size.array() <= 0.0).any()) throw InvalidArgument("room_size must be positive");
  if (clutter_boxes < 0) throw InvalidArgument("clutter_boxes must be non-negative");
}

std::string overlap_bin(double overlap_ratio) {
  if (overlap_ratio >= 0.5) return "[0.5,1]";
  if (overlap_ratio >= 0.1) return "[0.1,0.5)";
  return "[0,0.1)";
}

ScenarioPair generate(const GenSpec& spec, std::uint64_t seed) {
  spec.validate();
  const std::size_t n_s = spec.source_points;
  const std::size_t n_t = spec.target_points;
  const auto shared = static_cast<std::size_t>(
      std::llround(spec.overlap_target * static_cast<double>(std::min(n_s, n_t))));
  const std::size_t needed = n_s + n_t - shared;
  if (needed > spec.scene_points) {
    throw InvalidArgument("infeasible overlap: source_points + target_points - shared = " +
                          std::to_string(needed) + " exceeds scene_points = " +
                          std::to_string(spec.scene_points));
  }

  Rng rng(mix_seed(seed));
  const Scene scene = build_scene(spec, rng);

  std::vector<std::size_t> perm(scene.points.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  shuffle(perm, rng);

  // Scene indices of each view; the first `shared` entries are common.
  std::vector<std::size_t> source_ids(perm.begin(), perm.begin() + static_cast<long>(n_s));
  std::vector<std::size_t> target_ids(perm.begin(), perm.begin() + static_cast<long>(shared));
  target_ids.insert(target_ids.end(), perm.begin() + static_cast<long>(n_s),
                    perm.begin() + static_cast<long>(needed));
  shuffle(source_ids, rng);
  shuffle(target_ids, rng);

  std::vector<bool> in_source(scene.points.size(), false);
  std::vector<std::size_t> source_slot(scene.points.size(), 0);
  for (std::size_t i = 0; i < n_s; ++i) {
    in_source[source_ids[i]] = true;
    source_slot[source_ids[i]] = i;
  }

  // Target-only slots are replaced by outliers before shared ones.
  const auto n_out = static_cast<std::size_t>(
      std::llround(spec.outlier_rate * static_cast<double>(n_t)));
  std::vector<std::size_t> replace_order;
  for (std::size_t j = 0; j < n_t; ++j) {
    if (!in_source[target_ids[j]]) replace_order.push_back(j);
  }
  for (std::size_t j = 0; j < n_t; ++j) {
    if (in_source[target_ids[j]]) replace_order.push_back(j);
  }
  std::vector<bool> is_outlier(n_t, false);
  for (std::size_t k = 0; k < n_out; ++k) is_outlier[replace_order[k]] = true;

  Mat3 rotation;
  if (spec.rotation == RotationSampling::full) {
    rotation = random_rotation(rng);
  } else {
    const double yaw = rng.uniform(-spec.yaw_max_deg, spec.yaw_max_deg) * std::numbers::pi / 180.0;
    rotation = axis_angle(Vec3::UnitZ(), yaw);
  }
  const Vec3 translation = spec.t_max * std::cbrt(rng.uniform()) * random_unit(rng);
  const RigidTransform truth = RigidTransform::orthonormalized(rotation, translation);

  const std::size_t k = spec.descriptor_length;
  std::vector<Keypoint> source_pts;
  source_pts.reserve(n_s);
  for (std::size_t id : source_ids) {
    const ScenePoint& s = scene.points[id];
    source_pts.push_back(
        {s.position, s.normal, noisy(orbit_descriptor(seed, s.orbit, k), spec.descriptor_noise, rng)});
  }

  const double clearance = 2.0 * spec.overlap_radius + 4.0 * spec.position_noise;
  std::vector<Keypoint> target_pts;
  target_pts.reserve(n_t);
  std::vector<Candidate> inliers;
  for (std::size_t j = 0; j < n_t; ++j) {
    if (is_outlier[j]) {
      Vec3 q;
      for (int attempt = 0; attempt < 1000; ++attempt) {
        q = Vec3(rng.uniform(scene.lo.x(), scene.hi.x()), rng.uniform(scene.lo.y(), scene.hi.y()),
                 rng.uniform(scene.lo.z(), scene.hi.z()));
        const bool clear = std::none_of(
            scene.points.begin(), scene.points.end(),
            [&](const ScenePoint& s) { return (s.position - q).norm() < clearance; });
        if (clear) break;
      }
      Descriptor base;
      if (spec.decoy_descriptors) {
        base = source_pts[rng.index(n_s)].descriptor;
      } else {
        base = Descriptor(static_cast<Eigen::Index>(k));
        for (Eigen::Index i = 0; i < base.size(); ++i) base(i) = rng.normal();
        base.normalize();
      }
      const Vec3 normal = random_unit(rng);
      target_pts.push_back(
          {truth(q), truth.rotate(normal), noisy(base, spec.descriptor_noise, rng)});
      continue;
    }
    const ScenePoint& s = scene.points[target_ids[j]];
    const Vec3 p = truth(s.position) + position_noise(spec.position_noise, rng);
    const Vec3 n = perturb_normal(truth.rotate(s.normal), spec.normal_noise, rng);
    target_pts.push_back({p, n, noisy(orbit_descriptor(seed, s.orbit, k), spec.descriptor_noise, rng)});
    if (in_source[target_ids[j]]) inliers.push_back({source_slot[target_ids[j]], j});
  }
  std::sort(inliers.begin(), inliers.end());

  ScenarioPair pair;
  pair.source = KeypointSet("source-" + std::to_string(seed), std::move(source_pts), k);
  pair.target = KeypointSet("target-" + std::to_string(seed), std::move(target_pts), k);
  pair.ground_truth = truth;
  pair.inlier_map = std::move(inliers);
  pair.overlap_ratio =
      static_cast<double>(pair.inlier_map.size()) / static_cast<double>(std::min(n_s, n_t));
  pair.seed = seed;
  pair.overlap_radius = spec.overlap_radius;
  return pair;
}

std::vector<ManifestEntry> generate_corpus(const std::vector<GenSpec>& grid,
                                           const std::vector<std::uint64_t>& seeds,
                                           const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError(out_dir.string() + ": " + ec.message());

  std::vector<ManifestEntry> manifest;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    for (std::uint64_t seed : seeds) {
      const ScenarioPair pair = generate(grid[g], seed);
      char name[64];
      std::snprintf(name, sizeof name, "pair_%03zu_%llu.json", g,
                    static_cast<unsigned long long>(seed));
      write_json_file(out_dir / name, scenario_to_json(pair, &grid[g]));
      manifest.push_back({name, overlap_bin(pair.overlap_ratio)});
    }
  }
  write_json_file(out_dir / "manifest.json", manifest_to_json(manifest));
  return manifest;
}

}  // namespace relpose
