#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "relpose/core.hpp"

namespace relpose {

enum class RotationSampling { full, yaw };

/// Parameters of one synthetic scan pair.
struct GenSpec {
  std::size_t source_points = 100;
  std::size_t target_points = 100;
  /// Surface samples in the scene; views draw from this pool.
  std::size_t scene_points = 400;
  Vec3 room_size{6.0, 5.0, 3.0};
  int clutter_boxes = 3;
  /// Square, clutter-free room whose points and descriptors repeat under
  /// 90 degree turns about the vertical axis.
  bool symmetric_room = false;
  /// Minimum distance between scene samples, meters.
  double min_spacing = 0.15;

  std::size_t descriptor_length = kDefaultDescriptorLength;
  /// Expected norm of the descriptor noise (base vectors have unit norm).
  double descriptor_noise = 0.05;
  double position_noise = 0.0;  // meters
  double normal_noise = 0.0;    // radians

  /// Fraction of target keypoints replaced by random clutter.
  double outlier_rate = 0.0;
  /// Outliers copy the descriptor of a random source keypoint, so each one
  /// yields a descriptor-plausible but geometrically wrong candidate.
  bool decoy_descriptors = true;

  /// Requested shared fraction of min(|source|, |target|) before outliers.
  double overlap_target = 1.0;
  double overlap_radius = 0.05;

  RotationSampling rotation = RotationSampling::full;
  double yaw_max_deg = 180.0;
  double t_max = 2.0;  // meters

  void validate() const;
};

/// Deterministic per (spec, seed).
ScenarioPair generate(const GenSpec& spec, std::uint64_t seed);

/// Overlap bin label: "[0.5,1]", "[0.1,0.5)" or "[0,0.1)".
std::string overlap_bin(double overlap_ratio);

struct ManifestEntry {
  std::string path;  // relative to the manifest directory
  std::string bin;
};

/// Writes one pair file per (spec, seed) plus manifest.json in `out_dir`.
std::vector<ManifestEntry> generate_corpus(const std::vector<GenSpec>& grid,
                                           const std::vector<std::uint64_t>& seeds,
                                           const std::filesystem::path& out_dir);

}  // namespace relpose
