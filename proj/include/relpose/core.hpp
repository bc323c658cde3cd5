#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace relpose {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Descriptor = Eigen::VectorXd;

inline constexpr std::size_t kDefaultDescriptorLength = 32;

/// Raised when a value violates the invariants of a domain type.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Keypoint {
  Vec3 position = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  Descriptor descriptor;
};

/// An ordered keypoint set whose descriptors all share one length.
class KeypointSet {
 public:
  KeypointSet() = default;
  /// Validates unit normals (1e-6) and a common descriptor length. When
  /// `descriptor_length` is given every descriptor must match it.
  KeypointSet(std::string id, std::vector<Keypoint> points,
              std::optional<std::size_t> descriptor_length = std::nullopt);

  const std::string& id() const { return id_; }
  const std::vector<Keypoint>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  std::size_t descriptor_length() const { return descriptor_length_; }
  const Keypoint& operator[](std::size_t i) const { return points_[i]; }

  auto begin() const { return points_.begin(); }
  auto end() const { return points_.end(); }

 private:
  std::string id_;
  std::vector<Keypoint> points_;
  std::size_t descriptor_length_ = kDefaultDescriptorLength;
};

/// Rigid motion x -> R x + t. The rotation is checked on construction;
/// use `orthonormalized` to project an approximate matrix onto SO(3).
class RigidTransform {
 public:
  static constexpr double kTolerance = 1e-9;

  RigidTransform() = default;
  RigidTransform(const Mat3& rotation, const Vec3& translation);

  static RigidTransform identity() { return {}; }
  static RigidTransform orthonormalized(const Mat3& approx_rotation,
                                        const Vec3& translation);
  static bool is_rotation(const Mat3& m, double tol = kTolerance);

  const Mat3& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }

  Vec3 operator()(const Vec3& p) const { return rotation_ * p + translation_; }
  Vec3 rotate(const Vec3& v) const { return rotation_ * v; }

  /// The 3x4 matrix [R | t].
  Eigen::Matrix<double, 3, 4> matrix() const;

 private:
  Mat3 rotation_ = Mat3::Identity();
  Vec3 translation_ = Vec3::Zero();
};

struct ConsistencyParams {
  double gamma1 = 0.1;   // descriptor distance
  double gamma2 = 0.05;  // edge length, meters
  double gamma3 = 0.2;   // normal-normal angle, radians
  double gamma4 = 0.2;   // normal-edge angle, radians
  double gamma5 = 0.2;   // normal-edge angle, radians

  std::array<double, 5> as_array() const {
    return {gamma1, gamma2, gamma3, gamma4, gamma5};
  }
  static ConsistencyParams from_array(const std::array<double, 5>& a);
  void validate() const;

  friend bool operator==(const ConsistencyParams&,
                         const ConsistencyParams&) = default;
};

enum class Mode { nr, r, sm, r_sm };

std::string to_string(Mode mode);
Mode mode_from_string(const std::string& name);
bool uses_spectral(Mode mode);

struct SolverConfig {
  double delta = 50.0;
  double alpha = 1.0;
  double epsilon = 0.05;
  int outer_iters = 5;
  int irls_iters = 5;
  int power_iters = 100;
  double power_tol = 1e-9;
  double prune_threshold = 1e-2;
  std::size_t max_candidates = 3000;
  double report_fraction = 0.5;
  Mode mode = Mode::r_sm;
  std::optional<std::vector<ConsistencyParams>> per_iter_gammas;

  void validate() const;
};

struct Candidate {
  std::size_t source_index = 0;
  std::size_t target_index = 0;

  friend auto operator<=>(const Candidate&, const Candidate&) = default;
};

enum class SolveStatus { ok, unmatchable, degenerate };

std::string to_string(SolveStatus status);

struct PruningStats {
  std::size_t pairs_considered = 0;
  std::size_t pairs_passing_threshold = 0;
  std::size_t pairs_kept = 0;
};

struct MatchResult {
  SolveStatus status = SolveStatus::ok;
  std::string message;
  RigidTransform transform;
  std::vector<Candidate> candidates;
  /// Relaxed indicator over `candidates`.
  std::vector<double> indicator;
  std::vector<Candidate> selected;
  std::vector<double> objective_trace;
  PruningStats pruning;
  bool low_confidence = false;

  bool ok() const { return status == SolveStatus::ok; }
};

struct ScenarioPair {
  KeypointSet source;
  KeypointSet target;
  /// Maps source coordinates into the target frame.
  RigidTransform ground_truth;
  std::vector<Candidate> inlier_map;
  double overlap_ratio = 0.0;
  std::uint64_t seed = 0;
  double overlap_radius = 0.05;
};

}  // namespace relpose
