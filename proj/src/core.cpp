#include "relpose/core.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace relpose {

KeypointSet::KeypointSet(std::string id, std::vector<Keypoint> points,
                         std::optional<std::size_t> descriptor_length)
    : id_(std::move(id)), points_(std::move(points)) {
  if (descriptor_length) {
    if (*descriptor_length == 0) {
      throw InvalidArgument("descriptor length must be positive");
    }
    descriptor_length_ = *descriptor_length;
  } else if (!points_.empty()) {
    descriptor_length_ = static_cast<std::size_t>(points_.front().descriptor.size());
    if (descriptor_length_ == 0) {
      throw InvalidArgument("descriptor length must be positive");
    }
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const Keypoint& kp = points_[i];
    if (static_cast<std::size_t>(kp.descriptor.size()) != descriptor_length_) {
      throw InvalidArgument("keypoint " + std::to_string(i) + " of set '" + id_ +
                            "' has descriptor length " +
                            std::to_string(kp.descriptor.size()) + ", expected " +
                            std::to_string(descriptor_length_));
    }
    if (!kp.position.allFinite() || !kp.descriptor.allFinite()) {
      throw InvalidArgument("keypoint " + std::to_string(i) + " of set '" + id_ +
                            "' is not finite");
    }
    if (std::abs(kp.normal.norm() - 1.0) > 1e-6) {
      throw InvalidArgument("keypoint " + std::to_string(i) + " of set '" + id_ +
                            "' has a non-unit normal");
    }
  }
}

bool RigidTransform::is_rotation(const Mat3& m, double tol) {
  if (!m.allFinite()) return false;
  const double ortho = (m.transpose() * m - Mat3::Identity()).norm();
  return ortho <= tol && std::abs(m.determinant() - 1.0) <= tol;
}

RigidTransform::RigidTransform(const Mat3& rotation, const Vec3& translation)
    : rotation_(rotation), translation_(translation) {
  if (!is_rotation(rotation_)) {
    throw InvalidArgument("rotation matrix is not orthonormal with det +1");
  }
  if (!translation_.allFinite()) {
    throw InvalidArgument("translation is not finite");
  }
}

RigidTransform RigidTransform::orthonormalized(const Mat3& approx_rotation,
                                               const Vec3& translation) {
  Eigen::JacobiSVD<Mat3> svd(approx_rotation,
                             Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 s = Mat3::Identity();
  s(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0 ? -1.0 : 1.0;
  return {svd.matrixU() * s * svd.matrixV().transpose(), translation};
}

Eigen::Matrix<double, 3, 4> RigidTransform::matrix() const {
  Eigen::Matrix<double, 3, 4> m;
  m.leftCols<3>() = rotation_;
  m.col(3) = translation_;
  return m;
}

ConsistencyParams ConsistencyParams::from_array(const std::array<double, 5>& a) {
  return {a[0], a[1], a[2], a[3], a[4]};
}

void ConsistencyParams::validate() const {
  for (double g : as_array()) {
    if (!(g > 0.0) || !std::isfinite(g)) {
      throw InvalidArgument("consistency parameters must be finite and positive");
    }
  }
}

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::nr: return "nr";
    case Mode::r: return "r";
    case Mode::sm: return "sm";
    case Mode::r_sm: return "r_sm";
  }
  return "?";
}

Mode mode_from_string(const std::string& name) {
  if (name == "nr") return Mode::nr;
  if (name == "r") return Mode::r;
  if (name == "sm") return Mode::sm;
  if (name == "r_sm" || name == "r+sm") return Mode::r_sm;
  throw InvalidArgument("unknown mode '" + name + "' (expected nr, r, sm, r_sm)");
}

bool uses_spectral(Mode mode) { return mode == Mode::sm || mode == Mode::r_sm; }

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::ok: return "ok";
    case SolveStatus::unmatchable: return "unmatchable";
    case SolveStatus::degenerate: return "degenerate";
  }
  return "?";
}

void SolverConfig::validate() const {
  if (!(delta > 0.0)) throw InvalidArgument("delta must be positive");
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (!(alpha > 0.0 && alpha <= 2.0)) throw InvalidArgument("alpha must lie in (0, 2]");
  if (!(prune_threshold > 0.0 && prune_threshold < 1.0)) {
    throw InvalidArgument("prune_threshold must lie in (0, 1)");
  }
  if (outer_iters < 1 || irls_iters < 1 || power_iters < 1) {
    throw InvalidArgument("iteration counts must be at least 1");
  }
  if (max_candidates < 1) throw InvalidArgument("max_candidates must be at least 1");
  if (!(power_tol >= 0.0)) throw InvalidArgument("power_tol must be non-negative");
  if (!(report_fraction >= 0.0 && report_fraction <= 1.0)) {
    throw InvalidArgument("report_fraction must lie in [0, 1]");
  }
  if (per_iter_gammas) {
    if (per_iter_gammas->size() != static_cast<std::size_t>(outer_iters)) {
      throw InvalidArgument("per_iter_gammas must have exactly outer_iters entries");
    }
    for (const auto& g : *per_iter_gammas) g.validate();
  }
}

}  // namespace relpose
