#include "relpose/matching.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numeric>

namespace relpose {
namespace {

// Unsigned angle between two vectors; atan2 form of the clamped acos.
double angle_between(const Vec3& a, const Vec3& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

constexpr double kZeroSegment = 1e-12;

// exp(-x / 2) is exactly zero in double precision past this point.
constexpr double kUnderflowExponent = 1500.0;

// Pair tables cost 32 bytes per entry; beyond this the direct path is used.
constexpr std::size_t kMaxTableEntries = std::size_t{1} << 22;

struct Endpoint {
  Vec3 p1, n1, p2, n2;
};

Endpoint endpoint(const Candidate& c, const KeypointSet& q1, const KeypointSet& q2) {
  return {q1[c.source_index].position, q1[c.source_index].normal,
          q2[c.target_index].position, q2[c.target_index].normal};
}

// Delta_2..Delta_5 for a pair of candidate endpoints.
std::array<double, 4> geometric_deltas(const Endpoint& a, const Endpoint& b) {
  const Vec3 e1 = b.p1 - a.p1;
  const Vec3 e2 = b.p2 - a.p2;
  const double len1 = e1.norm();
  const double len2 = e2.norm();
  std::array<double, 4> d{};
  d[0] = len1 - len2;
  d[1] = angle_between(a.n1, b.n1) - angle_between(a.n2, b.n2);
  if (len1 > kZeroSegment && len2 > kZeroSegment) {
    d[2] = angle_between(a.n1, e1) - angle_between(a.n2, e2);
    d[3] = angle_between(b.n1, e1) - angle_between(b.n2, e2);
  }
  return d;
}

void check_candidate(const Candidate& c, const KeypointSet& q1, const KeypointSet& q2) {
  if (c.source_index >= q1.size() || c.target_index >= q2.size()) {
    throw InvalidArgument("candidate index out of range");
  }
}

}  // namespace

CandidateSet build_candidates(const KeypointSet& q1, const KeypointSet& q2, double gamma1,
                              double prune_threshold, std::size_t max_candidates) {
  if (q1.empty() || q2.empty()) throw InvalidArgument("keypoint sets must be non-empty");
  if (!(gamma1 > 0.0)) throw InvalidArgument("gamma1 must be positive");
  if (!(prune_threshold > 0.0 && prune_threshold < 1.0)) {
    throw InvalidArgument("prune_threshold must lie in (0, 1)");
  }
  if (q1.descriptor_length() != q2.descriptor_length()) {
    throw InvalidArgument("keypoint sets have different descriptor lengths");
  }

  struct Scored {
    double dist;
    Candidate c;
  };
  std::vector<Scored> kept;
  const double two_g2 = 2.0 * gamma1 * gamma1;
  for (std::size_t i = 0; i < q1.size(); ++i) {
    for (std::size_t j = 0; j < q2.size(); ++j) {
      const double d2 = (q1[i].descriptor - q2[j].descriptor).squaredNorm();
      if (std::exp(-d2 / two_g2) > prune_threshold) {
        kept.push_back({std::sqrt(d2), {i, j}});
      }
    }
  }

  CandidateSet out;
  out.stats.pairs_considered = q1.size() * q2.size();
  out.stats.pairs_passing_threshold = kept.size();
  if (kept.size() > max_candidates) {
    std::stable_sort(kept.begin(), kept.end(), [](const Scored& a, const Scored& b) {
      return a.dist < b.dist;
    });
    kept.resize(max_candidates);
    std::sort(kept.begin(), kept.end(),
              [](const Scored& a, const Scored& b) { return a.c < b.c; });
  }
  out.stats.pairs_kept = kept.size();
  out.candidates.reserve(kept.size());
  out.descriptor_distance.reserve(kept.size());
  for (const Scored& s : kept) {
    out.candidates.push_back(s.c);
    out.descriptor_distance.push_back(s.dist);
  }
  return out;
}

CandidateSet make_candidate_set(const KeypointSet& q1, const KeypointSet& q2,
                                std::vector<Candidate> candidates) {
  CandidateSet out;
  out.candidates = std::move(candidates);
  out.descriptor_distance.reserve(out.candidates.size());
  for (const Candidate& c : out.candidates) {
    check_candidate(c, q1, q2);
    out.descriptor_distance.push_back(
        (q1[c.source_index].descriptor - q2[c.target_index].descriptor).norm());
  }
  out.stats.pairs_considered = out.candidates.size();
  out.stats.pairs_passing_threshold = out.candidates.size();
  out.stats.pairs_kept = out.candidates.size();
  return out;
}

Deltas consistency_deltas(const Candidate& c, const Candidate& c_prime,
                          const KeypointSet& q1, const KeypointSet& q2) {
  check_candidate(c, q1, q2);
  check_candidate(c_prime, q1, q2);
  const double d_c = (q1[c.source_index].descriptor - q2[c.target_index].descriptor).squaredNorm();
  const double d_cp =
      (q1[c_prime.source_index].descriptor - q2[c_prime.target_index].descriptor).squaredNorm();
  const auto g = geometric_deltas(endpoint(c, q1, q2), endpoint(c_prime, q1, q2));
  return {std::sqrt(d_c + d_cp), g[0], g[1], g[2], g[3]};
}

double pair_weight(const Deltas& deltas, const ConsistencyParams& gamma) {
  const auto g = gamma.as_array();
  double sum = 0.0;
  for (std::size_t i = 0; i < 5; ++i) {
    const double z = deltas[i] / g[i];
    sum += z * z;
  }
  return std::exp(-0.5 * sum);
}

double residual(const Candidate& c, const RigidTransform& transform, const KeypointSet& q1,
                const KeypointSet& q2) {
  check_candidate(c, q1, q2);
  const Keypoint& a = q1[c.source_index];
  const Keypoint& b = q2[c.target_index];
  return (transform(a.position) - b.position).squaredNorm() +
         (transform.rotate(a.normal) - b.normal).squaredNorm();
}

std::vector<double> residuals(const CandidateSet& cands, const RigidTransform& transform,
                              const KeypointSet& q1, const KeypointSet& q2) {
  std::vector<double> out;
  out.reserve(cands.size());
  for (const Candidate& c : cands.candidates) out.push_back(residual(c, transform, q1, q2));
  return out;
}

namespace {

// Geometry of every ordered keypoint pair on one side, restricted to the
// keypoints that occur in some candidate.
class SideTable {
 public:
  SideTable(const KeypointSet& set, const std::vector<std::size_t>& used) : n_(used.size()) {
    len_.resize(n_ * n_);
    normal_angle_.resize(n_ * n_);
    edge_angle_a_.resize(n_ * n_);
    edge_angle_b_.resize(n_ * n_);
    for (std::size_t a = 0; a < n_; ++a) {
      const Keypoint& ka = set[used[a]];
      for (std::size_t b = 0; b < n_; ++b) {
        const Keypoint& kb = set[used[b]];
        const Vec3 e = kb.position - ka.position;
        const std::size_t k = a * n_ + b;
        len_[k] = e.norm();
        normal_angle_[k] = angle_between(ka.normal, kb.normal);
        edge_angle_a_[k] = angle_between(ka.normal, e);
        edge_angle_b_[k] = angle_between(kb.normal, e);
      }
    }
  }

  std::size_t index(std::size_t a, std::size_t b) const { return a * n_ + b; }
  double len(std::size_t k) const { return len_[k]; }
  double normal_angle(std::size_t k) const { return normal_angle_[k]; }
  double edge_angle_a(std::size_t k) const { return edge_angle_a_[k]; }
  double edge_angle_b(std::size_t k) const { return edge_angle_b_[k]; }

 private:
  std::size_t n_;
  std::vector<double> len_, normal_angle_, edge_angle_a_, edge_angle_b_;
};

// Maps each candidate endpoint to its position in the sorted list of used keypoints.
std::vector<std::size_t> compact(std::vector<std::size_t> ids, std::vector<std::size_t>& used) {
  used = ids;
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  for (std::size_t& id : ids) {
    id = static_cast<std::size_t>(std::lower_bound(used.begin(), used.end(), id) - used.begin());
  }
  return ids;
}

}  // namespace

Eigen::MatrixXd pair_weight_matrix(const CandidateSet& cands, const KeypointSet& q1,
                                   const KeypointSet& q2, const ConsistencyParams& gamma) {
  gamma.validate();
  const auto n = static_cast<Eigen::Index>(cands.size());
  std::vector<std::size_t> src, tgt;
  for (const Candidate& c : cands.candidates) {
    check_candidate(c, q1, q2);
    src.push_back(c.source_index);
    tgt.push_back(c.target_index);
  }
  const auto g = gamma.as_array();
  std::array<double, 5> inv2{};
  for (std::size_t i = 0; i < 5; ++i) inv2[i] = 1.0 / (g[i] * g[i]);

  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  std::vector<std::size_t> used1, used2;
  const std::vector<std::size_t> s = compact(std::move(src), used1);
  const std::vector<std::size_t> t = compact(std::move(tgt), used2);
  if (used1.size() * used1.size() + used2.size() * used2.size() > kMaxTableEntries) {
    // Too many keypoints for pair tables; evaluate each candidate pair directly.
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const Deltas d = consistency_deltas(cands[i], cands[j], q1, q2);
        const double value = pair_weight(d, gamma);
        w(i, j) = value;
        w(j, i) = value;
      }
    }
    return w;
  }
  const SideTable side1(q1, used1);
  const SideTable side2(q2, used2);

  for (Eigen::Index i = 0; i < n; ++i) {
    const double di = cands.descriptor_distance[i];
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double dj = cands.descriptor_distance[j];
      const std::size_t k1 = side1.index(s[i], s[j]);
      const std::size_t k2 = side2.index(t[i], t[j]);
      const double len1 = side1.len(k1);
      const double len2 = side2.len(k2);
      const double len_delta = len1 - len2;
      double sum = (di * di + dj * dj) * inv2[0] + len_delta * len_delta * inv2[1];
      if (sum > kUnderflowExponent) continue;
      const double d3 = side1.normal_angle(k1) - side2.normal_angle(k2);
      sum += d3 * d3 * inv2[2];
      if (len1 > kZeroSegment && len2 > kZeroSegment) {
        const double d4 = side1.edge_angle_a(k1) - side2.edge_angle_a(k2);
        const double d5 = side1.edge_angle_b(k1) - side2.edge_angle_b(k2);
        sum += d4 * d4 * inv2[3] + d5 * d5 * inv2[4];
      }
      const double value = std::exp(-0.5 * sum);
      w(i, j) = value;
      w(j, i) = value;
    }
  }
  return w;
}

AffinityMatrix affinity_from_weights(const Eigen::MatrixXd& weights,
                                     const std::vector<double>& residuals, double delta) {
  const Eigen::Index n = weights.rows();
  if (weights.cols() != n || static_cast<Eigen::Index>(residuals.size()) != n) {
    throw InvalidArgument("affinity inputs have mismatched sizes");
  }
  AffinityMatrix a;
  a.values = Eigen::MatrixXd::Zero(n, n);
  a.degenerate = n < 2;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = std::max(0.0, weights(i, j) * (delta - residuals[i] - residuals[j]));
      a.values(i, j) = v;
      a.values(j, i) = v;
    }
  }
  return a;
}

AffinityMatrix build_affinity(const CandidateSet& cands, const KeypointSet& q1,
                              const KeypointSet& q2, const ConsistencyParams& gamma,
                              double delta, const std::optional<RigidTransform>& transform) {
  const std::vector<double> r = transform ? residuals(cands, *transform, q1, q2)
                                          : std::vector<double>(cands.size(), 0.0);
  return affinity_from_weights(pair_weight_matrix(cands, q1, q2, gamma), r, delta);
}

void write_affinity(const std::filesystem::path& path, const AffinityMatrix& a) {
  static_assert(std::endian::native == std::endian::little,
                "affinity dump assumes a little-endian host");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  const auto n = static_cast<std::uint64_t>(a.size());
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    for (Eigen::Index j = 0; j < a.size(); ++j) {
      const double v = a.values(i, j);
      out.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

AffinityMatrix read_affinity(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  AffinityMatrix a;
  a.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    for (Eigen::Index j = 0; j < a.size(); ++j) {
      in.read(reinterpret_cast<char*>(&a.values(i, j)), sizeof(double));
    }
  }
  if (!in) throw std::runtime_error("truncated affinity dump " + path.string());
  a.degenerate = n < 2;
  return a;
}

}  // namespace relpose
