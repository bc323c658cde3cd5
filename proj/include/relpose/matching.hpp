#pragma once

#include <Eigen/Core>

#include <array>
#include <filesystem>
#include <optional>
#include <vector>

#include "relpose/core.hpp"

namespace relpose {

/// Candidate correspondences that survived descriptor pruning, in a fixed
/// deterministic order, with their cached descriptor distances.
struct CandidateSet {
  std::vector<Candidate> candidates;
  std::vector<double> descriptor_distance;
  PruningStats stats;

  std::size_t size() const { return candidates.size(); }
  bool empty() const { return candidates.empty(); }
  const Candidate& operator[](std::size_t i) const { return candidates[i]; }
};

/// Keeps pairs with exp(-d^2 / (2 gamma1^2)) > prune_threshold. When more
/// than `max_candidates` pass, the ones with the smallest descriptor distance
/// win, ties broken by (source_index, target_index). An empty result means the
/// instance is unmatchable; `stats` says why.
CandidateSet build_candidates(const KeypointSet& q1, const KeypointSet& q2, double gamma1,
                              double prune_threshold, std::size_t max_candidates);

/// Wraps an explicit candidate list (e.g. ground-truth pairs) with its
/// descriptor distances.
CandidateSet make_candidate_set(const KeypointSet& q1, const KeypointSet& q2,
                                std::vector<Candidate> candidates);

using Deltas = std::array<double, 5>;

/// Descriptor, edge-length and three angle discrepancies between c and c'.
Deltas consistency_deltas(const Candidate& c, const Candidate& c_prime,
                          const KeypointSet& q1, const KeypointSet& q2);

/// exp(-1/2 sum (delta_i / gamma_i)^2).
double pair_weight(const Deltas& deltas, const ConsistencyParams& gamma);

/// ||R p1 + t - p2||^2 + ||R n1 - n2||^2.
double residual(const Candidate& c, const RigidTransform& transform, const KeypointSet& q1,
                const KeypointSet& q2);

std::vector<double> residuals(const CandidateSet& cands, const RigidTransform& transform,
                              const KeypointSet& q1, const KeypointSet& q2);

/// Symmetric matrix of w_gamma(c, c') with a zero diagonal.
Eigen::MatrixXd pair_weight_matrix(const CandidateSet& cands, const KeypointSet& q1,
                                   const KeypointSet& q2, const ConsistencyParams& gamma);

struct AffinityMatrix {
  Eigen::MatrixXd values;
  /// Fewer than two candidates: no pairwise evidence exists.
  bool degenerate = false;

  Eigen::Index size() const { return values.rows(); }
};

/// a_cc' = max(0, w(c,c') (delta - r(c) - r(c'))) off the diagonal, 0 on it.
AffinityMatrix affinity_from_weights(const Eigen::MatrixXd& weights,
                                     const std::vector<double>& residuals, double delta);

/// Residuals are taken as zero when no transform is given.
AffinityMatrix build_affinity(const CandidateSet& cands, const KeypointSet& q1,
                              const KeypointSet& q2, const ConsistencyParams& gamma,
                              double delta,
                              const std::optional<RigidTransform>& transform = std::nullopt);

/// Binary dump: little-endian uint64 dimension n, then n*n row-major doubles.
void write_affinity(const std::filesystem::path& path, const AffinityMatrix& a);
AffinityMatrix read_affinity(const std::filesystem::path& path);

}  // namespace relpose
