#include "relpose/solver.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "relpose/robust_fit.hpp"
#include "relpose/spectral.hpp"

namespace relpose {
namespace {

const ConsistencyParams& gamma_for_round(const ConsistencyParams& base,
                                         const SolverConfig& config, int round) {
  if (config.per_iter_gammas) return (*config.per_iter_gammas)[static_cast<std::size_t>(round)];
  return base;
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd unit_or_uniform(const std::vector<double>& w) {
  Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
  const double norm = v.norm();
  if (norm > 0.0 && std::isfinite(norm)) return v / norm;
  return Eigen::VectorXd::Constant(v.size(), 1.0 / std::sqrt(static_cast<double>(v.size())));
}

// a_c = x_c * sum_{c'} w(c,c') x_c'
std::vector<double> spectral_weights(const Eigen::VectorXd& x, const Eigen::MatrixXd& w) {
  const Eigen::VectorXd support = w * x;
  std::vector<double> a(static_cast<std::size_t>(x.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) a[i] = std::max(0.0, x(i) * support(i));
  return a;
}

// Caches the pair-weight matrix across rounds that share a gamma.
class WeightCache {
 public:
  WeightCache(const CandidateSet& cands, const KeypointSet& q1, const KeypointSet& q2)
      : cands_(cands), q1_(q1), q2_(q2) {}

  const Eigen::MatrixXd& get(const ConsistencyParams& gamma) {
    if (!gamma_ || !(*gamma_ == gamma)) {
      weights_ = pair_weight_matrix(cands_, q1_, q2_, gamma);
      gamma_ = gamma;
    }
    return weights_;
  }

 private:
  const CandidateSet& cands_;
  const KeypointSet& q1_;
  const KeypointSet& q2_;
  std::optional<ConsistencyParams> gamma_;
  Eigen::MatrixXd weights_;
};

}  // namespace

double objective_value(const Eigen::VectorXd& indicator, const Eigen::MatrixXd& weights,
                       const std::vector<double>& residuals, double delta) {
  const Eigen::Index n = indicator.size();
  if (weights.rows() != n || weights.cols() != n || static_cast<Eigen::Index>(residuals.size()) != n) {
    throw InvalidArgument("objective_value: mismatched sizes");
  }
  // sum_{i != j} W_ij x_i x_j (delta - r_i - r_j), using the symmetry of W.
  const Eigen::Map<const Eigen::VectorXd> r(residuals.data(), n);
  const Eigen::VectorXd wx =
      weights * indicator - weights.diagonal().cwiseProduct(indicator);
  return delta * indicator.dot(wx) - 2.0 * indicator.cwiseProduct(r).dot(wx);
}

double objective_value(const std::vector<double>& indicator, const RigidTransform& transform,
                       const CandidateSet& cands, const KeypointSet& q1,
                       const KeypointSet& q2, const ConsistencyParams& gamma, double delta) {
  if (indicator.size() != cands.size()) {
    throw InvalidArgument("objective_value: indicator size differs from candidate count");
  }
  const Eigen::VectorXd x =
      Eigen::Map<const Eigen::VectorXd>(indicator.data(), static_cast<Eigen::Index>(indicator.size()));
  return objective_value(x, pair_weight_matrix(cands, q1, q2, gamma),
                         residuals(cands, transform, q1, q2), delta);
}

MatchResult solve(const KeypointSet& q1, const KeypointSet& q2,
                  const ConsistencyParams& gamma, const SolverConfig& config) {
  gamma.validate();
  config.validate();
  if (q1.empty() || q2.empty()) throw InvalidArgument("solve: keypoint sets must be non-empty");

  MatchResult out;
  const ConsistencyParams& prune_gamma = gamma_for_round(gamma, config, 0);
  const CandidateSet cands = build_candidates(q1, q2, prune_gamma.gamma1,
                                              config.prune_threshold, config.max_candidates);
  out.pruning = cands.stats;
  out.candidates = cands.candidates;
  if (cands.empty()) {
    out.status = SolveStatus::unmatchable;
    out.message = "no candidate survived descriptor pruning (" +
                  std::to_string(cands.stats.pairs_considered) + " pairs considered)";
    return out;
  }

  const std::size_t n = cands.size();
  WeightCache cache(cands, q1, q2);
  Eigen::VectorXd x;

  try {
    switch (config.mode) {
      case Mode::nr: {
        const std::vector<double> ones(n, 1.0);
        out.transform = closed_form_fit(cands, ones, q1, q2);
        x = unit_or_uniform(ones);
        out.objective_trace.push_back(objective_value(
            x, cache.get(prune_gamma), residuals(cands, out.transform, q1, q2), config.delta));
        break;
      }
      case Mode::r: {
        const std::vector<double> ones(n, 1.0);
        const IrlsResult fit =
            irls_fit(cands, ones, q1, q2, config.alpha, config.epsilon, config.irls_iters);
        out.transform = fit.transform;
        x = unit_or_uniform(fit.weights);
        out.objective_trace.push_back(objective_value(
            x, cache.get(prune_gamma), residuals(cands, out.transform, q1, q2), config.delta));
        break;
      }
      case Mode::sm: {
        const Eigen::MatrixXd& w = cache.get(prune_gamma);
        const AffinityMatrix a = affinity_from_weights(w, std::vector<double>(n, 0.0), config.delta);
        const EigenPair eig = max_eigenvector(a, config.power_iters, config.power_tol);
        out.low_confidence = eig.low_confidence;
        x = eig.vector;
        out.transform = closed_form_fit(cands, spectral_weights(x, w), q1, q2);
        out.objective_trace.push_back(objective_value(
            x, w, residuals(cands, out.transform, q1, q2), config.delta));
        break;
      }
      case Mode::r_sm: {
        std::optional<RigidTransform> pose;
        for (int t = 0; t < config.outer_iters; ++t) {
          const Eigen::MatrixXd& w = cache.get(gamma_for_round(gamma, config, t));
          const std::vector<double> r =
              pose ? residuals(cands, *pose, q1, q2) : std::vector<double>(n, 0.0);
          const AffinityMatrix a = affinity_from_weights(w, r, config.delta);
          const EigenPair eig = max_eigenvector(a, config.power_iters, config.power_tol);
          out.low_confidence = out.low_confidence || eig.low_confidence;
          x = eig.vector;
          const IrlsResult fit = irls_fit(cands, spectral_weights(x, w), q1, q2, config.alpha,
                                          config.epsilon, config.irls_iters);
          pose = fit.transform;
          out.objective_trace.push_back(
              objective_value(x, w, residuals(cands, *pose, q1, q2), config.delta));
        }
        out.transform = *pose;
        break;
      }
    }
  } catch (const DegenerateFit& e) {
    out.status = SolveStatus::degenerate;
    out.message = e.what();
    out.transform = RigidTransform::identity();
    out.indicator.clear();
    return out;
  }

  out.indicator = to_std(x);
  const double top = x.size() > 0 ? x.maxCoeff() : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (top > 0.0 && out.indicator[i] >= config.report_fraction * top) {
      out.selected.push_back(cands[i]);
    }
  }
  return out;
}

}  // namespace relpose
