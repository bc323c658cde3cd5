#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "relpose/core.hpp"

namespace relpose {

using TrainingSet = std::vector<ScenarioPair>;

class TuneError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// ||[R | t] - [R* | t*]||_F^2. Failed solves are scored as the identity pose.
double pose_loss(const MatchResult& result, const RigidTransform& truth);

/// Mean pose_loss of `solve` over the training pairs.
double training_loss(const TrainingSet& train, const ConsistencyParams& gamma,
                     const SolverConfig& config);

struct DescentOptions {
  double fd_step = 1e-2;  // central difference step in log-space
  int max_iters = 30;
  double initial_step = 1.0;
  double shrink = 0.5;
  double armijo_c = 1e-4;
  int max_shrinks = 20;
  double rel_tol = 1e-4;
  /// Losses at or below this are treated as already optimal.
  double loss_floor = 1e-12;
};

struct DescentReport {
  std::vector<double> params;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  /// Loss after every accepted step, starting with the initial loss.
  std::vector<double> loss_history;
  int iterations = 0;
  bool line_search_failed = false;
};

using PositiveObjective = std::function<double(const std::vector<double>&)>;

/// Central-difference gradient of `loss(exp(theta))` with respect to theta.
std::vector<double> log_space_gradient(const PositiveObjective& loss,
                                       const std::vector<double>& params, double step);

/// Gradient descent on strictly positive parameters, parameterized by their
/// logarithms, with Armijo backtracking. The returned loss never exceeds the
/// initial loss.
DescentReport minimize_positive(const PositiveObjective& loss, std::vector<double> initial,
                                const DescentOptions& options = {});

struct TuneResult {
  ConsistencyParams gamma;
  DescentReport report;
};

TuneResult tune(const TrainingSet& train, const ConsistencyParams& initial_gamma,
                const SolverConfig& config, double fd_step = 1e-2, int max_iters = 30);

struct LayerwiseResult {
  std::vector<ConsistencyParams> gammas;
  double base_loss = 0.0;
  double final_loss = 0.0;
  std::vector<DescentReport> layers;
};

/// Tunes one gamma per outer iteration, in order, each layer starting from
/// `gamma` with earlier layers frozen.
LayerwiseResult tune_layerwise(const TrainingSet& train, const ConsistencyParams& gamma,
                               const SolverConfig& config, double fd_step = 1e-2,
                               int max_iters = 20);

}  // namespace relpose
