#include "relpose/tuner.hpp"

#include <cmath>
#include <numeric>

#include "relpose/solver.hpp"

namespace relpose {
namespace {

std::vector<double> exp_all(const std::vector<double>& theta) {
  std::vector<double> out(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) out[i] = std::exp(theta[i]);
  return out;
}

std::vector<double> log_all(const std::vector<double>& x) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0)) throw InvalidArgument("tuned parameters must be strictly positive");
    out[i] = std::log(x[i]);
  }
  return out;
}

ConsistencyParams gamma_from(const std::vector<double>& v) {
  return ConsistencyParams::from_array({v[0], v[1], v[2], v[3], v[4]});
}

std::vector<double> to_vector(const ConsistencyParams& g) {
  const auto a = g.as_array();
  return {a.begin(), a.end()};
}

}  // namespace

double pose_loss(const MatchResult& result, const RigidTransform& truth) {
  const RigidTransform estimate = result.ok() ? result.transform : RigidTransform::identity();
  return (estimate.matrix() - truth.matrix()).squaredNorm();
}

double training_loss(const TrainingSet& train, const ConsistencyParams& gamma,
                     const SolverConfig& config) {
  if (train.empty()) throw InvalidArgument("training set must be non-empty");
  double sum = 0.0;
  for (const ScenarioPair& pair : train) {
    sum += pose_loss(solve(pair.source, pair.target, gamma, config), pair.ground_truth);
  }
  return sum / static_cast<double>(train.size());
}

std::vector<double> log_space_gradient(const PositiveObjective& loss,
                                       const std::vector<double>& params, double step) {
  if (!(step > 0.0)) throw InvalidArgument("finite-difference step must be positive");
  const std::vector<double> theta = log_all(params);
  std::vector<double> grad(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    std::vector<double> up = theta;
    std::vector<double> down = theta;
    up[i] += step;
    down[i] -= step;
    grad[i] = (loss(exp_all(up)) - loss(exp_all(down))) / (2.0 * step);
  }
  return grad;
}

DescentReport minimize_positive(const PositiveObjective& loss, std::vector<double> initial,
                                const DescentOptions& options) {
  if (options.max_iters < 0) throw InvalidArgument("max_iters must be non-negative");
  std::vector<double> theta = log_all(initial);
  DescentReport report;
  double current = loss(initial);
  if (!std::isfinite(current)) throw TuneError("loss is not finite at the initial point");
  report.initial_loss = current;
  report.loss_history.push_back(current);

  for (int it = 0; it < options.max_iters; ++it) {
    if (current <= options.loss_floor) break;
    const std::vector<double> grad = log_space_gradient(loss, exp_all(theta), options.fd_step);
    const double g2 = std::inner_product(grad.begin(), grad.end(), grad.begin(), 0.0);
    if (!(g2 > 0.0) || !std::isfinite(g2)) break;

    double step = options.initial_step;
    bool accepted = false;
    std::vector<double> trial(theta.size());
    double trial_loss = current;
    for (int s = 0; s <= options.max_shrinks; ++s, step *= options.shrink) {
      for (std::size_t i = 0; i < theta.size(); ++i) trial[i] = theta[i] - step * grad[i];
      trial_loss = loss(exp_all(trial));
      if (std::isfinite(trial_loss) && trial_loss <= current - options.armijo_c * step * g2) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      report.line_search_failed = true;
      break;
    }
    const double previous = current;
    theta = trial;
    current = trial_loss;
    report.iterations = it + 1;
    report.loss_history.push_back(current);
    if (previous - current < options.rel_tol * previous) break;
  }
  report.params = exp_all(theta);
  report.final_loss = current;
  return report;
}

TuneResult tune(const TrainingSet& train, const ConsistencyParams& initial_gamma,
                const SolverConfig& config, double fd_step, int max_iters) {
  initial_gamma.validate();
  SolverConfig single = config;
  single.per_iter_gammas.reset();
  single.validate();
  DescentOptions options;
  options.fd_step = fd_step;
  options.max_iters = max_iters;
  const PositiveObjective objective = [&](const std::vector<double>& v) {
    return training_loss(train, gamma_from(v), single);
  };
  TuneResult out;
  out.report = minimize_positive(objective, to_vector(initial_gamma), options);
  out.gamma = gamma_from(out.report.params);
  return out;
}

LayerwiseResult tune_layerwise(const TrainingSet& train, const ConsistencyParams& gamma,
                               const SolverConfig& config, double fd_step, int max_iters) {
  gamma.validate();
  config.validate();
  LayerwiseResult out;
  out.gammas.assign(static_cast<std::size_t>(config.outer_iters), gamma);
  SolverConfig single = config;
  single.per_iter_gammas.reset();
  out.base_loss = training_loss(train, gamma, single);
  out.final_loss = out.base_loss;

  DescentOptions options;
  options.fd_step = fd_step;
  options.max_iters = max_iters;
  for (std::size_t t = 0; t < out.gammas.size(); ++t) {
    const PositiveObjective objective = [&](const std::vector<double>& v) {
      SolverConfig layered = config;
      layered.per_iter_gammas = out.gammas;
      (*layered.per_iter_gammas)[t] = gamma_from(v);
      return training_loss(train, gamma, layered);
    };
    DescentReport report = minimize_positive(objective, to_vector(out.gammas[t]), options);
    out.gammas[t] = gamma_from(report.params);
    out.final_loss = report.final_loss;
    out.layers.push_back(std::move(report));
  }
  return out;
}

}  // namespace relpose
