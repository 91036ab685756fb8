#include "admitune/autotune.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "admitune/errors.hpp"
#include "admitune/so3.hpp"

namespace admitune::autotune {

ParamVector ParamVector::pack(const GainSet& gains, const SpringParams& springs) {
  ParamVector p;
  p.values << gains.mass, gains.damping, gains.force_gain, springs.linear, springs.angular;
  return p;
}

bool KinematicBounds::contains(const Vec3& p) const {
  return (p.array() >= lower.array()).all() && (p.array() <= upper.array()).all() && p.norm() <= reach_radius;
}

void TunerConfig::validate() const {
  auto symmetric_psd = [](const auto& m) {
    if (!m.allFinite() || !m.isApprox(m.transpose(), 1e-12)) return false;
    Eigen::SelfAdjointEigenSolver<std::decay_t<decltype(m)>> eig(m);
    return eig.info() == Eigen::Success && eig.eigenvalues().minCoeff() >= -1e-12;
  };
  if (!symmetric_psd(process_cov)) throw std::invalid_argument("process covariance must be symmetric PSD");
  if (!symmetric_psd(observation_cov)) throw std::invalid_argument("observation covariance must be symmetric PSD");
  if (!(slip_cost > 0.0) || !(kinematic_cost > 0.0)) throw std::invalid_argument("violation costs must be positive");
  if (!(friction.lambda > 0.0)) throw std::invalid_argument("friction coefficient must be positive");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (window < 1) throw std::invalid_argument("window must be at least 1");
}

Wrench spring_model_wrench(const SpringParams& springs, const Vec3& p, const Vec3& dp, const Vec3& dtheta) {
  const Vec3 f = springs.linear.cwiseProduct(dp);
  return {f, p.cross(f) + springs.angular.cwiseProduct(dtheta)};
}

namespace {

Wrench to_full(const Vec3& tip, const Wrench& patch) { return fingertip_wrench(tip, patch.force, patch.torque); }

Wrench to_patch(const Vec3& tip, const Wrench& full) { return {full.force, full.torque - tip.cross(full.force)}; }

}  // namespace

Propagation propagate_model(const Wrench& previous, const ControlState& state, const Vec3& tip_position,
                            const ParamVector& theta, const Reference& reference, const Wrench& mismatch,
                            const TunerConfig& config) {
  const ControllerStep step = step_controller(state, reference, previous, theta.gains(config.stiffness), config.dt,
                                              config.accel_limit, config.axes);
  const Vec3 dp = step.state.pose.position - state.pose.position;
  const Vec3 dtheta = so3::orientation_error(state.pose.orientation, step.state.pose.orientation);

  Propagation out;
  out.state = step.state;
  out.saturated = step.saturated;
  out.tip_position = tip_position + dp;
  const Wrench dyn = spring_model_wrench(theta.springs(), out.tip_position, -dp, -dtheta);
  out.predicted = to_patch(out.tip_position, to_full(tip_position, previous) + dyn - mismatch);
  return out;
}

Wrench process_noise(const Wrench& predicted, const Wrench& measured) { return predicted - measured; }

Wrench measured_process_noise(const TuningSample& previous, const TuningSample& current,
                              const SpringParams& springs) {
  const Vec3 dp = current.state.pose.position - previous.state.pose.position;
  const Vec3 dtheta = so3::orientation_error(previous.state.pose.orientation, current.state.pose.orientation);
  const Wrench predicted = to_full(previous.tip_position, previous.measured) +
                           spring_model_wrench(springs, current.tip_position, -dp, -dtheta);
  return process_noise(predicted, to_full(current.tip_position, current.measured));
}

double force_objective(const FrictionModel& friction, double f_z, double tau_z, double slip_cost) {
  constexpr double kMinMargin = 1e-9;
  const double margin = std::abs(friction.lambda * f_z) - std::abs(tau_z);
  if (!within_slip_limit(friction, f_z, tau_z) || margin < kMinMargin) return slip_cost;
  return std::min(1.0 / margin, slip_cost);
}

ObjectiveVector evaluate_objectives(const ParamVector& theta, std::span<const TuningSample> window,
                                    const TunerConfig& config) {
  if (window.size() < 2) throw std::invalid_argument("evaluate_objectives: window needs at least two samples");
  const TuningSample& first = window.front();
  const TuningSample& last = window.back();

  Wrench predicted = first.measured;
  ControlState state = first.state;
  Vec3 tip = first.tip_position;
  bool infeasible = false;
  try {
    for (std::size_t j = 0; j + 1 < window.size(); ++j) {
      const Propagation prop = propagate_model(predicted, state, tip, theta, window[j].reference,
                                               window[j + 1].model_mismatch, config);
      predicted = prop.predicted;
      state = prop.state;
      tip = prop.tip_position;
      if (!config.bounds.contains(tip) || !predicted.vec().allFinite()) infeasible = true;
      if (config.saturation_infeasible && prop.saturated) infeasible = true;
    }
  } catch (const GimbalLockError&) {
    infeasible = true;
  }

  // Spring fit over the realized displacement of the window.
  const Vec3 dp = last.state.pose.position - first.state.pose.position;
  const Vec3 dtheta = so3::orientation_error(first.state.pose.orientation, last.state.pose.orientation);
  const Wrench spring = to_patch(last.tip_position, to_full(first.tip_position, first.measured) +
                                                        spring_model_wrench(theta.springs(), last.tip_position,
                                                                            -dp, -dtheta));

  ObjectiveVector h;
  h.values.segment<6>(0) = predicted.vec();
  h.values.segment<6>(6) = spring.vec();
  h.values[12] = force_objective(config.friction, predicted.force.z(), predicted.torque.z(), config.slip_cost);
  h.values[13] = infeasible ? config.kinematic_cost : 0.0;
  if (infeasible) {
    // Keep the reference block finite so the update stays well defined.
    for (int i = 0; i < 6; ++i) {
      if (!std::isfinite(h.values[i])) h.values[i] = config.kinematic_cost;
    }
  }
  return h;
}

ObjectiveVector desired_objectives(std::span<const TuningSample> window) {
  const TuningSample& last = window.back();
  ObjectiveVector y;
  y.values.segment<6>(0) = last.reference.wrench.vec();
  y.values.segment<6>(6) = last.measured.vec();
  return y;
}

ObjectiveVector tuner_step(TunerState& state, const TunerConfig& config) {
  const auto needed = static_cast<std::size_t>(config.window) + 1;
  if (state.history.size() < needed) throw std::invalid_argument("tuner_step: not enough history");
  const std::vector<TuningSample> window(state.history.end() - static_cast<std::ptrdiff_t>(needed),
                                         state.history.end());

  const ukf::SigmaSet sigma =
      ukf::generate_sigma_points(state.theta.values, state.covariance, config.unscented, config.param_floor);

  std::vector<Eigen::VectorXd> outputs;
  outputs.reserve(sigma.points.size());
  for (const auto& point : sigma.points) {
    ParamVector theta;
    theta.values = point;
    outputs.emplace_back(evaluate_objectives(theta, window, config).values);
  }

  const ObjectiveVector desired = desired_objectives(window);
  const ukf::UpdateResult result = ukf::kalman_update(sigma, outputs, desired.values, config.process_cov,
                                                      config.observation_cov, config.param_floor);
  state.theta.values = result.mean;
  state.covariance = result.covariance;

  ObjectiveVector center;
  center.values = outputs.front();
  return center;
}

AutoTuner::AutoTuner(TunerConfig config, const ParamVector& initial, const ParamCov& initial_cov)
    : config_(std::move(config)), initial_cov_(initial_cov) {
  config_.validate();
  state_.theta = initial;
  state_.theta.values = state_.theta.values.cwiseMax(config_.param_floor);
  state_.covariance = initial_cov;
}

TunerOutput AutoTuner::step(TuningSample sample) {
  if (!state_.history.empty()) {
    sample.model_mismatch = measured_process_noise(state_.history.back(), sample, state_.theta.springs());
  }
  state_.history.push_back(std::move(sample));
  while (state_.history.size() > static_cast<std::size_t>(config_.window) + 1) state_.history.pop_front();

  TunerOutput out;
  if (state_.history.size() == static_cast<std::size_t>(config_.window) + 1) {
    try {
      out.objectives = tuner_step(state_, config_);
      out.updated = true;
    } catch (const CovarianceFactorizationError&) {
      state_.covariance = initial_cov_;
      out.reset = true;
    } catch (const SingularInnovationError&) {
      // Skip this period; the estimate is left as it was.
    }
  }
  out.gains = gains();
  out.springs = state_.theta.springs();
  return out;
}

}  // namespace admitune::autotune
