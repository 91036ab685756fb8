#include "admitune/admittance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "admitune/errors.hpp"

namespace admitune {

void GainSet::validate() const {
  for (int i = 0; i < 6; ++i) {
    if (!(mass[i] > 0.0) || !std::isfinite(mass[i])) throw std::invalid_argument("gain M_d must be positive");
    if (!(damping[i] >= 0.0) || !(stiffness[i] >= 0.0) || !(force_gain[i] >= 0.0)) {
      throw std::invalid_argument("gains D_d, K_d, K_f must be non-negative");
    }
  }
}

GainSet GainSet::uniform(double mass, double damping, double stiffness, double force_gain) {
  return {Vec6::Constant(mass), Vec6::Constant(damping), Vec6::Constant(stiffness), Vec6::Constant(force_gain)};
}

Vec6 compute_acceleration(const ControlState& state, const Reference& ref, const Wrench& measured,
                          const GainSet& gains) {
  Vec6 displacement;
  displacement.head<3>() = state.pose.position - ref.pose.position;
  displacement.tail<3>() = -so3::orientation_error(state.pose.orientation, ref.pose.orientation);

  const Vec6 wrench_error = measured.vec() - ref.wrench.vec();
  const Vec6 rhs = -gains.damping.cwiseProduct(state.velocity) - gains.stiffness.cwiseProduct(displacement) +
                   gains.force_gain.cwiseProduct(wrench_error);
  return rhs.cwiseQuotient(gains.mass);
}

Vec6 clamp_acceleration(const Vec6& acc, const AccelerationLimit& limit) {
  Vec6 out;
  for (int i = 0; i < 6; ++i) {
    const double cap = i < 3 ? limit.linear : limit.angular;
    out[i] = std::clamp(acc[i], -cap, cap);
  }
  return out;
}

ControllerStep step_controller(const ControlState& state, const Reference& ref, const Wrench& measured,
                               const GainSet& gains, double dt, const AccelerationLimit& limit,
                               const AxisMask& axes) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_controller: dt must be positive");
  const Vec6 raw = compute_acceleration(state, ref, measured, gains);
  Vec6 acc = clamp_acceleration(raw, limit);
  Vec6 velocity = state.velocity;
  bool saturated = false;
  for (int i = 0; i < 6; ++i) {
    if (!axes[i]) {
      acc[i] = 0.0;
      velocity[i] = 0.0;
    } else if (acc[i] != raw[i]) {
      saturated = true;
    }
  }
  const so3::PoseStep next = so3::integrate_pose(state.pose, velocity, acc, dt);
  ControllerStep out;
  out.state = {next.pose, next.velocity};
  out.command = next.pose;
  out.acceleration = acc;
  out.saturated = saturated;
  return out;
}

AdmittanceController::AdmittanceController(ControlState initial, GainSet gains, AccelerationLimit limit,
                                           AxisMask axes)
    : state_(std::move(initial)), gains_(std::move(gains)), limit_(limit), axes_(axes) {
  gains_.validate();
}

void AdmittanceController::set_gains(const GainSet& gains) {
  gains.validate();
  gains_ = gains;
}

const Pose& AdmittanceController::step(const Reference& ref, const Wrench& measured, double dt) {
  try {
    state_ = step_controller(state_, ref, measured, gains_, dt, limit_, axes_).state;
    held_ = false;
  } catch (const GimbalLockError&) {
    // Hold the pose, drop the angular rate that drove it into the singularity.
    state_.velocity.tail<3>().setZero();
    held_ = true;
  }
  return state_.pose;
}

GraspSetpoint grasp_decompose(double f1_ref, double f2_ref) {
  const double grasp = 0.5 * (std::abs(f1_ref) + std::abs(f2_ref));
  return {grasp, f1_ref - grasp};
}

double measured_grasp(double f1, double f2) { return 0.5 * (std::abs(f1) + std::abs(f2)); }

double measured_offset(double f_z_wrist) { return 0.5 * f_z_wrist; }

double channel_acceleration(const ScalarChannel& ch, double measured, double reference, const GainSet& gains,
                            double position_ref) {
  constexpr int z = 2;
  return (-gains.damping[z] * ch.velocity - gains.stiffness[z] * (ch.position - position_ref) +
          gains.force_gain[z] * (measured - reference)) /
         gains.mass[z];
}

namespace {

double advance(ScalarChannel& ch, double acc, double dt) {
  const double before = ch.position;
  ch.position += ch.velocity * dt + 0.5 * acc * dt * dt;
  ch.velocity += acc * dt;
  return ch.position - before;
}

}  // namespace

GraspCommand step_grasp_controller(GraspState& state, const GraspSetpoint& setpoint, double f1_meas,
                                   double f2_meas, double f_z_wrist, const GainSet& gains, double dt,
                                   const AccelerationLimit& limit) {
  return step_grasp_controller(state, setpoint, f1_meas, f2_meas, f_z_wrist, gains, gains, dt, limit);
}

GraspCommand step_grasp_controller(GraspState& state, const GraspSetpoint& setpoint, double f1_meas,
                                   double f2_meas, double f_z_wrist, const GainSet& grasp_gains,
                                   const GainSet& offset_gains, double dt, const AccelerationLimit& limit) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_grasp_controller: dt must be positive");
  const double a_grasp =
      std::clamp(channel_acceleration(state.grasp, measured_grasp(f1_meas, f2_meas), setpoint.grasp, grasp_gains),
                 -limit.linear, limit.linear);
  const double a_offset =
      std::clamp(channel_acceleration(state.offset, measured_offset(f_z_wrist), setpoint.offset, offset_gains),
                 -limit.linear, limit.linear);
  const double dg = advance(state.grasp, a_grasp, dt);
  const double doff = advance(state.offset, a_offset, dt);
  return {dg + doff, -dg + doff};
}

}  // namespace admitune
