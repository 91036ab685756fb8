#pragma once

#include <bitset>
#include <optional>

#include "admitune/so3.hpp"
#include "admitune/types.hpp"
#include "admitune/wrench.hpp"

namespace admitune {

using so3::EulerAngles;
using so3::Pose;

/// Diagonal admittance gains. Axis order is (x, y, z, roll, pitch, yaw).
struct GainSet {
  Vec6 mass = Vec6::Ones();           // M_d, kg or kg m^2, > 0
  Vec6 damping = Vec6::Zero();        // D_d, >= 0
  Vec6 stiffness = Vec6::Zero();      // K_d, >= 0
  Vec6 force_gain = Vec6::Zero();     // K_f, >= 0, dimensionless

  /// Throws std::invalid_argument if an invariant is broken.
  void validate() const;
  static GainSet uniform(double mass, double damping, double stiffness, double force_gain);
};

struct ControlState {
  Pose pose;
  Vec6 velocity = Vec6::Zero();  // linear m/s, angular rad/s
};

struct Reference {
  Pose pose;
  Wrench wrench;
};

/// Per-component cap on the commanded acceleration.
struct AccelerationLimit {
  double linear = 10.0;   // m/s^2
  double angular = 20.0;  // rad/s^2
};

using AxisMask = std::bitset<6>;
inline const AxisMask kAllAxes{0b111111};

/// Admittance law solved for the acceleration:
///   xdd = M^-1 (-D xd - K_d (x - x_ref) + K_f (W_meas - W_ref)).
/// The orientation part of (x - x_ref) is -orientation_error(Theta, Theta_ref),
/// which vanishes at the reference.
Vec6 compute_acceleration(const ControlState& state, const Reference& ref, const Wrench& measured,
                          const GainSet& gains);

/// Clamps each component to the configured limit.
Vec6 clamp_acceleration(const Vec6& acc, const AccelerationLimit& limit);

struct ControllerStep {
  ControlState state;  // advanced state
  Pose command;        // commanded pose for the next period
  Vec6 acceleration = Vec6::Zero();
  bool saturated = false;  // the limit clipped an active axis
};

/// One control period: acceleration from the law, masked and clamped, then
/// integrated. Throws GimbalLockError (caller holds the last command).
ControllerStep step_controller(const ControlState& state, const Reference& ref, const Wrench& measured,
                               const GainSet& gains, double dt,
                               const AccelerationLimit& limit = {}, const AxisMask& axes = kAllAxes);

/// General wrench controller: owns its state and holds the last command when
/// the Euler-rate map is singular.
class AdmittanceController {
 public:
  AdmittanceController() = default;
  AdmittanceController(ControlState initial, GainSet gains, AccelerationLimit limit = {},
                       AxisMask axes = kAllAxes);

  /// Advances one period and returns the commanded pose.
  const Pose& step(const Reference& ref, const Wrench& measured, double dt);

  const ControlState& state() const { return state_; }
  const GainSet& gains() const { return gains_; }
  void set_gains(const GainSet& gains);
  const AxisMask& axes() const { return axes_; }
  bool held_last_step() const { return held_; }

 private:
  ControlState state_;
  GainSet gains_;
  AccelerationLimit limit_;
  AxisMask axes_ = kAllAxes;
  bool held_ = false;
};

// -- Grasp and normal-offset channels ---------------------------------------

struct GraspSetpoint {
  double grasp = 0.0;   // N, >= 0
  double offset = 0.0;  // N
};

/// grasp = (|f1| + |f2|) / 2, offset = f1 - grasp.
GraspSetpoint grasp_decompose(double f1_ref, double f2_ref);

struct ScalarChannel {
  double position = 0.0;
  double velocity = 0.0;
};

/// Closing (grasp) and common-mode (offset) displacements. Fingertip normals
/// move as p1_z = p1_z0 + grasp + offset, p2_z = p2_z0 - grasp + offset.
struct GraspState {
  ScalarChannel grasp;
  ScalarChannel offset;
};

struct GraspCommand {
  double dp1_z = 0.0;
  double dp2_z = 0.0;
};

/// Measured grasp force, (|f1| + |f2|) / 2.
double measured_grasp(double f1, double f2);

/// Measured per-tip offset. The wrist sees the sum of both tip normals, so the
/// per-tip share is half of it.
double measured_offset(double f_z_wrist);

/// Acceleration of one scalar admittance channel using the z-axis gains.
double channel_acceleration(const ScalarChannel& ch, double measured, double reference, const GainSet& gains,
                            double position_ref = 0.0);

/// Advances both channels one period and returns the per-tip normal
/// displacements. Both channels use `gains`. Throws std::invalid_argument for dt <= 0.
GraspCommand step_grasp_controller(GraspState& state, const GraspSetpoint& setpoint, double f1_meas,
                                   double f2_meas, double f_z_wrist, const GainSet& gains, double dt,
                                   const AccelerationLimit& limit = {});

/// Same, with a separate gain set for the offset channel.
GraspCommand step_grasp_controller(GraspState& state, const GraspSetpoint& setpoint, double f1_meas,
                                   double f2_meas, double f_z_wrist, const GainSet& grasp_gains,
                                   const GainSet& offset_gains, double dt, const AccelerationLimit& limit = {});

}  // namespace admitune
