#pragma once

#include <deque>
#include <span>
#include <vector>

#include "admitune/admittance.hpp"
#include "admitune/types.hpp"
#include "admitune/ukf.hpp"
#include "admitune/wrench.hpp"

/// Online calibration of the admittance gains and of the contact spring
/// constants. Each period, 2L+1 parameter samples are pushed through a spring
/// model of the contact over the last `window` periods; their objective values
/// drive an unscented Kalman correction toward the desired objectives.
namespace admitune::autotune {

inline constexpr int kParamCount = 24;
inline constexpr int kObjectiveCount = 14;

using ParamVec = Eigen::Matrix<double, kParamCount, 1>;
using ParamCov = Eigen::Matrix<double, kParamCount, kParamCount>;
using ObjVec = Eigen::Matrix<double, kObjectiveCount, 1>;
using ObjCov = Eigen::Matrix<double, kObjectiveCount, kObjectiveCount>;

/// Contact spring constants: K_p (N/m) per axis and K_Theta (N m/rad) per axis.
struct SpringParams {
  Vec3 linear = Vec3::Zero();
  Vec3 angular = Vec3::Zero();
};

/// theta = [M_d (6), D_d (6), K_f (6), K_p (3), K_Theta (3)]. K_d is not tuned.
struct ParamVector {
  ParamVec values = ParamVec::Zero();

  Vec6 mass() const { return values.segment<6>(0); }
  Vec6 damping() const { return values.segment<6>(6); }
  Vec6 force_gain() const { return values.segment<6>(12); }
  SpringParams springs() const { return {values.segment<3>(18), values.segment<3>(21)}; }
  GainSet gains(const Vec6& stiffness) const { return {mass(), damping(), stiffness, force_gain()}; }

  static ParamVector pack(const GainSet& gains, const SpringParams& springs);
};

/// h = [h_ref (6), h_spring (6), h_forces, h_kin].
struct ObjectiveVector {
  ObjVec values = ObjVec::Zero();

  Vec6 reference() const { return values.segment<6>(0); }
  Vec6 spring() const { return values.segment<6>(6); }
  double forces() const { return values[12]; }
  double kinematic() const { return values[13]; }
};

/// Axis-aligned workspace box plus a maximum reach from the gripper origin.
struct KinematicBounds {
  Vec3 lower = Vec3::Constant(-1.0);
  Vec3 upper = Vec3::Constant(1.0);
  double reach_radius = 1.0;

  bool contains(const Vec3& p) const;
};

struct TunerConfig {
  ParamCov process_cov = ParamCov::Zero();      // C_theta
  ObjCov observation_cov = ObjCov::Identity();  // C_v
  ukf::UnscentedParams unscented;
  double slip_cost = 1e3;       // delta
  double kinematic_cost = 1e3;  // zeta
  FrictionModel friction;
  double dt = 0.01;
  int window = 1;  // N periods replayed per update
  KinematicBounds bounds;
  AccelerationLimit accel_limit;
  Vec6 stiffness = Vec6::Zero();  // K_d, passed through untouched
  AxisMask axes = kAllAxes;       // channels driven by the controller
  double param_floor = 1e-6;
  bool saturation_infeasible = true;  // a clipped acceleration counts as infeasible

  void validate() const;
};

/// One control period as seen from fingertip 1. Wrenches are patch form:
/// force plus the contact-patch torque, not including p x f.
struct TuningSample {
  ControlState state;        // channel state at the start of the period
  Reference reference;
  Wrench measured;
  Vec3 tip_position = Vec3::Zero();
  Wrench model_mismatch;     // process noise for this period (set by the tuner)
};

/// Spring model wrench: (K_p dp ; p x K_p dp) + (0 ; K_Theta dTheta).
Wrench spring_model_wrench(const SpringParams& springs, const Vec3& p, const Vec3& dp, const Vec3& dtheta);

struct Propagation {
  Wrench predicted;  // patch form at the end of the period
  ControlState state;
  Vec3 tip_position = Vec3::Zero();
  bool saturated = false;
};

/// One period of the model: admittance step with theta's gains, then the
/// spring model driven by the compression -dp, -dTheta (the sensed wrench is the
/// environment's reaction, which opposes motion into the contact), minus the
/// process noise `mismatch`. Throws GimbalLockError.
Propagation propagate_model(const Wrench& previous, const ControlState& state, const Vec3& tip_position,
                            const ParamVector& theta, const Reference& reference, const Wrench& mismatch,
                            const TunerConfig& config);

/// Model prediction minus measurement.
Wrench process_noise(const Wrench& predicted, const Wrench& measured);

/// Mismatch between the spring model over (previous -> current) and what was
/// measured at `current`, using the realized displacement.
Wrench measured_process_noise(const TuningSample& previous, const TuningSample& current,
                              const SpringParams& springs);

/// Slip cost: delta when -lambda f_z < tau_z < lambda f_z fails (or the
/// margin is below 1e-9), else min(1 / margin, delta).
double force_objective(const FrictionModel& friction, double f_z, double tau_z, double slip_cost);

/// Objectives of `theta` over `window` (N + 1 samples, oldest first).
ObjectiveVector evaluate_objectives(const ParamVector& theta, std::span<const TuningSample> window,
                                    const TunerConfig& config);

/// Desired objective values for the newest sample in `window`.
ObjectiveVector desired_objectives(std::span<const TuningSample> window);

struct TunerState {
  ParamVector theta;
  ParamCov covariance = ParamCov::Zero();
  std::deque<TuningSample> history;  // newest last, at most window + 1
};

struct TunerOutput {
  GainSet gains;
  SpringParams springs;
  ObjectiveVector objectives;  // at the center sigma point; zero until warmed up
  bool updated = false;
  bool reset = false;          // covariance could not be factored; P reset
};

/// One full tuning period on an explicit state: sigma points, objective
/// evaluation, correction. Throws CovarianceFactorizationError and
/// SingularInnovationError. The sample's mismatch must already be set and the
/// sample must already be the newest in `state.history`.
ObjectiveVector tuner_step(TunerState& state, const TunerConfig& config);

/// Stateful wrapper used by the simulator: keeps the sample window, computes
/// the process noise and recovers from factorization failures by resetting
/// the covariance to its initial value.
class AutoTuner {
 public:
  AutoTuner(TunerConfig config, const ParamVector& initial, const ParamCov& initial_cov);

  TunerOutput step(TuningSample sample);

  const TunerState& state() const { return state_; }
  const TunerConfig& config() const { return config_; }
  GainSet gains() const { return state_.theta.gains(config_.stiffness); }

 private:
  TunerConfig config_;
  ParamCov initial_cov_;
  TunerState state_;
};

}  // namespace admitune::autotune
