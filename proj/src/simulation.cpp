#include "admitune/simulation.hpp"

#include <optional>

#include "admitune/autotune.hpp"
#include "admitune/plant.hpp"

namespace admitune::sim {

namespace {

Wrench from_reduced(const Vec7& u, double normal) {
  return {Vec3(u[0], u[1], normal), u.tail<3>()};
}

Wrench masked(const Wrench& w, const AxisMask& axes) {
  Vec6 v = w.vec();
  for (int i = 0; i < 6; ++i) {
    if (!axes[static_cast<std::size_t>(i)]) v[i] = 0.0;
  }
  return Wrench::from(v);
}

}  // namespace

RunLog run_scenario(const Scenario& sc) { return run_scenario(sc, TunerObserver{}); }

RunLog run_scenario(const Scenario& sc, const TunerObserver& observer) {
  sc.validate();
  const bool foot = sc.mode == Mode::kPointContact;
  const AxisMask axes = sc.tuner.axes;

  Plant plant(sc.environment, foot ? ContactKind::kFoot : ContactKind::kGrasp, sc.seed, sc.dt);

  GainSet gains = sc.gains;
  autotune::ParamVector theta = autotune::ParamVector::pack(gains, sc.springs);
  std::optional<autotune::AutoTuner> tuner;
  if (sc.autotune) tuner.emplace(sc.tuner, theta, sc.initial_cov);

  // The fingertip normal (z) belongs to the grasp/offset channels; the
  // general controller moves the rest of the gripper pose.
  AxisMask general_axes = axes;
  if (!foot) general_axes.reset(2);
  AdmittanceController general(ControlState{}, gains, sc.tuner.accel_limit, general_axes);
  GraspState grasp;
  PlantCommand command;

  RunLog log;
  log.scenario = sc.name;
  log.mode = sc.mode;
  log.dt = sc.dt;
  log.seed = sc.seed;
  const std::size_t steps = sc.steps();
  log.records.reserve(steps);

  for (std::size_t n = 0; n < steps; ++n) {
    const double t = static_cast<double>(n) * sc.dt;
    const PlantReading reading = plant.step(command);
    const Vec7 ref_u = sc.reference.at(t);

    Vec7 meas_u;
    if (foot) {
      meas_u << reading.foot.force, 0.0, reading.foot.torque;
    } else {
      meas_u = estimate_fingertip_wrench(reading.sensor, reading.tips[0], reading.tips[1]).u;
    }

    // Fingertip-1 view used by the tuner; the z slot carries the grasp channel.
    autotune::TuningSample sample;
    sample.state = general.state();
    sample.tip_position = reading.tips[0];
    RunRecord rec;
    if (foot) {
      sample.reference.wrench = masked(from_reduced(ref_u, ref_u[2]), axes);
      sample.measured = masked(from_reduced(meas_u, meas_u[2]), axes);
      rec.grasp_ref = ref_u[2];
      rec.grasp_meas = meas_u[2];
    } else {
      const GraspSetpoint setpoint = grasp_decompose(ref_u[2], ref_u[3]);
      const double grasp_meas = measured_grasp(meas_u[2], meas_u[3]);
      sample.state.pose.position.z() = grasp.grasp.position;
      sample.state.velocity[2] = grasp.grasp.velocity;
      sample.reference.wrench = masked(from_reduced(ref_u, setpoint.grasp), axes);
      sample.measured = masked(from_reduced(meas_u, grasp_meas), axes);
      rec.grasp_ref = setpoint.grasp;
      rec.grasp_meas = grasp_meas;

      step_grasp_controller(grasp, setpoint, meas_u[2], meas_u[3], reading.wrist_fz, gains,
                            sc.offset_gains.value_or(gains), sc.dt, sc.tuner.accel_limit);
      command.dp1_z = grasp.grasp.position + grasp.offset.position;
      command.dp2_z = -grasp.grasp.position + grasp.offset.position;
    }

    if (general_axes.any()) {
      Reference ref;
      ref.wrench = from_reduced(ref_u, foot ? ref_u[2] : 0.0);
      command.pose = general.step(ref, from_reduced(meas_u, foot ? meas_u[2] : 0.0), sc.dt);
    }

    if (tuner) {
      const autotune::TunerOutput out = tuner->step(sample);
      gains = out.gains;
      general.set_gains(gains);
      theta = tuner->state().theta;
      rec.h = out.objectives.values;
      if (observer) observer(n, tuner->state());
    }

    rec.step = n;
    rec.t = t;
    rec.x << sample.state.pose.position, sample.state.pose.orientation.vec();
    rec.xd = sample.state.velocity;
    rec.ref = ref_u;
    rec.meas = meas_u;
    rec.theta = theta.values;
    const TrackingError err = tracking_error(sc.mode, meas_u, ref_u);
    rec.h2 = err.h2;
    rec.ref_norm = err.ref_norm;
    rec.slip = reading.slipping;
    log.records.push_back(rec);
  }
  return log;
}

}  // namespace admitune::sim
