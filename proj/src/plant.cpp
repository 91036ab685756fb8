#include "admitune/plant.hpp"

#include <cmath>

#include "admitune/errors.hpp"

namespace admitune::sim {

void Environment::validate() const {
  if ((kp_true.array() < 0.0).any() || (ktheta_true.array() < 0.0).any() || !kp_true.allFinite() ||
      !ktheta_true.allFinite()) {
    throw ScenarioConfigError("environment stiffness must be finite and non-negative");
  }
  if (!(lambda_true > 0.0)) throw ScenarioConfigError("environment friction coefficient must be positive");
  if (!(force_noise >= 0.0) || !(torque_noise >= 0.0)) throw ScenarioConfigError("noise sigma must be >= 0");
  if (!(actuator_lag >= 0.0)) throw ScenarioConfigError("actuator lag must be >= 0");
  if (!(half_width >= 0.0)) throw ScenarioConfigError("object half width must be >= 0");
}

Environment environment_preset(const std::string& name) {
  Environment env;
  if (name == "hold") {
    env.kp_true = Vec3::Constant(2000.0);
    env.ktheta_true = Vec3::Constant(10.0);
  } else if (name == "towel") {
    env.kp_true = Vec3::Constant(200.0);
    env.ktheta_true = Vec3::Constant(2.0);
  } else if (name == "softball") {
    env.kp_true = Vec3::Constant(500.0);
    env.ktheta_true = Vec3::Constant(4.0);
  } else {
    throw ScenarioConfigError("unknown environment preset '" + name + "'");
  }
  return env;
}

Plant::Plant(Environment env, ContactKind kind, std::uint64_t seed, double dt)
    : env_(std::move(env)), kind_(kind), rng_(seed) {
  env_.validate();
  if (!(dt > 0.0)) throw ScenarioConfigError("plant dt must be positive");
  alpha_ = env_.actuator_lag > 0.0 ? 1.0 - std::exp(-dt / env_.actuator_lag) : 1.0;
  if (kind_ == ContactKind::kGrasp) {
    nominal_[0] = env_.contact_origin + Vec3(0.0, 0.0, env_.half_width);
    nominal_[1] = env_.contact_origin - Vec3(0.0, 0.0, env_.half_width);
  } else {
    nominal_[0] = env_.contact_origin;
    nominal_[1] = env_.contact_origin;
  }
}

Wrench Plant::contact_wrench(int k, const Vec3& tip, const Mat3& rot, double normal, bool& slipped) {
  TipContact& c = contact_[static_cast<std::size_t>(k)];
  if (normal == 0.0) {
    c.touching = false;
    return {};
  }
  if (!c.touching) {
    c.touching = true;
    c.anchor = tip;
    c.anchor_rot = rot;
  }
  Wrench w;
  w.force.head<2>() = -env_.kp_true.head<2>().cwiseProduct(tip.head<2>() - c.anchor.head<2>());
  w.force.z() = normal;

  Vec3 psi = so3::matrix_log(c.anchor_rot.transpose() * rot);
  w.torque = -env_.ktheta_true.cwiseProduct(psi);
  const double limit = env_.lambda_true * std::abs(normal);
  if (std::abs(w.torque.z()) > limit) {
    w.torque.z() = std::copysign(limit, w.torque.z());
    psi.z() = -w.torque.z() / env_.ktheta_true.z();
    c.anchor_rot = rot * so3::exp_map(psi).transpose();
    slipped = true;
  }
  return w;
}

PlantReading Plant::step(const PlantCommand& command) {
  actual_.pose.position += alpha_ * (command.pose.position - actual_.pose.position);
  Vec3 angles = actual_.pose.orientation.vec();
  const Vec3 target = command.pose.orientation.vec();
  for (int i = 0; i < 3; ++i) angles[i] = so3::wrap_angle(angles[i] + alpha_ * so3::wrap_angle(target[i] - angles[i]));
  actual_.pose.orientation = so3::EulerAngles::from(angles);
  actual_.dp1_z += alpha_ * (command.dp1_z - actual_.dp1_z);
  actual_.dp2_z += alpha_ * (command.dp2_z - actual_.dp2_z);

  const Mat3 rot = so3::rotation_from_euler(actual_.pose.orientation);
  const double kz = env_.kp_true.z();
  PlantReading out;

  if (kind_ == ContactKind::kFoot) {
    const Vec3 foot = nominal_[0] + actual_.pose.position;
    out.tips = {foot, foot};
    const double depth = env_.contact_origin.z() - foot.z();
    out.truth[0] = contact_wrench(0, foot, rot, kz * std::max(0.0, depth), out.slipping);
    out.foot = out.truth[0];
    for (int i = 0; i < 3; ++i) out.foot.force[i] += env_.force_noise * normal_(rng_);
    for (int i = 0; i < 3; ++i) out.foot.torque[i] += env_.torque_noise * normal_(rng_);
    out.sensor.b << out.foot.force, 0.0, out.foot.torque;
    out.wrist_fz = out.foot.force.z();
    return out;
  }

  out.tips[0] = nominal_[0] + actual_.pose.position + Vec3(0.0, 0.0, actual_.dp1_z);
  out.tips[1] = nominal_[1] + actual_.pose.position + Vec3(0.0, 0.0, actual_.dp2_z);
  const double top = env_.contact_origin.z() + env_.half_width;
  const double bottom = env_.contact_origin.z() - env_.half_width;
  out.truth[0] = contact_wrench(0, out.tips[0], rot, kz * std::max(0.0, top - out.tips[0].z()), out.slipping);
  out.truth[1] = contact_wrench(1, out.tips[1], rot, -kz * std::max(0.0, out.tips[1].z() - bottom), out.slipping);

  const std::array<FingertipState, 2> tips{{
      {1, out.tips[0], out.truth[0].force, out.truth[0].torque},
      {2, out.tips[1], out.truth[1].force, out.truth[1].torque},
  }};
  const Wrench wrist = wrist_from_fingertips(tips);
  out.sensor.b << wrist.force.x(), wrist.force.y(), out.truth[0].force.z(), out.truth[1].force.z(), wrist.torque;
  out.wrist_fz = wrist.force.z();

  for (int i = 0; i < 4; ++i) out.sensor.b[i] += env_.force_noise * normal_(rng_);
  for (int i = 4; i < 7; ++i) out.sensor.b[i] += env_.torque_noise * normal_(rng_);
  out.wrist_fz += env_.force_noise * normal_(rng_);
  return out;
}

}  // namespace admitune::sim
