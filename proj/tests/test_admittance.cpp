#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "admitune/admittance.hpp"
#include "admitune/errors.hpp"

using namespace admitune;

namespace {

GainSet random_gains(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(1e-3, 10.0);
  GainSet g;
  for (int i = 0; i < 6; ++i) {
    g.mass[i] = pos(rng);
    g.damping[i] = pos(rng);
    g.stiffness[i] = pos(rng);
    g.force_gain[i] = pos(rng);
  }
  return g;
}

Pose random_pose(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return {Vec3(u(rng), u(rng), u(rng)), {u(rng) * 3, u(rng) * 1.5, u(rng) * 3}};
}

Wrench random_wrench(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  return {Vec3(u(rng), u(rng), u(rng)), Vec3(u(rng), u(rng), u(rng))};
}

}  // namespace

TEST_CASE("GainSet validation") {
  CHECK_NOTHROW(GainSet::uniform(1, 0, 0, 0).validate());
  CHECK_THROWS_AS(GainSet::uniform(0, 1, 1, 1).validate(), std::invalid_argument);
  CHECK_THROWS_AS(GainSet::uniform(1, -1, 1, 1).validate(), std::invalid_argument);
  CHECK_THROWS_AS(GainSet::uniform(1, 1, -1, 1).validate(), std::invalid_argument);
  CHECK_THROWS_AS(GainSet::uniform(1, 1, 1, -1).validate(), std::invalid_argument);
  CHECK_THROWS_AS(GainSet::uniform(NAN, 1, 1, 1).validate(), std::invalid_argument);
}

TEST_CASE("compute_acceleration is exactly zero at equilibrium") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 1000; ++i) {
    const GainSet g = random_gains(rng);
    const Pose p = random_pose(rng);
    const Wrench w = random_wrench(rng);
    const ControlState state{p, Vec6::Zero()};
    const Reference ref{p, w};
    CHECK(compute_acceleration(state, ref, w, g) == Vec6::Zero());
  }
}

TEST_CASE("compute_acceleration direct substitution") {
  const GainSet g = GainSet::uniform(1, 0, 0, 1);
  const ControlState state{};
  const Reference ref{};
  Wrench meas;
  meas.force.x() = 1.0;
  Vec6 expected = Vec6::Zero();
  expected[0] = 1.0;
  CHECK(compute_acceleration(state, ref, meas, g) == expected);
}

TEST_CASE("compute_acceleration matches an independent evaluation") {
  std::mt19937_64 rng(22);
  for (int i = 0; i < 500; ++i) {
    const GainSet g = random_gains(rng);
    ControlState state{random_pose(rng), random_wrench(rng).vec() * 0.1};
    const Reference ref{random_pose(rng), random_wrench(rng)};
    const Wrench meas = random_wrench(rng);
    const Vec6 acc = compute_acceleration(state, ref, meas, g);

    const Mat3 rc = so3::rotation_from_euler(state.pose.orientation);
    const Mat3 rr = so3::rotation_from_euler(ref.pose.orientation);
    const Eigen::AngleAxisd aa(rc.transpose() * rr);
    const Vec3 rot_err = aa.angle() * aa.axis();
    for (int k = 0; k < 6; ++k) {
      const double disp = k < 3 ? state.pose.position[k] - ref.pose.position[k] : -rot_err[k - 3];
      const double err = meas.vec()[k] - ref.wrench.vec()[k];
      const double expected =
          (-g.damping[k] * state.velocity[k] - g.stiffness[k] * disp + g.force_gain[k] * err) / g.mass[k];
      CHECK(acc[k] == doctest::Approx(expected).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE("compute_acceleration is linear in the wrench error") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 100; ++i) {
    GainSet g = random_gains(rng);
    g.stiffness.setZero();
    const Wrench e = random_wrench(rng);
    const double alpha = std::uniform_real_distribution<double>(-3, 3)(rng);
    const Vec6 a1 = compute_acceleration({}, {}, e, g);
    const Vec6 a2 = compute_acceleration({}, {}, e * alpha, g);
    CHECK((a2 - alpha * a1).norm() < 1e-12 * (1.0 + a1.norm()));
  }
}

TEST_CASE("clamp_acceleration") {
  Vec6 a;
  a << 20, -20, 5, 30, -30, 1;
  Vec6 expected;
  expected << 10, -10, 5, 20, -20, 1;
  CHECK(clamp_acceleration(a, {}) == expected);
}

TEST_CASE("step_controller") {
  const GainSet g = GainSet::uniform(2.0, 1.0, 0.0, 0.5);
  const Pose p{Vec3(0.1, 0.2, 0.3), {0.1, -0.2, 0.3}};
  const Wrench w{Vec3(1, 2, 3), Vec3(0.1, 0.2, 0.3)};

  const ControllerStep still = step_controller({p, Vec6::Zero()}, {p, w}, w, g, 0.01);
  CHECK(still.state.pose.position == p.position);
  CHECK(still.state.pose.orientation == p.orientation);
  CHECK(still.state.velocity == Vec6::Zero());
  CHECK_FALSE(still.saturated);

  const Wrench e{Vec3(1, -2, 0.5), Vec3(0.1, 0, -0.3)};
  const ControllerStep moved = step_controller({}, {}, e, g, 0.01);
  const Vec6 expected = e.vec().cwiseProduct(g.force_gain).cwiseQuotient(g.mass) * 0.01;
  CHECK((moved.state.velocity - expected).norm() < 1e-15);
  CHECK(moved.command.position == moved.state.pose.position);

  AxisMask z_only;
  z_only.set(2);
  const ControllerStep masked = step_controller({}, {}, e, g, 0.01, {}, z_only);
  CHECK(masked.state.velocity[0] == 0.0);
  CHECK(masked.state.velocity[2] == doctest::Approx(expected[2]));

  Wrench big;
  big.force.z() = 1e3;
  CHECK(step_controller({}, {}, big, g, 0.01).saturated);
  CHECK_FALSE(step_controller({}, {}, big, g, 0.01, {}, AxisMask{0b000001}).saturated);
  CHECK_THROWS_AS(step_controller({}, {}, e, g, 0.0), std::invalid_argument);
}

TEST_CASE("AdmittanceController holds its command at gimbal lock") {
  ControlState start;
  start.pose.orientation.pitch = std::numbers::pi / 2;
  start.velocity[4] = 1.0;
  AdmittanceController c(start, GainSet::uniform(1, 1, 0, 1));
  const Pose before = c.state().pose;
  const Pose& after = c.step({}, {}, 0.01);
  CHECK(c.held_last_step());
  CHECK(after.orientation == before.orientation);
  CHECK(c.state().velocity.tail<3>() == Vec3::Zero());

  AdmittanceController ok({}, GainSet::uniform(1, 1, 0, 1));
  ok.step({}, {}, 0.01);
  CHECK_FALSE(ok.held_last_step());
  CHECK_THROWS_AS(ok.set_gains(GainSet::uniform(-1, 0, 0, 0)), std::invalid_argument);
}

TEST_CASE("grasp_decompose") {
  auto s = grasp_decompose(5, -5);
  CHECK(s.grasp == 5.0);
  CHECK(s.offset == 0.0);
  s = grasp_decompose(6, -4);
  CHECK(s.grasp == 5.0);
  CHECK(s.offset == 1.0);
  s = grasp_decompose(0, 0);
  CHECK(s.grasp == 0.0);
  CHECK(s.offset == 0.0);

  std::mt19937_64 rng(24);
  std::uniform_real_distribution<double> u(0.0, 30.0);
  for (int i = 0; i < 1000; ++i) {
    const double f1 = u(rng), f2 = -u(rng);
    const auto d = grasp_decompose(f1, f2);
    CHECK(d.grasp >= 0.0);
    CHECK(d.grasp + d.offset == doctest::Approx(f1).epsilon(1e-15));
  }
}

TEST_CASE("step_grasp_controller") {
  const GainSet g = GainSet::uniform(1.0, 10.0, 0.0, 0.1);
  const GraspSetpoint sp = grasp_decompose(6, -4);

  GraspState eq;
  GraspCommand c = step_grasp_controller(eq, sp, 6, -4, 2, g, 0.01);
  CHECK(c.dp1_z == 0.0);
  CHECK(c.dp2_z == 0.0);

  GraspState gs;
  c = step_grasp_controller(gs, sp, 7, -5, 2, g, 0.01);
  CHECK(c.dp1_z != 0.0);
  CHECK(c.dp1_z == -c.dp2_z);

  GraspState os;
  c = step_grasp_controller(os, sp, 7, -3, 4, g, 0.01);
  CHECK(c.dp1_z != 0.0);
  CHECK(c.dp1_z == c.dp2_z);

  GraspState same, split;
  GainSet stiff = g;
  stiff.force_gain.setConstant(1.0);
  const GraspCommand shared = step_grasp_controller(same, sp, 7, -3, 4, g, 0.01);
  const GraspCommand separate = step_grasp_controller(split, sp, 7, -3, 4, g, stiff, 0.01);
  CHECK(std::abs(separate.dp1_z) > std::abs(shared.dp1_z));

  CHECK_THROWS_AS(step_grasp_controller(gs, sp, 0, 0, 0, g, -0.01), std::invalid_argument);
  CHECK(measured_offset(2.0) == 1.0);
  CHECK(measured_grasp(6, -4) == 5.0);
}

TEST_CASE("admittance loop on a 1-D spring decays monotonically after 10 steps") {
  // Characteristic polynomial M s^2 + D s + K_f K_p has roots near -0.51 and -19.5.
  const double kp = 200.0, dt = 0.01, f_ref = -5.0;
  const GainSet g = GainSet::uniform(1.0, 20.0, 0.0, 0.05);
  ControlState state;
  double previous = std::abs(0.0 - f_ref);
  for (int k = 0; k < 3000; ++k) {
    Wrench meas;
    meas.force.z() = -kp * state.pose.position.z();
    Reference ref;
    ref.wrench.force.z() = f_ref;
    state = step_controller(state, ref, meas, g, dt, {}, AxisMask{0b000100}).state;
    const double err = std::abs(-kp * state.pose.position.z() - f_ref);
    if (k >= 10) CHECK(err <= previous + 1e-12);
    previous = err;
  }
  CHECK(previous < 1e-4);
}
