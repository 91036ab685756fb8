#include "admitune/wrench.hpp"

#include <cmath>
#include <stdexcept>

namespace admitune {

Wrench ReducedWrench::fingertip(int k) const {
  if (k != 1 && k != 2) throw std::invalid_argument("fingertip index must be 1 or 2");
  return {Vec3(u[0], u[1], k == 1 ? u[2] : u[3]), u.tail<3>()};
}

ReducedWrench ReducedWrench::from_fingertip_pair(const Wrench& tip1, double f2z) {
  ReducedWrench r;
  r.u << tip1.force.x(), tip1.force.y(), tip1.force.z(), f2z, tip1.torque;
  return r;
}

Wrench fingertip_wrench(const Vec3& p, const Vec3& f, const Vec3& patch_torque) {
  return {f, p.cross(f) + patch_torque};
}

Wrench wrist_from_fingertips(std::span<const FingertipState> tips) {
  if (tips.empty()) throw std::invalid_argument("wrist_from_fingertips: no fingertips");
  Wrench w;
  for (const auto& tip : tips) {
    w.force += tip.force;
    w.torque += tip.position.cross(tip.force) + tip.torque;
  }
  return w;
}

Mat7 build_A(const Vec3& p1, const Vec3& p2) {
  Mat7 a = Mat7::Zero();
  // Columns follow the layout of u.
  a.col(0) << 2, 0, 0, 0, 0, p1.z() + p2.z(), -p1.y() - p2.y();
  a.col(1) << 0, 2, 0, 0, -p1.z() - p2.z(), 0, p1.x() + p2.x();
  a.col(2) << 0, 0, 1, 0, p1.y(), -p1.x(), 0;
  a.col(3) << 0, 0, 0, 1, p2.y(), -p2.x(), 0;
  a(4, 4) = 2;
  a(5, 5) = 2;
  a(6, 6) = 2;
  return a;
}

ReducedWrench estimate_fingertip_wrench(const SensorReading& reading, const Vec3& p1, const Vec3& p2) {
  const Mat7 a = build_A(p1, p2);
  ReducedWrench out;
  out.u = a.triangularView<Eigen::Lower>().solve(reading.b);
  return out;
}

SensorReading compose_reading(const ReducedWrench& u, const Vec3& p1, const Vec3& p2) {
  return {build_A(p1, p2) * u.u};
}

std::pair<double, double> slip_interval(const FrictionModel& friction, double f_z) {
  const double bound = friction.lambda * std::abs(f_z);
  return {-bound, bound};
}

bool within_slip_limit(const FrictionModel& friction, double f_z, double tau_z) {
  const auto [lo, hi] = slip_interval(friction, f_z);
  return lo < tau_z && tau_z < hi;
}

}  // namespace admitune
