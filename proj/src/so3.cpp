#include "admitune/so3.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "admitune/errors.hpp"

namespace admitune::so3 {

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

Vec3 vee(const Mat3& m) { return {m(2, 1), m(0, 2), m(1, 0)}; }

double wrap_angle(double a) {
  constexpr double pi = std::numbers::pi;
  double w = std::remainder(a, 2.0 * pi);  // [-pi, pi]
  if (w <= -pi) w += 2.0 * pi;
  return w;
}

Mat3 rotation_from_euler(const EulerAngles& e) {
  const double cx = std::cos(e.roll), sx = std::sin(e.roll);
  const double cy = std::cos(e.pitch), sy = std::sin(e.pitch);
  const double cz = std::cos(e.yaw), sz = std::sin(e.yaw);
  Mat3 r;
  r << cz * cy, cz * sy * sx - sz * cx, cz * sy * cx + sz * sx,
       sz * cy, sz * sy * sx + cz * cx, sz * sy * cx - cz * sx,
       -sy, cy * sx, cy * cx;
  return r;
}

EulerAngles euler_from_rotation(const Mat3& r) {
  const double sy = std::clamp(-r(2, 0), -1.0, 1.0);
  EulerAngles e;
  e.pitch = std::asin(sy);
  if (std::abs(std::cos(e.pitch)) > kGimbalThreshold) {
    e.roll = std::atan2(r(2, 1), r(2, 2));
    e.yaw = std::atan2(r(1, 0), r(0, 0));
  } else {
    // Roll and yaw share an axis; put everything in yaw.
    e.roll = 0.0;
    e.yaw = std::atan2(-r(0, 1), r(1, 1));
  }
  return e;
}

Mat3 exp_map(const Vec3& psi) {
  const double phi = psi.norm();
  const Mat3 k = skew(psi);
  if (phi < 1e-12) return Mat3::Identity() + k;
  return Mat3::Identity() + (std::sin(phi) / phi) * k +
         ((1.0 - std::cos(phi)) / (phi * phi)) * k * k;
}

Vec3 matrix_log(const Mat3& r) {
  const double tr = r.trace();
  if (tr >= 3.0 - kIdentityTraceTol) return Vec3::Zero();

  const double c = std::clamp(0.5 * (tr - 1.0), -1.0, 1.0);
  const Vec3 s = 0.5 * vee(r - r.transpose());  // sin(phi) * axis
  const double phi = std::atan2(s.norm(), c);

  if (phi < kSmallAngle) return s;

  if (std::numbers::pi - phi < kNearPi) {
    // sin(phi) ~ 0: recover the axis from the symmetric part,
    // (R + R^T)/2 = cos(phi) I + (1 - cos(phi)) w w^T.
    const Mat3 sym = 0.5 * (r + r.transpose());
    const double denom = 1.0 - c;
    int i = 0;
    sym.diagonal().maxCoeff(&i);
    Vec3 axis;
    axis[i] = std::sqrt(std::max(0.0, (sym(i, i) - c) / denom));
    for (int j = 0; j < 3; ++j) {
      if (j != i) axis[j] = sym(i, j) / (denom * axis[i]);
    }
    axis.normalize();
    if (axis.dot(s) < 0.0) axis = -axis;
    return phi * axis;
  }

  return (phi / std::sin(phi)) * s;
}

Vec3 orientation_error(const EulerAngles& current, const EulerAngles& reference) {
  return matrix_log(rotation_from_euler(current).transpose() * rotation_from_euler(reference));
}

Mat3 euler_rate_matrix(const EulerAngles& e) {
  const double cy = std::cos(e.pitch), sy = std::sin(e.pitch);
  if (std::abs(cy) <= kGimbalThreshold) {
    throw GimbalLockError("euler rate map singular at pitch " + std::to_string(e.pitch));
  }
  const double cz = std::cos(e.yaw), sz = std::sin(e.yaw);
  Mat3 c;
  c << cy * cz, -sz, 0.0,
       cy * sz, cz, 0.0,
       -sy, 0.0, 1.0;
  return c;
}

PoseStep integrate_pose(const Pose& pose, const Vec6& velocity, const Vec6& acceleration, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_pose: dt must be positive");

  const Mat3 c = euler_rate_matrix(pose.orientation);
  const Vec3 omega = velocity.tail<3>();
  const Vec3 euler_rate = c.partialPivLu().solve(omega);

  PoseStep out;
  out.pose.position = pose.position + velocity.head<3>() * dt + acceleration.head<3>() * (0.5 * dt * dt);
  const Vec3 next = pose.orientation.vec() + euler_rate * dt;
  out.pose.orientation = {wrap_angle(next.x()), wrap_angle(next.y()), wrap_angle(next.z())};
  out.velocity = velocity + acceleration * dt;
  return out;
}

}  // namespace admitune::so3
