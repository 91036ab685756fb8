#pragma once

#include <utility>

#include "admitune/types.hpp"

/// Rotation utilities for the admittance controller.
///
/// Orientation is carried as extrinsic X-Y-Z (roll-pitch-yaw) Euler angles,
/// R = Rz(yaw) * Ry(pitch) * Rx(roll). This is the convention whose rate map
/// is the matrix returned by `euler_rate_matrix`. Angular velocities are
/// expressed in the fixed gripper frame.
namespace admitune::so3 {

inline constexpr double kSmallAngle = 1e-6;
inline constexpr double kNearPi = 1e-6;
inline constexpr double kGimbalThreshold = 1e-6;
/// trace(R) >= 3 - kIdentityTraceTol is treated as exactly the identity.
inline constexpr double kIdentityTraceTol = 1e-14;

struct EulerAngles {
  double roll = 0.0;   // about x
  double pitch = 0.0;  // about y
  double yaw = 0.0;    // about z

  Vec3 vec() const { return {roll, pitch, yaw}; }
  static EulerAngles from(const Vec3& v) { return {v.x(), v.y(), v.z()}; }
  bool operator==(const EulerAngles&) const = default;
};

struct Pose {
  Vec3 position = Vec3::Zero();
  EulerAngles orientation;
};

/// Pose after one integration step plus the advanced velocity
/// (linear m/s first, angular rad/s second).
struct PoseStep {
  Pose pose;
  Vec6 velocity;
};

Mat3 skew(const Vec3& v);
Vec3 vee(const Mat3& m);

/// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

Mat3 rotation_from_euler(const EulerAngles& e);

/// Inverse of `rotation_from_euler`; pitch in [-pi/2, pi/2].
EulerAngles euler_from_rotation(const Mat3& r);

/// Rodrigues exponential of a rotation vector.
Mat3 exp_map(const Vec3& psi);

/// Rotation vector (axis * angle) of `r`, with |result| <= pi.
Vec3 matrix_log(const Mat3& r);

/// log(R_curr^T * R_ref): the reference frame as seen from the current frame.
Vec3 orientation_error(const EulerAngles& current, const EulerAngles& reference);

/// C such that omega = C * d(Theta)/dt. Throws GimbalLockError when
/// |cos(pitch)| <= kGimbalThreshold.
Mat3 euler_rate_matrix(const EulerAngles& e);

/// One explicit step. Position: p + v dt + a dt^2 / 2. Orientation:
/// Theta + C^-1 omega dt, wrapped to (-pi, pi]. Velocity: v + a dt.
/// Throws GimbalLockError (state untouched) and std::invalid_argument for dt <= 0.
PoseStep integrate_pose(const Pose& pose, const Vec6& velocity, const Vec6& acceleration, double dt);

}  // namespace admitune::so3
