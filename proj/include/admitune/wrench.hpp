#pragma once

#include <span>
#include <utility>

#include "admitune/types.hpp"

/// Wrench bookkeeping for a two-finger gripper with a wrist F/T sensor and a
/// one-axis (z) strain gauge per fingertip. All quantities are in the gripper
/// frame {G}; fingertip frames share its orientation.
namespace admitune {

/// Force (N) then torque (N m).
struct Wrench {
  Vec3 force = Vec3::Zero();
  Vec3 torque = Vec3::Zero();

  Vec6 vec() const {
    Vec6 v;
    v << force, torque;
    return v;
  }
  static Wrench from(const Vec6& v) { return {v.head<3>(), v.tail<3>()}; }

  Wrench operator+(const Wrench& o) const { return {force + o.force, torque + o.torque}; }
  Wrench operator-(const Wrench& o) const { return {force - o.force, torque - o.torque}; }
  Wrench operator*(double s) const { return {force * s, torque * s}; }
};

struct FingertipState {
  int index = 1;                   // 1 or 2
  Vec3 position = Vec3::Zero();    // p_k in {G}, m
  Vec3 force = Vec3::Zero();       // reaction force, N
  Vec3 torque = Vec3::Zero();      // patch torque, N m
};

/// Raw measurement vector b = [f_x, f_y, f1_z, f2_z, tau_x, tau_y, tau_z]:
/// wrist F/T for the shared components, strain gauges for the two normals.
struct SensorReading {
  Vec7 b = Vec7::Zero();

  double fx() const { return b[0]; }
  double fy() const { return b[1]; }
  double f1z() const { return b[2]; }
  double f2z() const { return b[3]; }
  Vec3 torque() const { return b.tail<3>(); }
};

/// Per-fingertip unknowns u = [f12_x, f12_y, f1_z, f2_z, tau12_x, tau12_y, tau12_z]
/// under the shared-component assumption: both tips carry the same tangential
/// force and patch torque, only the normal forces differ.
struct ReducedWrench {
  Vec7 u = Vec7::Zero();

  /// Patch-form wrench of fingertip `k` (1 or 2).
  Wrench fingertip(int k) const;
  static ReducedWrench from_fingertip_pair(const Wrench& tip1, double f2z);
};

/// Rotational (torsional) friction coefficient of the contact patch.
struct FrictionModel {
  double lambda = 0.5;
};

/// Wrench of fingertip k about the gripper origin: (f, p x f + tau_patch).
Wrench fingertip_wrench(const Vec3& p, const Vec3& f, const Vec3& patch_torque);

/// Wrist wrench as the sum of fingertip wrenches. Throws std::invalid_argument
/// on an empty list.
Wrench wrist_from_fingertips(std::span<const FingertipState> tips);

/// The 7x7 map A with A u = b. Lower triangular with diagonal
/// (2, 2, 1, 1, 2, 2, 2), so det(A) = 32 for every fingertip placement.
Mat7 build_A(const Vec3& p1, const Vec3& p2);

/// Solves A u = b by forward substitution.
ReducedWrench estimate_fingertip_wrench(const SensorReading& reading, const Vec3& p1, const Vec3& p2);

/// b = A u; the inverse of `estimate_fingertip_wrench`.
SensorReading compose_reading(const ReducedWrench& u, const Vec3& p1, const Vec3& p2);

/// Torsional torque interval that keeps the patch from slipping:
/// (-lambda |f_z|, lambda |f_z|). The absolute value makes the check
/// independent of the normal-force sign convention.
std::pair<double, double> slip_interval(const FrictionModel& friction, double f_z);

/// Strict form of the slip bound: -lambda |f_z| < tau_z < lambda |f_z|.
bool within_slip_limit(const FrictionModel& friction, double f_z, double tau_z);

}  // namespace admitune
