#pragma once

#include <array>
#include <cstdint>
#include <random>

#include "admitune/autotune.hpp"
#include "admitune/so3.hpp"
#include "admitune/types.hpp"
#include "admitune/wrench.hpp"

/// Quasi-static contact plant used in place of the robot: an object held
/// between two fingertips (or a foot on flat ground), modelled as linear
/// springs with a torsional patch spring that slips at the friction limit.
namespace admitune::sim {

/// Ground truth of the simulated contact.
struct Environment {
  Vec3 kp_true = Vec3::Constant(200.0);     // N/m per axis (z is the normal)
  Vec3 ktheta_true = Vec3::Constant(2.0);   // N m/rad per axis
  Vec3 contact_origin = Vec3(0.05, 0.0, 0.0);  // object center (grasp) or ground point (foot), m
  double half_width = 0.02;                 // object half thickness along z, m
  double lambda_true = 0.5;
  double force_noise = 0.0;                 // sigma, N
  double torque_noise = 0.0;                // sigma, N m
  double actuator_lag = 0.0;                // first-order time constant, s
  autotune::KinematicBounds workspace;

  /// Throws ScenarioConfigError on negative stiffness, noise or lag.
  void validate() const;
};

/// Named environments: "hold" (2000 N/m), "towel" (200 N/m), "softball" (500 N/m).
/// Throws ScenarioConfigError for an unknown name.
Environment environment_preset(const std::string& name);

enum class ContactKind { kGrasp, kFoot };

/// Commanded gripper (or foot) pose plus per-tip normal displacements.
struct PlantCommand {
  so3::Pose pose;
  double dp1_z = 0.0;
  double dp2_z = 0.0;
};

/// What the robot gets back each period.
struct PlantReading {
  SensorReading sensor;          // b = [f_x, f_y, f1_z, f2_z, tau_x, tau_y, tau_z] (grasp)
  double wrist_fz = 0.0;         // wrist normal force, used by the offset channel
  Wrench foot;                   // foot F/T reading (foot contact)
  std::array<Vec3, 2> tips{};    // realized fingertip (or foot) positions in {G}
  std::array<Wrench, 2> truth{};  // noise-free patch-form wrench per tip
  bool slipping = false;         // torsion limit active on some tip this period
};

/// Stateful plant. Deterministic for a given seed.
class Plant {
 public:
  Plant(Environment env, ContactKind kind, std::uint64_t seed, double dt);

  /// Nominal (zero-command) tip positions.
  const std::array<Vec3, 2>& nominal_tips() const { return nominal_; }

  /// Moves the actuators toward `command` (first-order lag), evaluates the
  /// contact and returns the noisy reading.
  PlantReading step(const PlantCommand& command);

  const Environment& environment() const { return env_; }

 private:
  struct TipContact {
    bool touching = false;
    Vec3 anchor = Vec3::Zero();        // tangential spring rest point
    Mat3 anchor_rot = Mat3::Identity();  // torsion spring rest orientation
  };

  Wrench contact_wrench(int k, const Vec3& tip, const Mat3& rot, double normal, bool& slipped);

  Environment env_;
  ContactKind kind_;
  double alpha_;
  std::array<Vec3, 2> nominal_{};
  PlantCommand actual_;
  std::array<TipContact, 2> contact_{};
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace admitune::sim
