#pragma once

#include <filesystem>
#include <vector>

#include "admitune/types.hpp"

/// Time-indexed wrench references in the reduced layout
/// [f_x, f_y, f1_z, f2_z, tau_x, tau_y, tau_z].
namespace admitune::sim {

struct ReferenceRow {
  double t = 0.0;
  Vec7 u = Vec7::Zero();
};

/// Piecewise-linear reference. Rows are sorted by non-decreasing time; two
/// rows sharing a time stamp form a step. Held constant outside the range.
class ReferenceTrajectory {
 public:
  ReferenceTrajectory() = default;
  /// Throws ScenarioConfigError on an empty list, decreasing or non-finite times.
  explicit ReferenceTrajectory(std::vector<ReferenceRow> rows);

  /// Delimited text with header t,f_x,f_y,f1_z,f2_z,tau_x,tau_y,tau_z (SI units).
  /// Throws NotFoundError or ScenarioConfigError.
  static ReferenceTrajectory load_csv(const std::filesystem::path& path);

  /// Ramps linearly from zero to `u` over `ramp` seconds, then holds.
  static ReferenceTrajectory constant(const Vec7& u, double ramp = 0.0);

  /// Alternates between `low` and `high` every `half_period` seconds, starting
  /// low, until `duration`. Steps are instantaneous.
  static ReferenceTrajectory steps(const Vec7& low, const Vec7& high, double half_period, double duration);

  Vec7 at(double t) const;
  const std::vector<ReferenceRow>& rows() const { return rows_; }

 private:
  std::vector<ReferenceRow> rows_;
};

}  // namespace admitune::sim
