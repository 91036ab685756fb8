#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "admitune/autotune.hpp"
#include "admitune/scenario.hpp"
#include "admitune/types.hpp"

namespace admitune::sim {

/// One control period. `x`/`xd` are the tuned channel state (grasp channel in
/// the z slot); `ref`/`meas` use the reduced layout
/// [f_x, f_y, f1_z, f2_z, tau_x, tau_y, tau_z]; `theta` is the estimate after
/// this period's update and `h` the objectives at its center sigma point.
struct RunRecord {
  std::size_t step = 0;
  double t = 0.0;
  Vec6 x = Vec6::Zero();
  Vec6 xd = Vec6::Zero();
  Vec7 ref = Vec7::Zero();
  Vec7 meas = Vec7::Zero();
  double grasp_ref = 0.0;
  double grasp_meas = 0.0;
  autotune::ParamVec theta = autotune::ParamVec::Zero();
  autotune::ObjVec h = autotune::ObjVec::Zero();
  double h2 = 0.0;
  double ref_norm = 0.0;
  bool slip = false;
};

struct RunLog {
  std::string scenario;
  Mode mode = Mode::kGrasp;
  double dt = 0.01;
  std::uint64_t seed = 0;
  std::vector<RunRecord> records;

  double duration() const { return dt * static_cast<double>(records.size()); }
};

/// CSV column names in file order.
const std::vector<std::string>& runlog_columns();

/// Writes the log: one `#` metadata line, the header, then one row per step
/// with every number printed to round-trip precision. Throws IoError.
void write_runlog(const RunLog& log, const std::filesystem::path& path);
std::string format_runlog(const RunLog& log);

/// Throws NotFoundError or IoError on a malformed file.
RunLog load_runlog(const std::filesystem::path& path);

/// ||W_meas - W_ref||.
double h2_norm(const Vec6& measured, const Vec6& reference);

/// Tracking error and reference magnitude over the components a mode tracks:
/// both normals for grasp, all seven for full-wrench and climb, the six foot
/// components for point contact.
struct TrackingError {
  double h2 = 0.0;
  double ref_norm = 0.0;
};
TrackingError tracking_error(Mode mode, const Vec7& measured, const Vec7& reference);

/// First time after which h2 <= band * ref_norm for the rest of the run;
/// nullopt means never.
std::optional<double> convergence_time(const RunLog& log, double band = 0.05);

struct RunSummary {
  std::size_t steps = 0;
  double dt = 0.0;
  double duration = 0.0;
  double final_h2 = 0.0;
  double mean_h2 = 0.0;
  double peak_h2 = 0.0;
  std::optional<double> convergence_time;
  std::size_t slip_violations = 0;
  autotune::ParamVec theta = autotune::ParamVec::Zero();
};

RunSummary summarize(const RunLog& log, double band = 0.05);

/// Stable key=value lines; keys are never renamed.
std::string format_summary(const RunSummary& summary);

struct WindowStats {
  double t_begin = 0.0;
  double t_end = 0.0;
  double mean_a = 0.0;
  double mean_b = 0.0;
  double max_a = 0.0;
  double max_b = 0.0;
};

struct Comparison {
  std::vector<WindowStats> windows;
  std::optional<double> convergence_a;
  std::optional<double> convergence_b;
  double fraction_a_below_b = 0.5;  // over steps with t >= after; ties count 1/2
  double mean_delta = 0.0;          // mean(h2_a - h2_b) over the same steps
  std::size_t compared_steps = 0;
};

/// Throws LogMismatchError when the logs differ in dt or length.
Comparison compare_runs(const RunLog& a, const RunLog& b, double after = 0.0, double window = 1.0);

std::string format_comparison(const Comparison& c);

}  // namespace admitune::sim
