#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "admitune/admittance.hpp"
#include "admitune/autotune.hpp"
#include "admitune/plant.hpp"
#include "admitune/reference.hpp"

namespace admitune::sim {

enum class Mode { kGrasp, kFullWrench, kClimb, kPointContact };

const char* mode_name(Mode mode);

struct Scenario {
  std::string name;
  Mode mode = Mode::kGrasp;
  Environment environment;
  ReferenceTrajectory reference;
  GainSet gains;                          // initial admittance gains
  std::optional<GainSet> offset_gains;    // fixed offset-channel gains; shares `gains` when unset
  autotune::SpringParams springs;         // initial spring estimate
  autotune::TunerConfig tuner;
  autotune::ParamCov initial_cov = autotune::ParamCov::Zero();
  double duration = 10.0;                 // s
  double dt = 0.01;                       // s
  bool autotune = true;
  std::uint64_t seed = 0;

  /// Throws ScenarioConfigError.
  void validate() const;
  std::size_t steps() const;
};

/// Parses a YAML scenario. Relative reference file paths resolve against
/// `base_dir`. Throws ScenarioConfigError (or NotFoundError for a missing
/// reference file).
Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir = ".");

/// Throws NotFoundError("scenario not found: ...") for a missing file.
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace admitune::sim
