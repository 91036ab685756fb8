#pragma once

#include <cstddef>
#include <functional>

#include "admitune/runlog.hpp"
#include "admitune/scenario.hpp"

namespace admitune::sim {

/// Runs the closed loop for `scenario.steps()` periods. Each period: plant
/// step, fingertip wrench estimate, controller update, then (if enabled) one
/// tuner update whose gains apply from the next period. Equal scenarios,
/// seeds included, give bit-identical logs. Throws ScenarioConfigError.
RunLog run_scenario(const Scenario& scenario);

/// Called after every tuner update with the step index and the tuner state.
using TunerObserver = std::function<void(std::size_t, const autotune::TunerState&)>;
RunLog run_scenario(const Scenario& scenario, const TunerObserver& observer);

}  // namespace admitune::sim
