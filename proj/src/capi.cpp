#include "admitune/admitune.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "admitune/errors.hpp"
#include "admitune/runlog.hpp"
#include "admitune/scenario.hpp"
#include "admitune/simulation.hpp"
#include "admitune/wrench.hpp"

struct admitune_scenario {
  admitune::sim::Scenario value;
};

struct admitune_runlog {
  admitune::sim::RunLog value;
};

namespace {

thread_local std::string g_last_error;

admitune_status from_code(admitune::ErrorCode code) {
  using admitune::ErrorCode;
  switch (code) {
    case ErrorCode::kInvalidArgument: return ADMITUNE_ERR_INVALID_ARGUMENT;
    case ErrorCode::kGimbalLock: return ADMITUNE_ERR_GIMBAL_LOCK;
    case ErrorCode::kCovarianceFactorization: return ADMITUNE_ERR_COVARIANCE;
    case ErrorCode::kSingularInnovation: return ADMITUNE_ERR_SINGULAR_INNOVATION;
    case ErrorCode::kScenarioConfig: return ADMITUNE_ERR_SCENARIO_CONFIG;
    case ErrorCode::kNotFound: return ADMITUNE_ERR_NOT_FOUND;
    case ErrorCode::kLogMismatch: return ADMITUNE_ERR_LOG_MISMATCH;
    case ErrorCode::kIo: return ADMITUNE_ERR_IO;
  }
  return ADMITUNE_ERR_INTERNAL;
}

admitune_status fail(admitune_status status, const char* message) {
  g_last_error = message;
  return status;
}

template <typename F>
admitune_status guarded(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const admitune::Error& e) {
    return fail(from_code(e.code()), e.what());
  } catch (const std::invalid_argument& e) {
    return fail(ADMITUNE_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(ADMITUNE_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(ADMITUNE_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(ADMITUNE_ERR_INTERNAL, "unknown error");
  }
}

#define ADMITUNE_REQUIRE(cond, msg) \
  if (!(cond)) return fail(ADMITUNE_ERR_INVALID_ARGUMENT, msg)

admitune_status copy_text(const std::string& text, char* buffer, size_t capacity, size_t* needed) {
  if (needed) *needed = text.size() + 1;
  if (!buffer || capacity < text.size() + 1) {
    if (buffer && capacity > 0) buffer[0] = '\0';
    return fail(ADMITUNE_ERR_BUFFER_TOO_SMALL, "output buffer too small");
  }
  std::memcpy(buffer, text.c_str(), text.size() + 1);
  return ADMITUNE_OK;
}

}  // namespace

extern "C" {

const char* admitune_last_error(void) { return g_last_error.c_str(); }

const char* admitune_status_string(admitune_status status) {
  switch (status) {
    case ADMITUNE_OK: return "ok";
    case ADMITUNE_ERR_INVALID_ARGUMENT: return "invalid argument";
    case ADMITUNE_ERR_NOT_FOUND: return "not found";
    case ADMITUNE_ERR_SCENARIO_CONFIG: return "scenario config error";
    case ADMITUNE_ERR_GIMBAL_LOCK: return "gimbal lock";
    case ADMITUNE_ERR_COVARIANCE: return "covariance factorization failed";
    case ADMITUNE_ERR_SINGULAR_INNOVATION: return "singular innovation covariance";
    case ADMITUNE_ERR_LOG_MISMATCH: return "log mismatch";
    case ADMITUNE_ERR_IO: return "i/o error";
    case ADMITUNE_ERR_BUFFER_TOO_SMALL: return "buffer too small";
    case ADMITUNE_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* admitune_version(void) { return "0.1.0"; }

admitune_status admitune_scenario_load(const char* path, admitune_scenario** out) {
  ADMITUNE_REQUIRE(path && out, "null argument");
  return guarded([&] {
    *out = new admitune_scenario{admitune::sim::load_scenario(path)};
    return ADMITUNE_OK;
  });
}

admitune_status admitune_scenario_parse(const char* yaml, const char* base_dir, admitune_scenario** out) {
  ADMITUNE_REQUIRE(yaml && out, "null argument");
  return guarded([&] {
    *out = new admitune_scenario{admitune::sim::parse_scenario(yaml, base_dir ? base_dir : ".")};
    return ADMITUNE_OK;
  });
}

admitune_status admitune_scenario_clone(const admitune_scenario* scenario, admitune_scenario** out) {
  ADMITUNE_REQUIRE(scenario && out, "null argument");
  return guarded([&] {
    *out = new admitune_scenario{scenario->value};
    return ADMITUNE_OK;
  });
}

void admitune_scenario_free(admitune_scenario* scenario) { delete scenario; }

admitune_status admitune_scenario_set_seed(admitune_scenario* scenario, uint64_t seed) {
  ADMITUNE_REQUIRE(scenario, "null scenario");
  scenario->value.seed = seed;
  return ADMITUNE_OK;
}

admitune_status admitune_scenario_set_autotune(admitune_scenario* scenario, int enabled) {
  ADMITUNE_REQUIRE(scenario, "null scenario");
  scenario->value.autotune = enabled != 0;
  return ADMITUNE_OK;
}

admitune_status admitune_scenario_set_duration(admitune_scenario* scenario, double seconds) {
  ADMITUNE_REQUIRE(scenario, "null scenario");
  if (!(seconds > 0.0) || seconds < scenario->value.dt) {
    return fail(ADMITUNE_ERR_SCENARIO_CONFIG, "duration must be positive and at least one period");
  }
  scenario->value.duration = seconds;
  return ADMITUNE_OK;
}

admitune_status admitune_scenario_scale_process_noise(admitune_scenario* scenario, double scale) {
  ADMITUNE_REQUIRE(scenario, "null scenario");
  ADMITUNE_REQUIRE(scale >= 0.0, "process noise scale must be >= 0");
  scenario->value.tuner.process_cov *= scale;
  return ADMITUNE_OK;
}

admitune_status admitune_scenario_name(const admitune_scenario* scenario, const char** name) {
  ADMITUNE_REQUIRE(scenario && name, "null argument");
  *name = scenario->value.name.c_str();
  return ADMITUNE_OK;
}

admitune_status admitune_run(const admitune_scenario* scenario, admitune_runlog** out) {
  ADMITUNE_REQUIRE(scenario && out, "null argument");
  return guarded([&] {
    *out = new admitune_runlog{admitune::sim::run_scenario(scenario->value)};
    return ADMITUNE_OK;
  });
}

admitune_status admitune_runlog_write(const admitune_runlog* log, const char* path) {
  ADMITUNE_REQUIRE(log && path, "null argument");
  return guarded([&] {
    admitune::sim::write_runlog(log->value, path);
    return ADMITUNE_OK;
  });
}

admitune_status admitune_runlog_load(const char* path, admitune_runlog** out) {
  ADMITUNE_REQUIRE(path && out, "null argument");
  return guarded([&] {
    *out = new admitune_runlog{admitune::sim::load_runlog(path)};
    return ADMITUNE_OK;
  });
}

void admitune_runlog_free(admitune_runlog* log) { delete log; }

size_t admitune_runlog_size(const admitune_runlog* log) { return log ? log->value.records.size() : 0; }

admitune_status admitune_runlog_record(const admitune_runlog* log, size_t index, admitune_record* out) {
  ADMITUNE_REQUIRE(log && out, "null argument");
  ADMITUNE_REQUIRE(index < log->value.records.size(), "record index out of range");
  const auto& r = log->value.records[index];
  out->t = r.t;
  out->h2 = r.h2;
  out->ref_norm = r.ref_norm;
  out->grasp_ref = r.grasp_ref;
  out->grasp_meas = r.grasp_meas;
  for (int i = 0; i < 7; ++i) {
    out->ref[i] = r.ref[i];
    out->meas[i] = r.meas[i];
  }
  for (int i = 0; i < 24; ++i) out->theta[i] = r.theta[i];
  out->slip = r.slip ? 1 : 0;
  return ADMITUNE_OK;
}

admitune_status admitune_runlog_summary(const admitune_runlog* log, double band, admitune_summary* out) {
  ADMITUNE_REQUIRE(log && out, "null argument");
  ADMITUNE_REQUIRE(band > 0.0, "band must be positive");
  return guarded([&] {
    const auto s = admitune::sim::summarize(log->value, band);
    out->steps = s.steps;
    out->dt = s.dt;
    out->duration = s.duration;
    out->final_h2 = s.final_h2;
    out->mean_h2 = s.mean_h2;
    out->peak_h2 = s.peak_h2;
    out->converged = s.convergence_time.has_value() ? 1 : 0;
    out->convergence_time = s.convergence_time.value_or(-1.0);
    out->slip_violations = s.slip_violations;
    for (int i = 0; i < 24; ++i) out->theta[i] = s.theta[i];
    return ADMITUNE_OK;
  });
}

admitune_status admitune_compare(const admitune_runlog* a, const admitune_runlog* b, double after,
                                 admitune_comparison* out) {
  ADMITUNE_REQUIRE(a && b && out, "null argument");
  return guarded([&] {
    const auto c = admitune::sim::compare_runs(a->value, b->value, after);
    out->fraction_a_below_b = c.fraction_a_below_b;
    out->mean_delta_h2 = c.mean_delta;
    out->compared_steps = c.compared_steps;
    out->converged_a = c.convergence_a.has_value() ? 1 : 0;
    out->converged_b = c.convergence_b.has_value() ? 1 : 0;
    out->convergence_a = c.convergence_a.value_or(-1.0);
    out->convergence_b = c.convergence_b.value_or(-1.0);
    return ADMITUNE_OK;
  });
}

admitune_status admitune_runlog_summary_text(const admitune_runlog* log, double band, char* buffer,
                                             size_t capacity, size_t* needed) {
  ADMITUNE_REQUIRE(log, "null log");
  ADMITUNE_REQUIRE(band > 0.0, "band must be positive");
  return guarded([&] {
    return copy_text(admitune::sim::format_summary(admitune::sim::summarize(log->value, band)), buffer, capacity,
                     needed);
  });
}

admitune_status admitune_compare_text(const admitune_runlog* a, const admitune_runlog* b, double after,
                                      double window, char* buffer, size_t capacity, size_t* needed) {
  ADMITUNE_REQUIRE(a && b, "null log");
  ADMITUNE_REQUIRE(window > 0.0, "window must be positive");
  return guarded([&] {
    return copy_text(admitune::sim::format_comparison(admitune::sim::compare_runs(a->value, b->value, after, window)),
                     buffer, capacity, needed);
  });
}

admitune_status admitune_estimate_fingertip_wrench(const double b[7], const double p1[3], const double p2[3],
                                                   double u[7]) {
  ADMITUNE_REQUIRE(b && p1 && p2 && u, "null argument");
  return guarded([&] {
    admitune::SensorReading reading;
    for (int i = 0; i < 7; ++i) reading.b[i] = b[i];
    const auto est = admitune::estimate_fingertip_wrench(reading, admitune::Vec3(p1[0], p1[1], p1[2]),
                                                         admitune::Vec3(p2[0], p2[1], p2[2]));
    for (int i = 0; i < 7; ++i) u[i] = est.u[i];
    return ADMITUNE_OK;
  });
}

}  // extern "C"
