// Command-line front end over the C API: run, compare, sweep.

#include <cstdio>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "admitune/admitune.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

using ScenarioPtr = std::unique_ptr<admitune_scenario, decltype(&admitune_scenario_free)>;
using LogPtr = std::unique_ptr<admitune_runlog, decltype(&admitune_runlog_free)>;

int exit_code(admitune_status s) {
  switch (s) {
    case ADMITUNE_OK: return kExitOk;
    case ADMITUNE_ERR_NOT_FOUND:
    case ADMITUNE_ERR_SCENARIO_CONFIG:
    case ADMITUNE_ERR_INVALID_ARGUMENT: return kExitUsage;
    default: return kExitRuntime;
  }
}

int report(admitune_status s) {
  std::fprintf(stderr, "admitune: %s\n", *admitune_last_error() ? admitune_last_error() : admitune_status_string(s));
  return exit_code(s);
}

std::string summary_text(const admitune_runlog* log, double band) {
  size_t needed = 0;
  admitune_runlog_summary_text(log, band, nullptr, 0, &needed);
  std::string text(needed, '\0');
  if (admitune_runlog_summary_text(log, band, text.data(), text.size(), &needed) != ADMITUNE_OK) return {};
  text.resize(needed - 1);
  return text;
}

struct RunOptions {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  bool no_autotune = false;
  std::string out = ".";
  std::optional<double> duration;
  double band = 0.05;
};

admitune_status load(const RunOptions& o, ScenarioPtr& sc) {
  admitune_scenario* raw = nullptr;
  if (admitune_status s = admitune_scenario_load(o.scenario.c_str(), &raw); s != ADMITUNE_OK) return s;
  sc.reset(raw);
  if (o.seed) admitune_scenario_set_seed(sc.get(), *o.seed);
  if (o.no_autotune) admitune_scenario_set_autotune(sc.get(), 0);
  if (o.duration) {
    if (admitune_status s = admitune_scenario_set_duration(sc.get(), *o.duration); s != ADMITUNE_OK) return s;
  }
  return ADMITUNE_OK;
}

std::string log_path(const RunOptions& o, const admitune_scenario* sc, const std::string& suffix) {
  const char* name = nullptr;
  admitune_scenario_name(sc, &name);
  std::string file = name && *name ? name : std::filesystem::path(o.scenario).stem().string();
  file += suffix + ".csv";
  return (std::filesystem::path(o.out) / file).string();
}

int cmd_run(const RunOptions& o) {
  ScenarioPtr sc(nullptr, admitune_scenario_free);
  if (admitune_status s = load(o, sc); s != ADMITUNE_OK) return report(s);

  admitune_runlog* raw = nullptr;
  if (admitune_status s = admitune_run(sc.get(), &raw); s != ADMITUNE_OK) return report(s);
  LogPtr log(raw, admitune_runlog_free);

  std::error_code ec;
  std::filesystem::create_directories(o.out, ec);
  const std::string path = log_path(o, sc.get(), o.no_autotune ? "_fixed" : "");
  if (admitune_status s = admitune_runlog_write(log.get(), path.c_str()); s != ADMITUNE_OK) return report(s);

  std::printf("log=%s\n%s", path.c_str(), summary_text(log.get(), o.band).c_str());
  return kExitOk;
}

int cmd_compare(const std::string& a_path, const std::string& b_path, double after, double window) {
  admitune_runlog* a = nullptr;
  admitune_runlog* b = nullptr;
  if (admitune_status s = admitune_runlog_load(a_path.c_str(), &a); s != ADMITUNE_OK) return report(s);
  LogPtr la(a, admitune_runlog_free);
  if (admitune_status s = admitune_runlog_load(b_path.c_str(), &b); s != ADMITUNE_OK) return report(s);
  LogPtr lb(b, admitune_runlog_free);

  size_t needed = 0;
  admitune_status s = admitune_compare_text(a, b, after, window, nullptr, 0, &needed);
  if (s != ADMITUNE_OK && s != ADMITUNE_ERR_BUFFER_TOO_SMALL) return report(s);
  std::string text(needed, '\0');
  if ((s = admitune_compare_text(a, b, after, window, text.data(), text.size(), &needed)) != ADMITUNE_OK) {
    return report(s);
  }
  text.resize(needed - 1);
  std::printf("%s", text.c_str());
  return kExitOk;
}

int cmd_sweep(const RunOptions& o, const std::vector<double>& scales, bool write_logs) {
  ScenarioPtr base(nullptr, admitune_scenario_free);
  if (admitune_status s = load(o, base); s != ADMITUNE_OK) return report(s);
  if (write_logs) {
    std::error_code ec;
    std::filesystem::create_directories(o.out, ec);
  }

  std::printf("scale,final_h2,mean_h2,peak_h2,convergence_time,slip_violations\n");
  for (double scale : scales) {
    admitune_scenario* raw = nullptr;
    if (admitune_status s = admitune_scenario_clone(base.get(), &raw); s != ADMITUNE_OK) return report(s);
    ScenarioPtr sc(raw, admitune_scenario_free);
    if (admitune_status s = admitune_scenario_scale_process_noise(sc.get(), scale); s != ADMITUNE_OK) {
      return report(s);
    }
    admitune_runlog* lraw = nullptr;
    if (admitune_status s = admitune_run(sc.get(), &lraw); s != ADMITUNE_OK) return report(s);
    LogPtr log(lraw, admitune_runlog_free);

    admitune_summary sum{};
    admitune_runlog_summary(log.get(), o.band, &sum);
    std::printf("%.9g,%.9g,%.9g,%.9g,", scale, sum.final_h2, sum.mean_h2, sum.peak_h2);
    if (sum.converged) std::printf("%.9g,", sum.convergence_time);
    else std::printf("never,");
    std::printf("%zu\n", sum.slip_violations);

    if (write_logs) {
      char suffix[64];
      std::snprintf(suffix, sizeof suffix, "_scale%g", scale);
      const std::string path = log_path(o, sc.get(), suffix);
      if (admitune_status s = admitune_runlog_write(log.get(), path.c_str()); s != ADMITUNE_OK) return report(s);
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Admittance control with online gain tuning: simulation front end"};
  app.require_subcommand(1);

  RunOptions run_opts;
  auto* run = app.add_subcommand("run", "Run a scenario, write its log and print a key=value summary");
  run->add_option("scenario", run_opts.scenario, "Scenario YAML file")->required();
  run->add_option("--seed", run_opts.seed, "Override the scenario seed")->check(CLI::NonNegativeNumber);
  run->add_flag("--no-autotune", run_opts.no_autotune, "Keep the initial gains fixed");
  run->add_option("--out", run_opts.out, "Output directory for the log")->capture_default_str();
  run->add_option("--duration", run_opts.duration, "Override the duration in seconds")->check(CLI::PositiveNumber);
  run->add_option("--band", run_opts.band, "Convergence band as a fraction of the reference")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  std::string log_a, log_b;
  double after = 0.0;
  double window = 1.0;
  auto* compare = app.add_subcommand("compare", "Compare the H2 norm of two logs (a vs b)");
  compare->add_option("log_a", log_a, "First log")->required();
  compare->add_option("log_b", log_b, "Second log")->required();
  compare->add_option("--after", after, "Only count steps at or after this time, s")->capture_default_str();
  compare->add_option("--window", window, "Window length for the per-window table, s")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  RunOptions sweep_opts;
  std::vector<double> scales{0.1, 1.0, 10.0};
  bool sweep_logs = false;
  auto* sweep = app.add_subcommand("sweep", "Run a scenario over a grid of process-noise scales");
  sweep->add_option("scenario", sweep_opts.scenario, "Scenario YAML file")->required();
  sweep->add_option("--scales", scales, "Multipliers applied to the process covariance")
      ->delimiter(',')
      ->capture_default_str();
  sweep->add_option("--seed", sweep_opts.seed, "Override the scenario seed")->check(CLI::NonNegativeNumber);
  sweep->add_flag("--no-autotune", sweep_opts.no_autotune, "Keep the initial gains fixed");
  sweep->add_option("--duration", sweep_opts.duration, "Override the duration in seconds")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--out", sweep_opts.out, "Write one log per scale into this directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (*run) return cmd_run(run_opts);
  if (*compare) return cmd_compare(log_a, log_b, after, window);
  sweep_logs = sweep->count("--out") > 0;
  for (double s : scales) {
    if (!(s >= 0.0)) {
      std::fprintf(stderr, "admitune: scales must be non-negative\n");
      return kExitUsage;
    }
  }
  return cmd_sweep(sweep_opts, scales, sweep_logs);
}
