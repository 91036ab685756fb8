#include "admitune/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "admitune/errors.hpp"

namespace admitune::sim {

const char* mode_name(Mode mode) {
  switch (mode) {
    case Mode::kGrasp: return "grasp";
    case Mode::kFullWrench: return "full_wrench";
    case Mode::kClimb: return "climb";
    case Mode::kPointContact: return "point_contact";
  }
  return "unknown";
}

void Scenario::validate() const {
  if (!(duration > 0.0) || !std::isfinite(duration)) throw ScenarioConfigError("duration_s must be positive");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ScenarioConfigError("dt_s must be positive");
  if (dt > duration) throw ScenarioConfigError("dt_s must not exceed duration_s");
  if (reference.rows().empty()) throw ScenarioConfigError("scenario has no reference");
  environment.validate();
  try {
    gains.validate();
    if (offset_gains) offset_gains->validate();
    tuner.validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioConfigError(e.what());
  }
  if ((springs.linear.array() < 0.0).any() || (springs.angular.array() < 0.0).any()) {
    throw ScenarioConfigError("initial spring constants must be non-negative");
  }
  if (!initial_cov.allFinite() || !initial_cov.isApprox(initial_cov.transpose())) {
    throw ScenarioConfigError("initial covariance must be symmetric");
  }
  if (std::abs(tuner.dt - dt) > 1e-15) throw ScenarioConfigError("tuner dt must match scenario dt");
}

std::size_t Scenario::steps() const { return static_cast<std::size_t>(std::llround(duration / dt)); }

namespace {

using Key = std::set<std::string>;

void check_keys(const YAML::Node& node, const Key& allowed, const std::string& where) {
  if (!node.IsMap()) throw ScenarioConfigError(where + ": expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw ScenarioConfigError(where + ": unknown key '" + key + "'");
  }
}

double number(const YAML::Node& node, const std::string& where) {
  try {
    const double v = node.as<double>();
    if (!std::isfinite(v)) throw ScenarioConfigError(where + ": not finite");
    return v;
  } catch (const YAML::Exception&) {
    throw ScenarioConfigError(where + ": expected a number");
  }
}

double number_or(const YAML::Node& map, const std::string& key, double fallback, const std::string& where) {
  return map[key] ? number(map[key], where + "." + key) : fallback;
}

/// Scalar (broadcast) or a list of exactly N numbers.
template <int N>
Eigen::Matrix<double, N, 1> vector_or(const YAML::Node& map, const std::string& key,
                                      const Eigen::Matrix<double, N, 1>& fallback, const std::string& where) {
  const YAML::Node node = map[key];
  if (!node) return fallback;
  const std::string path = where + "." + key;
  if (node.IsScalar()) return Eigen::Matrix<double, N, 1>::Constant(number(node, path));
  if (!node.IsSequence() || node.size() != static_cast<std::size_t>(N)) {
    throw ScenarioConfigError(path + ": expected a number or a list of " + std::to_string(N));
  }
  Eigen::Matrix<double, N, 1> out;
  for (int i = 0; i < N; ++i) out[i] = number(node[static_cast<std::size_t>(i)], path);
  return out;
}

Environment parse_environment(const YAML::Node& node) {
  const std::string where = "environment";
  check_keys(node,
             {"preset", "kp_true_n_per_m", "ktheta_true_nm_per_rad", "contact_origin_m", "half_width_m",
              "lambda_true", "force_noise_n", "torque_noise_nm", "actuator_lag_s", "workspace_min_m",
              "workspace_max_m", "reach_radius_m"},
             where);
  Environment env = node["preset"] ? environment_preset(node["preset"].as<std::string>()) : Environment{};
  env.kp_true = vector_or<3>(node, "kp_true_n_per_m", env.kp_true, where);
  env.ktheta_true = vector_or<3>(node, "ktheta_true_nm_per_rad", env.ktheta_true, where);
  env.contact_origin = vector_or<3>(node, "contact_origin_m", env.contact_origin, where);
  env.half_width = number_or(node, "half_width_m", env.half_width, where);
  env.lambda_true = number_or(node, "lambda_true", env.lambda_true, where);
  env.force_noise = number_or(node, "force_noise_n", env.force_noise, where);
  env.torque_noise = number_or(node, "torque_noise_nm", env.torque_noise, where);
  env.actuator_lag = number_or(node, "actuator_lag_s", env.actuator_lag, where);
  env.workspace.lower = vector_or<3>(node, "workspace_min_m", env.workspace.lower, where);
  env.workspace.upper = vector_or<3>(node, "workspace_max_m", env.workspace.upper, where);
  env.workspace.reach_radius = number_or(node, "reach_radius_m", env.workspace.reach_radius, where);
  return env;
}

Vec7 parse_wrench_row(const YAML::Node& node, const std::string& where) {
  check_keys(node, {"t_s", "f_x_n", "f_y_n", "f1_z_n", "f2_z_n", "tau_x_nm", "tau_y_nm", "tau_z_nm"}, where);
  Vec7 u;
  u << number_or(node, "f_x_n", 0.0, where), number_or(node, "f_y_n", 0.0, where),
      number_or(node, "f1_z_n", 0.0, where), number_or(node, "f2_z_n", 0.0, where),
      number_or(node, "tau_x_nm", 0.0, where), number_or(node, "tau_y_nm", 0.0, where),
      number_or(node, "tau_z_nm", 0.0, where);
  return u;
}

ReferenceTrajectory parse_reference(const YAML::Node& node, const std::filesystem::path& base_dir,
                                    double duration) {
  const std::string where = "reference";
  check_keys(node, {"file", "generator", "value", "ramp_s", "low", "high", "half_period_s", "keyframes"}, where);
  if (node["file"]) {
    std::filesystem::path file = node["file"].as<std::string>();
    if (file.is_relative()) file = base_dir / file;
    return ReferenceTrajectory::load_csv(file);
  }
  if (!node["generator"]) throw ScenarioConfigError("reference: needs 'file' or 'generator'");
  const auto gen = node["generator"].as<std::string>();
  if (gen == "constant") {
    if (!node["value"]) throw ScenarioConfigError("reference.value is required for generator 'constant'");
    return ReferenceTrajectory::constant(parse_wrench_row(node["value"], where + ".value"),
                                         number_or(node, "ramp_s", 0.0, where));
  }
  if (gen == "steps") {
    if (!node["low"] || !node["high"] || !node["half_period_s"]) {
      throw ScenarioConfigError("reference: generator 'steps' needs low, high and half_period_s");
    }
    return ReferenceTrajectory::steps(parse_wrench_row(node["low"], where + ".low"),
                                      parse_wrench_row(node["high"], where + ".high"),
                                      number(node["half_period_s"], where + ".half_period_s"), duration);
  }
  if (gen == "keyframes") {
    const YAML::Node frames = node["keyframes"];
    if (!frames || !frames.IsSequence() || frames.size() == 0) {
      throw ScenarioConfigError("reference.keyframes must be a non-empty list");
    }
    std::vector<ReferenceRow> rows;
    for (std::size_t i = 0; i < frames.size(); ++i) {
      const std::string at = where + ".keyframes[" + std::to_string(i) + "]";
      if (!frames[i]["t_s"]) throw ScenarioConfigError(at + ": t_s is required");
      rows.push_back({number(frames[i]["t_s"], at + ".t_s"), parse_wrench_row(frames[i], at)});
    }
    return ReferenceTrajectory(std::move(rows));
  }
  throw ScenarioConfigError("reference: unknown generator '" + gen + "'");
}

AxisMask parse_axes(const YAML::Node& node) {
  static const std::vector<std::string> kNames{"x", "y", "z", "roll", "pitch", "yaw"};
  if (!node.IsSequence()) throw ScenarioConfigError("tuner.axes: expected a list of axis names");
  AxisMask mask;
  for (const auto& item : node) {
    const auto name = item.as<std::string>();
    const auto it = std::find(kNames.begin(), kNames.end(), name);
    if (it == kNames.end()) throw ScenarioConfigError("tuner.axes: unknown axis '" + name + "'");
    mask.set(static_cast<std::size_t>(it - kNames.begin()));
  }
  return mask;
}

autotune::ParamVec parse_param_diag(const YAML::Node& node, const std::string& where) {
  autotune::ParamVec d = autotune::ParamVec::Zero();
  if (!node) return d;
  check_keys(node, {"mass", "damping", "force_gain", "kp", "ktheta"}, where);
  d.segment<6>(0) = vector_or<6>(node, "mass", Vec6::Zero(), where);
  d.segment<6>(6) = vector_or<6>(node, "damping", Vec6::Zero(), where);
  d.segment<6>(12) = vector_or<6>(node, "force_gain", Vec6::Zero(), where);
  d.segment<3>(18) = vector_or<3>(node, "kp", Vec3::Zero(), where);
  d.segment<3>(21) = vector_or<3>(node, "ktheta", Vec3::Zero(), where);
  return d;
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ScenarioConfigError(std::string("scenario is not valid YAML: ") + e.what());
  }
  check_keys(root,
             {"name", "mode", "seed", "duration_s", "dt_s", "autotune", "environment", "reference", "gains",
              "offset_gains", "tuner"},
             "scenario");

  Scenario sc;
  try {
    sc.name = root["name"] ? root["name"].as<std::string>() : "scenario";
    const auto mode = root["mode"] ? root["mode"].as<std::string>() : std::string("grasp");
    if (mode == "grasp") sc.mode = Mode::kGrasp;
    else if (mode == "full_wrench") sc.mode = Mode::kFullWrench;
    else if (mode == "climb") sc.mode = Mode::kClimb;
    else if (mode == "point_contact") sc.mode = Mode::kPointContact;
    else throw ScenarioConfigError("scenario.mode: unknown mode '" + mode + "'");

    if (root["seed"]) {
      const auto seed = root["seed"].as<long long>();
      if (seed < 0) throw ScenarioConfigError("scenario.seed must be non-negative");
      sc.seed = static_cast<std::uint64_t>(seed);
    }
    sc.duration = number_or(root, "duration_s", sc.duration, "scenario");
    sc.dt = number_or(root, "dt_s", sc.dt, "scenario");
    sc.autotune = root["autotune"] ? root["autotune"].as<bool>() : true;

    if (root["environment"]) sc.environment = parse_environment(root["environment"]);
    if (!root["reference"]) throw ScenarioConfigError("scenario.reference is required");
    sc.reference = parse_reference(root["reference"], base_dir, sc.duration);

    const YAML::Node g = root["gains"] ? root["gains"] : YAML::Node(YAML::NodeType::Map);
    check_keys(g,
               {"mass_kg", "damping_n_s_per_m", "stiffness_n_per_m", "force_gain", "kp_n_per_m",
                "ktheta_nm_per_rad"},
               "gains");
    sc.gains.mass = vector_or<6>(g, "mass_kg", sc.gains.mass, "gains");
    sc.gains.damping = vector_or<6>(g, "damping_n_s_per_m", sc.gains.damping, "gains");
    sc.gains.stiffness = vector_or<6>(g, "stiffness_n_per_m", sc.gains.stiffness, "gains");
    sc.gains.force_gain = vector_or<6>(g, "force_gain", sc.gains.force_gain, "gains");
    sc.springs.linear = vector_or<3>(g, "kp_n_per_m", Vec3::Constant(100.0), "gains");
    sc.springs.angular = vector_or<3>(g, "ktheta_nm_per_rad", Vec3::Constant(1.0), "gains");

    if (const YAML::Node o = root["offset_gains"]) {
      check_keys(o, {"mass_kg", "damping_n_s_per_m", "stiffness_n_per_m", "force_gain"}, "offset_gains");
      GainSet og = sc.gains;
      og.mass = vector_or<6>(o, "mass_kg", og.mass, "offset_gains");
      og.damping = vector_or<6>(o, "damping_n_s_per_m", og.damping, "offset_gains");
      og.stiffness = vector_or<6>(o, "stiffness_n_per_m", og.stiffness, "offset_gains");
      og.force_gain = vector_or<6>(o, "force_gain", og.force_gain, "offset_gains");
      sc.offset_gains = og;
    }

    autotune::TunerConfig& tc = sc.tuner;
    tc.axes = (sc.mode == Mode::kGrasp || sc.mode == Mode::kPointContact) ? AxisMask(0b000100) : kAllAxes;
    const YAML::Node t = root["tuner"] ? root["tuner"] : YAML::Node(YAML::NodeType::Map);
    check_keys(t,
               {"window_steps", "alpha", "beta", "kappa", "slip_cost", "kinematic_cost", "lambda",
                "accel_limit_linear_m_per_s2", "accel_limit_angular_rad_per_s2", "axes", "process_noise",
                "initial_covariance", "observation_noise"},
               "tuner");
    if (t["window_steps"]) tc.window = t["window_steps"].as<int>();
    tc.unscented.alpha = number_or(t, "alpha", tc.unscented.alpha, "tuner");
    tc.unscented.beta = number_or(t, "beta", tc.unscented.beta, "tuner");
    tc.unscented.kappa = number_or(t, "kappa", tc.unscented.kappa, "tuner");
    tc.slip_cost = number_or(t, "slip_cost", tc.slip_cost, "tuner");
    tc.kinematic_cost = number_or(t, "kinematic_cost", tc.kinematic_cost, "tuner");
    tc.friction.lambda = number_or(t, "lambda", tc.friction.lambda, "tuner");
    tc.accel_limit.linear = number_or(t, "accel_limit_linear_m_per_s2", tc.accel_limit.linear, "tuner");
    tc.accel_limit.angular = number_or(t, "accel_limit_angular_rad_per_s2", tc.accel_limit.angular, "tuner");
    if (t["axes"]) tc.axes = parse_axes(t["axes"]);
    tc.process_cov = parse_param_diag(t["process_noise"], "tuner.process_noise").asDiagonal();
    sc.initial_cov = parse_param_diag(t["initial_covariance"], "tuner.initial_covariance").asDiagonal();

    autotune::ObjVec cv = autotune::ObjVec::Ones();
    if (const YAML::Node o = t["observation_noise"]) {
      check_keys(o, {"reference", "spring", "forces", "kinematic"}, "tuner.observation_noise");
      cv.segment<6>(0) = vector_or<6>(o, "reference", Vec6::Ones(), "tuner.observation_noise");
      cv.segment<6>(6) = vector_or<6>(o, "spring", Vec6::Ones(), "tuner.observation_noise");
      cv[12] = number_or(o, "forces", 1.0, "tuner.observation_noise");
      cv[13] = number_or(o, "kinematic", 1.0, "tuner.observation_noise");
    }
    tc.observation_cov = cv.asDiagonal();
    tc.dt = sc.dt;
    tc.stiffness = sc.gains.stiffness;
    tc.bounds = sc.environment.workspace;
  } catch (const YAML::Exception& e) {
    throw ScenarioConfigError(std::string("scenario: ") + e.what());
  }
  sc.validate();
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("scenario not found: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.parent_path());
}

}  // namespace admitune::sim
