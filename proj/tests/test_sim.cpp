#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "admitune/errors.hpp"
#include "admitune/plant.hpp"
#include "admitune/reference.hpp"
#include "admitune/runlog.hpp"
#include "admitune/scenario.hpp"
#include "admitune/simulation.hpp"

using namespace admitune;
using namespace admitune::sim;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "admitune_tests";
  fs::create_directories(dir);
  return dir;
}

Environment quiet_towel() {
  Environment env = environment_preset("towel");
  env.actuator_lag = 0.0;
  return env;
}

PlantCommand press(double depth) {
  PlantCommand c;
  c.dp1_z = -depth;
  c.dp2_z = depth;
  return c;
}

const char* kStableGrasp = R"(
name: stable
mode: grasp
seed: 3
duration_s: 3.0
autotune: false
environment:
  preset: towel
  force_noise_n: 0.02
  actuator_lag_s: 0.0
reference:
  generator: constant
  value: {f1_z_n: 5.0, f2_z_n: -5.0}
gains:
  mass_kg: 1.0
  damping_n_s_per_m: 20.0
  force_gain: 0.5
)";

RunLog synthetic_log(std::vector<double> h2, double ref_norm = 1.0) {
  RunLog log;
  log.scenario = "synthetic";
  log.dt = 0.1;
  for (std::size_t i = 0; i < h2.size(); ++i) {
    RunRecord r;
    r.step = i;
    r.t = 0.1 * static_cast<double>(i);
    r.h2 = h2[i];
    r.ref_norm = ref_norm;
    log.records.push_back(r);
  }
  return log;
}

}  // namespace

// -- plant --------------------------------------------------------------------

TEST_CASE("environment presets") {
  CHECK(environment_preset("hold").kp_true.z() == 2000.0);
  CHECK(environment_preset("towel").kp_true.z() == 200.0);
  CHECK(environment_preset("softball").kp_true.z() == 500.0);
  CHECK_THROWS_AS(environment_preset("sponge"), ScenarioConfigError);
  Environment bad;
  bad.kp_true.x() = -1.0;
  CHECK_THROWS_AS(bad.validate(), ScenarioConfigError);
  bad = {};
  bad.force_noise = -0.1;
  CHECK_THROWS_AS(Plant(bad, ContactKind::kGrasp, 0, 0.01), ScenarioConfigError);
}

TEST_CASE("plant out of contact reads only noise") {
  Plant quiet(quiet_towel(), ContactKind::kGrasp, 1, 0.01);
  PlantCommand open;
  open.dp1_z = 0.01;
  open.dp2_z = -0.01;
  const PlantReading r = quiet.step(open);
  CHECK(r.sensor.b == Vec7::Zero());
  CHECK(r.wrist_fz == 0.0);

  Environment noisy = quiet_towel();
  noisy.force_noise = 0.1;
  Plant plant(noisy, ContactKind::kGrasp, 2, 0.01);
  double sum = 0.0, sum_sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double v = plant.step(open).sensor.b[2];
    sum += v;
    sum_sq += v * v;
  }
  CHECK(std::abs(sum / n) < 5 * 0.1 / std::sqrt(n));
  CHECK(std::sqrt(sum_sq / n) == doctest::Approx(0.1).epsilon(0.03));
}

TEST_CASE("plant normal force follows Hooke's law") {
  Plant plant(quiet_towel(), ContactKind::kGrasp, 1, 0.01);
  const PlantReading r = plant.step(press(0.01));
  CHECK(r.sensor.f1z() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.sensor.f2z() == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(r.wrist_fz == doctest::Approx(0.0).scale(1.0));

  Environment ground = quiet_towel();
  ground.contact_origin = Vec3(0, 0, -0.2);
  Plant foot(ground, ContactKind::kFoot, 1, 0.01);
  PlantCommand c;
  c.pose.position.z() = -0.01;
  CHECK(foot.step(c).foot.force.z() == doctest::Approx(2.0));
}

TEST_CASE("plant clamps the patch torque at the friction limit") {
  Plant plant(quiet_towel(), ContactKind::kGrasp, 1, 0.01);
  plant.step(press(0.01));
  PlantCommand twist = press(0.01);
  twist.pose.orientation.yaw = 1.0;
  const PlantReading r = plant.step(twist);
  CHECK(r.slipping);
  for (int k = 0; k < 2; ++k) {
    CHECK(std::abs(r.truth[k].torque.z()) == 0.5 * std::abs(r.truth[k].force.z()));
  }
  // Holding the twisted pose: the re-anchored patch stays at the limit, no new slip.
  const PlantReading held = plant.step(twist);
  CHECK_FALSE(held.slipping);
  CHECK(std::abs(held.truth[0].torque.z()) <= 0.5 * std::abs(held.truth[0].force.z()));
}

TEST_CASE("plant wrist reading is the sum of the tip wrenches") {
  Plant plant(quiet_towel(), ContactKind::kGrasp, 1, 0.01);
  for (int i = 0; i < 50; ++i) {
    PlantCommand c = press(0.005 + 0.0002 * i);
    c.pose.position = Vec3(0.001 * i, -0.0005 * i, 0.0);
    c.pose.orientation = {0.002 * i, -0.003 * i, 0.004 * i};
    const PlantReading r = plant.step(c);
    Vec3 f = Vec3::Zero(), t = Vec3::Zero();
    for (int k = 0; k < 2; ++k) {
      const Vec3& p = r.tips[k];
      const Vec3& g = r.truth[k].force;
      f += g;
      t += Vec3(p.y() * g.z() - p.z() * g.y(), p.z() * g.x() - p.x() * g.z(), p.x() * g.y() - p.y() * g.x()) +
           r.truth[k].torque;
    }
    CHECK((Eigen::Vector2d(r.sensor.fx(), r.sensor.fy()) - f.head<2>()).norm() < 1e-12);
    CHECK(r.sensor.f1z() == r.truth[0].force.z());
    CHECK(r.sensor.f2z() == r.truth[1].force.z());
    CHECK((r.sensor.torque() - t).norm() < 1e-12);
    CHECK(r.wrist_fz == doctest::Approx(f.z()).scale(1.0));
    for (int k = 0; k < 2; ++k) {
      CHECK(std::abs(r.truth[k].torque.z()) <= 0.5 * std::abs(r.truth[k].force.z()) + 1e-15);
    }
  }
}

TEST_CASE("plant reading is constant for a static pose") {
  Plant plant(quiet_towel(), ContactKind::kGrasp, 1, 0.01);
  PlantCommand c = press(0.008);
  c.pose.orientation.roll = 0.01;
  const Vec7 first = plant.step(c).sensor.b;
  for (int i = 0; i < 100; ++i) CHECK(plant.step(c).sensor.b == first);
}

TEST_CASE("plant actuator lag is first order") {
  Environment env = quiet_towel();
  env.actuator_lag = 0.05;
  Plant plant(env, ContactKind::kGrasp, 1, 0.01);
  const double alpha = 1.0 - std::exp(-0.01 / 0.05);
  const PlantReading r = plant.step(press(0.01));
  CHECK(r.sensor.f1z() == doctest::Approx(200.0 * 0.01 * alpha));
}

// -- reference ----------------------------------------------------------------

TEST_CASE("reference interpolation and steps") {
  Vec7 a = Vec7::Zero(), b = Vec7::Zero();
  a[2] = 10;
  b[2] = 20;
  const ReferenceTrajectory r({{0.0, a}, {1.0, b}, {2.0, b}, {2.0, a}});
  CHECK(r.at(-1.0)[2] == 10.0);
  CHECK(r.at(0.5)[2] == doctest::Approx(15.0));
  CHECK(r.at(1.5)[2] == 20.0);
  CHECK(r.at(2.0)[2] == 10.0);
  CHECK(r.at(5.0)[2] == 10.0);

  CHECK_THROWS_AS(ReferenceTrajectory(std::vector<ReferenceRow>{}), ScenarioConfigError);
  CHECK_THROWS_AS(ReferenceTrajectory(std::vector<ReferenceRow>{{1.0, a}, {0.5, a}}), ScenarioConfigError);

  const auto ramp = ReferenceTrajectory::constant(b, 1.0);
  CHECK(ramp.at(0.0)[2] == 0.0);
  CHECK(ramp.at(0.25)[2] == doctest::Approx(5.0));
  CHECK(ramp.at(3.0)[2] == 20.0);

  const auto sq = ReferenceTrajectory::steps(a, b, 0.25, 1.0);
  CHECK(sq.at(0.1)[2] == 10.0);
  CHECK(sq.at(0.3)[2] == 20.0);
  CHECK(sq.at(0.6)[2] == 10.0);
}

TEST_CASE("reference CSV loading") {
  const fs::path dir = temp_dir();
  {
    std::ofstream f(dir / "ref.csv");
    f << "t,f_x,f_y,f1_z,f2_z,tau_x,tau_y,tau_z\n0,0,0,1,-1,0,0,0\n1,0,0,3,-3,0,0,0.5\n";
  }
  const auto r = ReferenceTrajectory::load_csv(dir / "ref.csv");
  CHECK(r.rows().size() == 2);
  CHECK(r.at(0.5)[2] == doctest::Approx(2.0));
  CHECK(r.at(0.5)[6] == doctest::Approx(0.25));

  {
    std::ofstream f(dir / "bad.csv");
    f << "t,fx\n0,1\n";
  }
  CHECK_THROWS_AS(ReferenceTrajectory::load_csv(dir / "bad.csv"), ScenarioConfigError);
  CHECK_THROWS_AS(ReferenceTrajectory::load_csv(dir / "missing.csv"), NotFoundError);

  const auto trot = ReferenceTrajectory::load_csv(fs::path(ADMITUNE_SOURCE_DIR) / "data" / "trot_steps.csv");
  CHECK(trot.at(0.1)[2] == 10.0);
  CHECK(trot.at(0.3)[2] == 47.0);
}

// -- scenario -----------------------------------------------------------------

TEST_CASE("scenario parsing") {
  const Scenario sc = parse_scenario(kStableGrasp);
  CHECK(sc.name == "stable");
  CHECK(sc.mode == Mode::kGrasp);
  CHECK(sc.seed == 3);
  CHECK(sc.steps() == 300);
  CHECK_FALSE(sc.autotune);
  CHECK(sc.environment.kp_true.z() == 200.0);
  CHECK(sc.environment.force_noise == 0.02);
  CHECK(sc.gains.mass == Vec6::Ones());
  CHECK(sc.gains.force_gain == Vec6::Constant(0.5));
  CHECK(sc.reference.at(1.0)[2] == 5.0);
  CHECK(sc.tuner.axes == AxisMask{0b000100});
  CHECK(sc.tuner.dt == sc.dt);
  CHECK_FALSE(sc.offset_gains.has_value());

  const Scenario full = parse_scenario("mode: full_wrench\nreference: {generator: constant, value: {f_x_n: 1}}\n");
  CHECK(full.tuner.axes == kAllAxes);
}

TEST_CASE("scenario parsing rejects bad input") {
  const std::string ref = "reference: {generator: constant, value: {f1_z_n: 1}}\n";
  CHECK_THROWS_AS(parse_scenario("bogus: 1\n" + ref), ScenarioConfigError);
  CHECK_THROWS_AS(parse_scenario("mode: hover\n" + ref), ScenarioConfigError);
  CHECK_THROWS_AS(parse_scenario("duration_s: -1\n" + ref), ScenarioConfigError);
  CHECK_THROWS_AS(parse_scenario("seed: -4\n" + ref), ScenarioConfigError);
  CHECK_THROWS_AS(parse_scenario("gains: {mass_kg: 0}\n" + ref), ScenarioConfigError);
  CHECK_THROWS_AS(parse_scenario("gains: {mass_kg: [1, 2]}\n" + ref), ScenarioConfigError);
  CHECK_THROWS_AS(parse_scenario("environment: {kp_true_n_per_m: -5}\n" + ref), ScenarioConfigError);
  CHECK_THROWS_AS(parse_scenario("tuner: {axes: [x, w]}\n" + ref), ScenarioConfigError);
  CHECK_THROWS_AS(parse_scenario("name: [\n"), ScenarioConfigError);
  CHECK_THROWS_AS(parse_scenario("name: x\n"), ScenarioConfigError);
  CHECK_THROWS_AS(parse_scenario("reference: {file: nowhere.csv}\n"), NotFoundError);
  CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.yaml"), NotFoundError);
}

TEST_CASE("scenario offset gains") {
  const Scenario sc = parse_scenario(std::string(kStableGrasp) + "offset_gains: {force_gain: 0.2}\n");
  REQUIRE(sc.offset_gains.has_value());
  CHECK(sc.offset_gains->force_gain == Vec6::Constant(0.2));
  CHECK(sc.offset_gains->mass == sc.gains.mass);
  CHECK_NOTHROW(run_scenario(sc));
}

TEST_CASE("bundled scenarios load") {
  for (const char* name : {"towel_grasp", "full_wrench", "climb", "trot_step"}) {
    CAPTURE(name);
    const Scenario sc = load_scenario(fs::path(ADMITUNE_SOURCE_DIR) / "scenarios" / (std::string(name) + ".yaml"));
    CHECK(sc.name == name);
    CHECK_NOTHROW(sc.validate());
  }
}

// -- runlog -------------------------------------------------------------------

TEST_CASE("h2_norm and tracking_error") {
  Vec6 a = Vec6::Zero(), b = Vec6::Zero();
  CHECK(h2_norm(a, a) == 0.0);
  a << 3, 4, 0, 0, 0, 0;
  CHECK(h2_norm(a, b) == 5.0);
  a << 1, -2, 3, -4, 5, -6;
  b << 0.5, 0.5, 0.5, 0.5, 0.5, 0.5;
  double sq = 0.0;
  for (int i = 0; i < 6; ++i) sq += (a[i] - b[i]) * (a[i] - b[i]);
  CHECK(h2_norm(a, b) == doctest::Approx(std::sqrt(sq)).epsilon(1e-15));

  Vec7 m, r;
  m << 1, 1, 6, -6, 0.1, 0.1, 0.1;
  r << 0, 0, 5, -5, 0, 0, 0;
  CHECK(tracking_error(Mode::kGrasp, m, r).h2 == doctest::Approx(std::sqrt(2.0)));
  CHECK(tracking_error(Mode::kGrasp, m, r).ref_norm == doctest::Approx(std::sqrt(50.0)));
  CHECK(tracking_error(Mode::kFullWrench, m, r).h2 == doctest::Approx(std::sqrt(4.03)));
  CHECK(tracking_error(Mode::kPointContact, m, r).h2 == doctest::Approx(std::sqrt(3.03)));
}

TEST_CASE("convergence_time") {
  CHECK(convergence_time(synthetic_log({0.01, 0.02, 0.0})) == 0.0);
  // Band entry at step 3 (t = 0.3); an excursion at step 1 does not count.
  CHECK(*convergence_time(synthetic_log({1.0, 0.01, 0.9, 0.04, 0.03, 0.01})) == doctest::Approx(0.3));
  CHECK_FALSE(convergence_time(synthetic_log({0.01, 0.5, 1.0, 2.0})).has_value());
  CHECK_FALSE(convergence_time(synthetic_log({})).has_value());
}

TEST_CASE("runlog write and load round-trip") {
  RunLog log = run_scenario(parse_scenario(kStableGrasp));
  const fs::path path = temp_dir() / "roundtrip.csv";
  write_runlog(log, path);
  const RunLog back = load_runlog(path);
  CHECK(back.scenario == log.scenario);
  CHECK(back.records.size() == log.records.size());
  CHECK(format_runlog(back) == format_runlog(log));
  CHECK(back.records[123].theta == log.records[123].theta);
  CHECK(back.records[123].h2 == log.records[123].h2);

  std::ifstream in(path);
  std::string meta, header;
  std::getline(in, meta);
  std::getline(in, header);
  CHECK(meta.rfind("# scenario=stable", 0) == 0);
  std::string joined;
  for (const auto& c : runlog_columns()) joined += (joined.empty() ? "" : ",") + c;
  CHECK(header == joined);

  CHECK_THROWS_AS(load_runlog(temp_dir() / "nope.csv"), NotFoundError);
  {
    std::ofstream bad(temp_dir() / "bad_log.csv");
    bad << "not,a,log\n";
  }
  CHECK_THROWS_AS(load_runlog(temp_dir() / "bad_log.csv"), IoError);
}

TEST_CASE("summary keys are stable") {
  const RunSummary s = summarize(synthetic_log({1.0, 0.5, 0.01}));
  CHECK(s.steps == 3);
  CHECK(s.peak_h2 == 1.0);
  CHECK(s.final_h2 == 0.01);
  const std::string text = "\n" + format_summary(s);
  for (const char* key : {"steps=", "dt=", "duration=", "final_h2=", "mean_h2=", "peak_h2=", "convergence_time=",
                          "slip_violations=", "theta.mass.z=", "theta.damping.yaw=", "theta.force_gain.x=",
                          "theta.kp.z=", "theta.ktheta.z="}) {
    CHECK(text.find(std::string("\n") + key) != std::string::npos);
  }
  CHECK(format_summary(summarize(synthetic_log({1.0, 2.0}))).find("convergence_time=never") != std::string::npos);
}

TEST_CASE("compare_runs") {
  const RunLog a = synthetic_log({1.0, 0.5, 0.2, 0.1});
  const Comparison same = compare_runs(a, a);
  CHECK(same.fraction_a_below_b == 0.5);
  CHECK(same.mean_delta == 0.0);
  CHECK(same.compared_steps == 4);

  const RunLog b = synthetic_log({1.0, 1.0, 0.1, 1.0});
  const Comparison c = compare_runs(a, b, 0.1);
  CHECK(c.compared_steps == 3);
  CHECK(c.fraction_a_below_b == doctest::Approx(2.0 / 3.0));
  CHECK(c.mean_delta == doctest::Approx((-0.5 + 0.1 - 0.9) / 3.0));
  CHECK(format_comparison(c).find("fraction_a_below_b=") != std::string::npos);

  CHECK_THROWS_AS(compare_runs(a, synthetic_log({1.0})), LogMismatchError);
  RunLog other_dt = a;
  other_dt.dt = 0.2;
  CHECK_THROWS_AS(compare_runs(a, other_dt), LogMismatchError);
}

// -- closed loop --------------------------------------------------------------

TEST_CASE("fixed stable gains settle to the noise floor") {
  const RunLog log = run_scenario(parse_scenario(kStableGrasp));
  REQUIRE(log.records.size() == 300);
  double tail = 0.0;
  for (std::size_t i = 200; i < 300; ++i) tail = std::max(tail, log.records[i].h2);
  CHECK(log.records.front().h2 > 5.0);
  CHECK(tail < 0.15);
  CHECK(convergence_time(log).has_value());
  for (const auto& r : log.records) CHECK(r.theta == log.records.front().theta);
}

TEST_CASE("run_scenario is deterministic per seed") {
  Scenario sc = load_scenario(fs::path(ADMITUNE_SOURCE_DIR) / "scenarios" / "towel_grasp.yaml");
  sc.duration = 1.0;
  const std::string a = format_runlog(run_scenario(sc));
  CHECK(a == format_runlog(run_scenario(sc)));
  sc.seed += 1;
  CHECK(a != format_runlog(run_scenario(sc)));
}

TEST_CASE("tuner observer sees every update") {
  Scenario sc = load_scenario(fs::path(ADMITUNE_SOURCE_DIR) / "scenarios" / "towel_grasp.yaml");
  sc.duration = 0.5;
  std::size_t calls = 0;
  const RunLog log = run_scenario(sc, [&](std::size_t, const autotune::TunerState& st) {
    ++calls;
    CHECK(st.covariance.allFinite());
  });
  CHECK(calls == log.records.size());
}
