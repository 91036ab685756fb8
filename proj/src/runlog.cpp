#include "admitune/runlog.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "admitune/errors.hpp"

namespace admitune::sim {

namespace {

constexpr int kColumnCount = 2 + 6 + 6 + 7 + 7 + 2 + autotune::kParamCount + autotune::kObjectiveCount + 3;

void append(std::vector<std::string>& cols, const char* prefix, int n) {
  for (int i = 0; i < n; ++i) cols.push_back(std::string(prefix) + std::to_string(i));
}

void put(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

template <typename V>
void put_all(std::string& out, const V& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out += ',';
    put(out, v[i]);
  }
}

}  // namespace

const std::vector<std::string>& runlog_columns() {
  static const std::vector<std::string> cols = [] {
    std::vector<std::string> c{"step", "t"};
    append(c, "x", 6);
    append(c, "xd", 6);
    append(c, "ref", 7);
    append(c, "meas", 7);
    c.push_back("grasp_ref");
    c.push_back("grasp_meas");
    append(c, "theta", autotune::kParamCount);
    append(c, "obj", autotune::kObjectiveCount);
    c.push_back("h2");
    c.push_back("ref_norm");
    c.push_back("slip");
    return c;
  }();
  return cols;
}

std::string format_runlog(const RunLog& log) {
  std::string out;
  out.reserve(log.records.size() * 1400 + 256);
  char meta[256];
  std::snprintf(meta, sizeof meta, "# scenario=%s mode=%s dt=%.17g seed=%" PRIu64 "\n", log.scenario.c_str(),
                mode_name(log.mode), log.dt, log.seed);
  out += meta;
  const auto& cols = runlog_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) out += ',';
    out += cols[i];
  }
  out += '\n';
  for (const RunRecord& r : log.records) {
    out += std::to_string(r.step);
    out += ',';
    put(out, r.t);
    put_all(out, r.x);
    put_all(out, r.xd);
    put_all(out, r.ref);
    put_all(out, r.meas);
    out += ',';
    put(out, r.grasp_ref);
    out += ',';
    put(out, r.grasp_meas);
    put_all(out, r.theta);
    put_all(out, r.h);
    out += ',';
    put(out, r.h2);
    out += ',';
    put(out, r.ref_norm);
    out += r.slip ? ",1\n" : ",0\n";
  }
  return out;
}

void write_runlog(const RunLog& log, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  const std::string text = format_runlog(log);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

RunLog load_runlog(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("log not found: " + path.string());
  const std::string where = path.string();

  RunLog log;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) throw IoError(where + ": missing metadata line");
  {
    std::istringstream meta(line.substr(2));
    std::string item;
    bool have_dt = false;
    while (meta >> item) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = item.substr(0, eq);
      const std::string value = item.substr(eq + 1);
      try {
        if (key == "scenario") log.scenario = value;
        else if (key == "dt") log.dt = std::stod(value), have_dt = true;
        else if (key == "seed") log.seed = std::stoull(value);
        else if (key == "mode") {
          for (Mode m : {Mode::kGrasp, Mode::kFullWrench, Mode::kClimb, Mode::kPointContact}) {
            if (value == mode_name(m)) log.mode = m;
          }
        }
      } catch (const std::exception&) {
        throw IoError(where + ": bad metadata value for " + key);
      }
    }
    if (!have_dt) throw IoError(where + ": metadata has no dt");
  }
  if (!std::getline(in, line)) throw IoError(where + ": missing header");

  int lineno = 2;
  std::vector<double> v(kColumnCount);
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::size_t pos = 0;
    int n = 0;
    while (n < kColumnCount && pos <= line.size()) {
      const auto comma = std::min(line.find(',', pos), line.size());
      try {
        v[static_cast<std::size_t>(n)] = std::stod(line.substr(pos, comma - pos));
      } catch (const std::exception&) {
        throw IoError(where + ":" + std::to_string(lineno) + ": bad number in column " + std::to_string(n));
      }
      ++n;
      pos = comma + 1;
    }
    if (n != kColumnCount || pos <= line.size()) {
      throw IoError(where + ":" + std::to_string(lineno) + ": expected " + std::to_string(kColumnCount) +
                    " columns");
    }
    RunRecord r;
    const double* p = v.data();
    r.step = static_cast<std::size_t>(*p++);
    r.t = *p++;
    for (int i = 0; i < 6; ++i) r.x[i] = *p++;
    for (int i = 0; i < 6; ++i) r.xd[i] = *p++;
    for (int i = 0; i < 7; ++i) r.ref[i] = *p++;
    for (int i = 0; i < 7; ++i) r.meas[i] = *p++;
    r.grasp_ref = *p++;
    r.grasp_meas = *p++;
    for (int i = 0; i < autotune::kParamCount; ++i) r.theta[i] = *p++;
    for (int i = 0; i < autotune::kObjectiveCount; ++i) r.h[i] = *p++;
    r.h2 = *p++;
    r.ref_norm = *p++;
    r.slip = *p != 0.0;
    log.records.push_back(r);
  }
  return log;
}

double h2_norm(const Vec6& measured, const Vec6& reference) { return (measured - reference).norm(); }

TrackingError tracking_error(Mode mode, const Vec7& measured, const Vec7& reference) {
  switch (mode) {
    case Mode::kGrasp:
      return {(measured.segment<2>(2) - reference.segment<2>(2)).norm(), reference.segment<2>(2).norm()};
    case Mode::kFullWrench:
    case Mode::kClimb:
      return {(measured - reference).norm(), reference.norm()};
    case Mode::kPointContact: {
      Vec6 m, r;
      m << measured.head<3>(), measured.tail<3>();
      r << reference.head<3>(), reference.tail<3>();
      return {h2_norm(m, r), r.norm()};
    }
  }
  return {};
}

std::optional<double> convergence_time(const RunLog& log, double band) {
  if (log.records.empty()) return std::nullopt;
  std::size_t first_ok = log.records.size();
  for (std::size_t i = log.records.size(); i-- > 0;) {
    const RunRecord& r = log.records[i];
    if (r.h2 > band * r.ref_norm) break;
    first_ok = i;
  }
  if (first_ok == log.records.size()) return std::nullopt;
  return log.records[first_ok].t;
}

RunSummary summarize(const RunLog& log, double band) {
  RunSummary s;
  s.steps = log.records.size();
  s.dt = log.dt;
  s.duration = log.duration();
  s.convergence_time = convergence_time(log, band);
  double total = 0.0;
  for (const RunRecord& r : log.records) {
    total += r.h2;
    s.peak_h2 = std::max(s.peak_h2, r.h2);
    if (r.slip) ++s.slip_violations;
  }
  if (!log.records.empty()) {
    s.final_h2 = log.records.back().h2;
    s.mean_h2 = total / static_cast<double>(log.records.size());
    s.theta = log.records.back().theta;
  }
  return s;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string("never"); }

}  // namespace

std::string format_summary(const RunSummary& s) {
  static const char* kThetaNames[] = {"mass", "damping", "force_gain"};
  static const char* kAxes[] = {"x", "y", "z", "roll", "pitch", "yaw"};
  std::string out;
  out += "steps=" + std::to_string(s.steps) + "\n";
  out += "dt=" + fmt(s.dt) + "\n";
  out += "duration=" + fmt(s.duration) + "\n";
  out += "final_h2=" + fmt(s.final_h2) + "\n";
  out += "mean_h2=" + fmt(s.mean_h2) + "\n";
  out += "peak_h2=" + fmt(s.peak_h2) + "\n";
  out += "convergence_time=" + fmt(s.convergence_time) + "\n";
  out += "slip_violations=" + std::to_string(s.slip_violations) + "\n";
  for (int b = 0; b < 3; ++b) {
    for (int i = 0; i < 6; ++i) {
      out += std::string("theta.") + kThetaNames[b] + "." + kAxes[i] + "=" + fmt(s.theta[6 * b + i]) + "\n";
    }
  }
  for (int i = 0; i < 3; ++i) out += std::string("theta.kp.") + kAxes[i] + "=" + fmt(s.theta[18 + i]) + "\n";
  for (int i = 0; i < 3; ++i) out += std::string("theta.ktheta.") + kAxes[i] + "=" + fmt(s.theta[21 + i]) + "\n";
  return out;
}

Comparison compare_runs(const RunLog& a, const RunLog& b, double after, double window) {
  if (std::abs(a.dt - b.dt) > 1e-12 * std::max(a.dt, b.dt)) {
    throw LogMismatchError("logs have different dt (" + fmt(a.dt) + " vs " + fmt(b.dt) + ")");
  }
  if (a.records.size() != b.records.size()) {
    throw LogMismatchError("logs have different durations (" + fmt(a.duration()) + " s vs " +
                           fmt(b.duration()) + " s)");
  }
  if (!(window > 0.0)) throw std::invalid_argument("compare window must be positive");

  Comparison c;
  c.convergence_a = convergence_time(a);
  c.convergence_b = convergence_time(b);

  std::vector<std::size_t> counts;
  double wins = 0.0;
  double delta = 0.0;
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    const RunRecord& ra = a.records[i];
    const RunRecord& rb = b.records[i];
    const auto w = static_cast<std::size_t>(std::floor(ra.t / window + 1e-9));
    if (c.windows.size() <= w) {
      c.windows.resize(w + 1);
      counts.resize(w + 1, 0);
      c.windows[w].t_begin = static_cast<double>(w) * window;
      c.windows[w].t_end = c.windows[w].t_begin + window;
    }
    WindowStats& ws = c.windows[w];
    ++counts[w];
    ws.mean_a += ra.h2;
    ws.mean_b += rb.h2;
    ws.max_a = std::max(ws.max_a, ra.h2);
    ws.max_b = std::max(ws.max_b, rb.h2);
    if (ra.t + 1e-12 >= after) {
      wins += ra.h2 < rb.h2 ? 1.0 : (ra.h2 == rb.h2 ? 0.5 : 0.0);
      delta += ra.h2 - rb.h2;
      ++c.compared_steps;
    }
  }
  for (std::size_t w = 0; w < c.windows.size(); ++w) {
    if (counts[w] == 0) continue;
    c.windows[w].mean_a /= static_cast<double>(counts[w]);
    c.windows[w].mean_b /= static_cast<double>(counts[w]);
  }
  if (c.compared_steps) {
    c.fraction_a_below_b = wins / static_cast<double>(c.compared_steps);
    c.mean_delta = delta / static_cast<double>(c.compared_steps);
  }
  return c;
}

std::string format_comparison(const Comparison& c) {
  std::string out = "window_start,window_end,mean_h2_a,mean_h2_b,max_h2_a,max_h2_b\n";
  for (const WindowStats& w : c.windows) {
    out += fmt(w.t_begin) + "," + fmt(w.t_end) + "," + fmt(w.mean_a) + "," + fmt(w.mean_b) + "," +
           fmt(w.max_a) + "," + fmt(w.max_b) + "\n";
  }
  out += "convergence_time_a=" + fmt(c.convergence_a) + "\n";
  out += "convergence_time_b=" + fmt(c.convergence_b) + "\n";
  out += "compared_steps=" + std::to_string(c.compared_steps) + "\n";
  out += "fraction_a_below_b=" + fmt(c.fraction_a_below_b) + "\n";
  out += "mean_delta_h2=" + fmt(c.mean_delta) + "\n";
  return out;
}

}  // namespace admitune::sim
