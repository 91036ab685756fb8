#include "admitune/reference.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "admitune/errors.hpp"

namespace admitune::sim {

ReferenceTrajectory::ReferenceTrajectory(std::vector<ReferenceRow> rows) : rows_(std::move(rows)) {
  if (rows_.empty()) throw ScenarioConfigError("reference trajectory is empty");
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (!std::isfinite(rows_[i].t) || !rows_[i].u.allFinite()) {
      throw ScenarioConfigError("reference row " + std::to_string(i) + " is not finite");
    }
    if (i > 0 && rows_[i].t < rows_[i - 1].t) {
      throw ScenarioConfigError("reference times must be non-decreasing (row " + std::to_string(i) + ")");
    }
  }
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    cell.erase(0, cell.find_first_not_of(" \t\r"));
    cell.erase(cell.find_last_not_of(" \t\r") + 1);
    out.push_back(cell);
  }
  return out;
}

}  // namespace

ReferenceTrajectory ReferenceTrajectory::load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("reference file not found: " + path.string());

  static const std::vector<std::string> kHeader{"t", "f_x", "f_y", "f1_z", "f2_z", "tau_x", "tau_y", "tau_z"};
  std::string line;
  if (!std::getline(in, line) || split(line) != kHeader) {
    throw ScenarioConfigError(path.string() + ": expected header t,f_x,f_y,f1_z,f2_z,tau_x,tau_y,tau_z");
  }

  std::vector<ReferenceRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    const auto cells = split(line);
    if (cells.size() != kHeader.size()) {
      throw ScenarioConfigError(path.string() + ":" + std::to_string(lineno) + ": expected 8 columns");
    }
    ReferenceRow row;
    try {
      row.t = std::stod(cells[0]);
      for (int i = 0; i < 7; ++i) row.u[i] = std::stod(cells[static_cast<std::size_t>(i) + 1]);
    } catch (const std::exception&) {
      throw ScenarioConfigError(path.string() + ":" + std::to_string(lineno) + ": not a number");
    }
    rows.push_back(row);
  }
  return ReferenceTrajectory(std::move(rows));
}

ReferenceTrajectory ReferenceTrajectory::constant(const Vec7& u, double ramp) {
  if (ramp > 0.0) return ReferenceTrajectory({{0.0, Vec7::Zero()}, {ramp, u}});
  return ReferenceTrajectory({{0.0, u}});
}

ReferenceTrajectory ReferenceTrajectory::steps(const Vec7& low, const Vec7& high, double half_period,
                                               double duration) {
  if (!(half_period > 0.0) || !(duration > 0.0)) {
    throw ScenarioConfigError("step reference needs positive half period and duration");
  }
  std::vector<ReferenceRow> rows{{0.0, low}};
  bool is_high = false;
  for (int k = 1; k * half_period < duration; ++k) {
    const double t = k * half_period;
    rows.push_back({t, is_high ? high : low});
    is_high = !is_high;
    rows.push_back({t, is_high ? high : low});
  }
  return ReferenceTrajectory(std::move(rows));
}

Vec7 ReferenceTrajectory::at(double t) const {
  if (rows_.empty()) return Vec7::Zero();
  const auto after = std::upper_bound(rows_.begin(), rows_.end(), t,
                                      [](double v, const ReferenceRow& r) { return v < r.t; });
  if (after == rows_.begin()) return rows_.front().u;
  if (after == rows_.end()) return rows_.back().u;
  const ReferenceRow& a = *(after - 1);
  const ReferenceRow& b = *after;
  const double s = (t - a.t) / (b.t - a.t);
  return a.u + s * (b.u - a.u);
}

}  // namespace admitune::sim
