#pragma once

// Trajectory CSV: t,rx,ry,rz,vx,vy,vz,ar,atheta,ah (SI; r/v in ECI axes,
// acceleration in the RTN frame of the row's state).

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "iip/config.hpp"
#include "iip/trajectory.hpp"

namespace iip {

inline constexpr const char* kTrajectoryCsvHeader = "t,rx,ry,rz,vx,vy,vz,ar,atheta,ah";

/// Fixed 17-significant-digit text; round-trips every double exactly.
inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct TrajectoryRow {
  InertialState state;
  AccelRtn accel;
};

inline void write_trajectory_csv(std::ostream& out,
                                 const std::vector<TrajectorySample>& samples) {
  out << kTrajectoryCsvHeader << '\n';
  for (const auto& s : samples) {
    const double cols[] = {s.t,       s.r.x(),       s.r.y(),   s.r.z(), s.v.x(),
                           s.v.y(),   s.v.z(),       s.accel.r, s.accel.theta, s.accel.h};
    for (std::size_t i = 0; i < std::size(cols); ++i) {
      if (i) out << ',';
      out << format_double(cols[i]);
    }
    out << '\n';
  }
}

inline std::vector<TrajectoryRow> read_trajectory_csv(std::istream& in) {
  auto fail = [](int line, const std::string& msg) -> void {
    throw IipError(ErrorKind::MalformedInput,
                   "trajectory csv line " + std::to_string(line) + ": " + msg);
  };
  std::string line;
  int line_no = 1;
  if (!std::getline(in, line) || detail::trim(line) != kTrajectoryCsvHeader) {
    fail(1, std::string("header must be exactly '") + kTrajectoryCsvHeader + "'");
  }
  std::vector<TrajectoryRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split(line, ',');
    if (cells.size() != 10) fail(line_no, "expected 10 columns");
    double v[10];
    for (int i = 0; i < 10; ++i) {
      char* end = nullptr;
      v[i] = std::strtod(cells[i].c_str(), &end);
      if (cells[i].empty() || *end != '\0' || !std::isfinite(v[i])) {
        fail(line_no, "non-finite or non-numeric value '" + cells[i] + "'");
      }
    }
    if (!rows.empty() && !(v[0] > rows.back().state.t)) {
      fail(line_no, "t must be strictly increasing");
    }
    TrajectoryRow row;
    row.state = {v[0], Vec3(v[1], v[2], v[3]), Vec3(v[4], v[5], v[6])};
    row.accel = {v[7], v[8], v[9]};
    rows.push_back(row);
  }
  return rows;
}

inline std::vector<TrajectoryRow> load_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IipError(ErrorKind::MalformedInput, "cannot open " + path);
  return read_trajectory_csv(in);
}

inline std::vector<TrajectoryRow> to_rows(const std::vector<TrajectorySample>& samples) {
  std::vector<TrajectoryRow> rows;
  rows.reserve(samples.size());
  for (const auto& s : samples) rows.push_back({{s.t, s.r, s.v}, s.accel});
  return rows;
}

}  // namespace iip
