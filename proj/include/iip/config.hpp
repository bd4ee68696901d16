#pragma once

// Vehicle configuration file: flat "key = value" lines with one [stage]
// section per stage, in firing order. '#' starts a comment. Lists are
// comma-separated; profile entries are "time:value" pairs.
//
//   payload_mass = 250
//   launch_latitude_deg = 34.43
//   pitch_program_deg = 0:90, 10:90, 343:20
//   [stage]
//   structural_mass = 7000
//   thrust_kgf = 0:150000, 343:32000
//   burn_time = 343

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "iip/trajectory.hpp"

namespace iip {

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

class ConfigLine {
 public:
  ConfigLine(int line, std::string key, std::string value)
      : line_(line), key_(std::move(key)), value_(std::move(value)) {}

  [[noreturn]] void fail(const std::string& msg) const {
    config_fail("line " + std::to_string(line_) + ": field '" + key_ + "': " + msg);
  }

  double number(const std::string& text) const {
    double x = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, x);
    if (ec != std::errc() || ptr != last || text.empty()) {
      fail("'" + text + "' is not a number");
    }
    return x;
  }

  double number() const { return number(value_); }

  Vec3 vector3() const {
    const auto parts = split(value_, ',');
    if (parts.size() != 3) fail("expected three comma-separated numbers");
    return {number(parts[0]), number(parts[1]), number(parts[2])};
  }

  Profile profile(double value_scale) const {
    Profile p;
    for (const auto& entry : split(value_, ',')) {
      const auto tv = split(entry, ':');
      if (tv.size() != 2) fail("expected time:value pairs, got '" + entry + "'");
      p.t.push_back(number(tv[0]));
      p.value.push_back(number(tv[1]) * value_scale);
    }
    for (std::size_t i = 1; i < p.t.size(); ++i) {
      if (!(p.t[i] > p.t[i - 1])) fail("times must be strictly increasing");
    }
    return p;
  }

  const std::string& key() const { return key_; }

 private:
  int line_;
  std::string key_;
  std::string value_;
};

}  // namespace detail

inline VehicleConfig parse_vehicle_config(std::istream& in) {
  VehicleConfig cfg;
  constexpr double deg = kPi / 180.0;
  std::optional<Vec3> init_r, init_v;
  StageConfig* stage = nullptr;
  std::string raw;
  int line_no = 0;

  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string text = detail::trim(std::string_view(raw).substr(0, hash));
    if (text.empty()) continue;
    if (text == "[stage]") {
      cfg.stages.emplace_back();
      stage = &cfg.stages.back();
      continue;
    }
    if (text.front() == '[') {
      detail::config_fail("line " + std::to_string(line_no) + ": unknown section " + text);
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      detail::config_fail("line " + std::to_string(line_no) + ": expected key = value");
    }
    const detail::ConfigLine ln(line_no, detail::trim(text.substr(0, eq)),
                                detail::trim(text.substr(eq + 1)));
    const std::string& key = ln.key();

    if (stage == nullptr) {
      if (key == "payload_mass") cfg.payload_mass = ln.number();
      else if (key == "launch_latitude_deg") cfg.launch_lat = ln.number() * deg;
      else if (key == "launch_longitude_deg") cfg.launch_lon = ln.number() * deg;
      else if (key == "launch_azimuth_deg") cfg.launch_azimuth = ln.number() * deg;
      else if (key == "pitch_program_deg") cfg.pitch = ln.profile(deg);
      else if (key == "initial_position_m") init_r = ln.vector3();
      else if (key == "initial_velocity_mps") init_v = ln.vector3();
      else ln.fail("unknown vehicle key");
    } else {
      if (key == "structural_mass") stage->structural_mass = ln.number();
      else if (key == "propellant_mass") stage->propellant_mass = ln.number();
      else if (key == "burn_time") stage->burn_time = ln.number();
      else if (key == "thrust_kgf") stage->thrust = ln.profile(kStandardGravity);
      else if (key == "thrust_n") stage->thrust = ln.profile(1.0);
      else if (key == "isp_s") stage->isp = ln.number();
      else if (key == "jettison_mass") stage->jettison_mass = ln.number();
      else if (key == "jettison_time") stage->jettison_time = ln.number();
      else if (key == "coast_after") stage->coast_after = ln.number();
      else ln.fail("unknown stage key");
    }
  }

  if (init_r.has_value() != init_v.has_value()) {
    detail::config_fail("initial_position_m and initial_velocity_mps must be given together");
  }
  if (init_r) cfg.initial_state = PosVel{*init_r, *init_v};
  cfg.validate();
  return cfg;
}

inline VehicleConfig parse_vehicle_config(const std::string& text) {
  std::istringstream in(text);
  return parse_vehicle_config(in);
}

inline VehicleConfig load_vehicle_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) detail::config_fail("cannot open config file " + path);
  return parse_vehicle_config(in);
}

}  // namespace iip
