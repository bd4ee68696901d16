#pragma once

// Staged launch-vehicle ascent over a spherical rotating Earth. Produces
// timestamped ECI states with the applied external acceleration resolved in
// the RTN frame of each state.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "iip/core_frames.hpp"
#include "iip/dynamics.hpp"

namespace iip {

inline constexpr double kStandardGravity = 9.80665;

/// Piecewise-linear table, clamped outside its range.
struct Profile {
  std::vector<double> t;
  std::vector<double> value;

  double operator()(double x) const {
    if (t.empty()) return 0.0;
    if (x <= t.front()) return value.front();
    if (x >= t.back()) return value.back();
    const auto it = std::upper_bound(t.begin(), t.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - t.begin());
    const double w = (x - t[i - 1]) / (t[i] - t[i - 1]);
    return value[i - 1] + w * (value[i] - value[i - 1]);
  }
};

struct StageConfig {
  double structural_mass = 0.0;
  double propellant_mass = 0.0;
  Profile thrust;  // N versus stage time
  double burn_time = 0.0;
  double jettison_mass = 0.0;
  std::optional<double> jettison_time;  // mission time
  double coast_after = 0.0;             // unpowered arc before the next ignition
  double isp = 0.0;                     // informational
};

struct VehicleConfig {
  std::vector<StageConfig> stages;
  double payload_mass = 0.0;
  Profile pitch;  // rad above the launch-site horizontal versus mission time
  double launch_lat = 0.0;
  double launch_lon = 0.0;
  double launch_azimuth = 0.0;  // from north, positive east
  std::optional<PosVel> initial_state;  // ECI override of the launch-site start

  double liftoff_mass() const {
    double m = payload_mass;
    for (const auto& s : stages) m += s.structural_mass + s.propellant_mass + s.jettison_mass;
    return m;
  }

  void validate() const;
};

struct TrajectorySample {
  double t = 0.0;
  Vec3 r = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  AccelRtn accel;
  double mass = 0.0;
};

struct SimulationResult {
  std::vector<TrajectorySample> samples;
  std::optional<double> subsurface_time;  // set when the run was truncated
  std::vector<double> burnout_times;
};

namespace detail {

[[noreturn]] inline void config_fail(const std::string& what) {
  throw IipError(ErrorKind::ConfigError, what);
}

struct StageTimes {
  double ignition = 0.0;
  double burnout = 0.0;
};

inline std::vector<StageTimes> stage_timeline(const VehicleConfig& cfg) {
  std::vector<StageTimes> out;
  double t = 0.0;
  for (const auto& s : cfg.stages) {
    out.push_back({t, t + s.burn_time});
    t += s.burn_time + s.coast_after;
  }
  return out;
}

}  // namespace detail

inline void VehicleConfig::validate() const {
  using detail::config_fail;
  if (stages.empty()) config_fail("at least one [stage] is required");
  if (payload_mass < 0.0) config_fail("payload_mass must be >= 0");
  if (pitch.t.empty()) config_fail("pitch_program_deg is required");
  for (std::size_t i = 1; i < pitch.t.size(); ++i) {
    if (!(pitch.t[i] > pitch.t[i - 1])) {
      config_fail("pitch_program_deg times must be strictly increasing");
    }
  }
  const auto timeline = detail::stage_timeline(*this);
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const auto& s = stages[i];
    const std::string tag = "stage " + std::to_string(i + 1) + ": ";
    if (s.structural_mass < 0.0 || s.propellant_mass < 0.0 || s.jettison_mass < 0.0) {
      config_fail(tag + "masses must be >= 0");
    }
    if (!(s.burn_time > 0.0)) config_fail(tag + "burn_time must be > 0");
    if (s.coast_after < 0.0) config_fail(tag + "coast_after must be >= 0");
    if (s.thrust.t.empty()) config_fail(tag + "thrust profile is required");
    for (std::size_t k = 0; k < s.thrust.t.size(); ++k) {
      if (s.thrust.value[k] < 0.0) config_fail(tag + "thrust must be non-negative");
      if (k > 0 && !(s.thrust.t[k] > s.thrust.t[k - 1])) {
        config_fail(tag + "thrust profile times must be strictly increasing");
      }
    }
    if (s.jettison_mass > 0.0 && !s.jettison_time) {
      config_fail(tag + "jettison_mass needs jettison_time");
    }
    if (s.jettison_time) {
      const bool last = i + 1 == stages.size();
      if (*s.jettison_time < 0.0 ||
          (!last && *s.jettison_time > timeline[i].burnout)) {
        config_fail(tag + "jettison_time must lie between liftoff and stage separation");
      }
    }
  }
}

/// Vehicle mass at mission time t. `phase_t` selects which discrete events
/// (separations, jettisons) have already happened; propellant depletes
/// continuously with t.
inline double vehicle_mass(const VehicleConfig& cfg, double t, double phase_t) {
  const auto timeline = detail::stage_timeline(cfg);
  double m = cfg.payload_mass;
  for (std::size_t i = 0; i < cfg.stages.size(); ++i) {
    const auto& s = cfg.stages[i];
    const bool last = i + 1 == cfg.stages.size();
    if (s.jettison_time && phase_t < *s.jettison_time) m += s.jettison_mass;
    if (!last && phase_t >= timeline[i].burnout) continue;
    const double burned = std::clamp((t - timeline[i].ignition) / s.burn_time, 0.0, 1.0);
    m += s.structural_mass + s.propellant_mass * (1.0 - burned);
  }
  return m;
}

/// Thrust (N) at mission time t inside the phase containing phase_t.
inline double vehicle_thrust(const VehicleConfig& cfg, double t, double phase_t) {
  const auto timeline = detail::stage_timeline(cfg);
  for (std::size_t i = 0; i < cfg.stages.size(); ++i) {
    if (phase_t >= timeline[i].ignition && phase_t < timeline[i].burnout) {
      return cfg.stages[i].thrust(t - timeline[i].ignition);
    }
  }
  return 0.0;
}

struct LaunchFrame {
  Vec3 up;
  Vec3 downrange;  // horizontal, along the launch azimuth
};

inline LaunchFrame launch_frame(const VehicleConfig& cfg, const EarthModel& earth) {
  const Mat3 to_eci = eci_to_ecef(0.0 - earth.t_ref, earth.omega).transpose();
  const double sl = std::sin(cfg.launch_lat), cl = std::cos(cfg.launch_lat);
  const double so = std::sin(cfg.launch_lon), co = std::cos(cfg.launch_lon);
  const Vec3 up(cl * co, cl * so, sl);
  const Vec3 north(-sl * co, -sl * so, cl);
  const Vec3 east(-so, co, 0.0);
  const Vec3 horiz = std::cos(cfg.launch_azimuth) * north + std::sin(cfg.launch_azimuth) * east;
  return {to_eci * up, to_eci * horiz};
}

/// Fixed-step RK4 ascent. Integration substeps never straddle a staging or
/// jettison event; samples are emitted every `dt` seconds of mission time.
inline SimulationResult simulate(const VehicleConfig& cfg, const EarthModel& earth,
                                 double dt, double max_substep = 0.02) {
  cfg.validate();
  if (!(dt > 0.0)) detail::config_fail("dt must be > 0");

  const auto timeline = detail::stage_timeline(cfg);
  const double t_end = timeline.back().burnout + cfg.stages.back().coast_after;
  std::vector<double> events;
  for (const auto& st : timeline) {
    events.push_back(st.ignition);
    events.push_back(st.burnout);
  }
  for (const auto& s : cfg.stages) {
    if (s.jettison_time) events.push_back(*s.jettison_time);
  }
  events.push_back(t_end);
  std::sort(events.begin(), events.end());

  const LaunchFrame frame = launch_frame(cfg, earth);
  PosVel y;
  if (cfg.initial_state) {
    y = *cfg.initial_state;
  } else {
    y.r = earth.radius * frame.up;
    y.v = Vec3(0.0, 0.0, earth.omega).cross(y.r);
  }

  auto applied_accel = [&](double t, double phase_t) -> Vec3 {
    const double thrust = vehicle_thrust(cfg, t, phase_t);
    if (thrust == 0.0) return Vec3::Zero();
    const double pitch = cfg.pitch(t);
    const Vec3 dir = std::sin(pitch) * frame.up + std::cos(pitch) * frame.downrange;
    return thrust / vehicle_mass(cfg, t, phase_t) * dir;
  };

  SimulationResult out;
  for (const auto& st : timeline) out.burnout_times.push_back(st.burnout);

  auto emit = [&](double t) {
    TrajectorySample s;
    s.t = t;
    s.r = y.r;
    s.v = y.v;
    s.mass = vehicle_mass(cfg, t, t);
    const Vec3 a = applied_accel(t, t);
    const Vec3 i_r = y.r.normalized();
    const Vec3 h = y.r.cross(y.v);
    if (h.norm() > 0.0) {
      const Vec3 i_h = h.normalized();
      s.accel = {a.dot(i_r), a.dot(i_h.cross(i_r)), a.dot(i_h)};
    } else {
      s.accel = {a.dot(i_r), 0.0, 0.0};
    }
    out.samples.push_back(s);
  };

  emit(0.0);
  const long n_samples = static_cast<long>(std::floor(t_end / dt + 1e-9));
  double t = 0.0;
  for (long k = 1; k <= n_samples; ++k) {
    const double t_next = k * dt;
    while (t < t_next) {
      double seg_end = t_next;
      for (double e : events) {
        if (e > t + 1e-12 && e < seg_end) {
          seg_end = e;
          break;
        }
      }
      const double phase_t = 0.5 * (t + seg_end);
      y = propagate(y, t, seg_end - t, max_substep, earth.mu,
                    [&](double tt, const Vec3&, const Vec3&) {
                      return applied_accel(tt, phase_t);
                    });
      t = seg_end;
    }
    t = t_next;
    if (y.r.norm() < earth.radius * (1.0 - 1e-12)) {
      out.subsurface_time = t;
      break;
    }
    emit(t);
  }
  return out;
}

struct AccelRow {
  double t = 0.0;
  AccelRtn a;
};

inline std::vector<AccelRow> accel_profile(const std::vector<TrajectorySample>& samples) {
  std::vector<AccelRow> rows;
  rows.reserve(samples.size());
  for (const auto& s : samples) rows.push_back({s.t, s.accel});
  return rows;
}

}  // namespace iip
