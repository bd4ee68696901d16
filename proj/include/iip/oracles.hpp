#pragma once

// Brute-force references for the analytic IIP and its rates: numerical
// free-fall propagation to the surface, Kepler-equation flight time, and
// central differences of IIP quantities along perturbed trajectories.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "iip/dynamics.hpp"
#include "iip/kepler.hpp"
#include "iip/rate_legacy.hpp"

namespace iip {

struct PropagationResult {
  Vec3 impact_position = Vec3::Zero();
  double impact_time = 0.0;  // elapsed from the state epoch
  long steps = 0;
};

/// Flight time from the mean-anomaly difference, first forward impact.
inline double kepler_tof(const OrbitalElements& el) {
  double dm = std::fmod(el.Mp - el.M0, kTwoPi);
  if (dm < 0.0) dm += kTwoPi;
  if (kTwoPi - dm < 1e-12) dm = 0.0;
  return dm / el.n;
}

namespace detail {
inline double default_freefall_step(const InertialState& state, const EarthModel& earth) {
  const double r0 = state.r.norm();
  const double lam = r0 * state.v.squaredNorm() / earth.mu;
  double span = 1.0e4;
  if (lam < 2.0) {
    const double a = r0 / (2.0 - lam);
    span = kTwoPi * std::sqrt(a * a * a / earth.mu);
    try {
      span = kepler_tof(elements_from_state(derive_kinematics(state, earth), earth));
    } catch (const IipError&) {
    }
  }
  return std::max(span / 1.0e4, 1.0e-3);
}
}  // namespace detail

/// RK4 free fall until |r| drops through R_E, then bisection on the crossing
/// time to 1e-9 s. `dt <= 0` selects max(t_F / 1e4, 1e-3 s).
inline PropagationResult propagate_freefall(const InertialState& state,
                                            const EarthModel& earth, double dt = 0.0,
                                            long max_steps = 10'000'000) {
  if (state.r.norm() < earth.radius * (1.0 - 1e-12)) {
    throw IipError(ErrorKind::BelowSurface, "propagation starts below the surface");
  }
  // already on the surface and not climbing
  if (state.r.norm() <= earth.radius && state.r.dot(state.v) <= 0.0) return {state.r, 0.0, 0};
  if (dt <= 0.0) dt = detail::default_freefall_step(state, earth);

  PosVel y{state.r, state.v};
  double t = 0.0;
  for (long step = 0; step < max_steps; ++step) {
    const PosVel next = rk4_step(y, t, dt, earth.mu);
    if (next.r.norm() < earth.radius) {
      double lo = 0.0, hi = dt;
      while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        if (rk4_step(y, t, mid, earth.mu).r.norm() < earth.radius) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      const double tau = 0.5 * (lo + hi);
      return {rk4_step(y, t, tau, earth.mu).r, t + tau, step + 1};
    }
    y = next;
    t += dt;
  }
  throw IipError(ErrorKind::NoImpactWithinHorizon,
                 "no surface crossing within " + std::to_string(max_steps) + " steps");
}

/// IIP quantities the finite-difference oracle can differentiate.
enum class FdQuantity {
  FlightAngle,
  TimeOfFlight,
  IipUnitVector,
  LatInertial,
  LonInertial,
  LonEcef,
  EcefImpactPosition,
};

struct FdEstimate {
  Eigen::VectorXd value;  // central difference at the finest step
  double dt = 0.0;
  std::optional<double> order;  // worst observed order over the sweep
  std::vector<Eigen::VectorXd> sweep;
};

namespace detail {

inline bool is_angle(FdQuantity q) {
  return q == FdQuantity::FlightAngle || q == FdQuantity::LonInertial ||
         q == FdQuantity::LonEcef;
}

inline Eigen::VectorXd sample_quantity(FdQuantity q, const InertialState& s,
                                       const EarthModel& earth) {
  const IipSolution sol = compute_iip(s, earth);
  Eigen::VectorXd out(1);
  switch (q) {
    case FdQuantity::FlightAngle: out[0] = sol.phi; break;
    case FdQuantity::TimeOfFlight: out[0] = sol.t_F; break;
    case FdQuantity::LatInertial: out[0] = sol.lat_I; break;
    case FdQuantity::LonInertial: out[0] = sol.lon_I; break;
    case FdQuantity::LonEcef: out[0] = sol.lon_E; break;
    case FdQuantity::IipUnitVector: out = sol.i_p; break;
    case FdQuantity::EcefImpactPosition: out = ecef_impact_position(sol, s.t, earth); break;
  }
  return out;
}

// External acceleration held constant in the RTN frame of the instantaneous state.
inline Vec3 rtn_accel(const AccelRtn& a, const Vec3& r, const Vec3& v) {
  const Vec3 i_r = r.normalized();
  const Vec3 i_h = r.cross(v).normalized();
  const Vec3 i_t = i_h.cross(i_r);
  return a.r * i_r + a.theta * i_t + a.h * i_h;
}

}  // namespace detail

/// Propagates gravity plus the RTN-fixed acceleration `a` over `span` seconds.
inline InertialState propagate_thrusting(const InertialState& state, const AccelRtn& a,
                                         double span, const EarthModel& earth,
                                         double max_step = 0.005) {
  const PosVel y = propagate({state.r, state.v}, state.t, span, max_step, earth.mu,
                             [&](double, const Vec3& r, const Vec3& v) {
                               return detail::rtn_accel(a, r, v);
                             });
  return {state.t + span, y.r, y.v};
}

/// Central-difference time derivative of an IIP quantity along the perturbed
/// trajectory for every step in `dt_sweep` (expected in decreasing order).
inline FdEstimate fd_rate(const InertialState& state, const AccelRtn& a,
                          FdQuantity quantity, const std::vector<double>& dt_sweep,
                          const EarthModel& earth) {
  if (dt_sweep.empty()) {
    throw IipError(ErrorKind::DegenerateWindow, "empty step sweep");
  }
  FdEstimate est;
  for (double dt : dt_sweep) {
    Eigen::VectorXd plus, minus;
    try {
      plus = detail::sample_quantity(quantity, propagate_thrusting(state, a, dt, earth),
                                     earth);
      minus = detail::sample_quantity(quantity, propagate_thrusting(state, a, -dt, earth),
                                      earth);
    } catch (const IipError& err) {
      throw IipError(ErrorKind::DegenerateWindow,
                     "IIP undefined inside +/-" + std::to_string(dt) + " s window (" +
                         err.what() + ")");
    }
    Eigen::VectorXd diff = plus - minus;
    if (detail::is_angle(quantity)) diff[0] = wrap_pi(diff[0]);
    est.sweep.push_back(diff / (2.0 * dt));
  }
  est.value = est.sweep.back();
  est.dt = dt_sweep.back();

  if (est.sweep.size() >= 3) {
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 2 < est.sweep.size(); ++i) {
      const double coarse = (est.sweep[i] - est.sweep[i + 1]).norm();
      const double fine = (est.sweep[i + 1] - est.sweep[i + 2]).norm();
      const double ratio = dt_sweep[i] / dt_sweep[i + 1];
      const double order = fine == 0.0 ? std::numeric_limits<double>::infinity()
                                       : std::log(coarse / fine) / std::log(ratio);
      worst = std::min(worst, order);
    }
    est.order = worst;
  }
  return est;
}

}  // namespace iip
