#pragma once

// Closed-form Keplerian instantaneous impact point on a spherical Earth:
// flight angle, IIP direction, time of flight and latitude/longitude.

#include <algorithm>
#include <cmath>

#include "iip/core_frames.hpp"

namespace iip {

struct FlightAngleSolution {
  double phi = 0.0;  // central angle from current position to the IIP, [0, 2pi)
  double sin_phi = 0.0;
  double cos_phi = 1.0;
  double A1 = 0.0;
  double A2 = 0.0;
  double A3 = 0.0;
};

struct IipSolution {
  Vec3 i_p = Vec3::UnitX();
  double phi = 0.0;
  double t_F = 0.0;
  double lat_I = 0.0;
  double lon_I = 0.0;
  double lat_E = 0.0;
  double lon_E = 0.0;

  // Intermediate results reused by the rate formulations.
  StateKinematics kin;
  FlightAngleSolution angle;
};

struct Geodetic {
  double lat_I = 0.0;
  double lon_I = 0.0;
  double lat_E = 0.0;
  double lon_E = 0.0;
};

/// Impact-condition residual: (1 - cos phi)/(lambda cos^2 g) + cos(phi + g)/cos g - r0/R_E.
inline double flight_angle_residual(const StateKinematics& kin, double phi,
                                    const EarthModel& earth) {
  const double cg = std::cos(kin.gamma0);
  return (1.0 - std::cos(phi)) / (kin.lambda * cg * cg) +
         std::cos(phi + kin.gamma0) / cg - kin.r0 / earth.radius;
}

/// Solves for the flight angle from the conic parameters A1, A2, A3.
///
/// The quadratic in sin(phi) has two roots, one per surface crossing of the
/// osculating orbit. The printed "+" root is used unless it is the ascending
/// crossing, which happens when the state lies between periapsis and the
/// semi-latus rectum (A2 > 0). The forward, descending crossing satisfies
/// A1 cos(phi) - A2 sin(phi) >= 0 (that expression is proportional to minus
/// the radial velocity at impact).
inline FlightAngleSolution solve_flight_angle(const StateKinematics& kin,
                                              const EarthModel& earth) {
  if (kin.lambda >= 2.0) {
    throw IipError(ErrorKind::EscapeVelocity,
                   "lambda = " + std::to_string(kin.lambda) + " >= 2");
  }
  const double rel_alt = (kin.r0 - earth.radius) / earth.radius;
  if (std::abs(rel_alt) <= 1e-12 && std::abs(kin.gamma0) <= 1e-12 &&
      std::abs(kin.lambda - 1.0) < 1e-9) {
    throw IipError(ErrorKind::CircularGrazing,
                   "circular orbit at the surface; every angle is an impact");
  }

  FlightAngleSolution sol;
  const double h2_mu = kin.h * kin.h / earth.mu;
  sol.A1 = -kin.h / (earth.mu * kin.r0) * kin.rdotv;
  sol.A2 = h2_mu / kin.r0 - 1.0;
  sol.A3 = h2_mu / earth.radius - 1.0;
  const double A1 = sol.A1, A2 = sol.A2, A3 = sol.A3;

  const double e2 = A1 * A1 + A2 * A2;
  const double disc = A1 * A1 * A3 * A3 - e2 * (A3 * A3 - A2 * A2);
  if (!(e2 > 1e-24) || disc < 0.0) {
    throw IipError(ErrorKind::NonImpacting,
                   "osculating orbit does not reach the surface");
  }

  const double eps_a2 = 1e-9 * std::max({1.0, std::abs(A1), std::abs(A3)});
  auto cos_from = [&](double s) {
    if (std::abs(A2) > eps_a2) return (A3 - A1 * s) / A2;
    return std::copysign(std::sqrt(std::max(0.0, 1.0 - s * s)), A1);
  };

  const double root = std::sqrt(disc);
  double s_plus = (A1 * A3 + root) / e2;
  double s_minus = (A1 * A3 - root) / e2;
  double c_plus = cos_from(s_plus);
  double c_minus = cos_from(s_minus);

  // Descending-crossing measure for each root.
  const double g_plus = A1 * c_plus - A2 * s_plus;
  const double g_minus = A1 * c_minus - A2 * s_minus;
  double s = s_plus, c = c_plus;
  if (g_minus > g_plus) {
    s = s_minus;
    c = c_minus;
  }
  const double norm = std::hypot(s, c);
  s /= norm;
  c /= norm;

  double phi = std::atan2(s, c);
  if (phi < 0.0) phi += kTwoPi;

  // One Newton step on A1 sin + A2 cos = A3 removes the cancellation error of
  // the closed form near tangential geometry.
  const double slope = A1 * std::cos(phi) - A2 * std::sin(phi);
  if (std::abs(slope) > 1e-3 * std::sqrt(e2)) {
    phi -= (A1 * std::sin(phi) + A2 * std::cos(phi) - A3) / slope;
    if (phi < 0.0) phi = std::max(phi + kTwoPi, 0.0);
    if (phi >= kTwoPi) phi -= kTwoPi;
  }
  if (phi < 1e-15 && phi > -1e-15) phi = 0.0;

  sol.phi = phi;
  sol.sin_phi = std::sin(phi);
  sol.cos_phi = std::cos(phi);
  return sol;
}

/// i_p = cos(g + phi)/cos g * i_r0 + sin(phi)/cos g * i_v0.
inline Vec3 iip_unit_vector(const StateKinematics& kin,
                            const FlightAngleSolution& sol) {
  const double cg = std::cos(kin.gamma0);
  return (std::cos(kin.gamma0 + sol.phi) / cg) * kin.i_r0 +
         (sol.sin_phi / cg) * kin.i_v0;
}

/// Coast time to impact for an elliptic arc (lambda < 2).
///
/// The arctangent is evaluated as atan2(k sin(phi/2), cos(g + phi/2)), which
/// equals the printed atan(k / (cos g cot(phi/2) - sin g)) on its principal
/// branch and stays continuous for flight angles beyond the point where the
/// denominator changes sign.
inline double time_of_flight(const StateKinematics& kin,
                             const FlightAngleSolution& sol,
                             const EarthModel& /*earth*/) {
  const double lam = kin.lambda;
  if (lam >= 2.0) {
    throw IipError(ErrorKind::EscapeVelocity, "time of flight requires lambda < 2");
  }
  const double g = kin.gamma0;
  const double cg = std::cos(g);
  const double phi = sol.phi;
  if (phi == 0.0) return 0.0;

  const double conic = (1.0 - sol.cos_phi) / (lam * cg * cg) +
                       std::cos(g + phi) / cg;
  const double first = (std::tan(g) * (1.0 - sol.cos_phi) + (1.0 - lam) * sol.sin_phi) /
                       ((2.0 - lam) * conic);
  const double k = std::sqrt(2.0 / lam - 1.0);
  const double angle = std::atan2(k * std::sin(0.5 * phi), std::cos(g + 0.5 * phi));
  const double second = 2.0 * cg / (lam * std::pow(2.0 / lam - 1.0, 1.5)) * angle;
  return kin.r0 / (kin.v0 * cg) * (first + second);
}

inline Geodetic geodetic(const Vec3& i_p, double t, double t_F,
                         const EarthModel& earth) {
  Geodetic g;
  g.lat_I = std::asin(std::clamp(i_p.z(), -1.0, 1.0));
  g.lon_I = std::atan2(i_p.y(), i_p.x());
  g.lat_E = g.lat_I;
  g.lon_E = wrap_pi(g.lon_I - earth.omega * (t - earth.t_ref + t_F));
  return g;
}

inline IipSolution compute_iip(const InertialState& state,
                               const EarthModel& earth) {
  const double r0 = state.r.norm();
  if (r0 < earth.radius * (1.0 - 1e-12)) {
    throw IipError(ErrorKind::BelowSurface,
                   "|r0| = " + std::to_string(r0) + " m is below the surface");
  }
  IipSolution out;
  out.kin = derive_kinematics(state, earth);
  out.angle = solve_flight_angle(out.kin, earth);
  out.phi = out.angle.phi;
  out.i_p = iip_unit_vector(out.kin, out.angle);
  out.t_F = time_of_flight(out.kin, out.angle, earth);
  const Geodetic g = geodetic(out.i_p, state.t, out.t_F, earth);
  out.lat_I = g.lat_I;
  out.lon_I = g.lon_I;
  out.lat_E = g.lat_E;
  out.lon_E = g.lon_E;
  return out;
}

/// IIP position in ECEF axes (R_E times the rotated unit vector).
inline Vec3 ecef_impact_position(const IipSolution& sol, double t,
                                 const EarthModel& earth) {
  return eci_to_ecef(t - earth.t_ref + sol.t_F, earth.omega) *
         (earth.radius * sol.i_p);
}

}  // namespace iip
