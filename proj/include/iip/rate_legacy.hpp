#pragma once

// IIP time derivatives by direct differentiation of the closed-form IIP:
// flight-angle rate, flight-time rate through orbital-element sensitivities,
// and the IIP unit-vector rate split along (a_r, a_theta, a_h).

#include <cmath>

#include "iip/kepler.hpp"

namespace iip {

struct OrbitalElements {
  double a = 0.0;  // semi-major axis
  double e = 0.0;
  double n = 0.0;  // mean motion
  double p = 0.0;  // semiparameter
  double E0 = 0.0;
  double Ep = 0.0;
  double M0 = 0.0;
  double Mp = 0.0;
};

struct RateSensitivities {
  double D_r_phi = 0.0;
  double D_theta_phi = 0.0;
  double D_a_t = 0.0;
  double D_e_t = 0.0;
  double D_r_a = 0.0;
  double D_theta_a = 0.0;
  double D_r_e = 0.0;
  double D_theta_e = 0.0;
  Vec3 d_r = Vec3::Zero();
  Vec3 d_theta = Vec3::Zero();
  Vec3 d_h = Vec3::Zero();
};

struct LegacyRates {
  double phi_dot = 0.0;
  double tf_dot = -1.0;
  Vec3 dip_dt = Vec3::Zero();
  double dlat_I = 0.0;
  double dlon_I = 0.0;
  double dlon_E = 0.0;
};

struct LatLonRates {
  double dlat_I = 0.0;
  double dlon_I = 0.0;
  double dlon_E = 0.0;
};

inline constexpr double kEpsEccentricity = 1e-8;
inline constexpr double kEpsAnomaly = 1e-10;

/// Elliptic elements of the osculating orbit plus the eccentric and mean
/// anomalies at the current point and at the (descending) surface crossing.
inline OrbitalElements elements_from_state(const StateKinematics& kin,
                                           const EarthModel& earth) {
  if (kin.lambda >= 2.0) {
    throw IipError(ErrorKind::EscapeVelocity, "elements require an elliptic orbit");
  }
  OrbitalElements el;
  el.a = kin.r0 / (2.0 - kin.lambda);
  el.p = kin.h * kin.h / earth.mu;
  el.n = std::sqrt(earth.mu / (el.a * el.a * el.a));

  const double e_cos0 = kin.lambda - 1.0;  // 1 - r0/a
  const double e_sin0 = kin.rdotv / std::sqrt(earth.mu * el.a);
  el.e = std::hypot(e_cos0, e_sin0);
  if (el.e < kEpsEccentricity) {
    throw IipError(ErrorKind::ZeroEccentricity,
                   "e = " + std::to_string(el.e) + " (circular orbit)");
  }
  el.E0 = std::atan2(e_sin0, e_cos0);

  const double e_cosp = 1.0 - earth.radius / el.a;
  if (e_cosp > el.e) {
    throw IipError(ErrorKind::NonImpacting, "periapsis above the surface");
  }
  const double e_sinp = -std::sqrt(std::max(0.0, el.e * el.e - e_cosp * e_cosp));
  el.Ep = std::atan2(e_sinp, e_cosp);

  el.M0 = el.E0 - el.e * std::sin(el.E0);
  el.Mp = el.Ep - el.e * std::sin(el.Ep);
  return el;
}

/// Flight-angle sensitivities to radial and tangential acceleration.
inline void phi_sensitivities(const StateKinematics& kin,
                              const FlightAngleSolution& sol,
                              const EarthModel& earth, RateSensitivities& out) {
  const double den_raw = -sol.A2 * sol.sin_phi + sol.A1 * sol.cos_phi;
  if (!(std::abs(den_raw) > 1e-12 * (std::abs(sol.A1) + std::abs(sol.A2)))) {
    throw IipError(ErrorKind::SensitivitySingularity,
                   "flight-angle denominator vanishes (grazing impact)");
  }
  const double den = earth.mu * den_raw;
  out.D_r_phi = kin.h * sol.sin_phi / den;
  out.D_theta_phi = (2.0 * kin.h * (kin.r0 / earth.radius - sol.cos_phi) +
                     kin.rdotv * sol.sin_phi) /
                    den;
}

inline double phi_dot(const StateKinematics& kin, const FlightAngleSolution& sol,
                      const EarthModel& earth, const AccelRtn& a) {
  RateSensitivities s;
  phi_sensitivities(kin, sol, earth, s);
  return -kin.h / (kin.r0 * kin.r0) + s.D_r_phi * a.r + s.D_theta_phi * a.theta;
}

/// Flight-time sensitivities to the semi-major axis and eccentricity, and of
/// those elements to radial/tangential acceleration.
inline void tf_sensitivities(const OrbitalElements& el, const StateKinematics& kin,
                             double t_F, const EarthModel& earth,
                             RateSensitivities& out) {
  const double s0 = std::sin(el.E0);
  const double sp = std::sin(el.Ep);
  if (std::abs(s0) < kEpsAnomaly || std::abs(sp) < kEpsAnomaly) {
    throw IipError(ErrorKind::AnomalySingularity,
                   "current or impact point at an apsis (sin E ~ 0)");
  }
  const double c0 = std::cos(el.E0);
  const double cp = std::cos(el.Ep);
  const double a = el.a, e = el.e, n = el.n;
  const double rp = earth.radius;

  out.D_a_t = 1.5 * t_F / a -
              (rp * (1.0 - e * cp) / sp - kin.r0 * (1.0 - e * c0) / s0) /
                  (a * a * e * n);
  out.D_e_t = ((cp * (1.0 - e * cp) / (e * sp) - c0 * (1.0 - e * c0) / (e * s0)) -
               (sp - s0)) /
              n;

  const double sg = std::sin(kin.gamma0);
  const double cg = std::cos(kin.gamma0);
  out.D_r_a = 2.0 * a * a * kin.v0 * sg / earth.mu;
  out.D_theta_a = 2.0 * a * a * kin.v0 * cg / earth.mu;
  out.D_r_e = el.p * kin.v0 * sg / (earth.mu * e);
  out.D_theta_e = (el.p * a - kin.r0 * kin.r0) * kin.v0 * cg / (earth.mu * a * e);
}

inline double tf_dot(const RateSensitivities& s, const AccelRtn& a) {
  return -1.0 + (s.D_a_t * s.D_r_a + s.D_e_t * s.D_r_e) * a.r +
         (s.D_a_t * s.D_theta_a + s.D_e_t * s.D_theta_e) * a.theta;
}

/// Sensitivities of the IIP unit vector to each RTN acceleration component.
/// Requires the flight-angle sensitivities in `s`.
inline void direction_sensitivities(const StateKinematics& kin,
                                    const FlightAngleSolution& sol,
                                    const Vec3& i_p, RateSensitivities& s) {
  const double h = kin.h;
  const double r0 = kin.r0;
  const double sp = sol.sin_phi;
  const double cp = sol.cos_phi;
  const double along_r = h * sp + kin.rdotv * cp;
  const double along_v = r0 * kin.v0 * cp;

  s.d_r = (-along_r * s.D_r_phi * kin.i_r0 + along_v * s.D_r_phi * kin.i_v0) / h;
  s.d_theta = ((r0 * cp - along_r * s.D_theta_phi) / h) * kin.i_r0 +
              (along_v * s.D_theta_phi / h) * kin.i_v0 +
              (r0 * sp / h) * kin.i_theta + (-r0 / h) * i_p;
  s.d_h = (r0 * sp / h) * kin.i_h;
}

inline Vec3 iip_unit_rate(const RateSensitivities& s, const AccelRtn& a) {
  return a.r * s.d_r + a.theta * s.d_theta + a.h * s.d_h;
}

inline LatLonRates latlon_rates(const IipSolution& sol, const Vec3& dip_dt,
                                double tf_dot_value, const EarthModel& earth) {
  const double cos_lat = std::cos(sol.lat_I);
  if (!(cos_lat > kEpsPole)) {
    throw IipError(ErrorKind::PolarSingularity, "IIP at a pole");
  }
  LatLonRates out;
  out.dlat_I = dip_dt.z() / cos_lat;
  const double cl = std::cos(sol.lon_I);
  const double sl = std::sin(sol.lon_I);
  out.dlon_I = (cl * dip_dt.y() - sl * dip_dt.x()) /
               (cl * sol.i_p.x() + sl * sol.i_p.y());
  out.dlon_E = out.dlon_I - earth.omega * (1.0 + tf_dot_value);
  return out;
}

/// All legacy sensitivities at a solved IIP. Throws on the formulation's
/// singular set (circular orbits, apsides, grazing impacts).
inline RateSensitivities legacy_sensitivities(const IipSolution& sol,
                                              const EarthModel& earth) {
  RateSensitivities s;
  phi_sensitivities(sol.kin, sol.angle, earth, s);
  const OrbitalElements el = elements_from_state(sol.kin, earth);
  tf_sensitivities(el, sol.kin, sol.t_F, earth, s);
  direction_sensitivities(sol.kin, sol.angle, sol.i_p, s);
  return s;
}

inline LegacyRates legacy_rates(const IipSolution& sol, const RateSensitivities& s,
                                const AccelRtn& a, const EarthModel& earth) {
  LegacyRates out;
  out.phi_dot = -sol.kin.h / (sol.kin.r0 * sol.kin.r0) + s.D_r_phi * a.r +
                s.D_theta_phi * a.theta;
  out.tf_dot = tf_dot(s, a);
  out.dip_dt = iip_unit_rate(s, a);
  const LatLonRates ll = latlon_rates(sol, out.dip_dt, out.tf_dot, earth);
  out.dlat_I = ll.dlat_I;
  out.dlon_I = ll.dlon_I;
  out.dlon_E = ll.dlon_E;
  return out;
}

inline LegacyRates legacy_rates(const InertialState& state, const AccelRtn& a,
                                const EarthModel& earth) {
  const IipSolution sol = compute_iip(state, earth);
  return legacy_rates(sol, legacy_sensitivities(sol, earth), a, earth);
}

/// ECEF-axes IIP velocity rebuilt from latitude/longitude rates, the only
/// route to a rotating-frame rate vector in this formulation.
inline Vec3 legacy_ecef_rate(const IipSolution& sol, const LegacyRates& rates,
                             const EarthModel& earth) {
  const double sl = std::sin(sol.lat_E), cl = std::cos(sol.lat_E);
  const double so = std::sin(sol.lon_E), co = std::cos(sol.lon_E);
  const Vec3 d_lat(-sl * co, -sl * so, cl);
  const Vec3 d_lon(-cl * so, cl * co, 0.0);
  return earth.radius * (rates.dlat_I * d_lat + rates.dlon_E * d_lon);
}

}  // namespace iip
