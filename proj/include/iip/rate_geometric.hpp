#pragma once

// IIP time derivatives by geometric decomposition on the plane tangent to the
// IIP: a downrange part from the in-plane velocity changes and a crossrange
// part from the azimuth change, then Earth-rotation compensation and the
// rotation into ECEF axes.

#include <cmath>

#include "iip/kepler.hpp"
#include "iip/rate_legacy.hpp"

namespace iip {

struct TangentFrame {
  Vec3 i_D;  // downrange
  Vec3 i_C;  // crossrange
  double beta1 = 0.0;
  double beta2 = 0.0;
};

struct PhiPartials {
  double dphi_dv0 = 0.0;
  double dphi_dgamma0 = 0.0;
  double D1 = 0.0;
};

struct VelocityElementRates {
  double v0_dot = 0.0;
  double gamma0_dot = 0.0;
  double chi0_dot = 0.0;
};

struct GeometricRates {
  Vec3 p_dot_D = Vec3::Zero();
  Vec3 p_dot_C = Vec3::Zero();
  Vec3 p_dot = Vec3::Zero();
  Vec3 p_dot_W = Vec3::Zero();
  Vec3 p_dot_EI = Vec3::Zero();  // rotating-frame rate, ECI axes
  Vec3 p_dot_E = Vec3::Zero();   // rotating-frame rate, ECEF axes
  double tf_dot_a = 0.0;         // 1 + tf_dot
  double phi_dot = 0.0;          // gravity drift plus the acceleration part
  double dlat_I = 0.0;
  double dlon_I = 0.0;
  double dlon_E = 0.0;
};

inline constexpr double kEpsCosGamma = 1e-12;

namespace detail {
inline void require_non_vertical(const StateKinematics& kin) {
  if (!(std::cos(kin.gamma0) > kEpsCosGamma)) {
    throw IipError(ErrorKind::DegenerateGeometry, "vertical flight (cos gamma0 ~ 0)");
  }
}
}  // namespace detail

inline VelocityElementRates velocity_element_rates(const AccelVnb& a,
                                                   const StateKinematics& kin) {
  detail::require_non_vertical(kin);
  return {a.a1, -a.a3 / kin.v0, -a.a2 / (kin.v0 * std::cos(kin.gamma0))};
}

inline TangentFrame downrange_dir(const StateKinematics& kin,
                                  const FlightAngleSolution& sol) {
  detail::require_non_vertical(kin);
  const double cg = std::cos(kin.gamma0);
  TangentFrame f;
  f.beta1 = -std::sin(sol.phi + kin.gamma0) / cg;
  f.beta2 = sol.cos_phi / cg;
  f.i_D = f.beta1 * kin.i_r0 + f.beta2 * kin.i_v0;
  const Vec3 i_p = iip_unit_vector(kin, sol);
  f.i_C = i_p.cross(f.i_D);
  return f;
}

/// Partials of the flight angle with respect to speed and flight path angle,
/// from implicit differentiation of the impact condition.
inline PhiPartials phi_partials(const StateKinematics& kin,
                                const FlightAngleSolution& sol,
                                const EarthModel& earth) {
  const double g = kin.gamma0;
  const double phi = sol.phi;
  const double mu_rv2 = earth.mu / (kin.r0 * kin.v0 * kin.v0);
  PhiPartials out;
  out.D1 = mu_rv2 * sol.sin_phi - 0.5 * (std::sin(2.0 * g + phi) + sol.sin_phi);
  const double scale = mu_rv2 * std::abs(sol.sin_phi) +
                       0.5 * (std::abs(std::sin(2.0 * g + phi)) + std::abs(sol.sin_phi));
  if (!(std::abs(out.D1) > 1e-12 * scale)) {
    throw IipError(ErrorKind::SensitivitySingularity,
                   "D1 vanishes (grazing impact or zero flight angle)");
  }
  out.dphi_dv0 = 2.0 * mu_rv2 * (1.0 - sol.cos_phi) / kin.v0 / out.D1;
  out.dphi_dgamma0 = (std::sin(2.0 * g + phi) -
                      (kin.r0 / earth.radius) * std::sin(2.0 * g)) /
                     out.D1;
  return out;
}

inline Vec3 downrange_rate(const StateKinematics& kin, const PhiPartials& partials,
                           const TangentFrame& frame, const AccelVnb& a,
                           const EarthModel& earth) {
  return earth.radius *
         (partials.dphi_dv0 * a.a1 - partials.dphi_dgamma0 * a.a3 / kin.v0) *
         frame.i_D;
}

/// Plane-change rate. The cross-range angle rate is sin(phi) times the azimuth
/// rate; scaling by R_E gives the surface velocity.
inline Vec3 crossrange_rate(const StateKinematics& kin, const FlightAngleSolution& sol,
                            const TangentFrame& frame, const AccelVnb& a,
                            const EarthModel& earth) {
  detail::require_non_vertical(kin);
  return -earth.radius * (sol.sin_phi / (kin.v0 * std::cos(kin.gamma0))) * a.a2 *
         frame.i_C;
}

/// Sums the tangent-plane parts, projects onto east/north and adds the Earth
/// rotation term. `t` is the state epoch.
inline GeometricRates assemble_rates(double t, const IipSolution& sol,
                                     const Vec3& p_dot_D, const Vec3& p_dot_C,
                                     double tf_dot_value, const EarthModel& earth) {
  GeometricRates out;
  out.p_dot_D = p_dot_D;
  out.p_dot_C = p_dot_C;
  out.p_dot = p_dot_D + p_dot_C;

  const EnuBasis enu = enu_basis(sol.i_p);
  const double rp = earth.radius;
  const double cos_lat = std::cos(sol.lat_I);
  if (!(cos_lat > kEpsPole)) {
    throw IipError(ErrorKind::PolarSingularity, "IIP at a pole");
  }
  out.dlat_I = out.p_dot.dot(enu.north) / rp;
  out.dlon_I = out.p_dot.dot(enu.east) / (rp * cos_lat);

  out.tf_dot_a = 1.0 + tf_dot_value;
  out.p_dot_W = (rp * earth.omega * cos_lat * out.tf_dot_a) * enu.west;
  out.p_dot_EI = out.p_dot + out.p_dot_W;
  out.p_dot_E = eci_to_ecef(t - earth.t_ref + sol.t_F, earth.omega) * out.p_dot_EI;
  out.dlon_E = out.dlon_I - earth.omega * out.tf_dot_a;
  return out;
}

/// Inertial IIP rate only; needs no flight-time derivative.
inline Vec3 geometric_inertial_rate(const IipSolution& sol, const AccelRtn& a_rtn,
                                    const EarthModel& earth) {
  const AccelVnb a = rtn_to_vnb(a_rtn, sol.kin.gamma0);
  const TangentFrame frame = downrange_dir(sol.kin, sol.angle);
  const PhiPartials partials = phi_partials(sol.kin, sol.angle, earth);
  return downrange_rate(sol.kin, partials, frame, a, earth) +
         crossrange_rate(sol.kin, sol.angle, frame, a, earth);
}

/// Full geometric pipeline. The flight-time rate comes from the element
/// sensitivities shared with the legacy formulation.
inline GeometricRates geometric_rates(const InertialState& state, const IipSolution& sol,
                                      const AccelRtn& a_rtn, const EarthModel& earth) {
  const AccelVnb a = rtn_to_vnb(a_rtn, sol.kin.gamma0);
  const TangentFrame frame = downrange_dir(sol.kin, sol.angle);
  const PhiPartials partials = phi_partials(sol.kin, sol.angle, earth);
  const Vec3 pd = downrange_rate(sol.kin, partials, frame, a, earth);
  const Vec3 pc = crossrange_rate(sol.kin, sol.angle, frame, a, earth);

  RateSensitivities s;
  const OrbitalElements el = elements_from_state(sol.kin, earth);
  tf_sensitivities(el, sol.kin, sol.t_F, earth, s);
  GeometricRates out = assemble_rates(state.t, sol, pd, pc, tf_dot(s, a_rtn), earth);
  out.phi_dot = -sol.kin.h / (sol.kin.r0 * sol.kin.r0) + partials.dphi_dv0 * a.a1 -
                partials.dphi_dgamma0 * a.a3 / sol.kin.v0;
  return out;
}

inline GeometricRates geometric_rates(const InertialState& state, const AccelRtn& a,
                                      const EarthModel& earth) {
  return geometric_rates(state, compute_iip(state, earth), a, earth);
}

}  // namespace iip
