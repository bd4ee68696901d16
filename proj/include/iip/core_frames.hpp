#pragma once

// Shared constants, state kinematics and the frames used by both IIP rate
// formulations. All quantities are SI with angles in radians.

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "iip/errors.hpp"

namespace iip {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Spherical rotating Earth. The impact radius is the Earth radius.
struct EarthModel {
  double mu = 3.986004418e14;      // m^3/s^2
  double radius = 6378137.0;       // m
  double omega = 7.2921150e-5;     // rad/s
  double t_ref = 0.0;              // ECI/ECEF alignment epoch, s

  void validate() const {
    if (!(mu > 0.0) || !(radius > 0.0) || !(omega > 0.0) ||
        !std::isfinite(t_ref)) {
      throw IipError(ErrorKind::ConfigError,
                     "earth model requires mu, radius, omega > 0 and finite t_ref");
    }
  }
};

/// ECI position/velocity at epoch t.
struct InertialState {
  double t = 0.0;
  Vec3 r = Vec3::Zero();
  Vec3 v = Vec3::Zero();
};

struct StateKinematics {
  double r0 = 0.0;
  double v0 = 0.0;
  Vec3 i_r0;
  Vec3 i_v0;
  double gamma0 = 0.0;  // flight path angle above local horizontal
  double h = 0.0;
  Vec3 i_h;
  Vec3 i_theta;         // i_h x i_r0
  double lambda = 0.0;  // (v0 / v_circular)^2
  double v_c = 0.0;
  double rdotv = 0.0;
};

/// External acceleration along (i_r, i_theta, i_h).
struct AccelRtn {
  double r = 0.0;
  double theta = 0.0;
  double h = 0.0;
};

/// External acceleration along (i_1 = i_v, i_2 = -i_h, i_3 = i_1 x i_2).
struct AccelVnb {
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;
};

struct VnbTriad {
  Vec3 i1;
  Vec3 i2;
  Vec3 i3;
};

struct EnuBasis {
  Vec3 east;
  Vec3 north;
  Vec3 west;
};

inline StateKinematics derive_kinematics(const InertialState& state,
                                         const EarthModel& earth) {
  StateKinematics k;
  k.r0 = state.r.norm();
  k.v0 = state.v.norm();
  if (!(k.r0 > 0.0) || !(k.v0 > 0.0)) {
    throw IipError(ErrorKind::DegenerateGeometry, "zero position or velocity");
  }
  const Vec3 h_vec = state.r.cross(state.v);
  k.h = h_vec.norm();
  if (!(k.h > 1e-6 * k.r0 * k.v0)) {
    throw IipError(ErrorKind::DegenerateGeometry,
                   "position and velocity are parallel (h ~ 0)");
  }
  k.i_r0 = state.r / k.r0;
  k.i_v0 = state.v / k.v0;
  k.i_h = h_vec / k.h;
  k.i_theta = k.i_h.cross(k.i_r0);
  k.rdotv = state.r.dot(state.v);
  k.gamma0 = std::atan2(k.rdotv, k.h);
  k.lambda = k.r0 * k.v0 * k.v0 / earth.mu;
  k.v_c = std::sqrt(earth.mu / k.r0);
  return k;
}

inline AccelVnb rtn_to_vnb(const AccelRtn& a, double gamma0) {
  const double s = std::sin(gamma0);
  const double c = std::cos(gamma0);
  return {c * a.theta + s * a.r, -a.h, s * a.theta - c * a.r};
}

// Inverse of rtn_to_vnb; the 2x2 in-plane block is orthogonal.
inline AccelRtn vnb_to_rtn(const AccelVnb& a, double gamma0) {
  const double s = std::sin(gamma0);
  const double c = std::cos(gamma0);
  return {s * a.a1 - c * a.a3, c * a.a1 + s * a.a3, -a.a2};
}

inline VnbTriad vnb_frame(const StateKinematics& kin) {
  VnbTriad f;
  f.i1 = kin.i_v0;
  f.i2 = -kin.i_h;
  f.i3 = f.i1.cross(f.i2);
  return f;
}

/// RTN components of a vector given in ECI axes.
inline AccelRtn to_rtn(const Vec3& a, const StateKinematics& kin) {
  return {a.dot(kin.i_r0), a.dot(kin.i_theta), a.dot(kin.i_h)};
}

inline Vec3 from_rtn(const AccelRtn& a, const StateKinematics& kin) {
  return a.r * kin.i_r0 + a.theta * kin.i_theta + a.h * kin.i_h;
}

inline constexpr double kEpsPole = 1e-12;

/// Local east/north/west at the IIP direction i_p.
inline EnuBasis enu_basis(const Vec3& i_p) {
  const double rho = std::hypot(i_p.x(), i_p.y());
  if (!(rho > kEpsPole)) {
    throw IipError(ErrorKind::PolarSingularity, "IIP at a pole");
  }
  EnuBasis b;
  b.east = Vec3(-i_p.y(), i_p.x(), 0.0) / rho;
  b.north = i_p.cross(b.east);
  b.west = -b.east;
  return b;
}

/// Rotation taking ECI axes to ECEF axes after the Earth turned by
/// omega * t_elapsed.
inline Mat3 eci_to_ecef(double t_elapsed, double omega) {
  const double angle = omega * t_elapsed;
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Mat3 m;
  m << c, s, 0.0,
      -s, c, 0.0,
      0.0, 0.0, 1.0;
  return m;
}

/// Wraps an angle into (-pi, pi].
inline double wrap_pi(double angle) {
  double w = std::remainder(angle, kTwoPi);
  if (w <= -kPi) w += kTwoPi;
  return w;
}

}  // namespace iip
