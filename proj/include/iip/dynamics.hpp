#pragma once

// Translational point-mass dynamics: inverse-square gravity plus an external
// acceleration, integrated with the classical fixed-step RK4 scheme.

#include <cmath>

#include "iip/core_frames.hpp"

namespace iip {

struct PosVel {
  Vec3 r = Vec3::Zero();
  Vec3 v = Vec3::Zero();
};

inline Vec3 gravity(const Vec3& r, double mu) {
  const double rn = r.norm();
  return -mu / (rn * rn * rn) * r;
}

/// One RK4 step. `accel(t, r, v)` returns the non-gravitational acceleration.
template <typename Accel>
PosVel rk4_step(const PosVel& y, double t, double dt, double mu, Accel&& accel) {
  auto deriv = [&](double tt, const PosVel& s) {
    return PosVel{s.v, gravity(s.r, mu) + accel(tt, s.r, s.v)};
  };
  const PosVel k1 = deriv(t, y);
  const PosVel k2 = deriv(t + 0.5 * dt, {y.r + 0.5 * dt * k1.r, y.v + 0.5 * dt * k1.v});
  const PosVel k3 = deriv(t + 0.5 * dt, {y.r + 0.5 * dt * k2.r, y.v + 0.5 * dt * k2.v});
  const PosVel k4 = deriv(t + dt, {y.r + dt * k3.r, y.v + dt * k3.v});
  return {y.r + dt / 6.0 * (k1.r + 2.0 * k2.r + 2.0 * k3.r + k4.r),
          y.v + dt / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v)};
}

inline PosVel rk4_step(const PosVel& y, double t, double dt, double mu) {
  return rk4_step(y, t, dt, mu,
                  [](double, const Vec3&, const Vec3&) { return Vec3::Zero().eval(); });
}

/// Integrates over `span` (may be negative) with steps no longer than max_step.
template <typename Accel>
PosVel propagate(const PosVel& y0, double t0, double span, double max_step, double mu,
                 Accel&& accel) {
  const int n = std::max(1, static_cast<int>(std::ceil(std::abs(span) / max_step)));
  const double h = span / n;
  PosVel y = y0;
  for (int i = 0; i < n; ++i) y = rk4_step(y, t0 + i * h, h, mu, accel);
  return y;
}

}  // namespace iip
