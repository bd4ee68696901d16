#include <gtest/gtest.h>

#include <set>

#include "expect_error.hpp"
#include "test_support.hpp"

using namespace iip;
using iip::test::expect_error;
using iip::test::kDegToRad;

namespace {

const EarthModel kEarth;

}  // namespace

TEST(EarthModel, DefaultsAndValidation) {
  EXPECT_DOUBLE_EQ(kEarth.mu, 3.986004418e14);
  EXPECT_DOUBLE_EQ(kEarth.radius, 6378137.0);
  EXPECT_DOUBLE_EQ(kEarth.omega, 7.2921150e-5);
  EXPECT_DOUBLE_EQ(kEarth.t_ref, 0.0);
  EarthModel bad;
  bad.radius = -1.0;
  expect_error(ErrorKind::ConfigError, [&] { bad.validate(); });
}

TEST(DeriveKinematics, OrthogonalSurfaceState) {
  const InertialState s{0.0, Vec3(kEarth.radius, 0, 0), Vec3(0, 7000, 0)};
  const StateKinematics k = derive_kinematics(s, kEarth);
  EXPECT_DOUBLE_EQ(k.gamma0, 0.0);
  EXPECT_NEAR(k.h, 7000.0 * kEarth.radius, 1e-6);
  EXPECT_LT((k.i_h - Vec3::UnitZ()).norm(), 1e-15);
  EXPECT_LT((k.i_theta - Vec3::UnitY()).norm(), 1e-15);
}

TEST(DeriveKinematics, RadialFlightIsDegenerate) {
  const InertialState s{0.0, Vec3(kEarth.radius, 0, 0), Vec3(7000, 0, 0)};
  expect_error(ErrorKind::DegenerateGeometry, [&] { derive_kinematics(s, kEarth); });
}

TEST(DeriveKinematics, StateS1) {
  const StateKinematics k = derive_kinematics(test::state_s1(), kEarth);
  EXPECT_NEAR(k.gamma0, 45.0 * kDegToRad, 1e-14);
  // lambda = r0 v0^2 / mu evaluated independently
  EXPECT_NEAR(k.lambda, 6578137.0 * 49e6 / 3.986004418e14, 1e-14);
  EXPECT_NEAR(k.lambda, 0.8087, 5e-5);
  EXPECT_NEAR(k.v_c, std::sqrt(kEarth.mu / 6578137.0), 1e-9);
}

TEST(DeriveKinematics, InvariantsOverRandomStates) {
  for (const auto& s : test::random_states(500, 11)) {
    const StateKinematics k = derive_kinematics(s, kEarth);
    EXPECT_LE(std::abs(k.h - k.r0 * k.v0 * std::cos(k.gamma0)), 1e-10 * k.h);
    EXPECT_NEAR(std::sin(k.gamma0), k.rdotv / (k.r0 * k.v0), 1e-10);
    for (const Vec3* u : {&k.i_r0, &k.i_v0, &k.i_h, &k.i_theta}) {
      EXPECT_NEAR(u->norm(), 1.0, 1e-12);
    }
    EXPECT_NEAR(k.i_theta.dot(k.i_r0), 0.0, 1e-12);
    EXPECT_NEAR(k.i_theta.dot(k.i_h), 0.0, 1e-12);
    EXPECT_GT(k.gamma0, -kPi / 2);
    EXPECT_LT(k.gamma0, kPi / 2);
  }
}

TEST(RtnToVnb, Examples) {
  AccelVnb a = rtn_to_vnb({0, 1, 0}, 0.0);
  EXPECT_DOUBLE_EQ(a.a1, 1.0);
  EXPECT_DOUBLE_EQ(a.a2, 0.0);
  EXPECT_DOUBLE_EQ(a.a3, 0.0);
  a = rtn_to_vnb({1, 0, 0}, 0.0);
  EXPECT_DOUBLE_EQ(a.a1, 0.0);
  EXPECT_DOUBLE_EQ(a.a2, 0.0);
  EXPECT_DOUBLE_EQ(a.a3, -1.0);
  for (double g : {-1.0, 0.0, 0.3, 1.2}) {
    a = rtn_to_vnb({0, 0, 1}, g);
    EXPECT_DOUBLE_EQ(a.a1, 0.0);
    EXPECT_DOUBLE_EQ(a.a2, -1.0);
    EXPECT_DOUBLE_EQ(a.a3, 0.0);
  }
}

TEST(RtnToVnb, RoundTripAndPhysicalVectorProperty) {
  std::mt19937_64 rng(5);
  const auto states = test::random_states(300, 12);
  for (const auto& s : states) {
    const StateKinematics k = derive_kinematics(s, kEarth);
    const AccelRtn a = test::random_accel(rng);
    const AccelVnb b = rtn_to_vnb(a, k.gamma0);
    const AccelRtn back = vnb_to_rtn(b, k.gamma0);
    EXPECT_NEAR(back.r, a.r, 1e-13 * 20);
    EXPECT_NEAR(back.theta, a.theta, 1e-13 * 20);
    EXPECT_NEAR(back.h, a.h, 1e-13 * 20);

    const VnbTriad f = vnb_frame(k);
    const Vec3 phys_rtn = a.r * k.i_r0 + a.theta * k.i_theta + a.h * k.i_h;
    const Vec3 phys_vnb = b.a1 * f.i1 + b.a2 * f.i2 + b.a3 * f.i3;
    EXPECT_LE((phys_rtn - phys_vnb).norm(), 1e-12 * phys_rtn.norm());
    EXPECT_LE((from_rtn(a, k) - phys_rtn).norm(), 1e-12 * phys_rtn.norm());
    const AccelRtn again = to_rtn(phys_rtn, k);
    EXPECT_NEAR(again.r, a.r, 1e-12 * 20);
    EXPECT_NEAR(again.theta, a.theta, 1e-12 * 20);
    EXPECT_NEAR(again.h, a.h, 1e-12 * 20);
  }
}

TEST(VnbFrame, EquatorialEastward) {
  const StateKinematics k =
      derive_kinematics({0.0, Vec3(kEarth.radius, 0, 0), Vec3(0, 7000, 0)}, kEarth);
  const VnbTriad f = vnb_frame(k);
  EXPECT_LT((f.i1 - Vec3::UnitY()).norm(), 1e-15);
  EXPECT_LT((f.i2 + Vec3::UnitZ()).norm(), 1e-15);
  EXPECT_LT((f.i3 + Vec3::UnitX()).norm(), 1e-15);
}

TEST(VnbFrame, OrthonormalRightHanded) {
  for (const auto& s : test::random_states(200, 13)) {
    const VnbTriad f = vnb_frame(derive_kinematics(s, kEarth));
    EXPECT_LE((f.i1.cross(f.i2) - f.i3).norm(), 1e-14);
    Mat3 m;
    m << f.i1, f.i2, f.i3;
    EXPECT_LE((m.transpose() * m - Mat3::Identity()).norm(), 1e-14);
  }
  const VnbTriad f = vnb_frame(derive_kinematics(test::state_s1(), kEarth));
  Mat3 m;
  m << f.i1, f.i2, f.i3;
  EXPECT_LE((m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(EnuBasis, Examples) {
  EnuBasis b = enu_basis(Vec3::UnitX());
  EXPECT_LT((b.east - Vec3::UnitY()).norm(), 1e-15);
  EXPECT_LT((b.north - Vec3::UnitZ()).norm(), 1e-15);
  EXPECT_LT((b.west + Vec3::UnitY()).norm(), 1e-15);

  const double c = 1.0 / std::sqrt(2.0);
  b = enu_basis(Vec3(c, c, 0));
  EXPECT_LT((b.east - Vec3(-c, c, 0)).norm(), 1e-15);
  EXPECT_LT((b.north - Vec3::UnitZ()).norm(), 1e-15);

  expect_error(ErrorKind::PolarSingularity, [] { enu_basis(Vec3::UnitZ()); });
}

TEST(EnuBasis, OrthonormalProperty) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 p = test::random_unit(rng);
    const EnuBasis b = enu_basis(p);
    EXPECT_NEAR(b.east.norm(), 1.0, 1e-13);
    EXPECT_NEAR(b.north.norm(), 1.0, 1e-13);
    EXPECT_NEAR(b.east.dot(b.north), 0.0, 1e-13);
    EXPECT_NEAR(b.north.dot(p), 0.0, 1e-13);
    EXPECT_NEAR(b.east.dot(p), 0.0, 1e-13);
    EXPECT_LT((b.west + b.east).norm(), 1e-15);
  }
}

TEST(EciToEcef, Examples) {
  EXPECT_LE((eci_to_ecef(0.0, kEarth.omega) - Mat3::Identity()).norm(), 0.0);
  const double quarter = (kPi / 2) / kEarth.omega;
  const Vec3 x = eci_to_ecef(quarter, kEarth.omega) * Vec3::UnitX();
  EXPECT_LT((x - Vec3(0, -1, 0)).norm(), 1e-15);
  for (double t : {-5000.0, 1.0, 123.4, 86400.0}) {
    const Mat3 T = eci_to_ecef(t, kEarth.omega);
    EXPECT_LE((T.transpose() * T - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_NEAR(T.determinant(), 1.0, 1e-14);
  }
}

TEST(WrapPi, Range) {
  EXPECT_DOUBLE_EQ(wrap_pi(kPi), kPi);
  EXPECT_DOUBLE_EQ(wrap_pi(-kPi), kPi);
  EXPECT_NEAR(wrap_pi(3 * kPi / 2), -kPi / 2, 1e-15);
  EXPECT_NEAR(wrap_pi(0.25), 0.25, 0.0);
}

TEST(Errors, DistinctNamesAndPrefix) {
  std::set<std::string> names;
  for (ErrorKind k : kAllErrorKinds) names.insert(std::string(to_string(k)));
  EXPECT_EQ(names.size(), std::size(kAllErrorKinds));
  const IipError e(ErrorKind::NonImpacting, "detail");
  EXPECT_EQ(std::string(e.what()), "NonImpacting: detail");
}
