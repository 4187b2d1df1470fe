#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "support/approx.hpp"
#include "support/models.hpp"
#include "syncstab/equilibria.hpp"
#include "syncstab/errors.hpp"
#include "syncstab/geometry.hpp"
#include "syncstab/model.hpp"
#include "syncstab/textio.hpp"

using namespace syncstab;
using test::high_voltage_model;
using test::low_voltage_model;
using test::random_feasible_model;
using test::random_interior_i_f;

TEST_SUITE_BEGIN("geometry");

namespace {

double cross2(double ax, double ay, double bx, double by) {
  return ax * by - ay * bx;
}

// Counterclockwise angle from (X - Y) to (Z - Y).
double angle_at(PowerPoint X, PowerPoint Y, PowerPoint Z) {
  const double ax = X.P - Y.P, ay = X.Q - Y.Q;
  const double bx = Z.P - Y.P, by = Z.Q - Y.Q;
  return std::atan2(cross2(ax, ay, bx, by), ax * bx + ay * by);
}

}  // namespace

TEST_CASE("low-voltage construction") {
  const auto m = low_voltage_model();
  const auto g = build_geometry(m.p, m.g);
  CHECK(g.C.P / 1e3 == test::near(-42.32, 0.01));
  CHECK(g.C.Q == 0.0);
  CHECK(g.r / 1e3 == test::near(51.32, 0.01));
  CHECK(g.M.P / 1e3 == test::near(-0.926, 0.001));
  CHECK(g.M.Q / 1e3 == test::near(-8.804, 0.001));
  CHECK(g.i_f_zero == test::near(2.99, 0.01));
  CHECK(g.orientation == Orientation::MRightOfC);
  CHECK(g.If_plus_lo == doctest::Approx(g.i_f_minus));
  CHECK(g.If_plus_hi == doctest::Approx(g.i_f_zero));
  // consistency with the power roots: C_P + r = P_r
  const auto [P_l, P_r] = solve_pl_pr(m.p, m.g);
  CHECK(g.C.P + g.r == doctest::Approx(P_r).epsilon(1e-9));
  CHECK(g.C.P - g.r == doctest::Approx(P_l).epsilon(1e-9));
}

TEST_CASE("zero torque puts the origin and M on the circle") {
  auto m = low_voltage_model();
  m.p.Tm = 0.0;
  const auto g = build_geometry(m.p, m.g);
  const double cnorm = std::hypot(g.C.P, g.C.Q);
  CHECK(g.r == doctest::Approx(cnorm).epsilon(1e-12));
  const double dM = std::hypot(g.M.P - g.C.P, g.M.Q - g.C.Q);
  CHECK(dM == doctest::Approx(g.r).epsilon(1e-12));
}

TEST_CASE("construction rejected when the assumption fails") {
  auto m = low_voltage_model();
  const double R = m.p.n * m.p.Rs;
  m.p.Tm = -1.01 * m.g.V * m.g.V / (4.0 * R * m.g.omega_g);
  CHECK_THROWS_AS(build_geometry(m.p, m.g), InfeasibleError);
}

TEST_CASE("circle invariants on random models") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = random_feasible_model(rng);
    const auto g = build_geometry(m.p, m.g);
    const double cnorm = std::hypot(g.C.P, g.C.Q);

    // |M - C| = |C|
    CHECK(std::hypot(g.M.P - g.C.P, g.M.Q - g.C.Q) ==
          doctest::Approx(cnorm).epsilon(1e-12));
    // angles at M and at the origin both equal phi
    const PowerPoint O{0.0, 0.0};
    CHECK(angle_at(O, g.M, g.C) == doctest::Approx(g.phi).epsilon(1e-9));
    CHECK(angle_at(g.C, O, g.M) == doctest::Approx(g.phi).epsilon(1e-9));
    // M inside the circle iff the equilibrium torque is positive
    const auto d = derived_constants(m.p, m.g);
    const double dMC = std::hypot(g.M.P - g.C.P, g.M.Q - g.C.Q);
    if (d.Tm_tilde > 0.0) CHECK(dMC < g.r);

    for (int s = 0; s < 3; ++s) {
      const double i_f = random_interior_i_f(rng, m);
      for (const SBranch b : {SBranch::S1, SBranch::S2}) {
        const auto cp = s_point(i_f, b, m.p, m.g);
        // on the circle
        CHECK(std::hypot(cp.pq.P - g.C.P, cp.pq.Q - g.C.Q) ==
              doctest::Approx(g.r).epsilon(1e-9));
        // distance law
        const double dist = std::hypot(cp.pq.P - g.M.P, cp.pq.Q - g.M.Q);
        const double expected = m.g.V / std::hypot(g.Z_p, g.Z_q) * m.p.m *
                                i_f * m.g.omega_g;
        CHECK(dist == doctest::Approx(expected).epsilon(1e-9));
        // matches the power map at the matching equilibrium
        const auto [x1, x2] = equilibria4(i_f, m.p, m.g);
        const auto pq =
            powers_from_state(b == SBranch::S1 ? x1 : x2, m.g.V);
        CHECK(cp.pq.P ==
              doctest::Approx(pq.P).epsilon(1e-9).scale(cnorm + g.r));
        CHECK(cp.pq.Q ==
              doctest::Approx(pq.Q).epsilon(1e-9).scale(cnorm + g.r));
      }
      // the chord angle at M reproduces the power angle
      const auto cp1 = s_point(i_f, SBranch::S1, m.p, m.g);
      CHECK(angle_at(cp1.pq, g.M, O) ==
            doctest::Approx(cp1.delta).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE("endpoints are the nearest and farthest circle points from M") {
  const auto m = low_voltage_model();
  const auto g = build_geometry(m.p, m.g);
  const auto near = s_point(g.i_f_minus, SBranch::S1, m.p, m.g);
  const auto far = s_point(g.i_f_plus, SBranch::S1, m.p, m.g);
  const auto mid =
      s_point(0.5 * (g.i_f_minus + g.i_f_plus), SBranch::S1, m.p, m.g);
  const auto dist = [&](const PowerPoint& p) {
    return std::hypot(p.P - g.M.P, p.Q - g.M.Q);
  };
  CHECK(dist(near.pq) < dist(mid.pq));
  CHECK(dist(mid.pq) < dist(far.pq));
  // endpoints sit on the line through M and C; arccos is ill-conditioned
  // where |Lambda| = 1, so allow sqrt(eps)-level slack here
  for (const auto& cp : {near, far}) {
    const double c = cross2(cp.pq.P - g.M.P, cp.pq.Q - g.M.Q, g.C.P - g.M.P,
                            g.C.Q - g.M.Q);
    CHECK(std::abs(c) / (dist(cp.pq) * std::hypot(g.C.P - g.M.P, g.C.Q - g.M.Q)) <
          1e-6);
  }
}

TEST_CASE("s_point at the nominal operating current") {
  const auto m = low_voltage_model();
  const auto cp = s_point(0.5428, SBranch::S1, m.p, m.g);
  CHECK(cp.pq.P / 1e3 == test::near(9.0, 0.05));
  CHECK(std::abs(cp.pq.Q) / 1e3 < 0.05);
}

TEST_CASE("s_point rejects currents outside the interval") {
  const auto m = low_voltage_model();
  const auto iv = if_interval(m.p, m.g);
  CHECK_THROWS_AS(s_point(iv.i_f_plus * 1.2, SBranch::S1, m.p, m.g),
                  DomainError);
  CHECK_THROWS_AS(s_point(-1.0, SBranch::S1, m.p, m.g), DomainError);
}

TEST_CASE("counterclockwise motion and the power-angle endpoints") {
  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 20; ++trial) {
    auto m = random_feasible_model(rng);
    const auto d = derived_constants(m.p, m.g);
    if (!(m.g.omega_g * d.L > d.R) || d.Tm_tilde <= 0.0) continue;
    const auto iv = if_interval(m.p, m.g);
    const int n = 200;
    double prev_angle = 0.0, prev_delta = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double i_f =
          iv.i_f_minus + (iv.i_f_plus - iv.i_f_minus) * i / double(n);
      const auto cp = s_point(i_f, SBranch::S1, m.p, m.g);
      // the angle of S1 - M is phi - delta_1, increasing in i_f
      const double ang = d.phi - cp.delta;
      if (i > 0) {
        CHECK(ang > prev_angle);
        CHECK(cp.delta < prev_delta);
      }
      prev_angle = ang;
      prev_delta = cp.delta;
    }
    // delta_1 sweeps from pi - phi down to -phi
    const auto first = s_point(iv.i_f_minus, SBranch::S1, m.p, m.g);
    const auto last = s_point(iv.i_f_plus, SBranch::S1, m.p, m.g);
    CHECK(first.delta ==
          test::near(std::numbers::pi - d.phi, 1e-6));
    CHECK(last.delta == test::near(-d.phi, 1e-6));
  }
}

TEST_CASE("negative torque pins both interval endpoints at -phi") {
  auto m = low_voltage_model();
  m.p.Tm = -20.0;
  const auto d = derived_constants(m.p, m.g);
  const auto iv = if_interval(m.p, m.g);
  REQUIRE(iv.kind == IfKind::Closed);
  CHECK(iv.i_f_minus > 0.0);
  const auto lo = s_point(iv.i_f_minus, SBranch::S1, m.p, m.g);
  const auto hi = s_point(iv.i_f_plus, SBranch::S1, m.p, m.g);
  CHECK(lo.delta == test::near(-d.phi, 1e-6));
  CHECK(hi.delta == test::near(-d.phi, 1e-6));
}

TEST_CASE("reactive power increases exactly on the monotone sub-interval") {
  // a low-inductance variant flips the orientation (omega_g L < R), so the
  // bottom-of-circle branch of the construction is exercised as well
  auto flipped = low_voltage_model();
  flipped.p.Ls = 0.0002;
  {
    const auto d = derived_constants(flipped.p, flipped.g);
    REQUIRE(flipped.g.omega_g * d.L < d.R);
    const auto g = build_geometry(flipped.p, flipped.g);
    REQUIRE(g.orientation == Orientation::MLeftOrBelowC);
    REQUIRE(g.If_plus_lo == doctest::Approx(g.i_f_zero));
    REQUIRE(g.If_plus_hi == doctest::Approx(g.i_f_plus));
  }
  for (const auto& m : {low_voltage_model(), high_voltage_model(), flipped}) {
    const auto g = build_geometry(m.p, m.g);
    const int n = 1000;
    for (int i = 0; i + 1 < n; ++i) {
      const double a =
          g.i_f_minus + (g.i_f_plus - g.i_f_minus) * i / double(n - 1);
      const double b =
          g.i_f_minus + (g.i_f_plus - g.i_f_minus) * (i + 1) / double(n - 1);
      const double qa = s_point(a, SBranch::S1, m.p, m.g).pq.Q;
      const double qb = s_point(b, SBranch::S1, m.p, m.g).pq.Q;
      if (a >= g.If_plus_lo && b <= g.If_plus_hi) {
        CHECK(qb - qa > 0.0);
      } else if (b <= g.If_plus_lo || a >= g.If_plus_hi) {
        CHECK_FALSE(qb - qa > 0.0);
      }
    }
  }
}

TEST_CASE("second branch mirrors the first across the chord line") {
  const auto m = low_voltage_model();
  const auto g = build_geometry(m.p, m.g);
  std::mt19937_64 rng(5);
  for (int s = 0; s < 50; ++s) {
    const double i_f = random_interior_i_f(rng, m);
    const auto p1 = s_point(i_f, SBranch::S1, m.p, m.g).pq;
    const auto p2 = s_point(i_f, SBranch::S2, m.p, m.g).pq;
    // mirror images: equal distance to the line through M and C, opposite
    // signed side, equal distance from M
    const double lx = g.C.P - g.M.P, ly = g.C.Q - g.M.Q;
    const double s1 = cross2(lx, ly, p1.P - g.M.P, p1.Q - g.M.Q);
    const double s2 = cross2(lx, ly, p2.P - g.M.P, p2.Q - g.M.Q);
    CHECK(s1 == doctest::Approx(-s2).epsilon(1e-9).scale(std::abs(s1) + 1.0));
    CHECK(std::hypot(p1.P - g.M.P, p1.Q - g.M.Q) ==
          doctest::Approx(std::hypot(p2.P - g.M.P, p2.Q - g.M.Q))
              .epsilon(1e-9));
  }
}

TEST_CASE("exceptional point") {
  const auto m = low_voltage_model();
  const auto d = derived_constants(m.p, m.g);
  const auto e = exceptional_point(m.p, m.g);
  const double wL = m.g.omega_g * d.L;
  const double z2 = d.R * d.R + wL * wL;
  CHECK(e.pq.P ==
        doctest::Approx(-m.g.V * m.g.V * d.R / z2).epsilon(1e-12));
  CHECK(e.pq.Q == doctest::Approx(-m.g.V * m.g.V * wL / z2).epsilon(1e-12));
  CHECK_FALSE(e.hit);  // requires zero equilibrium torque

  auto mz = m;
  mz.p.Tm = 0.0;
  mz.p.Qset = e.pq.Q;
  CHECK(exceptional_point(mz.p, mz.g).hit);
}

TEST_CASE("secant pair for negative torque") {
  auto m = low_voltage_model();
  m.p.Tm = -20.0;
  SUBCASE("two positive roots, collinear with M") {
    const auto [i_f1, i_f2] = secant_pair(0.9, m.p, m.g);
    CHECK(i_f2 > 0.0);
    CHECK(i_f1 > i_f2);
    const auto g = build_geometry(m.p, m.g);
    const auto a = s_point(i_f1, SBranch::S1, m.p, m.g).pq;
    const auto b = s_point(i_f2, SBranch::S1, m.p, m.g).pq;
    const double c = cross2(a.P - g.M.P, a.Q - g.M.Q, b.P - g.M.P,
                            b.Q - g.M.Q);
    const double scale = std::hypot(a.P - g.M.P, a.Q - g.M.Q) *
                         std::hypot(b.P - g.M.P, b.Q - g.M.Q);
    CHECK(std::abs(c) / scale < 1e-9);
  }
  SUBCASE("double root at the curve minimum") {
    const double R = m.p.n * m.p.Rs;
    const double lambda_min =
        2.0 * std::sqrt(20.0 * m.g.omega_g * R) / m.g.V;
    const auto [i_f1, i_f2] = secant_pair(lambda_min, m.p, m.g);
    CHECK(i_f1 == doctest::Approx(i_f2).epsilon(1e-6));
  }
  SUBCASE("rejected out of range") {
    CHECK_THROWS_AS(secant_pair(0.1, m.p, m.g), DomainError);
    CHECK_THROWS_AS(secant_pair(1.5, m.p, m.g), DomainError);
  }
  SUBCASE("rejected for positive torque") {
    const auto mp = low_voltage_model();
    CHECK_THROWS_AS(secant_pair(0.9, mp.p, mp.g), DomainError);
  }
}

TEST_SUITE_END();
