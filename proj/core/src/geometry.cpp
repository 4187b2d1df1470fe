#include "syncstab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "syncstab/equilibria.hpp"
#include "syncstab/errors.hpp"
#include "syncstab/model.hpp"

namespace syncstab {

PowerPlaneGeometry build_geometry(const SynchronverterParams& params,
                                  const GridParams& grid) {
  const auto d = derived_constants(params, grid);
  const auto a1 = check_assumption1(params, grid);
  if (!a1.strict) {
    std::ostringstream msg;
    msg << "power-plane geometry undefined: 4 R wg Tm_tilde > -V^2 required "
           "(lhs = "
        << a1.lhs << ", rhs = " << a1.rhs << ")";
    throw InfeasibleError(msg.str());
  }

  const double V = grid.V;
  const double V2 = V * V;
  const double wL = grid.omega_g * d.L;
  const double znorm2 = d.R * d.R + wL * wL;
  const double znorm = std::sqrt(znorm2);

  PowerPlaneGeometry g;
  g.C = {-V2 / (2.0 * d.R), 0.0};
  g.r = V * std::sqrt(V2 + 4.0 * d.R * d.Tm_tilde * grid.omega_g) / (2.0 * d.R);
  g.Z_p = d.R;
  g.Z_q = wL;
  g.M = {-V2 * d.R / znorm2, -V2 * wL / znorm2};
  g.phi = d.phi;
  g.line_point = g.M;
  g.line_dir = {g.C.P - g.M.P, g.C.Q - g.M.Q};

  const auto iv = if_interval(params, grid);
  g.i_f_minus = iv.i_f_minus;
  g.i_f_plus = iv.i_f_plus;

  // The extreme-Q point of the circle decides the monotone sub-interval:
  // top of the circle when M lies right of C, bottom otherwise.
  g.orientation =
      (wL > d.R) ? Orientation::MRightOfC : Orientation::MLeftOrBelowC;
  const double q_extreme = (g.orientation == Orientation::MRightOfC) ? g.r : -g.r;
  const double dist =
      std::hypot(g.C.P - g.M.P, q_extreme - g.M.Q);
  double i_f0 = dist * znorm / (V * params.m * grid.omega_g);
  i_f0 = std::clamp(i_f0, g.i_f_minus, g.i_f_plus);
  g.i_f_zero = i_f0;

  if (g.orientation == Orientation::MRightOfC) {
    g.If_plus_lo = g.i_f_minus;
    g.If_plus_hi = g.i_f_zero;
  } else {
    g.If_plus_lo = g.i_f_zero;
    g.If_plus_hi = g.i_f_plus;
  }
  return g;
}

CirclePoint s_point(double i_f, SBranch branch,
                    const SynchronverterParams& params,
                    const GridParams& grid) {
  const auto d = derived_constants(params, grid);
  if (!(i_f > 0.0)) {
    throw DomainError("s_point: i_f must be positive");
  }
  // equilibria4 enforces |Lambda(i_f)| <= 1 with the same boundary
  // tolerance used everywhere else, so endpoint values round-trip.
  const auto [x1, x2] = equilibria4(i_f, params, grid);
  const double delta = (branch == SBranch::S1) ? x1.delta : x2.delta;

  const double wL = grid.omega_g * d.L;
  const double znorm = std::hypot(d.R, wL);
  const double V2 = grid.V * grid.V;
  const double rho = grid.V / znorm * params.m * i_f * grid.omega_g;

  CirclePoint cp;
  cp.i_f = i_f;
  cp.branch = branch;
  cp.delta = delta;
  cp.pq = {-V2 * d.R / (znorm * znorm) + rho * std::cos(d.phi - delta),
           -V2 * wL / (znorm * znorm) + rho * std::sin(d.phi - delta)};
  return cp;
}

ExceptionalPoint exceptional_point(const SynchronverterParams& params,
                                   const GridParams& grid) {
  const auto d = derived_constants(params, grid);
  const double wL = grid.omega_g * d.L;
  const double znorm2 = d.R * d.R + wL * wL;
  const double V2 = grid.V * grid.V;

  ExceptionalPoint e;
  e.pq = {-V2 * d.R / znorm2, -V2 * wL / znorm2};
  const double tm_scale =
      std::abs(params.Tm) +
      params.Dp * (std::abs(grid.omega_n) + std::abs(grid.omega_g)) + 1.0;
  const bool tm_zero = std::abs(d.Tm_tilde) <= 1e-12 * tm_scale;
  const bool q_hit = std::abs(d.Qtilde - e.pq.Q) <= 1e-9 * (V2 / std::sqrt(znorm2));
  e.hit = tm_zero && q_hit;
  return e;
}

std::pair<double, double> secant_pair(double lambda,
                                      const SynchronverterParams& params,
                                      const GridParams& grid) {
  const auto d = derived_constants(params, grid);
  if (!(d.Tm_tilde < 0.0)) {
    throw DomainError("secant_pair is defined only for Tm_tilde < 0");
  }

  const double V = grid.V;
  const double lambda_min =
      2.0 * std::sqrt(-d.Tm_tilde * grid.omega_g * d.R) / V;
  if (lambda < lambda_min - 1e-12 || lambda > 1.0 + 1e-12) {
    std::ostringstream msg;
    msg << "secant_pair: lambda = " << lambda << " not attained (range ["
        << lambda_min << ", 1])";
    throw DomainError(msg.str(), lambda);
  }

  const double znorm = std::hypot(d.R, grid.omega_g * d.L);
  const double torque_term = 4.0 * grid.omega_g * d.R * d.Tm_tilde;
  const double disc = lambda * lambda * V * V + torque_term;
  const double s = std::sqrt(std::max(disc, 0.0));
  const double denom = 2.0 * params.m * grid.omega_g * d.R;
  // lambda > 0 here, so only the smaller root subtracts; its conjugate form
  // avoids the cancellation as the torque tends to zero.
  const double small = -torque_term / (s + lambda * V);
  return {znorm * (lambda * V + s) / denom, znorm * small / denom};
}

}  // namespace syncstab
