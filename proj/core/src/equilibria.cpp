#include "syncstab/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "syncstab/errors.hpp"
#include "syncstab/model.hpp"

namespace syncstab {

namespace {

// |Lambda| within this of 1 is treated as the coincident-equilibria case,
// so arccos never sees an argument pushed out of [-1, 1] by rounding.
constexpr double kLambdaBoundaryTol = 1e-12;

double tm_tilde_scale(const SynchronverterParams& p, const GridParams& g) {
  return std::abs(p.Tm) + p.Dp * (std::abs(g.omega_n) + std::abs(g.omega_g)) +
         1.0;
}

}  // namespace

LambdaCurve lambda_curve(const SynchronverterParams& params,
                         const GridParams& grid) {
  const auto d = derived_constants(params, grid);
  LambdaCurve c;
  c.Tm_tilde = d.Tm_tilde;
  c.m = params.m;
  c.L = d.L;
  c.V = grid.V;
  c.p = d.p;
  c.omega_g = grid.omega_g;
  c.z_norm = std::hypot(d.R, grid.omega_g * d.L);
  c.coeff_inv = -d.Tm_tilde * c.z_norm / (params.m * grid.V);
  c.coeff_lin = params.m * grid.omega_g * d.R / (grid.V * c.z_norm);
  return c;
}

bool IfInterval::contains(double i_f) const {
  switch (kind) {
    case IfKind::Empty:
      return false;
    case IfKind::HalfOpenAtZero:
      return i_f > 0.0 && i_f <= i_f_plus;
    case IfKind::Closed:
      return i_f >= i_f_minus && i_f <= i_f_plus;
  }
  return false;
}

ConditionCheck check_assumption1(const SynchronverterParams& params,
                                 const GridParams& grid) {
  const auto d = derived_constants(params, grid);
  ConditionCheck c;
  c.lhs = 4.0 * d.R * grid.omega_g * d.Tm_tilde;
  c.rhs = -grid.V * grid.V;
  c.holds = c.lhs >= c.rhs;
  c.strict = c.lhs > c.rhs;
  return c;
}

IfInterval if_interval(const SynchronverterParams& params,
                       const GridParams& grid) {
  const auto d = derived_constants(params, grid);
  const auto a1 = check_assumption1(params, grid);

  IfInterval out;
  if (!a1.holds) {
    out.kind = IfKind::Empty;
    return out;
  }

  const double V = grid.V;
  const double znorm = std::hypot(d.R, grid.omega_g * d.L);
  const double denom = 2.0 * params.m * grid.omega_g * d.R;
  // Roots of Lambda(i_f) = lambda, from the quadratic in i_f. When the two
  // terms oppose (sign and lambda disagree) the difference cancels, so the
  // conjugate form is used there.
  const auto root = [&](double lambda, double sign) {
    const double torque_term = 4.0 * grid.omega_g * d.R * d.Tm_tilde;
    const double disc = lambda * lambda * V * V + torque_term;
    const double s = std::sqrt(std::max(disc, 0.0));
    const double num = (sign * lambda >= 0.0)
                           ? lambda * V + sign * s
                           : sign * torque_term / (s + std::abs(lambda) * V);
    return znorm * num / denom;
  };

  if (d.Tm_tilde == 0.0) {
    // Lambda is linear: the interval degenerates to (0, i_f_plus].
    out.kind = IfKind::HalfOpenAtZero;
    out.i_f_minus = 0.0;
    out.i_f_plus = V * znorm / (params.m * grid.omega_g * d.R);
    return out;
  }

  out.kind = IfKind::Closed;
  if (d.Tm_tilde > 0.0) {
    // Lambda increasing: endpoints solve Lambda = -1 and Lambda = +1.
    out.i_f_minus = root(-1.0, +1.0);
    out.i_f_plus = root(+1.0, +1.0);
  } else {
    // Lambda > 0 everywhere; both endpoints solve Lambda = +1.
    out.i_f_minus = root(+1.0, -1.0);
    out.i_f_plus = root(+1.0, +1.0);
  }
  return out;
}

std::pair<State4, State4> equilibria4(double i_f,
                                      const SynchronverterParams& params,
                                      const GridParams& grid) {
  const auto d = derived_constants(params, grid);
  if (i_f == 0.0) {
    throw DomainError("equilibria4: i_f must be non-zero");
  }
  const auto curve = lambda_curve(params, grid);
  double lambda = curve(i_f);
  if (std::abs(lambda) > 1.0 + kLambdaBoundaryTol) {
    std::ostringstream msg;
    msg << "equilibria4: i_f = " << i_f
        << " outside the feasible interval (|Lambda| = " << std::abs(lambda)
        << " > 1)";
    throw DomainError(msg.str(), lambda);
  }
  lambda = std::clamp(lambda, -1.0, 1.0);

  const double acos_l = std::acos(lambda);  // [0, pi]
  const double iq = -d.Tm_tilde / (params.m * i_f);

  const auto make = [&](double delta) {
    State4 x;
    x.i_q = iq;
    x.i_d = -d.Tm_tilde * grid.omega_g / (params.m * i_f * d.p) +
            grid.V * std::sin(delta) / d.R;
    x.omega = grid.omega_g;
    x.delta = normalize_angle(delta);
    return x;
  };

  return {make(acos_l - d.phi), make(-acos_l - d.phi)};
}

ConditionCheck check_existence5(const SynchronverterParams& params,
                                const GridParams& grid) {
  const auto d = derived_constants(params, grid);
  const double V2 = grid.V * grid.V;
  ConditionCheck c;
  c.lhs = 4.0 * d.R * d.R * d.Qtilde * d.Qtilde;
  c.rhs = V2 * V2 + 4.0 * d.R * V2 * d.Tm_tilde * grid.omega_g;
  // Relative slack so the equality branch is detectable in floating point.
  const double scale = std::max({std::abs(c.lhs), std::abs(c.rhs), 1.0});
  c.holds = c.lhs <= c.rhs + 1e-12 * scale;
  c.strict = c.lhs < c.rhs - 1e-12 * scale;
  return c;
}

std::pair<double, double> solve_pl_pr(const SynchronverterParams& params,
                                      const GridParams& grid) {
  const auto d = derived_constants(params, grid);
  const auto ex = check_existence5(params, grid);
  if (!ex.holds) {
    std::ostringstream msg;
    msg << "no equilibrium: existence condition 4 R^2 Qtilde^2 <= V^4 + 4 R "
           "V^2 Tm_tilde wg violated (lhs = "
        << ex.lhs << ", rhs = " << ex.rhs << ")";
    throw InfeasibleError(msg.str());
  }

  const double V2 = grid.V * grid.V;
  const double midpoint = -V2 / (2.0 * d.R);
  if (!ex.strict) {
    return {midpoint, midpoint};
  }

  // a P^2 + P + c = 0 with a = R/V^2; the larger root via the stable
  // formula, the smaller one reflected through the midpoint so that
  // (P_l + P_r)/2 = -V^2/(2R) holds exactly.
  const double a = d.R / V2;
  const double c = d.R * d.Qtilde * d.Qtilde / V2 - d.Tm_tilde * grid.omega_g;
  const double disc = 1.0 - 4.0 * a * c;
  const double q = -0.5 * (1.0 + std::sqrt(std::max(disc, 0.0)));
  const double P_r = c / q;
  const double P_l = 2.0 * midpoint - P_r;
  return {P_l, P_r};
}

Equilibria5 equilibria5(const SynchronverterParams& params,
                        const GridParams& grid) {
  const auto d = derived_constants(params, grid);
  const auto ex = check_existence5(params, grid);
  const auto [P_l, P_r] = solve_pl_pr(params, grid);  // throws if infeasible
  const double V = grid.V;
  const double wL = grid.omega_g * d.L;
  const double tm_tol = 1e-12 * tm_tilde_scale(params, grid);

  Equilibria5 out;
  out.kind = ex.strict ? EquilibriaKind::FourPoints : EquilibriaKind::TwoPoints;

  const auto add_pair = [&](double P, Branch principal, Branch symmetric) {
    const double den = d.R * P + wL * d.Qtilde + V * V;
    const double num = wL * P - d.R * d.Qtilde;
    // At an equilibrium (den, num) = V m i_f wg (cos d, sin d); both vanish
    // only on the exceptional point M, where i_f = 0 and the angle is free.
    if (std::hypot(den, num) <= 1e-9 * V * V) {
      out.kind = EquilibriaKind::ExceptionalM;
      out.exceptional = {P, d.Qtilde};
      return;
    }
    const double delta = std::atan2(num, den);  // pairs with i_f > 0
    const auto cur = currents_from_powers({P, d.Qtilde}, delta, V);
    double i_f;
    if (std::abs(d.Tm_tilde) > tm_tol) {
      i_f = -d.Tm_tilde / (params.m * cur.i_q);
    } else {
      // Rest form of the i_q equation.
      i_f = (-wL * cur.i_d - d.R * cur.i_q + V * std::cos(delta)) /
            (params.m * grid.omega_g);
    }

    EquilibriumPoint pt;
    pt.z = {{cur.i_d, cur.i_q, grid.omega_g, normalize_angle(delta)}, i_f};
    pt.branch = principal;
    pt.pq = {P, d.Qtilde};
    out.points.push_back(pt);

    EquilibriumPoint sym;
    sym.z = {{-cur.i_d, -cur.i_q, grid.omega_g,
              normalize_angle(delta + std::numbers::pi)},
             -i_f};
    sym.branch = symmetric;
    sym.pq = {P, d.Qtilde};
    out.points.push_back(sym);
  };

  add_pair(P_r, Branch::Right, Branch::SymRight);
  if (ex.strict) {
    add_pair(P_l, Branch::Left, Branch::SymLeft);
  }
  return out;
}

bool necessary_stability_angle(double delta_e, double phi) {
  return std::sin(delta_e + phi) > 0.0;
}

}  // namespace syncstab
