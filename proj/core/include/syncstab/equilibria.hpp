#pragma once

#include <utility>
#include <vector>

#include "syncstab/params.hpp"
#include "syncstab/state.hpp"

namespace syncstab {

/// The scalar curve whose range inside [-1, 1] decides where the
/// electromechanical model has equilibria:
///
///   Lambda(i_f) = -(Tm_tilde/(m i_f)) * ||Z||/V + m i_f omega_g R / (V ||Z||)
///
/// with ||Z|| = L*sqrt(p^2 + omega_g^2) = sqrt(R^2 + (omega_g L)^2).
/// Strictly increasing for Tm_tilde > 0; positive and first decreasing then
/// increasing for Tm_tilde < 0; linear through the origin for Tm_tilde = 0.
struct LambdaCurve {
  double Tm_tilde = 0.0;
  double m = 0.0;
  double L = 0.0;
  double V = 0.0;
  double p = 0.0;
  double omega_g = 0.0;
  double z_norm = 0.0;     // ||Z||
  double coeff_inv = 0.0;  // multiplies 1/i_f
  double coeff_lin = 0.0;  // multiplies i_f

  double operator()(double i_f) const { return coeff_inv / i_f + coeff_lin * i_f; }
};

LambdaCurve lambda_curve(const SynchronverterParams& params,
                         const GridParams& grid);

enum class IfKind { Closed, HalfOpenAtZero, Empty };

/// The set of positive field currents with |Lambda(i_f)| <= 1.
struct IfInterval {
  double i_f_minus = 0.0;
  double i_f_plus = 0.0;
  IfKind kind = IfKind::Empty;

  bool contains(double i_f) const;
  double length() const { return i_f_plus - i_f_minus; }
};

/// Result of a scalar inequality check, with both sides kept for reporting.
struct ConditionCheck {
  bool holds = false;
  bool strict = false;
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Existence precondition for the constant-field-current model:
/// 4 R omega_g Tm_tilde >= -V^2 (lhs/rhs filled accordingly).
ConditionCheck check_assumption1(const SynchronverterParams& params,
                                 const GridParams& grid);

/// Endpoints of the field-current interval, in closed form from the
/// quadratic Lambda(i_f) = +-1. Empty when check_assumption1 fails;
/// half-open (0, i_f_plus] when Tm_tilde = 0.
IfInterval if_interval(const SynchronverterParams& params,
                       const GridParams& grid);

/// Both equilibrium points of the constant-i_f model:
///   delta_1 = arccos(Lambda) - phi,  delta_2 = -arccos(Lambda) - phi
///   i_q = -Tm_tilde/(m i_f),  i_d = -Tm_tilde omega_g/(m i_f p) + V sin(delta)/R
///   omega = omega_g
/// Valid for i_f in I_f and for -i_f with i_f in I_f. The two points
/// coincide when |Lambda| = 1 (within 1e-12, to absorb rounding).
/// Throws DomainError carrying Lambda(i_f) outside that domain.
std::pair<State4, State4> equilibria4(double i_f,
                                      const SynchronverterParams& params,
                                      const GridParams& grid);

/// Necessary and sufficient existence condition for equilibria of the full
/// model: 4 R^2 Qtilde^2 <= V^4 + 4 R V^2 Tm_tilde omega_g
/// (equivalently |Qtilde| <= r, the power-circle radius).
ConditionCheck check_existence5(const SynchronverterParams& params,
                                const GridParams& grid);

/// The two real roots (P_l <= P_r) of
///   Tm_tilde omega_g = P + R (P^2 + Qtilde^2)/V^2.
/// Their midpoint is -V^2/(2R) exactly. Throws InfeasibleError when the
/// roots are complex (check_existence5 fails).
std::pair<double, double> solve_pl_pr(const SynchronverterParams& params,
                                      const GridParams& grid);

enum class Branch { Right, Left, SymRight, SymLeft };

enum class StabilityClass { Stable, Unstable, Marginal, NotComputed };

struct EquilibriumPoint {
  State5 z;
  Branch branch = Branch::Right;
  PowerPoint pq;
  StabilityClass stability = StabilityClass::NotComputed;
};

enum class EquilibriaKind {
  FourPoints,     // strict existence, both roots regular
  TwoPoints,      // equality: P_l = P_r = -V^2/(2R), one symmetric pair
  ExceptionalM,   // a root coincides with the point M (requires Tm_tilde = 0):
                  // i_f = 0 with arbitrary angle; regular points from the
                  // other root are still listed
};

struct Equilibria5 {
  EquilibriaKind kind = EquilibriaKind::FourPoints;
  std::vector<EquilibriumPoint> points;
  PowerPoint exceptional;  // set when kind == ExceptionalM
};

/// Enumerates all equilibria of the full model. For each power root the
/// principal angle (the one paired with i_f > 0) is
/// atan2(omega_g L P - R Qtilde, R P + omega_g L Qtilde + V^2); currents
/// follow by rotating (P, Qtilde) back, and i_f = -Tm_tilde/(m i_q) when
/// Tm_tilde != 0 (from the rest form of the i_q equation otherwise). The
/// symmetric partner negates i_d, i_q, i_f and shifts delta by pi.
/// Throws InfeasibleError when check_existence5 fails.
Equilibria5 equilibria5(const SynchronverterParams& params,
                        const GridParams& grid);

/// Necessary condition for a stable constant-i_f equilibrium:
/// sin(delta_e + phi) > 0.
bool necessary_stability_angle(double delta_e, double phi);

}  // namespace syncstab
