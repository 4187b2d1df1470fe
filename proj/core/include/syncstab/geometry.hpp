#pragma once

#include <utility>

#include "syncstab/params.hpp"
#include "syncstab/state.hpp"

namespace syncstab {

enum class Orientation { MRightOfC, MLeftOrBelowC };

/// Closed-form constructions in the power plane.
///
/// Equilibria of the constant-i_f model trace the circle with centre
/// C = (-V^2/(2R), 0) and radius r, r^2 = (V^4 + 4 V^2 R Tm_tilde omega_g)
/// / (4 R^2). Z = (R, omega_g L) is the output impedance point,
/// M = -(V^2/||Z||^2) Z the constant-i_f level-circle centre;
/// ||M - C|| = ||C|| = V^2/(2R). The line through M and C cuts the circle
/// at the nearest/farthest points reached at i_f_minus/i_f_plus.
/// i_f_zero is the unique field current whose circle point sits at the top
/// (omega_g L > R) or bottom (omega_g L <= R) of the circle; the reactive
/// power of the first branch increases exactly on
/// If_plus = (i_f_minus, i_f_zero) resp. (i_f_zero, i_f_plus).
struct PowerPlaneGeometry {
  PowerPoint C;
  double r = 0.0;
  double Z_p = 0.0;  // = R
  double Z_q = 0.0;  // = omega_g * L
  PowerPoint M;
  double phi = 0.0;          // rad
  PowerPoint line_point;     // the chord line passes through M ...
  PowerPoint line_dir;       // ... in the direction C - M
  double i_f_minus = 0.0;
  double i_f_plus = 0.0;
  double i_f_zero = 0.0;
  double If_plus_lo = 0.0;
  double If_plus_hi = 0.0;
  Orientation orientation = Orientation::MRightOfC;
};

/// Builds the full construction. Throws InfeasibleError unless
/// check_assumption1 holds strictly.
PowerPlaneGeometry build_geometry(const SynchronverterParams& params,
                                  const GridParams& grid);

enum class SBranch { S1, S2 };

/// A constant-i_f equilibrium mapped into the power plane.
struct CirclePoint {
  double i_f = 0.0;
  SBranch branch = SBranch::S1;
  PowerPoint pq;
  double delta = 0.0;  // rad, power angle of the underlying equilibrium
};

/// The circle point
///   S_j(i_f) = M + (V/||Z||) * m * i_f * omega_g *
///              (cos(phi - delta_j), sin(phi - delta_j)),
/// whose distance to M is proportional to i_f. Agrees with
/// powers_from_state at the corresponding equilibrium. DomainError
/// outside I_f.
CirclePoint s_point(double i_f, SBranch branch,
                    const SynchronverterParams& params,
                    const GridParams& grid);

struct ExceptionalPoint {
  PowerPoint pq;  // = M
  bool hit = false;
};

/// Coordinates of M = (-V^2 R, -V^2 omega_g L)/(R^2 + omega_g^2 L^2) and a
/// flag telling whether the configured (Tm_tilde, Qtilde) lands on it
/// (possible only when Tm_tilde = 0).
ExceptionalPoint exceptional_point(const SynchronverterParams& params,
                                   const GridParams& grid);

/// For Tm_tilde < 0 the chord through M meets the circle twice: both
/// positive solutions (i_f1 >= i_f2) of Lambda(i_f) = lambda. DomainError
/// when Tm_tilde >= 0 or lambda is not attained on I_f.
std::pair<double, double> secant_pair(double lambda,
                                      const SynchronverterParams& params,
                                      const GridParams& grid);

}  // namespace syncstab
