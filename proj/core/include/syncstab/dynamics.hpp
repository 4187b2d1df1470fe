#pragma once

#include "syncstab/params.hpp"
#include "syncstab/state.hpp"

namespace syncstab {

/// Time derivatives matching State4 (A/s, A/s, rad/s^2, rad/s).
struct Rhs4 {
  double di_d = 0.0;
  double di_q = 0.0;
  double domega = 0.0;
  double ddelta = 0.0;
};

/// Time derivatives matching State5.
struct Rhs5 {
  Rhs4 x;
  double di_f = 0.0;  // A/s
};

/// Saturation state of the field-current integrator.
enum class SatMode { Interior, ClampedLow, ClampedHigh };

/// ClampedLow iff i_f <= u_min, ClampedHigh iff i_f >= u_max.
SatMode sat_mode(double i_f, double u_min, double u_max);

/// The saturating integrator: passes w through in the interior, blocks
/// outward integration at the bounds. With w+ = max(w,0), w- = min(w,0):
///   i_f <= u_min -> w+,  u_min < i_f < u_max -> w,  i_f >= u_max -> w-.
double saturating_integrator(double i_f, double w, double u_min, double u_max);

/// Right-hand side of the electromechanical model with i_f held as a
/// parameter:
///   L di_d/dt = -R i_d + omega L i_q + V sin(delta)
///   L di_q/dt = -omega L i_d - R i_q - m i_f omega + V cos(delta)
///   J domega/dt = Tm + m i_f i_q - Dp omega + Dp omega_n
///   ddelta/dt = omega - omega_g
Rhs4 rhs4(const State4& x, double i_f, const SynchronverterParams& params,
          const GridParams& grid);

/// Full right-hand side including the field-current loop. The first four
/// components equal rhs4(z.x, z.i_f). The fifth is (Qtilde - Q)/Ktilde,
/// wrapped in the saturating integrator when `saturated` is set; Q is
/// always recomputed from the instantaneous state.
Rhs5 rhs5(const State5& z, const SynchronverterParams& params,
          const GridParams& grid, bool saturated);

}  // namespace syncstab
