#include "syncstab/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "syncstab/model.hpp"

namespace syncstab {

namespace {

constexpr double kSqrt32 = 1.2247448713915890;

// Unvalidated derived scalars, so the dynamics stay evaluable for synthetic
// cases (V = 0 sanity runs) that the config-level validation would reject.
struct RawDerived {
  double R, L, Ktilde, Qtilde;
};

RawDerived raw_derived(const SynchronverterParams& p, const GridParams& g) {
  return {p.n * p.Rs, p.n * p.Ls, p.K * p.m / kSqrt32,
          p.Qset + p.Dq * (p.vset - std::sqrt(2.0 / 3.0) * g.V)};
}

}  // namespace

SatMode sat_mode(double i_f, double u_min, double u_max) {
  if (i_f <= u_min) return SatMode::ClampedLow;
  if (i_f >= u_max) return SatMode::ClampedHigh;
  return SatMode::Interior;
}

double saturating_integrator(double i_f, double w, double u_min,
                             double u_max) {
  switch (sat_mode(i_f, u_min, u_max)) {
    case SatMode::ClampedLow:
      return std::max(w, 0.0);
    case SatMode::ClampedHigh:
      return std::min(w, 0.0);
    case SatMode::Interior:
      break;
  }
  return w;
}

Rhs4 rhs4(const State4& x, double i_f, const SynchronverterParams& params,
          const GridParams& grid) {
  const auto d = raw_derived(params, grid);
  const double s = std::sin(x.delta);
  const double c = std::cos(x.delta);

  Rhs4 f;
  f.di_d = (-d.R * x.i_d + x.omega * d.L * x.i_q + grid.V * s) / d.L;
  f.di_q = (-x.omega * d.L * x.i_d - d.R * x.i_q - params.m * i_f * x.omega +
            grid.V * c) /
           d.L;
  f.domega = (params.Tm + params.m * i_f * x.i_q - params.Dp * x.omega +
              params.Dp * grid.omega_n) /
             params.J;
  f.ddelta = x.omega - grid.omega_g;
  return f;
}

Rhs5 rhs5(const State5& z, const SynchronverterParams& params,
          const GridParams& grid, bool saturated) {
  const auto d = raw_derived(params, grid);

  Rhs5 f;
  f.x = rhs4(z.x, z.i_f, params, grid);

  const double Q = powers_from_state(z.x, grid.V).Q;
  const double w = (d.Qtilde - Q) / d.Ktilde;
  f.di_f = saturated ? saturating_integrator(z.i_f, w, params.umin, params.umax)
                     : w;
  return f;
}

}  // namespace syncstab
