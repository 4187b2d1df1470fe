#include "syncstab/model.hpp"

#include <cmath>
#include <numbers>

#include "syncstab/errors.hpp"

namespace syncstab {

namespace {

constexpr double kSqrt32 = 1.2247448713915890;  // sqrt(3/2)
constexpr double kSqrt23 = 0.8164965809277260;  // sqrt(2/3)

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) {
    throw ConfigError(std::string(name) + " must be finite");
  }
}

void require_positive(double v, const char* name) {
  require_finite(v, name);
  if (v <= 0.0) {
    throw ConfigError(std::string(name) + " must be positive");
  }
}

}  // namespace

void GridParams::validate() const {
  require_positive(V, "V");
  require_positive(omega_g, "wg");
  require_positive(omega_n, "wn");
}

void SynchronverterParams::validate() const {
  require_positive(Rs, "Rs");
  require_positive(Ls, "Ls");
  require_positive(J, "J");
  require_positive(Dp, "Dp");
  require_positive(m, "m");
  require_positive(K, "K");
  require_positive(vset, "vset");
  require_finite(Dq, "Dq");
  if (Dq < 0.0) throw ConfigError("Dq must be non-negative");
  require_finite(n, "n");
  if (n < 1.0) throw ConfigError("n must be >= 1");
  require_finite(Tm, "Tm");
  require_finite(Qset, "Qset");
  require_finite(umin, "umin");
  require_finite(umax, "umax");
  if (!(umin < umax)) throw ConfigError("umin must be smaller than umax");
  require_finite(eps, "eps");
  if (eps < 0.0) throw ConfigError("eps must be non-negative");
}

DerivedConstants derived_constants(const SynchronverterParams& params,
                                   const GridParams& grid) {
  params.validate();
  grid.validate();

  DerivedConstants d;
  d.R = params.n * params.Rs;
  d.L = params.n * params.Ls;
  d.Ktilde = params.K * params.m / kSqrt32;  // K * Mf
  d.k = kSqrt32 * grid.V / params.K;
  d.p = d.R / d.L;
  d.phi = std::atan2(grid.omega_g * d.L, d.R);  // in (0, pi/2)
  d.Tm_tilde = params.Tm + params.Dp * (grid.omega_n - grid.omega_g);
  d.Qtilde = params.Qset + params.Dq * (params.vset - kSqrt23 * grid.V);
  return d;
}

double normalize_angle(double angle) {
  double a = std::remainder(angle, 2.0 * std::numbers::pi);
  if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

PowerPoint powers_from_state(const State4& x, double V) {
  const double s = std::sin(x.delta);
  const double c = std::cos(x.delta);
  return {-V * (x.i_d * s + x.i_q * c), V * (x.i_q * s - x.i_d * c)};
}

DqCurrents currents_from_powers(const PowerPoint& pq, double delta, double V) {
  if (!(V > 0.0)) {
    throw DomainError("currents_from_powers requires V > 0");
  }
  const double s = std::sin(delta);
  const double c = std::cos(delta);
  return {-(s * pq.P + c * pq.Q) / V, -(c * pq.P - s * pq.Q) / V};
}

double electric_torque(double i_q, double i_f, double m) {
  return -m * i_f * i_q;
}

DqVoltage park_voltage_dq(double delta, double V) {
  return {-V * std::sin(delta), -V * std::cos(delta)};
}

double torque_for_setpoints(double P_set, double Q_set, double R, double V,
                            double omega_n) {
  if (!(V > 0.0) || !(omega_n > 0.0)) {
    throw DomainError("torque_for_setpoints requires V > 0 and omega_n > 0");
  }
  return (P_set + R * (P_set * P_set + Q_set * Q_set) / (V * V)) / omega_n;
}

}  // namespace syncstab
