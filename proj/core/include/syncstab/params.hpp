#pragma once

namespace syncstab {

/// Infinite-bus parameters: line voltage rms V (V), grid frequency
/// omega_g (rad/s), nominal frequency omega_n (rad/s).
struct GridParams {
  double V = 0.0;
  double omega_g = 0.0;
  double omega_n = 0.0;

  /// Throws ConfigError unless V, omega_g, omega_n are finite and positive.
  void validate() const;
};

/// Machine and controller constants.
///
/// Rs/Ls are the physical filter resistance/inductance; n >= 1 is the
/// virtual-impedance multiplier, so the effective output impedance is
/// R = n*Rs, L = n*Ls. m = sqrt(3/2)*Mf is the scaled mutual inductance,
/// K the reactive-loop gain, Tm the prime-mover torque, [umin, umax] the
/// saturating-integrator range for the field current and eps the margin
/// used when checking the slow-loop operating window.
struct SynchronverterParams {
  double Rs = 0.0;    // Ohm
  double Ls = 0.0;    // H
  double n = 1.0;     // dimensionless, >= 1
  double J = 0.0;     // kg*m^2/rad
  double Dp = 0.0;    // N*m*s/rad
  double Dq = 0.0;    // VAr/V
  double m = 0.0;     // H, = sqrt(3/2)*Mf
  double K = 0.0;     // A
  double Tm = 0.0;    // N*m
  double Qset = 0.0;  // VAr
  double vset = 0.0;  // V (phase amplitude setpoint)
  double umin = 0.0;  // A
  double umax = 0.0;  // A
  double eps = 0.0;   // A, margin for the operating window

  /// Throws ConfigError on violated invariants (positivity, umin < umax, ...).
  void validate() const;
};

/// Scalars derived from the raw parameters.
///
/// R = n*Rs, L = n*Ls, Ktilde = K*Mf with Mf = m/sqrt(3/2),
/// k = sqrt(3/2)*V/K, p = R/L, phi in (0, pi/2) with tan(phi) = omega_g*L/R,
/// Tm_tilde = Tm + Dp*(omega_n - omega_g) (prime-mover torque at
/// equilibrium) and Qtilde = Qset + Dq*(vset - sqrt(2/3)*V).
struct DerivedConstants {
  double R = 0.0;
  double L = 0.0;
  double Ktilde = 0.0;
  double k = 0.0;
  double p = 0.0;
  double phi = 0.0;
  double Tm_tilde = 0.0;
  double Qtilde = 0.0;
};

/// Computes all derived scalars. Validates both parameter sets; rejects
/// non-positive Rs, Ls, V, omega_g with ConfigError.
DerivedConstants derived_constants(const SynchronverterParams& params,
                                   const GridParams& grid);

}  // namespace syncstab
