#pragma once

#include "syncstab/params.hpp"
#include "syncstab/state.hpp"

namespace syncstab {

struct DqCurrents {
  double i_d = 0.0;
  double i_q = 0.0;
};

struct DqVoltage {
  double v_d = 0.0;
  double v_q = 0.0;
};

/// Folds an angle into (-pi, pi].
double normalize_angle(double angle);

/// Instantaneous powers seen from the grid:
///   P = -V*(i_d*sin(delta) + i_q*cos(delta))
///   Q =  V*(i_q*sin(delta) - i_d*cos(delta))
/// Satisfies P^2 + Q^2 = V^2*(i_d^2 + i_q^2).
PowerPoint powers_from_state(const State4& x, double V);

/// Inverse of powers_from_state at fixed delta. Rejects V <= 0.
DqCurrents currents_from_powers(const PowerPoint& pq, double delta, double V);

/// Electric torque T_e = -m * i_f * i_q.
double electric_torque(double i_q, double i_f, double m);

/// Grid voltage in rotor coordinates: v_d = -V*sin(delta), v_q = -V*cos(delta).
DqVoltage park_voltage_dq(double delta, double V);

/// The prime-mover torque producing the requested operating point,
/// from the power balance Tm*omega_n = P_set + R*(P_set^2 + Q_set^2)/V^2.
/// Rejects V <= 0 or omega_n <= 0.
double torque_for_setpoints(double P_set, double Q_set, double R, double V,
                            double omega_n);

}  // namespace syncstab
