#pragma once

namespace syncstab {

/// State of the electromechanical model: dq currents (A), virtual rotor
/// speed (rad/s) and power angle (rad). Equilibrium angles are reported
/// folded into (-pi, pi]; simulation traces keep delta unwrapped.
struct State4 {
  double i_d = 0.0;
  double i_q = 0.0;
  double omega = 0.0;
  double delta = 0.0;
};

/// Full state with the field current (A) appended.
struct State5 {
  State4 x;
  double i_f = 0.0;
};

/// A point in the power plane: active power P (W), reactive power Q (VAr).
struct PowerPoint {
  double P = 0.0;
  double Q = 0.0;
};

}  // namespace syncstab
