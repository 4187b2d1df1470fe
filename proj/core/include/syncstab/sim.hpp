#pragma once

#include <optional>
#include <vector>

#include "syncstab/dynamics.hpp"
#include "syncstab/params.hpp"
#include "syncstab/state.hpp"

namespace syncstab {

// TODO: variable-step integration with clamp-event localization; the
// fixed-step projection below is accurate enough for the current test
// tolerances but wastes steps far from the saturation planes.

struct SimConfig {
  State5 initial;
  double t_end = 20.0;     // s
  double dt = 1e-4;        // s
  int record_stride = 1;   // steps per stored sample
  int order = 5;           // 4: i_f frozen at initial.i_f
};

struct SatEvent {
  double t = 0.0;
  SatMode from = SatMode::Interior;
  SatMode to = SatMode::Interior;
};

struct TrajectorySample {
  double t = 0.0;
  State5 z;
  PowerPoint pq;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;  // strictly increasing timestamps
  std::vector<SatEvent> events;
  double max_projection = 0.0;  // largest post-step i_f projection distance
  std::optional<double> blowup_time;  // set when the state became non-finite
};

/// Fixed-step classic Runge-Kutta integration of the saturated model.
/// The saturating integrator is applied at every stage and i_f is projected
/// back onto [umin, umax] after each step (projection distance recorded).
/// delta is left unwrapped. Aborts, with blowup_time set, when the state
/// stops being finite. Requires initial.i_f in [umin, umax] for order 5.
Trajectory integrate(const SimConfig& config,
                     const SynchronverterParams& params,
                     const GridParams& grid);

/// Scale-aware distance: max over components of |a_i - ref_i| / s_i with
/// s_i = max(|ref_i|, 1e-3) in the component's own unit.
double state_distance(const State5& a, const State5& ref);

struct ConvergenceReport {
  bool converged = false;
  double final_error = 0.0;
  double t_settle = 0.0;  // NaN when never settled
};

/// Error of the trajectory tail against a target state; converged iff the
/// final sample is within `threshold` in the scale-aware metric. t_settle is
/// the earliest sample time after which the error stays below threshold.
ConvergenceReport convergence_metric(const Trajectory& traj,
                                     const State5& target, double threshold);

}  // namespace syncstab
