#include "syncstab/sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "syncstab/errors.hpp"
#include "syncstab/model.hpp"

namespace syncstab {

namespace {

using Vec5 = std::array<double, 5>;

Vec5 to_vec(const State5& z) {
  return {z.x.i_d, z.x.i_q, z.x.omega, z.x.delta, z.i_f};
}

State5 to_state(const Vec5& v) {
  return {{v[0], v[1], v[2], v[3]}, v[4]};
}

Vec5 axpy(const Vec5& z, double a, const Vec5& k) {
  Vec5 out;
  for (int i = 0; i < 5; ++i) out[i] = z[i] + a * k[i];
  return out;
}

bool finite(const Vec5& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace

double state_distance(const State5& a, const State5& ref) {
  const Vec5 va = to_vec(a);
  const Vec5 vr = to_vec(ref);
  double dist = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double scale = std::max(std::abs(vr[i]), 1e-3);
    dist = std::max(dist, std::abs(va[i] - vr[i]) / scale);
  }
  return dist;
}

Trajectory integrate(const SimConfig& config,
                     const SynchronverterParams& params,
                     const GridParams& grid) {
  if (!(config.dt > 0.0)) throw ConfigError("integrate: dt must be positive");
  if (!(config.t_end >= config.dt)) {
    throw ConfigError("integrate: t_end must be at least dt");
  }
  if (config.record_stride < 1) {
    throw ConfigError("integrate: record_stride must be >= 1");
  }
  if (config.order != 4 && config.order != 5) {
    throw ConfigError("integrate: order must be 4 or 5");
  }
  const bool full = config.order == 5;
  if (full &&
      !(config.initial.i_f >= params.umin && config.initial.i_f <= params.umax)) {
    throw DomainError("integrate: initial i_f outside [umin, umax]");
  }

  const auto f = [&](const Vec5& v) {
    const State5 z = to_state(v);
    if (full) {
      const Rhs5 r = rhs5(z, params, grid, /*saturated=*/true);
      return Vec5{r.x.di_d, r.x.di_q, r.x.domega, r.x.ddelta, r.di_f};
    }
    const Rhs4 r = rhs4(z.x, z.i_f, params, grid);
    return Vec5{r.di_d, r.di_q, r.domega, r.ddelta, 0.0};
  };

  const double dt = config.dt;
  const long long n_steps = std::llround(config.t_end / dt);
  Trajectory traj;
  traj.samples.reserve(
      static_cast<std::size_t>(n_steps / config.record_stride) + 2);

  Vec5 z = to_vec(config.initial);
  const auto record = [&](double t) {
    const State5 s = to_state(z);
    traj.samples.push_back({t, s, powers_from_state(s.x, grid.V)});
  };
  record(0.0);

  SatMode mode = sat_mode(z[4], params.umin, params.umax);
  for (long long step = 0; step < n_steps; ++step) {
    const Vec5 k1 = f(z);
    const Vec5 k2 = f(axpy(z, dt / 2.0, k1));
    const Vec5 k3 = f(axpy(z, dt / 2.0, k2));
    const Vec5 k4 = f(axpy(z, dt, k3));
    Vec5 zn;
    for (int i = 0; i < 5; ++i) {
      zn[i] = z[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }

    const double t_next = (step + 1) * dt;
    if (full) {
      const double projected = std::clamp(zn[4], params.umin, params.umax);
      traj.max_projection =
          std::max(traj.max_projection, std::abs(zn[4] - projected));
      zn[4] = projected;
    }
    if (!finite(zn)) {
      traj.blowup_time = t_next;
      break;
    }

    z = zn;
    if (full) {
      const SatMode mode_next = sat_mode(z[4], params.umin, params.umax);
      if (mode_next != mode) {
        traj.events.push_back({t_next, mode, mode_next});
        mode = mode_next;
      }
    }
    if ((step + 1) % config.record_stride == 0 || step + 1 == n_steps) {
      record(t_next);
    }
  }
  return traj;
}

ConvergenceReport convergence_metric(const Trajectory& traj,
                                     const State5& target, double threshold) {
  ConvergenceReport rep;
  if (traj.samples.empty()) return rep;

  rep.final_error = state_distance(traj.samples.back().z, target);
  rep.converged = rep.final_error < threshold;

  rep.t_settle = std::numeric_limits<double>::quiet_NaN();
  if (rep.converged) {
    // Earliest sample after which the error never rises above threshold.
    double settle = traj.samples.back().t;
    for (auto it = traj.samples.rbegin(); it != traj.samples.rend(); ++it) {
      if (state_distance(it->z, target) >= threshold) break;
      settle = it->t;
    }
    rep.t_settle = settle;
  }
  return rep;
}

}  // namespace syncstab
