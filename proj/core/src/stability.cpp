#include "syncstab/stability.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "syncstab/errors.hpp"
#include "syncstab/geometry.hpp"
#include "syncstab/model.hpp"

namespace syncstab {

namespace {

constexpr double kSqrt32 = 1.2247448713915890;
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Parlett-Reinsch balancing with power-of-two scale factors (exact in
// floating point). Returns the diagonal scaling d with B = D^-1 A D.
Eigen::VectorXd balance_inplace(Eigen::MatrixXd& a) {
  const auto n = a.rows();
  Eigen::VectorXd d = Eigen::VectorXd::Ones(n);
  bool converged = false;
  while (!converged) {
    converged = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double c = 0.0, r = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double f = 1.0;
      const double s = c + r;
      while (c < r / 2.0) {
        c *= 2.0;
        r /= 2.0;
        f *= 2.0;
      }
      while (c >= r * 2.0) {
        c /= 2.0;
        r *= 2.0;
        f /= 2.0;
      }
      if ((c + r) < 0.95 * s) {
        converged = false;
        d(i) *= f;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
  return d;
}

void check_square_small(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) {
    throw DomainError("eigenvalues: matrix must be square");
  }
  if (a.rows() > 8) {
    throw DomainError("eigenvalues: matrices larger than 8x8 not supported");
  }
}

void sort_spectrum(std::vector<std::complex<double>>& v) {
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() < b.imag();
  });
}

}  // namespace

Matrix4 jacobian4(const State4& x, double i_f,
                  const SynchronverterParams& params, const GridParams& grid) {
  const double R = params.n * params.Rs;
  const double L = params.n * params.Ls;
  const double s = std::sin(x.delta);
  const double c = std::cos(x.delta);

  Matrix4 j;
  j << -R / L, x.omega, x.i_q, grid.V / L * c,            //
      -x.omega, -R / L, -(x.i_d + params.m * i_f / L), -grid.V / L * s,  //
      0.0, params.m * i_f / params.J, -params.Dp / params.J, 0.0,        //
      0.0, 0.0, 1.0, 0.0;
  return j;
}

Matrix5 jacobian5_unsaturated(const State5& z,
                              const SynchronverterParams& params,
                              const GridParams& grid) {
  const double L = params.n * params.Ls;
  const double Ktilde = params.K * params.m / kSqrt32;
  const double s = std::sin(z.x.delta);
  const double c = std::cos(z.x.delta);

  Matrix5 j = Matrix5::Zero();
  j.topLeftCorner<4, 4>() = jacobian4(z.x, z.i_f, params, grid);
  j(1, 4) = -params.m * z.x.omega / L;
  j(2, 4) = params.m * z.x.i_q / params.J;
  j(4, 0) = grid.V / Ktilde * c;
  j(4, 1) = -grid.V / Ktilde * s;
  j(4, 3) = -grid.V / Ktilde * (z.x.i_d * s + z.x.i_q * c);
  return j;
}

Matrix5 jacobian5(const State5& z, const SynchronverterParams& params,
                  const GridParams& grid) {
  if (!(z.i_f > params.umin && z.i_f < params.umax)) {
    throw DomainError(
        "jacobian5: the saturated dynamics are not differentiable at a "
        "clamped field current");
  }
  return jacobian5_unsaturated(z, params, grid);
}

std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& a) {
  check_square_small(a);
  Eigen::MatrixXd b = a;
  balance_inplace(b);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(b, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw NumericError("eigenvalue iteration did not converge");
  }
  std::vector<std::complex<double>> out(solver.eigenvalues().begin(),
                                        solver.eigenvalues().end());
  sort_spectrum(out);
  return out;
}

EigenDecomposition eigen_decomposition(const Eigen::MatrixXd& a) {
  check_square_small(a);
  Eigen::MatrixXd b = a;
  const Eigen::VectorXd d = balance_inplace(b);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(b, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success) {
    throw NumericError("eigenvalue iteration did not converge");
  }

  EigenDecomposition e;
  e.values.assign(solver.eigenvalues().begin(), solver.eigenvalues().end());
  e.vectors = solver.eigenvectors();
  // Undo the balancing similarity and renormalize.
  for (Eigen::Index j = 0; j < e.vectors.cols(); ++j) {
    e.vectors.col(j) = d.asDiagonal() * e.vectors.col(j);
    e.vectors.col(j) /= e.vectors.col(j).norm();
  }
  // Keep (value, vector) pairs together under the same ordering as
  // eigenvalues().
  std::vector<Eigen::Index> idx(e.values.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = (Eigen::Index)i;
  std::sort(idx.begin(), idx.end(), [&](Eigen::Index l, Eigen::Index r) {
    const auto &a_ = e.values[l], &b_ = e.values[r];
    if (a_.real() != b_.real()) return a_.real() > b_.real();
    return a_.imag() < b_.imag();
  });
  EigenDecomposition sorted;
  sorted.vectors.resize(e.vectors.rows(), e.vectors.cols());
  sorted.values.reserve(e.values.size());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    sorted.values.push_back(e.values[idx[k]]);
    sorted.vectors.col((Eigen::Index)k) = e.vectors.col(idx[k]);
  }
  return sorted;
}

StabilityVerdict classify_matrix(const Eigen::MatrixXd& a, double tol_margin) {
  StabilityVerdict v;
  v.eigenvalues = eigenvalues(a);
  v.max_real = -std::numeric_limits<double>::infinity();
  for (const auto& ev : v.eigenvalues) {
    v.max_real = std::max(v.max_real, ev.real());
  }
  if (v.max_real < -tol_margin) {
    v.cls = StabilityClass::Stable;
  } else if (v.max_real <= tol_margin) {
    v.cls = StabilityClass::Marginal;
  } else {
    v.cls = StabilityClass::Unstable;
  }
  return v;
}

double steady_state_map_G(double i_f, const SynchronverterParams& params,
                          const GridParams& grid) {
  const auto [x1, x2] = equilibria4(i_f, params, grid);
  (void)x2;
  return powers_from_state(x1, grid.V).Q;
}

namespace {

// Sign of dG/di_f at i_f, one-sided near the interval boundary.
int g_prime_sign_at(double i_f, const IfInterval& iv,
                    const SynchronverterParams& p, const GridParams& g) {
  const double len = iv.i_f_plus - iv.i_f_minus;
  if (!(len > 0.0)) return 0;
  const double h = 1e-6 * len;
  double lo = i_f - h, hi = i_f + h;
  const double inner_lo =
      (iv.kind == IfKind::HalfOpenAtZero) ? 1e-12 * len : iv.i_f_minus;
  lo = std::max(lo, inner_lo);
  hi = std::min(hi, iv.i_f_plus);
  if (!(hi > lo)) return 0;
  const double diff =
      steady_state_map_G(hi, p, g) - steady_state_map_G(lo, p, g);
  if (diff > 0.0) return 1;
  if (diff < 0.0) return -1;
  return 0;
}

}  // namespace

TwoTimeScaleResult two_time_scale_check_prepared(
    const SynchronverterParams& params, const GridParams& grid,
    WindowPolicy policy) {
  TwoTimeScaleResult r;
  const auto d = derived_constants(params, grid);
  const auto a1 = check_assumption1(params, grid);
  r.assumption1_strict = a1.strict;

  const auto ex = check_existence5(params, grid);
  if (!ex.holds) {
    return r;  // no equilibrium; every condition false, verdict NotComputed
  }

  const auto eq = equilibria5(params, grid);
  const EquilibriumPoint* zr = nullptr;
  for (const auto& pt : eq.points) {
    if (pt.branch == Branch::Right) zr = &pt;
  }
  if (zr == nullptr) {
    return r;  // the right root hit the exceptional point
  }
  r.equilibrium_exists = true;
  r.z_r = zr->z;
  r.i_f_r = zr->z.i_f;
  r.direct_verdict = classify_matrix(jacobian5_unsaturated(zr->z, params, grid));

  if (a1.strict) {
    const auto geom = build_geometry(params, grid);
    const double lo = geom.If_plus_lo;
    const double hi = geom.If_plus_hi;
    const double len = hi - lo;
    if (len > 0.0) {
      const bool config_fits = policy == WindowPolicy::ConfigFirst &&
                               params.umin < params.umax &&
                               params.umin - params.eps > lo &&
                               params.umax + params.eps < hi;
      if (config_fits) {
        r.window = {params.umin, params.umax, params.eps, true};
      } else {
        r.window = {lo + 0.1 * len, hi - 0.1 * len, 0.05 * len, false};
      }
      const double wlo = r.window.u_min - r.window.eps;
      const double whi = r.window.u_max + r.window.eps;
      r.i_f_in_window = (r.i_f_r >= wlo && r.i_f_r <= whi);

      r.G_at_umin = steady_state_map_G(r.window.u_min, params, grid);
      r.G_at_umax = steady_state_map_G(r.window.u_max, params, grid);
      r.q_in_G_range = (d.Qtilde >= r.G_at_umin && d.Qtilde <= r.G_at_umax);

      if (r.i_f_in_window && r.q_in_G_range) {
        // 64 equispaced interior samples plus both endpoints.
        bool all_stable = true;
        for (int i = 0; i <= 65 && all_stable; ++i) {
          const double i_f = wlo + (whi - wlo) * i / 65.0;
          const auto [x1, x2] = equilibria4(i_f, params, grid);
          (void)x2;
          all_stable = classify_matrix(jacobian4(x1, i_f, params, grid)).cls ==
                       StabilityClass::Stable;
        }
        r.fourth_order_stable_sampled = all_stable;
      }
    }
  }

  r.sufficient_conditions_met = r.assumption1_strict && r.equilibrium_exists &&
                                r.i_f_in_window &&
                                r.fourth_order_stable_sampled && r.q_in_G_range;
  return r;
}

TwoTimeScaleResult two_time_scale_check(double P_set, double Q_set,
                                         SynchronverterParams params,
                                         const GridParams& grid,
                                         double Ktilde) {
  const double R = params.n * params.Rs;
  params.Tm = torque_for_setpoints(P_set, Q_set, R, grid.V, grid.omega_n);
  params.Qset = Q_set;
  params.K = Ktilde * kSqrt32 / params.m;
  return two_time_scale_check_prepared(params, grid, WindowPolicy::ConfigFirst);
}

SweepSpec default_sweep_spec(const SynchronverterParams& params,
                             const GridParams& grid) {
  const auto geom = build_geometry(params, grid);
  const double span_p = 1.2 * (std::abs(geom.C.P) + geom.r);
  const double span_q = 1.2 * geom.r;
  return {-span_p, span_p, -span_q, span_q, 201, 201};
}

std::size_t StabilityMap::stable_count() const {
  std::size_t n = 0;
  for (const auto& c : cells) {
    if (c.verdict == CellVerdict::Stable) ++n;
  }
  return n;
}

namespace {

SweepCell evaluate_cell(double P_set, double Q_set,
                        const SynchronverterParams& base,
                        const GridParams& grid, double Ktilde, int order) {
  SweepCell cell;
  cell.P_set = P_set;
  cell.Q_set = Q_set;
  cell.max_real = kNan;
  cell.i_f_e = kNan;
  cell.delta_e = kNan;

  try {
    SynchronverterParams p = base;
    const double R = p.n * p.Rs;
    p.Tm = torque_for_setpoints(P_set, Q_set, R, grid.V, grid.omega_n);
    p.Qset = Q_set;
    p.K = Ktilde * kSqrt32 / p.m;

    const auto r =
        two_time_scale_check_prepared(p, grid, WindowPolicy::ConfigFirst);
    if (!r.equilibrium_exists) {
      return cell;  // NoEquilibrium
    }
    cell.i_f_e = r.i_f_r;
    cell.delta_e = r.z_r.x.delta;
    cell.in_sector = r.sufficient_conditions_met;

    StabilityVerdict verdict;
    if (order == 4) {
      const auto [x1, x2] = equilibria4(r.i_f_r, p, grid);
      (void)x2;
      verdict = classify_matrix(jacobian4(x1, r.i_f_r, p, grid));
    } else {
      verdict = r.direct_verdict;
    }
    cell.max_real = verdict.max_real;
    switch (verdict.cls) {
      case StabilityClass::Stable:
        cell.verdict = CellVerdict::Stable;
        break;
      case StabilityClass::Unstable:
        cell.verdict = CellVerdict::Unstable;
        break;
      default:
        cell.verdict = CellVerdict::Marginal;
        break;
    }

    cell.g_prime_sign =
        g_prime_sign_at(r.i_f_r, if_interval(p, grid), p, grid);
  } catch (const Error&) {
    // Infeasible or degenerate cell; stays NoEquilibrium.
  }
  return cell;
}

}  // namespace

StabilityMap stability_sweep(const SweepSpec& spec,
                             const SynchronverterParams& params,
                             const GridParams& grid, double Ktilde, int order,
                             int threads) {
  if (spec.nP < 2 || spec.nQ < 2 || !(spec.P_max > spec.P_min) ||
      !(spec.Q_max > spec.Q_min)) {
    throw ConfigError("stability_sweep: degenerate grid spec");
  }
  if (order != 4 && order != 5) {
    throw ConfigError("stability_sweep: order must be 4 or 5");
  }

  StabilityMap map;
  map.spec = spec;
  map.Ktilde = Ktilde;
  map.order = order;
  map.cells.resize(static_cast<std::size_t>(spec.nP) * spec.nQ);

  int n_workers = threads > 0
                      ? threads
                      : static_cast<int>(std::thread::hardware_concurrency());
  n_workers = std::clamp(n_workers, 1, spec.nP);

  std::atomic<int> next_row{0};
  const auto worker = [&]() {
    for (;;) {
      const int i = next_row.fetch_add(1);
      if (i >= spec.nP) break;
      const double P =
          spec.P_min + (spec.P_max - spec.P_min) * i / (spec.nP - 1);
      for (int jq = 0; jq < spec.nQ; ++jq) {
        const double Q =
            spec.Q_min + (spec.Q_max - spec.Q_min) * jq / (spec.nQ - 1);
        map.cells[static_cast<std::size_t>(i) * spec.nQ + jq] =
            evaluate_cell(P, Q, params, grid, Ktilde, order);
      }
    }
  };

  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return map;
}

}  // namespace syncstab
