#pragma once

#include <Eigen/Core>

#include <complex>
#include <vector>

#include "syncstab/equilibria.hpp"
#include "syncstab/params.hpp"
#include "syncstab/state.hpp"

namespace syncstab {

/// Margin on the largest eigenvalue real part: Stable below -margin,
/// Marginal within +-margin, Unstable above.
inline constexpr double kStabilityTolMargin = 1e-6;

using Matrix4 = Eigen::Matrix4d;
using Matrix5 = Eigen::Matrix<double, 5, 5>;

/// Analytic Jacobian of rhs4 at (x, i_f):
///   [ -R/L   omega        i_q              (V/L) cos(delta) ]
///   [ -omega -R/L   -(i_d + m i_f / L)    -(V/L) sin(delta) ]
///   [  0     m i_f/J    -Dp/J              0                ]
///   [  0     0           1                 0                ]
Matrix4 jacobian4(const State4& x, double i_f,
                  const SynchronverterParams& params, const GridParams& grid);

/// Jacobian of the smooth (non-saturated) full model: top-left block is
/// jacobian4, the i_f column is (0, -m omega/L, m i_q/J, 0)^T and the
/// field-current row is (V/Ktilde) * (cos d, -sin d, 0,
/// -(i_d sin d + i_q cos d), 0).
Matrix5 jacobian5_unsaturated(const State5& z,
                              const SynchronverterParams& params,
                              const GridParams& grid);

/// Same matrix, but rejects clamped i_f (the saturated dynamics are not
/// differentiable on i_f = umin / umax). DomainError outside (umin, umax).
Matrix5 jacobian5(const State5& z, const SynchronverterParams& params,
                  const GridParams& grid);

/// All eigenvalues of a small (n <= 8) real matrix, computed on the balanced
/// matrix and sorted by descending real part (then ascending imaginary
/// part). NumericError if the iteration does not converge.
std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& a);

/// Eigenvalues plus (back-transformed, unit-norm) eigenvectors, for
/// residual checks ||A v - lambda v||.
struct EigenDecomposition {
  std::vector<std::complex<double>> values;
  Eigen::MatrixXcd vectors;  // column j pairs with values[j]
};

EigenDecomposition eigen_decomposition(const Eigen::MatrixXd& a);

struct StabilityVerdict {
  std::vector<std::complex<double>> eigenvalues;
  double max_real = 0.0;
  StabilityClass cls = StabilityClass::NotComputed;
};

StabilityVerdict classify_matrix(const Eigen::MatrixXd& a,
                                 double tol_margin = kStabilityTolMargin);

/// Steady-state map of the slow loop: the reactive power at the first-branch
/// equilibrium, G(i_f) = Q_1(i_f). DomainError outside I_f.
double steady_state_map_G(double i_f, const SynchronverterParams& params,
                          const GridParams& grid);

/// Operating window [u_min - eps, u_max + eps] used by the slow-loop
/// stability test. Taken from the configured clamp bounds when those fit
/// inside If_plus, otherwise defaulted to the middle 80% of If_plus with
/// eps = 5% of its length.
struct UEpsWindow {
  double u_min = 0.0;
  double u_max = 0.0;
  double eps = 0.0;
  bool from_config = false;
};

enum class WindowPolicy { ConfigFirst, DefaultOnly };

/// Outcome of the two-time-scale stability test at one operating point.
/// `sufficient_conditions_met` is the conjunction of the one-directional
/// sufficient conditions; `direct_verdict` is the eigenvalue classification
/// of the interior linearization at z_r. The two are reported separately:
/// the direct verdict can be Stable where the sufficient test fails.
struct TwoTimeScaleResult {
  bool sufficient_conditions_met = false;
  StabilityVerdict direct_verdict;

  // Individual conditions (diagnostics).
  bool assumption1_strict = false;
  bool equilibrium_exists = false;
  bool i_f_in_window = false;
  bool fourth_order_stable_sampled = false;  // evaluated only when the
                                             // cheaper conditions pass
  bool q_in_G_range = false;

  double i_f_r = 0.0;
  State5 z_r;
  UEpsWindow window;
  double G_at_umin = 0.0;
  double G_at_umax = 0.0;
};

/// Runs the stability test at the setpoint (P_set, Q_set): derives Tm from
/// the power balance, sets the reactive gain from Ktilde and checks
/// [assumption strict] && [z_r exists] && [i_f_r in window] &&
/// [fourth-order equilibrium stable at 64 equispaced window samples plus
/// both endpoints] && [Qtilde in [G(u_min), G(u_max)]].
TwoTimeScaleResult two_time_scale_check(double P_set, double Q_set,
                                         SynchronverterParams params,
                                         const GridParams& grid,
                                         double Ktilde);

/// Same test on parameters already carrying Tm, Qset and K.
TwoTimeScaleResult two_time_scale_check_prepared(
    const SynchronverterParams& params, const GridParams& grid,
    WindowPolicy policy);

struct SweepSpec {
  double P_min = 0.0;
  double P_max = 0.0;
  double Q_min = 0.0;
  double Q_max = 0.0;
  int nP = 0;
  int nQ = 0;
};

/// Default grid: 201x201 cells spanning P in +-1.2*(||C|| + r) and
/// Q in +-1.2*r, with r the power-circle radius at the configured torque.
SweepSpec default_sweep_spec(const SynchronverterParams& params,
                             const GridParams& grid);

enum class CellVerdict { Stable, Unstable, Marginal, NoEquilibrium };

struct SweepCell {
  double P_set = 0.0;
  double Q_set = 0.0;
  CellVerdict verdict = CellVerdict::NoEquilibrium;
  double max_real = 0.0;    // NaN when no equilibrium
  double i_f_e = 0.0;       // NaN when no equilibrium
  double delta_e = 0.0;     // rad; NaN when no equilibrium
  bool in_sector = false;
  int g_prime_sign = 0;
};

struct StabilityMap {
  SweepSpec spec;
  double Ktilde = 0.0;
  int order = 5;
  std::vector<SweepCell> cells;  // row-major, P outer / Q inner

  std::size_t stable_count() const;
};

/// Classifies every setpoint cell of the grid. Per cell: Tm from the power
/// balance, equilibria rebuilt, verdict from the eigenvalues of jacobian4
/// at the first-branch equilibrium (order 4) or of the interior
/// linearization at z_r (order 5); in_sector carries the sufficient-test
/// flag (configured window where it fits the cell's If_plus, defaulted
/// otherwise). Infeasible cells are tagged NoEquilibrium; no per-cell
/// failure aborts the sweep. Cells are independent and evaluated on
/// `threads` workers (0 = hardware concurrency) with deterministic output
/// ordering.
StabilityMap stability_sweep(const SweepSpec& spec,
                             const SynchronverterParams& params,
                             const GridParams& grid, double Ktilde, int order,
                             int threads = 0);

}  // namespace syncstab
