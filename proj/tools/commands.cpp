#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "syncstab/config_io.hpp"
#include "syncstab/equilibria.hpp"
#include "syncstab/errors.hpp"
#include "syncstab/geometry.hpp"
#include "syncstab/model.hpp"
#include "syncstab/sim.hpp"
#include "syncstab/stability.hpp"
#include "syncstab/textio.hpp"
#include "syncstab/version.hpp"

namespace syncstab::cli {

namespace {

namespace fs = std::filesystem;

std::string json_str(const std::string& s) { return "\"" + s + "\""; }

std::string bool_str(bool b) { return b ? "true" : "false"; }

const char* branch_name(Branch b) {
  switch (b) {
    case Branch::Right:
      return "right";
    case Branch::Left:
      return "left";
    case Branch::SymRight:
      return "sym_right";
    case Branch::SymLeft:
      return "sym_left";
  }
  return "?";
}

const char* stability_name(StabilityClass c) {
  switch (c) {
    case StabilityClass::Stable:
      return "stable";
    case StabilityClass::Unstable:
      return "unstable";
    case StabilityClass::Marginal:
      return "marginal";
    case StabilityClass::NotComputed:
      return "not_computed";
  }
  return "?";
}

const char* verdict_name(CellVerdict v) {
  switch (v) {
    case CellVerdict::Stable:
      return "stable";
    case CellVerdict::Unstable:
      return "unstable";
    case CellVerdict::Marginal:
      return "marginal";
    case CellVerdict::NoEquilibrium:
      return "no-equilibrium";
  }
  return "?";
}

struct OutputSet {
  const CommonOptions& common;
  ModelConfig config;
  std::string hash;
  std::vector<std::string> files;

  explicit OutputSet(const CommonOptions& c)
      : common(c), config(load_config(c.config_path)), hash(param_hash(config)) {
    fs::create_directories(c.out_dir);
  }

  void write(const std::string& name, const std::string& content) {
    write_text_file(common.out_dir / name, content);
    files.push_back(name);
  }

  void finish(const char* subcommand) {
    std::string m;
    m += "{\n";
    m += "  \"tool_version\": " + json_str(kToolVersion) + ",\n";
    m += "  \"subcommand\": " + json_str(subcommand) + ",\n";
    m += "  \"config_path\": " + json_str(common.config_path.string()) + ",\n";
    m += "  \"param_hash\": " + json_str(hash) + ",\n";
    m += "  \"outputs\": [";
    for (std::size_t i = 0; i < files.size(); ++i) {
      if (i) m += ", ";
      m += json_str(files[i]);
    }
    m += "]\n}\n";
    write_text_file(common.out_dir / "manifest.json", m);
  }
};

std::string json_header(const std::string& hash, const char* subcommand) {
  std::string s;
  s += "{\n";
  s += "  \"tool_version\": " + json_str(kToolVersion) + ",\n";
  s += "  \"subcommand\": " + json_str(subcommand) + ",\n";
  s += "  \"param_hash\": " + json_str(hash) + ",\n";
  return s;
}

std::string csv_header(const std::string& hash) {
  return "# param_hash=" + hash + " tool_version=" + kToolVersion + "\n";
}

}  // namespace

int cmd_equilibria(const CommonOptions& common) {
  OutputSet out(common);
  const auto& p = out.config.params;
  const auto& g = out.config.grid;

  const auto d = derived_constants(p, g);
  const auto a1 = check_assumption1(p, g);
  const auto ex = check_existence5(p, g);
  auto eq = equilibria5(p, g);  // InfeasibleError -> exit 2 in main
  const auto iv = if_interval(p, g);
  const auto [P_l, P_r] = solve_pl_pr(p, g);

  // Classify every listed point through the interior linearization.
  for (auto& pt : eq.points) {
    pt.stability =
        classify_matrix(jacobian5_unsaturated(pt.z, p, g)).cls;
  }

  std::string s = json_header(out.hash, "equilibria");
  s += "  \"phi_deg\": " + fmt9(to_deg(d.phi)) + ",\n";
  s += "  \"R\": " + fmt9(d.R) + ",\n";
  s += "  \"L\": " + fmt9(d.L) + ",\n";
  s += "  \"Ktilde\": " + fmt9(d.Ktilde) + ",\n";
  s += "  \"Tm_tilde\": " + fmt9(d.Tm_tilde) + ",\n";
  s += "  \"Q_tilde\": " + fmt9(d.Qtilde) + ",\n";
  s += "  \"assumption1\": {\"holds\": " + bool_str(a1.holds) +
       ", \"strict\": " + bool_str(a1.strict) + "},\n";
  s += "  \"existence\": {\"holds\": " + bool_str(ex.holds) +
       ", \"strict\": " + bool_str(ex.strict) + "},\n";
  const char* ikind = iv.kind == IfKind::Closed       ? "closed"
                      : iv.kind == IfKind::HalfOpenAtZero ? "half_open_at_zero"
                                                          : "empty";
  s += "  \"If\": {\"kind\": " + json_str(ikind) +
       ", \"i_f_minus\": " + fmt9(iv.i_f_minus) +
       ", \"i_f_plus\": " + fmt9(iv.i_f_plus) + "},\n";
  s += "  \"P_l\": " + fmt9(P_l) + ",\n";
  s += "  \"P_r\": " + fmt9(P_r) + ",\n";
  const char* kind = eq.kind == EquilibriaKind::FourPoints ? "four_points"
                     : eq.kind == EquilibriaKind::TwoPoints ? "two_points"
                                                            : "exceptional_m";
  s += "  \"kind\": " + json_str(kind) + ",\n";
  if (eq.kind == EquilibriaKind::ExceptionalM) {
    s += "  \"exceptional_point\": {\"P\": " + fmt9(eq.exceptional.P) +
         ", \"Q\": " + fmt9(eq.exceptional.Q) + "},\n";
  }
  s += "  \"points\": [\n";
  for (std::size_t i = 0; i < eq.points.size(); ++i) {
    const auto& pt = eq.points[i];
    const auto verdict = classify_matrix(jacobian5_unsaturated(pt.z, p, g));
    s += "    {\"branch\": " + json_str(branch_name(pt.branch));
    s += ", \"i_d\": " + fmt9(pt.z.x.i_d);
    s += ", \"i_q\": " + fmt9(pt.z.x.i_q);
    s += ", \"omega\": " + fmt9(pt.z.x.omega);
    s += ", \"delta_deg\": " + fmt9(to_deg(pt.z.x.delta));
    s += ", \"i_f\": " + fmt9(pt.z.i_f);
    s += ", \"P\": " + fmt9(pt.pq.P);
    s += ", \"Q\": " + fmt9(pt.pq.Q);
    s += ", \"stability\": " + json_str(stability_name(pt.stability));
    s += ", \"max_real\": " + fmt9(verdict.max_real);
    s += ", \"eigenvalues\": [";
    for (std::size_t k = 0; k < verdict.eigenvalues.size(); ++k) {
      if (k) s += ", ";
      s += "{\"re\": " + fmt9(verdict.eigenvalues[k].real()) +
           ", \"im\": " + fmt9(verdict.eigenvalues[k].imag()) + "}";
    }
    s += "]}";
    s += (i + 1 < eq.points.size()) ? ",\n" : "\n";
  }
  s += "  ]\n}\n";
  out.write("equilibria.json", s);
  out.finish("equilibria");

  std::printf("equilibria: %zu point(s), P_r = %.3f kW, P_l = %.3f kW\n",
              eq.points.size(), P_r / 1e3, P_l / 1e3);
  for (const auto& pt : eq.points) {
    std::printf(
        "  %-9s i_d = %9.3f A  i_q = %8.3f A  delta = %8.3f deg  i_f = %7.4f "
        "A  [%s]\n",
        branch_name(pt.branch), pt.z.x.i_d, pt.z.x.i_q, to_deg(pt.z.x.delta),
        pt.z.i_f, stability_name(pt.stability));
  }
  return 0;
}

int cmd_geometry(const CommonOptions& common) {
  OutputSet out(common);
  const auto& p = out.config.params;
  const auto& g = out.config.grid;

  const auto geom = build_geometry(p, g);
  const char* orient = geom.orientation == Orientation::MRightOfC
                           ? "M_right_of_C"
                           : "M_left_or_below_C";

  std::string s = json_header(out.hash, "geometry");
  s += "  \"C\": {\"P\": " + fmt9(geom.C.P) + ", \"Q\": " + fmt9(geom.C.Q) +
       "},\n";
  s += "  \"r\": " + fmt9(geom.r) + ",\n";
  s += "  \"Z\": [" + fmt9(geom.Z_p) + ", " + fmt9(geom.Z_q) + "],\n";
  s += "  \"M\": {\"P\": " + fmt9(geom.M.P) + ", \"Q\": " + fmt9(geom.M.Q) +
       "},\n";
  s += "  \"phi_deg\": " + fmt9(to_deg(geom.phi)) + ",\n";
  s += "  \"if_minus\": " + fmt9(geom.i_f_minus) + ",\n";
  s += "  \"if_plus\": " + fmt9(geom.i_f_plus) + ",\n";
  s += "  \"if_zero\": " + fmt9(geom.i_f_zero) + ",\n";
  s += "  \"If_plus_interval\": [" + fmt9(geom.If_plus_lo) + ", " +
       fmt9(geom.If_plus_hi) + "],\n";
  s += "  \"orientation\": " + json_str(orient) + "\n";
  s += "}\n";
  out.write("geometry.json", s);

  // Plot-ready samples of both equilibrium branches in the power plane.
  const auto iv = if_interval(p, g);
  std::string csv = csv_header(out.hash);
  csv += "i_f,branch,P,Q,delta_deg\n";
  const int n_samples = 512;
  const double lo = iv.kind == IfKind::HalfOpenAtZero
                        ? iv.i_f_plus / n_samples
                        : iv.i_f_minus;
  for (int i = 0; i < n_samples; ++i) {
    const double i_f = lo + (iv.i_f_plus - lo) * i / (n_samples - 1);
    for (const SBranch b : {SBranch::S1, SBranch::S2}) {
      const auto cp = s_point(i_f, b, p, g);
      csv += fmt9(i_f);
      csv += b == SBranch::S1 ? ",S1," : ",S2,";
      csv += fmt9(cp.pq.P) + "," + fmt9(cp.pq.Q) + "," +
             fmt9(to_deg(cp.delta)) + "\n";
    }
  }
  out.write("geometry_samples.csv", csv);
  out.finish("geometry");

  std::printf(
      "geometry: C = (%.3f, %.3f) kW/kVAr, r = %.3f kW, M = (%.3f, %.3f), "
      "phi = %.2f deg\n",
      geom.C.P / 1e3, geom.C.Q / 1e3, geom.r / 1e3, geom.M.P / 1e3,
      geom.M.Q / 1e3, to_deg(geom.phi));
  std::printf("  I_f = [%.4f, %.4f] A, i_f0 = %.4f A, If+ = (%.4f, %.4f) A\n",
              geom.i_f_minus, geom.i_f_plus, geom.i_f_zero, geom.If_plus_lo,
              geom.If_plus_hi);
  return 0;
}

int cmd_stability_map(const CommonOptions& common, const MapOptions& options) {
  OutputSet out(common);
  const auto& p = out.config.params;
  const auto& g = out.config.grid;

  std::vector<double> ktilde;
  for (const auto& t : options.ktilde) ktilde.push_back(parse_quantity(t));
  if (ktilde.empty()) {
    ktilde.push_back(derived_constants(p, g).Ktilde);
  }

  SweepSpec spec = default_sweep_spec(p, g);
  if (options.nP > 0 && options.nQ > 0) {
    spec.nP = options.nP;
    spec.nQ = options.nQ;
  }

  for (const double kt : ktilde) {
    const auto map =
        stability_sweep(spec, p, g, kt, options.order, common.threads);

    std::string csv = csv_header(out.hash);
    csv += "# order=" + std::to_string(options.order) +
           " ktilde=" + fmt9(kt) + " grid=" + std::to_string(spec.nP) + "x" +
           std::to_string(spec.nQ) + "\n";
    csv += "P_set,Q_set,verdict,max_real,i_f_e,delta_e_deg,in_sector,"
           "g_prime_sign\n";
    for (const auto& c : map.cells) {
      csv += fmt9(c.P_set) + "," + fmt9(c.Q_set) + ",";
      csv += verdict_name(c.verdict);
      csv += "," + fmt9(c.max_real) + "," + fmt9(c.i_f_e) + "," +
             fmt9(std::isnan(c.delta_e)
                      ? c.delta_e
                      : to_deg(c.delta_e)) +
             "," + (c.in_sector ? "1" : "0") + "," +
             std::to_string(c.g_prime_sign) + "\n";
    }

    std::string kt_tag = fmt9(kt);
    for (auto& ch : kt_tag) {
      if (ch == '+') ch = 'p';
    }
    const std::string name = "stability_map_order" +
                             std::to_string(options.order) + "_ktilde" +
                             kt_tag + ".csv";
    out.write(name, csv);
    std::printf("stability-map: ktilde = %.6g A*H, order %d, %dx%d cells, "
                "%zu stable -> %s\n",
                kt, options.order, spec.nP, spec.nQ, map.stable_count(),
                name.c_str());
  }
  out.finish("stability-map");
  return 0;
}

int cmd_simulate(const CommonOptions& common, const SimOptions& options) {
  OutputSet out(common);
  const auto& p = out.config.params;
  const auto& g = out.config.grid;

  const auto eq = equilibria5(p, g);
  const Branch want = options.from == "zl" ? Branch::Left : Branch::Right;
  const EquilibriumPoint* target = nullptr;
  for (const auto& pt : eq.points) {
    if (pt.branch == want) target = &pt;
  }
  if (target == nullptr) {
    throw InfeasibleError("simulate: requested equilibrium does not exist");
  }

  SimConfig cfg;
  cfg.initial = target->z;
  cfg.initial.x.i_d *= 1.0 + options.perturb;
  cfg.initial.x.i_q *= 1.0 + options.perturb;
  cfg.initial.x.omega *= 1.0 + options.perturb;
  cfg.initial.x.delta *= 1.0 + options.perturb;
  cfg.initial.i_f *= 1.0 + options.perturb;
  cfg.t_end = options.t_end;
  cfg.dt = options.dt;
  cfg.record_stride = options.stride;
  cfg.order = options.order;

  const auto traj = integrate(cfg, p, g);

  std::string csv = csv_header(out.hash);
  csv += "t,i_d,i_q,w,delta,i_f,P,Q\n";
  for (const auto& s : traj.samples) {
    csv += fmt9(s.t) + "," + fmt9(s.z.x.i_d) + "," + fmt9(s.z.x.i_q) + "," +
           fmt9(s.z.x.omega) + "," + fmt9(s.z.x.delta) + "," + fmt9(s.z.i_f) +
           "," + fmt9(s.pq.P) + "," + fmt9(s.pq.Q) + "\n";
  }
  out.write("trajectory.csv", csv);

  const auto mode_name = [](SatMode m) {
    switch (m) {
      case SatMode::Interior:
        return "interior";
      case SatMode::ClampedLow:
        return "clamped_low";
      case SatMode::ClampedHigh:
        return "clamped_high";
    }
    return "?";
  };
  std::string ev = json_header(out.hash, "simulate");
  ev += "  \"from\": " + json_str(options.from) + ",\n";
  ev += "  \"order\": " + std::to_string(options.order) + ",\n";
  ev += "  \"max_projection\": " + fmt9(traj.max_projection) + ",\n";
  ev += "  \"blowup_time\": ";
  ev += traj.blowup_time ? fmt9(*traj.blowup_time) : "null";
  ev += ",\n  \"events\": [\n";
  for (std::size_t i = 0; i < traj.events.size(); ++i) {
    const auto& e = traj.events[i];
    ev += "    {\"t\": " + fmt9(e.t) + ", \"from\": " +
          json_str(mode_name(e.from)) + ", \"to\": " + json_str(mode_name(e.to)) +
          "}";
    ev += (i + 1 < traj.events.size()) ? ",\n" : "\n";
  }
  ev += "  ]\n}\n";
  out.write("sim_events.json", ev);
  out.finish("simulate");

  if (traj.blowup_time) {
    std::fprintf(stderr, "simulate: state became non-finite at t = %.6g s\n",
                 *traj.blowup_time);
    throw NumericError("simulate: trajectory blew up");
  }

  const auto rep = convergence_metric(traj, target->z, 1e-4);
  std::printf(
      "simulate: %lld steps, %zu samples, %zu saturation events, final "
      "distance to %s = %.3e%s\n",
      static_cast<long long>(std::llround(options.t_end / options.dt)),
      traj.samples.size(), traj.events.size(), options.from.c_str(),
      rep.final_error, rep.converged ? " (settled)" : "");
  return 0;
}

}  // namespace syncstab::cli
