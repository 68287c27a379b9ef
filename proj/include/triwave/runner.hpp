#pragma once

// Batch execution of a parsed RunConfig.  Exit status: 0 when every solve
// converged, 2 when a solve did not converge or gamma0 estimation declined,
// 1 for configuration errors (raised as exceptions before anything runs).

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

#include "triwave/config.hpp"
#include "triwave/error.hpp"
#include "triwave/field_io.hpp"
#include "triwave/potential.hpp"
#include "triwave/solver.hpp"
#include "triwave/threshold.hpp"

namespace triwave {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitUnconverged = 2;

namespace detail {

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

inline void write_fields(const RunConfig& rc, const TriField& u) {
  if (!rc.emit_fields) return;
  for (int i = 0; i < 3; ++i)
    save_field(rc.output_dir / ("u" + std::to_string(i + 1) + ".field"), u[i], rc.field_format);
}

inline std::string run_header(const RunConfig& rc) {
  std::ostringstream out;
  out << "command=" << to_string(rc.command) << '\n'
      << "grid=" << describe(rc.grid) << '\n'
      << "p=" << format_number(rc.p) << '\n'
      << "gamma=" << format_number(rc.gamma) << '\n'
      << "seed=" << rc.solve.seed << '\n'
      << "threads=" << rc.solve.threads << '\n';
  if (rc.potentials) {
    for (int i = 0; i < 3; ++i) out << "v" << i + 1 << '=' << (*rc.potentials)[i].describe() << '\n';
  } else {
    out << "omega=" << format_number(rc.omega[0]) << ',' << format_number(rc.omega[1]) << ','
        << format_number(rc.omega[2]) << '\n';
  }
  return out.str();
}

inline int run_solve(const RunConfig& rc, std::ostream& log) {
  const auto result = minimize_on_nehari(rc.system(), rc.solve);
  write_text(rc.output_dir / "report.txt", run_header(rc) + solve_report(result));
  write_fields(rc, result.minimizer);
  log << "solve: energy=" << format_number(result.energy_value) << " classification=" << result.classification.to_string()
      << " converged=" << (result.converged ? "true" : "false") << '\n';
  return result.converged ? kExitOk : kExitUnconverged;
}

inline int run_sweep_command(const RunConfig& rc, std::ostream& log) {
  const auto params = rc.system();
  const auto scalars = scalar_references(params, rc.solve);
  const auto rows = run_sweep(params, rc.sweep, scalars);
  write_text(rc.output_dir / "sweep.csv", sweep_csv(rows));
  write_text(rc.output_dir / "sweep.dat", sweep_plot_data(rows));
  bool all_converged = true;
  for (const auto& r : rows) all_converged = all_converged && r.converged;
  log << "sweep: " << rows.size() << " rows, all_converged=" << (all_converged ? "true" : "false") << '\n';
  return all_converged ? kExitOk : kExitUnconverged;
}

inline int run_gamma0(const RunConfig& rc, std::ostream& log) {
  const auto params = rc.system();
  const auto scalars = scalar_references(params, rc.solve);
  const auto est = estimate_gamma0(params, rc.sweep, scalars);
  write_text(rc.output_dir / "gamma0.csv", sweep_csv(est.table, est.trace));
  write_text(rc.output_dir / "gamma0.dat", sweep_plot_data(est.table));
  std::ostringstream out;
  out << run_header(rc);
  out << "gamma0=" << (est.gamma0 ? format_number(*est.gamma0) : "none") << '\n'
      << "bracket_lo=" << format_number(est.bracket_lo) << '\n'
      << "bracket_hi=" << format_number(est.bracket_hi) << '\n'
      << "monotone=" << (est.monotone ? "true" : "false") << '\n'
      << "status=" << est.status << '\n'
      << "scalar_minimum=" << format_number(scalars.minimum()) << '\n';
  write_text(rc.output_dir / "report.txt", out.str());
  log << "gamma0: " << est.status << '\n';
  return est.gamma0 ? kExitOk : kExitUnconverged;
}

inline int run_compare(const RunConfig& rc, std::ostream& log) {
  const auto r = compare_cv_cinfty(*rc.potentials, rc.grid, rc.p, rc.gamma, rc.solve, rc.potential_mode, rc.gamma0_hint);
  const auto& h = r.hypotheses;
  std::ostringstream out;
  out << run_header(rc);
  out << "mode=" << (rc.potential_mode == HypothesisMode::V2 ? "V2" : "V2prime") << '\n'
      << "c_V=" << format_number(r.c_v) << '\n'
      << "c_inf=" << format_number(r.c_inf) << '\n'
      << "margin=" << format_number(r.margin) << '\n'
      << "tolerance=" << format_number(r.tolerance) << '\n'
      << "verdict=" << (r.positive() ? "positive" : r.inconclusive() ? "inconclusive" : "negative") << '\n'
      << "converged_V=" << (r.converged_v ? "true" : "false") << '\n'
      << "converged_inf=" << (r.converged_inf ? "true" : "false") << '\n'
      << "hypotheses_hold=" << (r.hypotheses_hold ? "true" : "false") << '\n'
      << "hypothesis_V2=" << (h.v2 ? "true" : "false") << '\n'
      << "hypothesis_V2prime=" << (h.v2prime ? "true" : "false") << '\n'
      << "hypothesis_V3=" << (h.v3 ? "true" : "false") << '\n';
  for (int i = 0; i < 3; ++i) {
    out << "strict_fraction_" << i + 1 << '=' << format_number(h.strict_fraction[i]) << '\n'
        << "lower_bound_" << i + 1 << '=' << format_number(h.lower_bound[i]) << '\n';
  }
  if (r.potential_solution) out << "# potential solve\n" << solve_report(*r.potential_solution);
  write_text(rc.output_dir / "report.txt", out.str());
  if (r.potential_solution) write_fields(rc, r.potential_solution->minimizer);
  log << "compare-potential: margin=" << format_number(r.margin) << '\n';
  return r.converged_v && r.converged_inf ? kExitOk : kExitUnconverged;
}

inline int run_scalar_ref(const RunConfig& rc, std::ostream& log) {
  const auto params = rc.system();
  bool converged = true;
  std::ostringstream out;
  out << run_header(rc);
  std::array<Field, 3> profiles{Field(rc.grid), Field(rc.grid), Field(rc.grid)};
  for (int i = 0; i < 3; ++i) {
    const auto s = scalar_ground_state(rc.omega[i], rc.p, rc.grid, rc.solve);
    out << "energy_" << i + 1 << '=' << format_number(s.energy) << '\n'
        << "residual_rel_" << i + 1 << '=' << format_number(s.residual_rel) << '\n'
        << "converged_" << i + 1 << '=' << (s.converged ? "true" : "false") << '\n';
    converged = converged && s.converged;
    profiles[i] = s.profile;
  }
  write_text(rc.output_dir / "report.txt", out.str());
  if (rc.emit_fields) {
    for (int i = 0; i < 3; ++i)
      save_field(rc.output_dir / ("u" + std::to_string(i + 1) + ".field"), profiles[i], rc.field_format);
  }
  log << "scalar-ref: converged=" << (converged ? "true" : "false") << '\n';
  return converged ? kExitOk : kExitUnconverged;
}

}  // namespace detail

/// Executes the configured command and writes its artifacts into
/// rc.output_dir (created if missing).
inline int run(RunConfig rc, std::ostream& log) {
  rc.sweep.solve = rc.solve;
  std::error_code ec;
  std::filesystem::create_directories(rc.output_dir, ec);
  if (ec) throw Error("cannot create output directory " + rc.output_dir.string() + ": " + ec.message());
  switch (rc.command) {
    case Command::Solve:
      return detail::run_solve(rc, log);
    case Command::Sweep:
      return detail::run_sweep_command(rc, log);
    case Command::Gamma0:
      return detail::run_gamma0(rc, log);
    case Command::ComparePotential:
      return detail::run_compare(rc, log);
    case Command::ScalarRef:
      return detail::run_scalar_ref(rc, log);
  }
  return kExitConfigError;
}

inline int run(const RunConfig& rc) {
  std::ostringstream sink;
  return run(rc, sink);
}

}  // namespace triwave
