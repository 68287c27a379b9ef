#pragma once

// Coupling-threshold analysis for constant frequencies.
//
// The explicit test state is t_gamma * (u1, u2, u3) built from the three
// scalar ground states, with u1 negated when gamma < 0 so that the cubic
// term always lowers the energy.  Once its energy drops below
// min_i I_i(u_i), the ground state cannot be scalar.  gamma0 itself is
// estimated from full minimizations: a sweep followed by bisection on the
// predicate "converged, classified vector, and m(gamma) below the scalar
// minimum".

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "triwave/error.hpp"
#include "triwave/nehari.hpp"
#include "triwave/solver.hpp"
#include "triwave/system.hpp"

namespace triwave {

struct ScalarReferences {
  std::array<Field, 3> profiles;
  std::array<double, 3> energies{};

  double minimum() const { return std::min({energies[0], energies[1], energies[2]}); }
};

/// Scalar ground states for omega_1, omega_2, omega_3 (closed form in 1D).
inline ScalarReferences scalar_references(const SystemParams& params, const SolveConfig& config = {}) {
  const auto& omega = params.omega();
  auto s1 = scalar_ground_state(omega[0], params.exponent(), params.grid(), config);
  auto s2 = scalar_ground_state(omega[1], params.exponent(), params.grid(), config);
  auto s3 = scalar_ground_state(omega[2], params.exponent(), params.grid(), config);
  return {{std::move(s1.profile), std::move(s2.profile), std::move(s3.profile)}, {s1.energy, s2.energy, s3.energy}};
}

struct VectorCandidate {
  TriField state;  // t_gamma * (+-u1, u2, u3), on the Nehari manifold
  double scale = 0.0;
  double energy = 0.0;
};

inline VectorCandidate vector_test_candidate(double gamma, const ScalarReferences& scalars,
                                             const SystemParams& params) {
  const auto at_gamma = params.with_coupling(gamma);
  TriField base(scalars.profiles[0], scalars.profiles[1], scalars.profiles[2]);
  if (gamma < 0.0) base[0] *= -1.0;
  const auto k = component_integrals(base, at_gamma);
  const double t = fiber_maximizer(fiber_coefficients(k, at_gamma));
  const double p = params.exponent();
  double e = 0.0;
  for (int i = 0; i < 3; ++i) {
    e += t * t / 6.0 * (k.kinetic[i] + k.potential[i]) +
         (p - 2.0) * std::pow(t, p + 1.0) / (3.0 * (p + 1.0)) * k.power[i];
  }
  return {t * base, t, e};
}

struct VectorInequalityReport {
  double gamma = 0.0;
  double candidate_energy = 0.0;
  double scalar_minimum = 0.0;
  double scale = 0.0;  // t_gamma
  bool holds = false;  // candidate_energy < scalar_minimum
};

inline VectorInequalityReport verify_vector_inequality(double gamma, const SystemParams& params,
                                                       const ScalarReferences& scalars) {
  const auto cand = vector_test_candidate(gamma, scalars, params);
  VectorInequalityReport r;
  r.gamma = gamma;
  r.candidate_energy = cand.energy;
  r.scalar_minimum = scalars.minimum();
  r.scale = cand.scale;
  r.holds = cand.energy < r.scalar_minimum;
  return r;
}

inline VectorInequalityReport verify_vector_inequality(double gamma, const SystemParams& params) {
  return verify_vector_inequality(gamma, params, scalar_references(params));
}

struct TGammaReport {
  std::vector<std::pair<double, double>> rows;  // (gamma, t_gamma)
  bool strictly_decreasing = false;
  bool decays_tenfold = false;  // t(last) < 0.1 t(first)
};

/// t_gamma along increasing positive gammas.
inline TGammaReport t_gamma_limit_check(const SystemParams& params, const ScalarReferences& scalars,
                                        const std::vector<double>& gammas) {
  detail::require(!gammas.empty(), "t_gamma check needs at least one gamma");
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    detail::require(gammas[i] > 0.0, "t_gamma check expects positive gammas");
    detail::require(i == 0 || gammas[i] > gammas[i - 1], "t_gamma check expects increasing gammas");
  }
  TGammaReport r;
  for (double g : gammas) r.rows.emplace_back(g, vector_test_candidate(g, scalars, params).scale);
  r.strictly_decreasing = true;
  for (std::size_t i = 1; i < r.rows.size(); ++i)
    r.strictly_decreasing = r.strictly_decreasing && r.rows[i].second < r.rows[i - 1].second;
  r.decays_tenfold = r.rows.back().second < 0.1 * r.rows.front().second;
  return r;
}

using GroundStateSolver = std::function<GroundStateResult(const SystemParams&, const SolveConfig&)>;

struct SweepConfig {
  std::vector<double> gammas;
  double bisection_width = 1e-3;
  double vector_margin = 1e-8;  // m must undercut the scalar minimum by this much
  SolveConfig solve;

  void validate() const {
    detail::require(!gammas.empty(), "sweep needs at least one gamma");
    for (double g : gammas) detail::require(std::isfinite(g), "sweep gammas must be finite");
    detail::require(bisection_width > 0.0, "bisection width must be positive");
    solve.validate();
  }
};

struct SweepRow {
  double gamma = 0.0;
  double m = 0.0;
  double e_cand = 0.0;
  double e_scal = 0.0;
  Classification classification;
  double residual_rel = 0.0;
  bool converged = false;

  bool vector_ground_state(double margin) const {
    return converged && classification.is_vector() && m < e_scal - margin;
  }
};

/// Seed for one sweep point: seed xor a mix of |gamma|, so gamma and -gamma
/// share ansatze (up to the solver's sign conjugation).
inline std::uint64_t gamma_seed(std::uint64_t seed, double gamma) {
  return seed ^ detail::splitmix64(std::bit_cast<std::uint64_t>(std::abs(gamma) + 0.0));
}

inline SweepRow sweep_point(double gamma, const SystemParams& params, const ScalarReferences& scalars,
                            const SolveConfig& solve, const GroundStateSolver& solver) {
  SolveConfig local = solve;
  local.seed = gamma_seed(solve.seed, gamma);
  const auto result = solver(params.with_coupling(gamma), local);
  SweepRow row;
  row.gamma = gamma;
  row.m = result.energy_value;
  row.e_cand = vector_test_candidate(gamma, scalars, params).energy;
  row.e_scal = scalars.minimum();
  row.classification = result.classification;
  row.residual_rel = result.residual_rel;
  row.converged = result.converged;
  return row;
}

/// One solve per gamma, in the given order.
inline std::vector<SweepRow> run_sweep(const SystemParams& params, const SweepConfig& sweep,
                                       const ScalarReferences& scalars,
                                       const GroundStateSolver& solver = minimize_on_nehari) {
  sweep.validate();
  std::vector<SweepRow> rows;
  rows.reserve(sweep.gammas.size());
  for (double g : sweep.gammas) rows.push_back(sweep_point(g, params, scalars, sweep.solve, solver));
  return rows;
}

struct Gamma0Estimate {
  std::optional<double> gamma0;
  double bracket_lo = std::numeric_limits<double>::quiet_NaN();
  double bracket_hi = std::numeric_limits<double>::quiet_NaN();
  bool monotone = false;
  std::string status;
  std::vector<SweepRow> table;
  std::vector<std::string> trace;
};

inline Gamma0Estimate estimate_gamma0(const SystemParams& params, const SweepConfig& sweep,
                                      const ScalarReferences& scalars,
                                      const GroundStateSolver& solver = minimize_on_nehari) {
  sweep.validate();
  SweepConfig magnitudes = sweep;
  for (double& g : magnitudes.gammas) g = std::abs(g);
  std::sort(magnitudes.gammas.begin(), magnitudes.gammas.end());
  magnitudes.gammas.erase(std::unique(magnitudes.gammas.begin(), magnitudes.gammas.end()), magnitudes.gammas.end());

  Gamma0Estimate est;
  est.table = run_sweep(params, magnitudes, scalars, solver);
  const auto is_vector = [&](const SweepRow& r) { return r.vector_ground_state(sweep.vector_margin); };

  const auto first = std::find_if(est.table.begin(), est.table.end(), is_vector);
  if (first == est.table.end()) {
    est.monotone = true;
    est.status = "no vector ground state in sweep";
    return est;
  }
  est.monotone = std::all_of(first, est.table.end(), is_vector);
  if (!est.monotone) {
    est.status = "classification is not monotone in |gamma|; bisection declined";
    return est;
  }
  if (first == est.table.begin()) {
    est.status = "vector ground state already at the smallest |gamma|; no bracket";
    return est;
  }
  const auto below = std::prev(first);
  if (!below->converged) {
    est.status = "lower bracket end is unconverged; bisection declined";
    return est;
  }

  double lo = below->gamma;
  double hi = first->gamma;
  auto fmt = [](double v) { return format_number(v); };
  est.trace.push_back("bracket lo=" + fmt(lo) + " hi=" + fmt(hi));
  while (hi - lo > sweep.bisection_width) {
    const double mid = 0.5 * (lo + hi);
    const auto row = sweep_point(mid, params, scalars, sweep.solve, solver);
    est.trace.push_back("bisect gamma=" + fmt(mid) + " m=" + fmt(row.m) + " class=" + row.classification.to_string() +
                        " converged=" + (row.converged ? "true" : "false"));
    if (!row.converged) {
      est.bracket_lo = lo;
      est.bracket_hi = hi;
      est.status = "unconverged solve inside bracket; bisection stopped";
      return est;
    }
    (is_vector(row) ? hi : lo) = mid;
  }
  est.bracket_lo = lo;
  est.bracket_hi = hi;
  est.gamma0 = 0.5 * (lo + hi);
  est.status = "ok";
  est.trace.push_back("gamma0=" + fmt(*est.gamma0) + " width=" + fmt(hi - lo));
  return est;
}

/// CSV with header gamma,m,E_cand,E_scal,classification,residual_rel,converged;
/// trace lines follow as '#' comments.
inline std::string sweep_csv(const std::vector<SweepRow>& rows, const std::vector<std::string>& trace = {}) {
  std::ostringstream out;
  out << "gamma,m,E_cand,E_scal,classification,residual_rel,converged\n";
  for (const auto& r : rows) {
    out << format_number(r.gamma) << ',' << format_number(r.m) << ',' << format_number(r.e_cand) << ','
        << format_number(r.e_scal) << ',' << r.classification.to_string() << ',' << format_number(r.residual_rel)
        << ',' << (r.converged ? "true" : "false") << '\n';
  }
  for (const auto& line : trace) out << "# " << line << '\n';
  return out.str();
}

/// Whitespace-separated gamma, m, E_cand columns for gnuplot.
inline std::string sweep_plot_data(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "# gamma m E_cand\n";
  for (const auto& r : rows) out << format_number(r.gamma) << ' ' << format_number(r.m) << ' ' << format_number(r.e_cand) << '\n';
  return out.str();
}

}  // namespace triwave
