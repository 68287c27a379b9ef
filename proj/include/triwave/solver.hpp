#pragma once

// Ground states as minimizers of the energy over the Nehari manifold.
//
// Each restart starts from an ansatz, projects it onto the manifold and then
// repeats: preconditioned gradient step, re-projection along the ray,
// backtracking on the projected energy.  Every iterate stays on the
// manifold, where the energy equals the (positive) reduced energy, so the
// cubic coupling cannot drive the iteration to -inf.  Since the manifold is
// a natural constraint, the full Euler-Lagrange residual vanishes at a
// constrained minimizer; its relative L2 norm is the stopping test.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "triwave/error.hpp"
#include "triwave/fiber.hpp"
#include "triwave/grid.hpp"
#include "triwave/nehari.hpp"
#include "triwave/parallel.hpp"
#include "triwave/system.hpp"

namespace triwave {

enum class AnsatzKind { GaussianTriple, ScalarEmbedding, SignedGaussianTriple, File };

/// Starting point of a restart.  Gaussian ansatze are built in the
/// orientation suited to gamma >= 0; for gamma < 0 the solver flips the sign
/// of the first component of every ansatz (sign conjugation), which maps
/// the whole iteration at gamma onto the one at -gamma.
struct Ansatz {
  AnsatzKind kind = AnsatzKind::GaussianTriple;
  int component = 1;                 // 1-based, ScalarEmbedding only
  std::array<int, 3> signs{1, 1, 1};  // SignedGaussianTriple only
  std::optional<TriField> state;      // File only

  static Ansatz gaussian_triple() { return {}; }
  static Ansatz scalar_embedding(int i) {
    detail::require(i >= 1 && i <= 3, "scalar embedding component must be 1, 2 or 3");
    Ansatz a;
    a.kind = AnsatzKind::ScalarEmbedding;
    a.component = i;
    return a;
  }
  static Ansatz signed_gaussian_triple(std::array<int, 3> signs = {-1, 1, 1}) {
    Ansatz a;
    a.kind = AnsatzKind::SignedGaussianTriple;
    a.signs = signs;
    return a;
  }
  static Ansatz from_state(TriField u) {
    Ansatz a;
    a.kind = AnsatzKind::File;
    a.state = std::move(u);
    return a;
  }

  std::string name() const {
    switch (kind) {
      case AnsatzKind::GaussianTriple:
        return "gaussian_triple";
      case AnsatzKind::ScalarEmbedding:
        return "scalar_embedding(" + std::to_string(component) + ")";
      case AnsatzKind::SignedGaussianTriple: {
        std::string s = "signed_gaussian_triple(";
        for (int i = 0; i < 3; ++i) s += signs[i] < 0 ? '-' : '+';
        return s + ")";
      }
      case AnsatzKind::File:
        return "file";
    }
    return "?";
  }
};

struct SolveConfig {
  int max_iterations = 20000;
  double step_size = 1.0;  // initial (and largest) preconditioned step
  double residual_tol = 1e-8;
  int restarts = 8;
  std::uint64_t seed = 0;
  Ansatz initial_ansatz;
  int threads = 1;
  int recenter_interval = 50;  // constant potentials only; 0 disables

  void validate() const {
    detail::require(max_iterations >= 1, "max_iterations must be at least 1");
    detail::require(std::isfinite(step_size) && step_size > 0.0, "step_size must be positive");
    detail::require(std::isfinite(residual_tol) && residual_tol > 0.0, "residual_tol must be positive");
    detail::require(restarts >= 1, "restarts must be at least 1");
    detail::require(threads >= 1, "threads must be at least 1");
    detail::require(recenter_interval >= 0, "recenter_interval must be nonnegative");
  }
};

struct Classification {
  enum class Kind { Scalar, Vector, Partial };
  Kind kind = Kind::Vector;
  std::array<bool, 3> present{true, true, true};

  /// 1-based index of the single present component (Scalar only).
  int component() const {
    for (int i = 0; i < 3; ++i)
      if (present[i]) return i + 1;
    return 0;
  }

  bool is_vector() const { return kind == Kind::Vector; }

  std::string to_string() const {
    switch (kind) {
      case Kind::Vector:
        return "vector";
      case Kind::Scalar:
        return "scalar(" + std::to_string(component()) + ")";
      case Kind::Partial: {
        std::string s = "partial(";
        bool first = true;
        for (int i = 0; i < 3; ++i) {
          if (!present[i]) continue;
          if (!first) s += ' ';
          s += std::to_string(i + 1);
          first = false;
        }
        return s + ")";
      }
    }
    return "?";
  }

  friend bool operator==(const Classification&, const Classification&) = default;
};

struct RestartSummary {
  std::string ansatz;
  double energy = std::numeric_limits<double>::quiet_NaN();
  double residual_rel = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  bool converged = false;
  bool collapsed = false;
};

struct GroundStateResult {
  TriField minimizer;
  double energy_value = 0.0;
  double residual_rel = 0.0;
  Classification classification;
  std::array<double, 3> component_mass_fractions{};
  double symmetry_error = 0.0;
  double boundary_magnitude = 0.0;
  double nehari_relative = 0.0;  // |G(u)| / A(u)
  int iterations_used = 0;
  int restart_index_of_best = 0;
  bool converged = false;
  std::vector<double> energy_history;  // post-projection energies of the best restart
  std::vector<RestartSummary> restarts;
};

/// Mass fractions ||u_i||^2 / sum_j ||u_j||^2.
inline std::array<double, 3> mass_fractions(const TriField& u) {
  std::array<double, 3> m{};
  double total = 0.0;
  for (int i = 0; i < 3; ++i) total += (m[i] = inner(u[i], u[i]));
  detail::require(total > 0.0, "mass fractions are undefined for u = 0");
  for (auto& v : m) v /= total;
  return m;
}

/// Component i is present if its mass fraction exceeds `threshold`.
inline Classification classify(const TriField& u, double threshold = 1e-3) {
  const auto m = mass_fractions(u);
  Classification c;
  int count = 0;
  for (int i = 0; i < 3; ++i) count += (c.present[i] = m[i] > threshold);
  c.kind = count == 3 ? Classification::Kind::Vector
           : count == 1 ? Classification::Kind::Scalar
                        : Classification::Kind::Partial;
  return c;
}

namespace detail {

/// Center of mass of a density on the periodic box, per axis, from the
/// circular mean of exp(i pi x / L).  Exact for densities symmetric about
/// their center.
inline Point periodic_centroid(const Field& density) {
  const GridSpec& g = density.spec();
  Point center{0.0, 0.0, 0.0};
  const double scale = std::numbers::pi / g.halfwidth;
  for (int a = 0; a < g.dimension; ++a) {
    double c = 0.0, s = 0.0;
    for (std::size_t i = 0; i < density.size(); ++i) {
      const double x = g.node(i)[a];
      c += density[i] * std::cos(scale * x);
      s += density[i] * std::sin(scale * x);
    }
    center[a] = (c == 0.0 && s == 0.0) ? 0.0 : std::atan2(s, c) / scale;
  }
  return center;
}

inline Field total_density(const TriField& u) {
  Field rho(u.spec());
  for (int i = 0; i < 3; ++i)
    for (std::size_t n = 0; n < rho.size(); ++n) rho[n] += u[i][n] * u[i][n];
  return rho;
}

/// Translates u (sub-cell, spectrally) so the density center is the origin.
inline TriField recenter_spectral(const TriField& u) {
  const Point c = periodic_centroid(total_density(u));
  const Point shift{-c[0], -c[1], -c[2]};
  return TriField(spectral_shift(u[0], shift), spectral_shift(u[1], shift), spectral_shift(u[2], shift));
}

/// Moves the density center to the nearest grid node at the origin.
inline TriField recenter_on_grid(const TriField& u) {
  const GridSpec& g = u.spec();
  const Point c = periodic_centroid(total_density(u));
  std::array<int, 3> shift{0, 0, 0};
  for (int a = 0; a < g.dimension; ++a) shift[a] = -static_cast<int>(std::lround(c[a] / g.spacing()));
  if (shift == std::array<int, 3>{0, 0, 0}) return u;
  return TriField(roll(u[0], shift), roll(u[1], shift), roll(u[2], shift));
}

inline double reflection_error(const TriField& u) {
  double err = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double norm = l2_norm(u[i]);
    if (norm == 0.0) continue;
    err = std::max(err, l2_norm(u[i] - reflect(u[i])) / norm);
  }
  return err;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Peak amplitude and width of the scalar soliton for a bulk frequency.
inline double soliton_amplitude(double omega, double p) { return std::pow(omega * (p + 1.0) / 2.0, 1.0 / (p - 1.0)); }

struct GaussianShape {
  double amplitude = 1.0;
  double width = 1.0;
  Point center{0.0, 0.0, 0.0};
};

inline Field gaussian(const GridSpec& g, const GaussianShape& s) {
  return sample_periodic(g, [&](const Point& x) {
    double r2 = 0.0;
    for (int a = 0; a < g.dimension; ++a) r2 += (x[a] - s.center[a]) * (x[a] - s.center[a]);
    return s.amplitude * std::exp(-0.5 * r2 / (s.width * s.width));
  });
}

/// Restart k: 0 is the configured ansatz, 1..7 walk the standard set
/// (three scalar embeddings, + + +, - + +, + - +, + + -), later ones are
/// random sign-patterned triples.  Widths and centers get a small
/// seed-dependent jitter so that symmetric saddles are not preserved
/// exactly.
inline std::string restart_name(int k, const SolveConfig& config) {
  if (k == 0) return config.initial_ansatz.name();
  if (k <= 3) return Ansatz::scalar_embedding(k).name();
  if (k == 4) return Ansatz::gaussian_triple().name();
  if (k < 8) return Ansatz::signed_gaussian_triple({k == 5 ? -1 : 1, k == 6 ? -1 : 1, k == 7 ? -1 : 1}).name();
  return "random_triple";
}

inline TriField build_ansatz(int k, const SolveConfig& config, const SystemParams& params) {
  const GridSpec& g = params.grid();
  const double p = params.exponent();
  std::mt19937_64 rng(splitmix64(config.seed ^ splitmix64(static_cast<std::uint64_t>(k) + 1)));
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Ansatz a = config.initial_ansatz;
  if (k > 0 && k < 8) {
    static constexpr std::array<std::array<int, 3>, 4> kPatterns{{{1, 1, 1}, {-1, 1, 1}, {1, -1, 1}, {1, 1, -1}}};
    a = k <= 3 ? Ansatz::scalar_embedding(k) : Ansatz::signed_gaussian_triple(kPatterns[k - 4]);
  }
  if (a.kind == AnsatzKind::File) {
    detail::require(a.state.has_value(), "file ansatz has no state");
    params.check_grid(*a.state);
    return *a.state;
  }

  const bool random_triple = k >= 8;
  const double jitter = random_triple ? 0.5 : 0.05;
  std::array<Field, 3> parts{Field(g), Field(g), Field(g)};
  for (int i = 0; i < 3; ++i) {
    const double omega = params.bulk_potential(i);
    GaussianShape s;
    s.amplitude = soliton_amplitude(omega, p) * (random_triple ? 0.5 + unit(rng) : 1.0);
    s.width = 1.2 / std::sqrt(omega) * (1.0 + jitter * (2.0 * unit(rng) - 1.0));
    if (random_triple)
      for (int ax = 0; ax < g.dimension; ++ax) s.center[ax] = jitter * s.width * (2.0 * unit(rng) - 1.0);
    int sign = 1;
    switch (a.kind) {
      case AnsatzKind::ScalarEmbedding:
        sign = (i + 1 == a.component) ? 1 : 0;
        break;
      case AnsatzKind::SignedGaussianTriple:
        sign = a.signs[i] < 0 ? -1 : 1;
        break;
      default:
        break;
    }
    if (random_triple) sign = unit(rng) < 0.5 ? -1 : 1;
    if (sign != 0) parts[i] = sign * gaussian(g, s);
  }
  TriField u(std::move(parts[0]), std::move(parts[1]), std::move(parts[2]));
  if (params.coupling() < 0.0) u[0] *= -1.0;
  return u;
}

/// (-Lap + kappa_i)^{-1} r_i with kappa_i the bulk potential.
inline TriField precondition(const TriField& r, const SystemParams& params) {
  TriField d(r.spec());
  for (int i = 0; i < 3; ++i) {
    const double kappa = params.bulk_potential(i);
    d[i] = apply_fourier_multiplier(r[i], [kappa](double k2) { return 1.0 / (k2 + kappa); });
  }
  return d;
}

struct DescentOutcome {
  TriField state;
  double energy = 0.0;
  double residual_rel = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;
};

inline double relative_residual(const TriField& u, const SystemParams& params, TriField* residual_out = nullptr) {
  TriField r = euler_lagrange_residual(u, params);
  const double rel = l2_norm(r) / l2_norm(u);
  if (residual_out) *residual_out = std::move(r);
  return rel;
}

/// One restart.  Throws CollapsedToZero if the iterate degenerates.
inline DescentOutcome descend(TriField start, const SystemParams& params, const SolveConfig& config) {
  const bool recenter = !params.has_sampled_potentials() && config.recenter_interval > 0;
  const double initial_peak = std::max({max_abs(start[0]), max_abs(start[1]), max_abs(start[2])});
  if (!(initial_peak > 0.0)) throw CollapsedToZero("ansatz is identically zero");

  NehariProjection proj{start, 1.0};
  try {
    proj = project_to_nehari(start, params);
  } catch (const Error& e) {
    throw CollapsedToZero(std::string("cannot project ansatz onto the Nehari manifold: ") + e.what());
  }
  TriField u = std::move(proj.state);
  if (recenter) u = recenter_spectral(u);
  double e = energy(u, params);

  DescentOutcome out{u, e, 0.0, 0, false, {e}};
  double step = config.step_size;
  constexpr double kArmijo = 1e-4;
  constexpr double kRoundoff = 1e-12;
  constexpr double kSlack = 1e-13;

  TriField r(u.spec());
  // Polak-Ribiere (PR+) conjugate directions in the preconditioned metric;
  // reset to the preconditioned gradient whenever they stop descending.
  std::optional<TriField> prev_g;
  TriField dir(u.spec());
  double prev_rg = 0.0;
  int it = 0;
  for (;; ++it) {
    const double rel = relative_residual(u, params, &r);
    out.residual_rel = rel;
    if (rel <= config.residual_tol) {
      out.converged = true;
      break;
    }
    if (it >= config.max_iterations) break;

    const TriField g = precondition(r, params);
    const double rg = pairing(r, g);
    double beta = 0.0;
    if (prev_g && prev_rg > 0.0) beta = std::max(0.0, (rg - pairing(r, *prev_g)) / prev_rg);
    dir *= beta;
    dir.add_scaled(1.0, g);
    double slope = pairing(r, dir);
    if (!(slope > 0.0)) {
      dir = g;
      slope = rg;
    }
    const TriField& d = dir;

    bool accepted = false;
    double e_new = e;
    double t_new = 1.0;
    TriField w = u;
    while (step >= 1e-14) {
      w = u;
      w.add_scaled(-step, d);
      try {
        const auto coeff = fiber_coefficients(w, params);
        t_new = fiber_maximizer(coeff);
        e_new = fiber_value(t_new, coeff);
      } catch (const Error&) {
        step *= 0.5;
        continue;
      }
      const double scale = 1.0 + std::abs(e);
      const bool armijo = e_new <= e - kArmijo * step * slope;
      const bool roundoff = step * slope <= kRoundoff * scale && e_new <= e + kSlack * scale;
      if (armijo || roundoff) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (!prev_g) break;  // stalled: no admissible step along the gradient
      prev_g.reset();
      dir *= 0.0;
      step = config.step_size;
      continue;
    }

    w *= t_new;
    dir *= t_new;
    u = std::move(w);
    e = e_new;
    prev_g = g;
    prev_rg = rg;
    step = std::min(2.0 * step, config.step_size);

    if (recenter && (it + 1) % config.recenter_interval == 0) {
      // Kept only if the projected energy does not rise, so the recorded
      // sequence stays monotone.
      try {
        auto moved = project_to_nehari(recenter_spectral(u), params);
        const double e_moved = energy(moved.state, params);
        if (e_moved <= e) {
          u = std::move(moved.state);
          e = e_moved;
          prev_g.reset();
          dir *= 0.0;
        }
      } catch (const Error&) {
      }
    }
    out.history.push_back(e);

    const double peak = std::max({max_abs(u[0]), max_abs(u[1]), max_abs(u[2])});
    if (peak < 1e-8 * initial_peak) throw CollapsedToZero("iterate vanished");
  }
  out.iterations = it;
  out.energy = energy(u, params);
  out.state = std::move(u);
  return out;
}

}  // namespace detail

/// Translates u (sub-cell, spectrally) so that the center of sum_i u_i^2 sits
/// at the origin, then measures max_i ||u_i(x) - u_i(-x)|| / ||u_i||.
inline std::pair<TriField, double> recenter_and_symmetry_error(const TriField& u) {
  if (u.is_zero()) throw InvalidArgument("cannot recenter the zero field");
  const Point c = detail::periodic_centroid(detail::total_density(u));
  const Point shift{-c[0], -c[1], -c[2]};
  TriField centered(spectral_shift(u[0], shift), spectral_shift(u[1], shift), spectral_shift(u[2], shift));
  const double err = detail::reflection_error(centered);
  return {std::move(centered), err};
}

/// Reflection asymmetry about the origin, without recentering.
inline double symmetry_error(const TriField& u) { return detail::reflection_error(u); }

/// Multi-start minimization of the energy over the Nehari manifold.
inline GroundStateResult minimize_on_nehari(const SystemParams& params, const SolveConfig& config) {
  config.validate();
  const auto n = static_cast<std::size_t>(config.restarts);
  std::vector<std::optional<detail::DescentOutcome>> outcomes(n);
  std::vector<RestartSummary> summaries(n);

  parallel_for(n, config.threads, [&](std::size_t k) {
    TriField start = detail::build_ansatz(static_cast<int>(k), config, params);
    summaries[k].ansatz = detail::restart_name(static_cast<int>(k), config);
    // Vanishing guard: retry the same ansatz with a larger amplitude.
    for (int attempt = 0; attempt < 3; ++attempt) {
      try {
        outcomes[k] = detail::descend(start, params, config);
        break;
      } catch (const CollapsedToZero&) {
        start *= 4.0;
      }
    }
    auto& s = summaries[k];
    if (outcomes[k]) {
      s.energy = outcomes[k]->energy;
      s.residual_rel = outcomes[k]->residual_rel;
      s.iterations = outcomes[k]->iterations;
      s.converged = outcomes[k]->converged;
    } else {
      s.collapsed = true;
    }
  });

  std::optional<std::size_t> best;
  for (std::size_t k = 0; k < n; ++k) {
    if (!outcomes[k]) continue;
    if (!best) {
      best = k;
      continue;
    }
    const auto& cur = *outcomes[*best];
    const auto& cand = *outcomes[k];
    if (cand.energy < cur.energy - 1e-10 ||
        (std::abs(cand.energy - cur.energy) <= 1e-10 && cand.converged && !cur.converged)) {
      best = k;
    }
  }
  if (!best) throw CollapsedToZero("all restarts collapsed to zero; increase the ansatz scale");

  auto& win = *outcomes[*best];
  const auto k = component_integrals(win.state, params);
  const auto coeff = fiber_coefficients(k, params);

  TriField minimizer = win.state;
  double sym = 0.0;
  if (params.has_sampled_potentials()) {
    sym = symmetry_error(minimizer);
  } else {
    minimizer = detail::recenter_on_grid(minimizer);
    sym = recenter_and_symmetry_error(minimizer).second;
  }

  GroundStateResult result{std::move(minimizer)};
  result.energy_value = win.energy;
  result.residual_rel = win.residual_rel;
  result.classification = classify(win.state);
  result.component_mass_fractions = mass_fractions(win.state);
  result.symmetry_error = sym;
  result.boundary_magnitude =
      std::max({boundary_max_abs(win.state[0]), boundary_max_abs(win.state[1]), boundary_max_abs(win.state[2])});
  result.nehari_relative = std::abs(nehari_value(k, params)) / coeff.a;
  result.iterations_used = win.iterations;
  result.restart_index_of_best = static_cast<int>(*best);
  result.converged = win.converged;
  result.energy_history = std::move(win.history);
  result.restarts = std::move(summaries);
  return result;
}

struct ScalarGroundState {
  Field profile;
  double energy = 0.0;
  double residual_rel = 0.0;
  bool converged = true;
};

/// Positive least-energy solution of -Lap u + omega u = |u|^(p-1) u.
/// N = 1 uses the closed form
///   u(x) = (omega (p+1)/2)^(1/(p-1)) sech^(2/(p-1))((p-1)/2 sqrt(omega) x),
/// sampled with its periodic images; N = 2, 3 minimize a single component.
inline ScalarGroundState scalar_ground_state(double omega, double p, const GridSpec& grid,
                                             const SolveConfig& config = {}) {
  const auto params = SystemParams::constant(grid, p, 0.0, {omega, omega, omega});
  if (grid.dimension == 1) {
    const double amp = detail::soliton_amplitude(omega, p);
    const double q = 2.0 / (p - 1.0);
    const double k = 0.5 * (p - 1.0) * std::sqrt(omega);
    Field u = sample_periodic(grid, [&](const Point& x) { return amp * std::pow(1.0 / std::cosh(k * x[0]), q); });
    const double e = component_energy(0, u, params);
    TriField tri(u, Field(grid), Field(grid));
    const double rel = detail::relative_residual(tri, params);
    return {std::move(u), e, rel, true};
  }
  SolveConfig local = config;
  local.restarts = 1;
  local.initial_ansatz = Ansatz::scalar_embedding(1);
  auto res = minimize_on_nehari(params, local);
  Field u = res.minimizer[0];
  if (integrate(u) < 0.0) u *= -1.0;
  return {std::move(u), res.energy_value, res.residual_rel, res.converged};
}

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Solve report: one `key=value` per line.
inline std::string solve_report(const GroundStateResult& r) {
  std::ostringstream out;
  out << "energy=" << format_number(r.energy_value) << '\n'
      << "classification=" << r.classification.to_string() << '\n'
      << "residual_rel=" << format_number(r.residual_rel) << '\n'
      << "symmetry_error=" << format_number(r.symmetry_error) << '\n'
      << "boundary_magnitude=" << format_number(r.boundary_magnitude) << '\n'
      << "converged=" << (r.converged ? "true" : "false") << '\n'
      << "nehari_relative=" << format_number(r.nehari_relative) << '\n'
      << "mass_fractions=" << format_number(r.component_mass_fractions[0]) << ','
      << format_number(r.component_mass_fractions[1]) << ',' << format_number(r.component_mass_fractions[2]) << '\n'
      << "iterations_used=" << r.iterations_used << '\n'
      << "restart_index_of_best=" << r.restart_index_of_best << '\n';
  for (std::size_t k = 0; k < r.restarts.size(); ++k) {
    const auto& s = r.restarts[k];
    out << "restart." << k << "=" << s.ansatz << " energy=" << format_number(s.energy)
        << " residual_rel=" << format_number(s.residual_rel) << " iterations=" << s.iterations
        << " converged=" << (s.converged ? "true" : "false") << (s.collapsed ? " collapsed" : "") << '\n';
  }
  return out.str();
}

}  // namespace triwave
