#pragma once

// Radial potential families for the non-constant case and the checks that
// go with them.

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "triwave/error.hpp"
#include "triwave/grid.hpp"
#include "triwave/solver.hpp"
#include "triwave/system.hpp"

namespace triwave {

struct ConstantPotential {
  double value = 1.0;
};

/// V(x) = v_inf - depth * exp(-|x|^2 / width^2)
struct GaussianWell {
  double v_inf = 1.0;
  double depth = 0.5;
  double width = 1.0;
};

/// Piecewise-linear V(r); constant beyond the last radius.
struct RadialTable {
  std::vector<double> radii;
  std::vector<double> values;
};

class PotentialSpec {
 public:
  static PotentialSpec constant(double value) { return PotentialSpec(ConstantPotential{value}); }
  static PotentialSpec gaussian_well(double v_inf, double depth, double width) {
    return PotentialSpec(GaussianWell{v_inf, depth, width});
  }
  static PotentialSpec radial_table(std::vector<double> radii, std::vector<double> values) {
    return PotentialSpec(RadialTable{std::move(radii), std::move(values)});
  }

  /// Two-column text file: radius value.  '#' starts a comment.
  static PotentialSpec load_radial_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open radial table " + path.string());
    std::vector<double> r, v;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      std::istringstream row(line);
      double a = 0.0, b = 0.0;
      if (!(row >> a)) continue;
      if (!(row >> b)) throw InvalidArgument(path.string() + ":" + std::to_string(lineno) + ": expected two columns");
      r.push_back(a);
      v.push_back(b);
    }
    try {
      return radial_table(std::move(r), std::move(v));
    } catch (const InvalidArgument& e) {
      throw InvalidArgument(path.string() + ": " + e.what());
    }
  }

  /// V_inf
  double limit() const {
    return std::visit(
        [](const auto& d) -> double {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, ConstantPotential>) return d.value;
          if constexpr (std::is_same_v<T, GaussianWell>) return d.v_inf;
          if constexpr (std::is_same_v<T, RadialTable>) return d.values.back();
        },
        descriptor_);
  }

  double evaluate(double r) const {
    return std::visit(
        [r](const auto& d) -> double {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, ConstantPotential>) return d.value;
          if constexpr (std::is_same_v<T, GaussianWell>) return d.v_inf - d.depth * std::exp(-(r * r) / (d.width * d.width));
          if constexpr (std::is_same_v<T, RadialTable>) {
            if (r <= d.radii.front()) return d.values.front();
            if (r >= d.radii.back()) return d.values.back();
            const auto hi = std::upper_bound(d.radii.begin(), d.radii.end(), r) - d.radii.begin();
            const auto lo = hi - 1;
            const double w = (r - d.radii[lo]) / (d.radii[hi] - d.radii[lo]);
            return (1.0 - w) * d.values[lo] + w * d.values[hi];
          }
        },
        descriptor_);
  }

  Field sample(const GridSpec& g) const {
    return triwave::sample(g, [&](const Point& x) {
      double r2 = 0.0;
      for (int a = 0; a < g.dimension; ++a) r2 += x[a] * x[a];
      return evaluate(std::sqrt(r2));
    });
  }

  bool is_constant() const { return std::holds_alternative<ConstantPotential>(descriptor_); }

  std::string describe() const {
    return std::visit(
        [](const auto& d) -> std::string {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, ConstantPotential>) return "constant(" + format_number(d.value) + ")";
          if constexpr (std::is_same_v<T, GaussianWell>)
            return "gaussian_well(" + format_number(d.v_inf) + ", " + format_number(d.depth) + ", " +
                   format_number(d.width) + ")";
          if constexpr (std::is_same_v<T, RadialTable>)
            return "radial_table(" + std::to_string(d.radii.size()) + " samples)";
        },
        descriptor_);
  }

 private:
  explicit PotentialSpec(std::variant<ConstantPotential, GaussianWell, RadialTable> d) : descriptor_(std::move(d)) {
    validate();
  }

  void validate() const {
    std::visit(
        [](const auto& d) {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, ConstantPotential>) {
            detail::require(std::isfinite(d.value) && d.value > 0.0, "constant potential must be positive");
          }
          if constexpr (std::is_same_v<T, GaussianWell>) {
            detail::require(std::isfinite(d.v_inf) && std::isfinite(d.depth) && std::isfinite(d.width),
                            "gaussian_well parameters must be finite");
            detail::require(d.depth >= 0.0, "gaussian_well depth must be nonnegative");
            detail::require(d.width > 0.0, "gaussian_well width must be positive");
            detail::require(d.v_inf - d.depth > 0.0, "gaussian_well needs v_inf - depth > 0");
          }
          if constexpr (std::is_same_v<T, RadialTable>) {
            detail::require(d.radii.size() >= 2 && d.radii.size() == d.values.size(),
                            "radial_table needs at least two (radius, value) rows");
            detail::require(d.radii.front() >= 0.0, "radial_table radii must be nonnegative");
            for (std::size_t i = 1; i < d.radii.size(); ++i)
              detail::require(d.radii[i] > d.radii[i - 1], "radial_table radii must be strictly increasing");
            for (double v : d.values) detail::require(std::isfinite(v) && v > 0.0, "radial_table values must be positive");
          }
        },
        descriptor_);
  }

  std::variant<ConstantPotential, GaussianWell, RadialTable> descriptor_;
};

using PotentialSpecs = std::array<PotentialSpec, 3>;

inline PotentialTriple sample_potentials(const PotentialSpecs& specs, const GridSpec& g) {
  return {{specs[0].sample(g), specs[1].sample(g), specs[2].sample(g)},
          {specs[0].limit(), specs[1].limit(), specs[2].limit()}};
}

enum class HypothesisMode { V2, V2prime };

struct HypothesisReport {
  std::array<bool, 3> below_limit{};      // V_i <= V_i,inf at every node
  std::array<bool, 3> strict_somewhere{};  // strict on >= 1% of nodes by >= 1e-10
  std::array<double, 3> strict_fraction{};
  std::array<double, 3> lower_bound{};     // min_x V_i(x)
  bool v3 = false;
  bool v2 = false;
  bool v2prime = false;

  bool holds(HypothesisMode mode) const { return v3 && (mode == HypothesisMode::V2 ? v2 : v2prime); }
};

/// Grid-resolution check of V_i <= V_i,inf (with strictness on a set of
/// positive measure for all i, or for at least one i) and V_i >= C_i > 0.
inline HypothesisReport check_hypotheses(const PotentialSpecs& specs, const GridSpec& g) {
  constexpr double kStrictMargin = 1e-10;
  constexpr double kStrictFraction = 0.01;
  HypothesisReport r;
  bool all_below = true, all_strict = true, any_strict = false;
  r.v3 = true;
  for (int i = 0; i < 3; ++i) {
    const Field v = specs[i].sample(g);
    const double lim = specs[i].limit();
    std::size_t strict = 0;
    double lo = v[0];
    bool below = true;
    for (double x : v.values()) {
      lo = std::min(lo, x);
      below = below && x <= lim;
      strict += x < lim - kStrictMargin;
    }
    r.below_limit[i] = below;
    r.strict_fraction[i] = static_cast<double>(strict) / static_cast<double>(v.size());
    r.strict_somewhere[i] = r.strict_fraction[i] >= kStrictFraction;
    r.lower_bound[i] = lo;
    r.v3 = r.v3 && lo > 0.0;
    all_below = all_below && below;
    all_strict = all_strict && r.strict_somewhere[i];
    any_strict = any_strict || r.strict_somewhere[i];
  }
  r.v2 = all_below && all_strict;
  r.v2prime = all_below && any_strict;
  return r;
}

struct ComparisonReport {
  double c_v = 0.0;
  double c_inf = 0.0;
  double margin = 0.0;  // c_inf - c_v
  double tolerance = 0.0;
  bool converged_v = false;
  bool converged_inf = false;
  bool hypotheses_hold = false;
  HypothesisReport hypotheses;
  std::optional<GroundStateResult> potential_solution;

  /// margin > 2 * residual_tol with both solves converged.
  bool positive() const { return converged_v && converged_inf && margin > tolerance; }
  /// |margin| <= 2 * residual_tol: the data cannot separate c_V from c_inf.
  bool inconclusive() const { return std::abs(margin) <= tolerance; }
};

/// Ground-state levels with the sampled potentials (c_V) and with the
/// constants V_i,inf (c_inf).  In V2prime mode a known gamma0 for the limit
/// problem can be passed; |gamma| must then exceed it.
inline ComparisonReport compare_cv_cinfty(const PotentialSpecs& specs, const GridSpec& g, double p, double gamma,
                                          const SolveConfig& config, HypothesisMode mode = HypothesisMode::V2,
                                          std::optional<double> gamma0 = std::nullopt) {
  if (mode == HypothesisMode::V2prime && gamma0) {
    detail::require(std::abs(gamma) > *gamma0, "V2prime comparison needs |gamma| above the vector threshold gamma0");
  }
  ComparisonReport r;
  r.hypotheses = check_hypotheses(specs, g);
  r.hypotheses_hold = r.hypotheses.holds(mode);
  r.tolerance = 2.0 * config.residual_tol;

  const auto limits = std::array<double, 3>{specs[0].limit(), specs[1].limit(), specs[2].limit()};
  const auto at_infinity = minimize_on_nehari(SystemParams::constant(g, p, gamma, limits), config);
  auto with_potential = minimize_on_nehari(SystemParams::sampled(p, gamma, sample_potentials(specs, g)), config);

  r.c_inf = at_infinity.energy_value;
  r.c_v = with_potential.energy_value;
  r.margin = r.c_inf - r.c_v;
  r.converged_inf = at_infinity.converged;
  r.converged_v = with_potential.converged;
  r.potential_solution = std::move(with_potential);
  return r;
}

}  // namespace triwave
