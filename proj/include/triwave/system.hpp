#pragma once

// Variational structure of the three-wave system
//
//   -Lap u1 + V1 u1 - |u1|^(p-1) u1 = gamma u2 u3   (and cyclic),
//
// where V_i is either a positive constant omega_i or a sampled potential.
// Energy:
//
//   I(u) = sum_i [ 1/2 int |grad u_i|^2 + V_i u_i^2 - 1/(p+1) int |u_i|^(p+1) ]
//          - gamma int u1 u2 u3.
//
// The power term uses |u_i|^(p+1) so that I is C^1 and even under each sign
// flip pair, consistent with the |u|^(p-1) u nonlinearity.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <variant>

#include "triwave/error.hpp"
#include "triwave/fiber.hpp"
#include "triwave/grid.hpp"

namespace triwave {

/// u = (u1, u2, u3) on one shared grid.
class TriField {
 public:
  explicit TriField(const GridSpec& g) : components_{Field(g), Field(g), Field(g)} {}

  TriField(Field u1, Field u2, Field u3) : components_{std::move(u1), std::move(u2), std::move(u3)} {
    components_[0].check_same_grid(components_[1]);
    components_[0].check_same_grid(components_[2]);
  }

  const GridSpec& spec() const { return components_[0].spec(); }
  const Field& operator[](int i) const { return components_[i]; }
  Field& operator[](int i) { return components_[i]; }

  TriField& operator*=(double s) {
    for (auto& c : components_) c *= s;
    return *this;
  }
  TriField& add_scaled(double s, const TriField& other) {
    for (int i = 0; i < 3; ++i) components_[i].add_scaled(s, other.components_[i]);
    return *this;
  }
  friend TriField operator*(double s, TriField u) { return u *= s; }
  friend TriField operator+(TriField a, const TriField& b) { return a.add_scaled(1.0, b); }
  friend TriField operator-(TriField a, const TriField& b) { return a.add_scaled(-1.0, b); }

  bool is_zero() const {
    return components_[0].is_zero() && components_[1].is_zero() && components_[2].is_zero();
  }

  void check_same_grid(const TriField& other) const { components_[0].check_same_grid(other.components_[0]); }

 private:
  std::array<Field, 3> components_;
};

/// Sampled potentials V_i with their limits at infinity.
struct PotentialTriple {
  std::array<Field, 3> values;
  std::array<double, 3> limits{1.0, 1.0, 1.0};

  /// Checks V_i >= C_i > 0 at every node and V_i <= V_i,inf.
  void validate() const {
    values[0].check_same_grid(values[1]);
    values[0].check_same_grid(values[2]);
    for (int i = 0; i < 3; ++i) {
      detail::require(std::isfinite(limits[i]) && limits[i] > 0.0,
                      "potential limit V" + std::to_string(i + 1) + ",inf must be positive");
      double lo = values[i][0];
      double hi = values[i][0];
      for (double v : values[i].values()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      detail::require(lo > 0.0, "potential V" + std::to_string(i + 1) + " must be bounded below by a positive constant");
      detail::require(hi <= limits[i] * (1.0 + 1e-12),
                      "potential V" + std::to_string(i + 1) + " exceeds its limit at infinity");
    }
  }
};

class SystemParams {
 public:
  /// Constant frequencies omega_i > 0.
  static SystemParams constant(const GridSpec& grid, double p, double gamma, std::array<double, 3> omega) {
    SystemParams s(grid, p, gamma);
    for (int i = 0; i < 3; ++i) {
      detail::require(std::isfinite(omega[i]) && omega[i] > 0.0, "omega_" + std::to_string(i + 1) + " must be positive");
    }
    s.potential_ = omega;
    return s;
  }

  /// Sampled potentials on the same grid.
  static SystemParams sampled(double p, double gamma, PotentialTriple potentials) {
    SystemParams s(potentials.values[0].spec(), p, gamma);
    potentials.validate();
    s.potential_ = std::move(potentials);
    return s;
  }

  const GridSpec& grid() const { return grid_; }
  double exponent() const { return p_; }
  double coupling() const { return gamma_; }
  bool has_sampled_potentials() const { return std::holds_alternative<PotentialTriple>(potential_); }

  const std::array<double, 3>& omega() const {
    if (has_sampled_potentials()) throw InvalidArgument("system has sampled potentials, not constant omega");
    return std::get<std::array<double, 3>>(potential_);
  }
  const PotentialTriple& potentials() const {
    if (!has_sampled_potentials()) throw InvalidArgument("system has constant omega, not sampled potentials");
    return std::get<PotentialTriple>(potential_);
  }

  /// omega_i, or V_i,inf for sampled potentials.
  double bulk_potential(int i) const {
    return has_sampled_potentials() ? potentials().limits[i] : omega()[i];
  }

  SystemParams with_coupling(double gamma) const {
    SystemParams s = *this;
    detail::require(std::isfinite(gamma), "coupling gamma must be finite");
    s.gamma_ = gamma;
    return s;
  }

  /// int V_i u_i^2
  double potential_energy(int i, const Field& u) const {
    if (has_sampled_potentials()) {
      const Field& v = potentials().values[i];
      v.check_same_grid(u);
      const auto a = u.values();
      const auto w = v.values();
      return u.spec().cell_volume() *
             detail::pairwise_sum(0, a.size(), [&](std::size_t j) { return w[j] * a[j] * a[j]; });
    }
    return omega()[i] * inner(u, u);
  }

  /// V_i(x_j) at a node.
  double potential_at(int i, std::size_t node) const {
    return has_sampled_potentials() ? potentials().values[i][node] : omega()[i];
  }

  void check_grid(const TriField& u) const {
    if (!(u.spec() == grid_)) {
      throw GridMismatch("state grid (" + describe(u.spec()) + ") differs from system grid (" + describe(grid_) + ")");
    }
  }

 private:
  SystemParams(const GridSpec& grid, double p, double gamma) : grid_(grid), p_(p), gamma_(gamma) {
    grid_.validate();
    detail::require(std::isfinite(p) && p > 2.0, "p must exceed 2");
    detail::require(grid_.dimension != 3 || p < 5.0, "N=3 requires p<5");
    detail::require(std::isfinite(gamma), "coupling gamma must be finite");
  }

  GridSpec grid_;
  double p_;
  double gamma_;
  std::variant<std::array<double, 3>, PotentialTriple> potential_;
};

namespace detail {

inline double abs_power(double x, double e) {
  const double ax = std::abs(x);
  if (e == 4.0) {
    const double x2 = ax * ax;
    return x2 * x2;
  }
  return std::pow(ax, e);
}

/// |x|^(p-1) x
inline double signed_power(double x, double p) {
  if (p == 3.0) return x * x * x;
  return std::copysign(std::pow(std::abs(x), p), x);
}

}  // namespace detail

/// Per-component integrals shared by the energy, the Nehari function and
/// the fiber coefficients.
struct ComponentIntegrals {
  std::array<double, 3> kinetic{};    // int |grad u_i|^2
  std::array<double, 3> potential{};  // int V_i u_i^2
  std::array<double, 3> power{};      // int |u_i|^(p+1)
  double cubic = 0.0;                 // int u1 u2 u3
};

inline double power_integral(const Field& u, double p) {
  const auto v = u.values();
  const double e = p + 1.0;
  return u.spec().cell_volume() *
         detail::pairwise_sum(0, v.size(), [&](std::size_t j) { return detail::abs_power(v[j], e); });
}

inline ComponentIntegrals component_integrals(const TriField& u, const SystemParams& params) {
  params.check_grid(u);
  ComponentIntegrals out;
  for (int i = 0; i < 3; ++i) {
    out.kinetic[i] = gradient_norm_sq(u[i]);
    out.potential[i] = params.potential_energy(i, u[i]);
    out.power[i] = power_integral(u[i], params.exponent());
  }
  out.cubic = triple_product(u[0], u[1], u[2]);
  return out;
}

inline double energy(const ComponentIntegrals& k, const SystemParams& params) {
  const double p = params.exponent();
  double e = 0.0;
  for (int i = 0; i < 3; ++i) e += 0.5 * (k.kinetic[i] + k.potential[i]) - k.power[i] / (p + 1.0);
  return e - params.coupling() * k.cubic;
}

/// I(u)
inline double energy(const TriField& u, const SystemParams& params) {
  return energy(component_integrals(u, params), params);
}

/// I_i(u_i), the single-equation energy of one component.
inline double component_energy(int i, const Field& ui, const SystemParams& params) {
  const double p = params.exponent();
  return 0.5 * (gradient_norm_sq(ui) + params.potential_energy(i, ui)) - power_integral(ui, p) / (p + 1.0);
}

/// r_i = -Lap u_i + V_i u_i - |u_i|^(p-1) u_i - gamma u_j u_k.
inline TriField euler_lagrange_residual(const TriField& u, const SystemParams& params) {
  params.check_grid(u);
  const double p = params.exponent();
  const double gamma = params.coupling();
  TriField r(u.spec());
  for (int i = 0; i < 3; ++i) {
    const Field lap = laplacian(u[i]);
    const Field& uj = u[(i + 1) % 3];
    const Field& uk = u[(i + 2) % 3];
    Field& ri = r[i];
    for (std::size_t n = 0; n < ri.size(); ++n) {
      ri[n] = -lap[n] + params.potential_at(i, n) * u[i][n] - detail::signed_power(u[i][n], p) -
              gamma * uj[n] * uk[n];
    }
  }
  return r;
}

/// Sum_i int r_i v_i, i.e. I'(u)[v] given r = residual(u).
inline double pairing(const TriField& r, const TriField& v) {
  return inner(r[0], v[0]) + inner(r[1], v[1]) + inner(r[2], v[2]);
}

inline double l2_norm(const TriField& u) {
  return std::sqrt(inner(u[0], u[0]) + inner(u[1], u[1]) + inner(u[2], u[2]));
}

inline double nehari_value(const ComponentIntegrals& k, const SystemParams& params) {
  double g = 0.0;
  for (int i = 0; i < 3; ++i) g += k.kinetic[i] + k.potential[i] - k.power[i];
  return g - 3.0 * params.coupling() * k.cubic;
}

/// G(u) = I'(u)[u]
inline double nehari_value(const TriField& u, const SystemParams& params) {
  return nehari_value(component_integrals(u, params), params);
}

inline FiberCoefficients fiber_coefficients(const ComponentIntegrals& k, const SystemParams& params) {
  FiberCoefficients f;
  for (int i = 0; i < 3; ++i) {
    f.a += k.kinetic[i] + k.potential[i];
    f.b += k.power[i];
  }
  f.c = params.coupling() * k.cubic;
  f.p = params.exponent();
  return f;
}

/// (A, B, C) of the fiber map t -> I(t u).
inline FiberCoefficients fiber_coefficients(const TriField& u, const SystemParams& params) {
  if (u.is_zero()) throw InvalidArgument("fiber coefficients are undefined for u = 0");
  const auto k = fiber_coefficients(component_integrals(u, params), params);
  if (!(k.a > 0.0 && k.b > 0.0)) throw InvalidArgument("fiber coefficients degenerate (state is numerically zero)");
  return k;
}

}  // namespace triwave
