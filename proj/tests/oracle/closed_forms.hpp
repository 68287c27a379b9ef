#pragma once

// Reference values computed without the library: composite Simpson
// quadrature of closed-form profiles and textbook root formulas.

#include <cmath>
#include <functional>

namespace oracle {

/// Composite Simpson rule on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 200000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

inline double sech(double x) { return 1.0 / std::cosh(x); }

/// Energy of the 1D cubic soliton u = sqrt(2 omega) sech(sqrt(omega) x):
/// 1/2 int u'^2 + omega/2 int u^2 - 1/4 int u^4, by quadrature.
inline double soliton_energy_1d(double omega) {
  const double a = std::sqrt(2.0 * omega), k = std::sqrt(omega);
  const auto u = [&](double x) { return a * sech(k * x); };
  const auto du = [&](double x) { return -a * k * sech(k * x) * std::tanh(k * x); };
  const double lim = 60.0 / k;
  return simpson([&](double x) { return 0.5 * du(x) * du(x) + 0.5 * omega * u(x) * u(x) - 0.25 * std::pow(u(x), 4); },
                 -lim, lim);
}

/// Positive root of a t^2 + b t - c = 0 (a, c > 0), cancellation-free.
inline double positive_quadratic_root(double a, double b, double c) {
  const double disc = std::sqrt(b * b + 4.0 * a * c);
  return b >= 0.0 ? 2.0 * c / (b + disc) : (disc - b) / (2.0 * a);
}

/// Fiber maximizer for p = 3: A = B t^2 + 3 C t.
inline double fiber_root_p3(double A, double B, double C) { return positive_quadratic_root(B, 3.0 * C, A); }

/// Integrals of sqrt(2) sech(x) over R: kinetic 4/3, mass 4, quartic 16/3,
/// cubic 2 sqrt(2) * pi / 2, each by quadrature.
struct SolitonIntegrals {
  double kinetic, mass, quartic, cubic;
};

inline SolitonIntegrals soliton_integrals() {
  const double a = std::sqrt(2.0);
  const auto u = [&](double x) { return a * sech(x); };
  const auto du = [&](double x) { return -a * sech(x) * std::tanh(x); };
  return {simpson([&](double x) { return du(x) * du(x); }, -60, 60),
          simpson([&](double x) { return u(x) * u(x); }, -60, 60),
          simpson([&](double x) { return std::pow(u(x), 4); }, -60, 60),
          simpson([&](double x) { return std::pow(u(x), 3); }, -60, 60)};
}

/// t_gamma for the three-soliton test state at p = 3, omega = (1,1,1):
/// sum A = 3 (kinetic + mass), sum B = 3 quartic, C = gamma * cubic.
inline double t_gamma_p3(double gamma) {
  const auto s = soliton_integrals();
  const double A = 3.0 * (s.kinetic + s.mass);
  const double B = 3.0 * s.quartic;
  return fiber_root_p3(A, B, std::abs(gamma) * s.cubic);
}

}  // namespace oracle
