#pragma once

// Fiber-map algebra.  Along the ray t -> t*u the energy is
//
//   f(t) = (A/2) t^2 - (B/(p+1)) t^(p+1) - C t^3,
//
// with A, B > 0 and C of either sign.  f has a single positive critical
// point, which is its maximum on [0, inf): the root of
//
//   g(t) = f'(t)/t = A - B t^(p-1) - 3 C t.
//
// For C >= 0, g is strictly decreasing.  For C < 0 the first zero t0 of g
// satisfies 3|C| <= (p-1) B t0^(p-2); a second zero would need an interior
// critical point of g at some t2 > t0 with 3|C| = (p-1) B t2^(p-2), which is
// strictly larger.  So the root is unique in every case.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "triwave/error.hpp"

namespace triwave {

struct FiberCoefficients {
  double a = 0.0;  // sum_i int |grad u_i|^2 + V_i u_i^2
  double b = 0.0;  // sum_i int |u_i|^(p+1)
  double c = 0.0;  // gamma * int u1 u2 u3
  double p = 3.0;

  void validate() const {
    detail::require(std::isfinite(a) && a > 0.0, "fiber coefficient A must be positive");
    detail::require(std::isfinite(b) && b > 0.0, "fiber coefficient B must be positive");
    detail::require(std::isfinite(c), "fiber coefficient C must be finite");
    detail::require(std::isfinite(p) && p > 2.0, "exponent p must exceed 2");
  }
};

/// Largest ray scale fiber_maximizer will return.
inline constexpr double kMaxFiberScale = 1e300;

inline double fiber_value(double t, const FiberCoefficients& k) {
  detail::require(t >= 0.0, "fiber map is defined for t >= 0");
  return 0.5 * k.a * t * t - k.b / (k.p + 1.0) * std::pow(t, k.p + 1.0) - k.c * t * t * t;
}

/// f'(t)
inline double fiber_derivative(double t, const FiberCoefficients& k) {
  return k.a * t - k.b * std::pow(t, k.p) - 3.0 * k.c * t * t;
}

/// f''(t)
inline double fiber_second_derivative(double t, const FiberCoefficients& k) {
  return k.a - k.p * k.b * std::pow(t, k.p - 1.0) - 6.0 * k.c * t;
}

/// g(t) = A - B t^(p-1) - 3 C t
inline double fiber_balance(double t, const FiberCoefficients& k) {
  return k.a - k.b * std::pow(t, k.p - 1.0) - 3.0 * k.c * t;
}

namespace detail {

inline double log_add_exp(double x, double y) {
  const double hi = std::max(x, y);
  return hi + std::log1p(std::exp(-std::abs(x - y)));
}

/// Sign-equivalent form of g at t = e^s:
///   C > 0:  log A - log(B t^(p-1) + 3 C t)
///   C < 0:  log(A + 3|C| t) - log(B t^(p-1))
/// Finite for every finite s, so roots far outside double range still bracket.
inline double log_balance(double s, const FiberCoefficients& k) {
  const double power = std::log(k.b) + (k.p - 1.0) * s;
  if (k.c > 0.0) return std::log(k.a) - log_add_exp(power, std::log(3.0 * k.c) + s);
  if (k.c < 0.0) return log_add_exp(std::log(k.a), std::log(-3.0 * k.c) + s) - power;
  return std::log(k.a) - power;
}

/// Brent's method for a sign-changing bracket [lo, hi]; runs to full
/// double precision.
template <typename Fn>
double brent_root(const Fn& fn, double lo, double hi, double f_lo, double f_hi) {
  double a = lo, b = hi, fa = f_lo, fb = f_hi;
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  double c = a, fc = fa, d = b - a, e = d;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (int iter = 0; iter < 400; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol = 2.0 * eps * std::abs(b) + 1e-300;
    const double m = 0.5 * (c - b);
    if (std::abs(m) <= tol || fb == 0.0) return b;
    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      double s = fb / fa, p, q;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        const double r = fb / fc;
        q = fa / fc;
        p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) {
        q = -q;
      } else {
        p = -p;
      }
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = m;
      }
    } else {
      d = m;
      e = m;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol ? d : (m > 0.0 ? tol : -tol);
    fb = fn(b);
  }
  return b;
}

}  // namespace detail

/// log of the unique maximizer of f on (0, inf).
inline double fiber_log_maximizer(const FiberCoefficients& k) {
  k.validate();
  const double s0 = std::log(k.a / k.b) / (k.p - 1.0);
  if (k.c == 0.0) return s0;

  const auto h = [&k](double s) { return detail::log_balance(s, k); };
  // g(t) ~ A > 0 near 0 and -> -inf, so expanding geometrically from the
  // C = 0 root always brackets; the cap only guards against NaN inputs.
  constexpr double kMaxStep = 1e8;
  double lo = s0, hi = s0;
  double h_lo = h(lo), h_hi = h_lo;
  if (h_lo == 0.0) return s0;
  for (double step = 1.0; h_lo <= 0.0; step *= 2.0) {
    if (step > kMaxStep || !std::isfinite(h_lo)) throw IllConditioned("cannot bracket fiber root from below");
    lo -= step;
    h_lo = h(lo);
  }
  for (double step = 1.0; h_hi >= 0.0; step *= 2.0) {
    if (step > kMaxStep || !std::isfinite(h_hi)) throw IllConditioned("cannot bracket fiber root from above");
    hi += step;
    h_hi = h(hi);
  }
  return detail::brent_root(h, lo, hi, h_lo, h_hi);
}

/// The unique t > 0 solving A = B t^(p-1) + 3 C t; it maximizes f on [0, inf).
inline double fiber_maximizer(const FiberCoefficients& k) {
  k.validate();
  if (k.c == 0.0) {
    const double t = std::pow(k.a / k.b, 1.0 / (k.p - 1.0));
    if (!(t > 0.0 && t <= kMaxFiberScale)) {
      throw IllConditioned("fiber maximizer out of range (A/B = " + std::to_string(k.a / k.b) + ")");
    }
    return t;
  }
  const double s = fiber_log_maximizer(k);
  const double t = std::exp(s);
  if (!(t > 0.0 && t <= kMaxFiberScale)) {
    throw IllConditioned("fiber maximizer exp(" + std::to_string(s) + ") is outside double range");
  }
  return t;
}

}  // namespace triwave
