#pragma once

// Projection of nonzero states onto the Nehari manifold G(u) = 0 and the
// reduced energy valid on it.

#include <cmath>
#include <string>

#include "triwave/fiber.hpp"
#include "triwave/system.hpp"

namespace triwave {

struct NehariProjection {
  TriField state;  // t * u
  double scale;    // t
};

/// The unique point t*u of the ray through u that lies on the manifold.
inline NehariProjection project_to_nehari(const TriField& u, const SystemParams& params) {
  const double t = fiber_maximizer(fiber_coefficients(u, params));
  return {t * u, t};
}

/// Sum_i int (1/6)(|grad u_i|^2 + V_i u_i^2) + (p-2)/(3(p+1)) |u_i|^(p+1).
/// Equal to I(u) only on the manifold; `tolerance` bounds |G(u)| / A.
inline double reduced_energy(const TriField& u, const SystemParams& params, double tolerance = 1e-8) {
  const auto k = component_integrals(u, params);
  const auto coeff = fiber_coefficients(k, params);
  if (u.is_zero() || !(coeff.a > 0.0)) throw InvalidArgument("reduced energy needs a nonzero state");
  const double g = nehari_value(k, params);
  if (!(std::abs(g) <= tolerance * coeff.a)) {
    throw InvalidArgument("state is off the Nehari manifold: |G|/A = " + std::to_string(std::abs(g) / coeff.a));
  }
  const double p = params.exponent();
  double e = 0.0;
  for (int i = 0; i < 3; ++i) {
    e += (k.kinetic[i] + k.potential[i]) / 6.0 + (p - 2.0) / (3.0 * (p + 1.0)) * k.power[i];
  }
  return e;
}

}  // namespace triwave
