#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracle/closed_forms.hpp"
#include "triwave/nehari.hpp"
#include "triwave/system.hpp"

using namespace triwave;

namespace {

const GridSpec kGrid = make_grid(1, 20, 512);

Field soliton(const GridSpec& g, double shift = 0.0) {
  return sample_periodic(g, [&](const Point& x) { return std::sqrt(2.0) / std::cosh(x[0] - shift); });
}

TriField smooth_random_state(const GridSpec& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::array<Field, 3> parts{Field(g), Field(g), Field(g)};
  for (auto& f : parts) {
    const double a = 0.5 + std::abs(u(rng)), c = 2.0 * u(rng), w = 1.0 + 0.5 * u(rng), b = 0.3 * u(rng);
    f = sample_periodic(g, [&](const Point& x) {
      return a * std::exp(-(x[0] - c) * (x[0] - c) / (w * w)) * (1.0 + b * std::sin(x[0]));
    });
  }
  return {parts[0], parts[1], parts[2]};
}

}  // namespace

TEST(System, ParameterValidation) {
  EXPECT_THROW(
      {
        try {
          SystemParams::constant(kGrid, 2.0, 0.0, {1, 1, 1});
        } catch (const InvalidArgument& e) {
          EXPECT_NE(std::string(e.what()).find("p must exceed 2"), std::string::npos);
          throw;
        }
      },
      InvalidArgument);
  EXPECT_THROW(
      {
        try {
          SystemParams::constant(make_grid(3, 5, 16), 5.0, 0.0, {1, 1, 1});
        } catch (const InvalidArgument& e) {
          EXPECT_NE(std::string(e.what()).find("N=3 requires p<5"), std::string::npos);
          throw;
        }
      },
      InvalidArgument);
  EXPECT_THROW(SystemParams::constant(kGrid, 3.0, 0.0, {1, 0, 1}), InvalidArgument);
  EXPECT_NO_THROW(SystemParams::constant(make_grid(3, 5, 16), 4.9, 0.0, {1, 1, 1}));
}

TEST(System, SolitonEnergy) {
  const auto params = SystemParams::constant(kGrid, 3.0, 0.0, {1, 1, 1});
  const TriField u(soliton(kGrid), Field(kGrid), Field(kGrid));
  EXPECT_NEAR(energy(u, params), oracle::soliton_energy_1d(1.0), 1e-10);
  EXPECT_NEAR(energy(TriField(Field(kGrid), Field(kGrid), soliton(kGrid)), params), oracle::soliton_energy_1d(1.0),
              1e-10);
}

TEST(System, SolitonResidual) {
  const auto params = SystemParams::constant(kGrid, 3.0, 0.0, {1, 1, 1});
  const TriField r = euler_lagrange_residual(TriField(soliton(kGrid), Field(kGrid), Field(kGrid)), params);
  EXPECT_LT(max_abs(r[0]), 1e-7);
  EXPECT_TRUE(euler_lagrange_residual(TriField(kGrid), params).is_zero());
}

TEST(System, ComponentIntegralsMatchQuadrature) {
  const auto params = SystemParams::constant(kGrid, 3.0, 1.0, {1, 1, 1});
  const TriField u(soliton(kGrid), soliton(kGrid), soliton(kGrid));
  const auto k = component_integrals(u, params);
  const auto s = oracle::soliton_integrals();
  EXPECT_NEAR(k.kinetic[1], s.kinetic, 1e-10);
  EXPECT_NEAR(k.potential[1], s.mass, 1e-10);
  EXPECT_NEAR(k.power[1], s.quartic, 1e-10);
  EXPECT_NEAR(k.cubic, s.cubic, 1e-10);
}

TEST(System, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(3);
  for (double gamma : {0.0, 1.5, -2.0}) {
    const auto params = SystemParams::constant(kGrid, 3.0, gamma, {1.0, 2.0, 0.5});
    for (int n = 0; n < 4; ++n) {
      const TriField u = smooth_random_state(kGrid, rng);
      const TriField v = smooth_random_state(kGrid, rng);
      const double eps = 1e-5;
      const double fd = (energy(u + eps * v, params) - energy(u - eps * v, params)) / (2.0 * eps);
      const double an = pairing(euler_lagrange_residual(u, params), v);
      EXPECT_NEAR(fd, an, 1e-6 * std::max(1.0, std::abs(an)));
    }
  }
}

TEST(System, NehariProjectionIdentities) {
  std::mt19937_64 rng(5);
  for (double gamma : {0.0, 3.0, -3.0}) {
    const auto params = SystemParams::constant(kGrid, 3.0, gamma, {1, 1, 1});
    const TriField u = smooth_random_state(kGrid, rng);
    const auto proj = project_to_nehari(u, params);
    const auto k = component_integrals(proj.state, params);
    const double a = fiber_coefficients(k, params).a;
    EXPECT_LE(std::abs(nehari_value(k, params)), 1e-12 * a);
    EXPECT_NEAR(reduced_energy(proj.state, params), energy(proj.state, params), 1e-12);
    EXPECT_NEAR(pairing(euler_lagrange_residual(proj.state, params), proj.state), nehari_value(proj.state, params),
                1e-10 * a);
  }
}

TEST(System, FiberExpansion) {
  std::mt19937_64 rng(9);
  const auto params = SystemParams::constant(kGrid, 3.5, 1.7, {1, 1, 1});
  const TriField u = smooth_random_state(kGrid, rng);
  const auto coeff = fiber_coefficients(u, params);
  for (double t : {0.2, 0.9, 1.7}) EXPECT_NEAR(energy(t * u, params), fiber_value(t, coeff), 1e-12);
}

TEST(System, SignConjugation) {
  std::mt19937_64 rng(13);
  const TriField u = smooth_random_state(kGrid, rng);
  TriField w = u;
  w[0] *= -1.0;
  const auto plus = SystemParams::constant(kGrid, 3.0, 2.5, {1, 1, 1});
  const auto minus = plus.with_coupling(-2.5);
  EXPECT_EQ(energy(u, plus), energy(w, minus));
}

TEST(System, SampledPotentialMatchesConstant) {
  std::mt19937_64 rng(17);
  const TriField u = smooth_random_state(kGrid, rng);
  const auto c = SystemParams::constant(kGrid, 3.0, 1.0, {1.0, 2.0, 3.0});
  PotentialTriple pt{{Field(kGrid), Field(kGrid), Field(kGrid)}, {1.0, 2.0, 3.0}};
  for (int i = 0; i < 3; ++i)
    for (std::size_t n = 0; n < kGrid.size(); ++n) pt.values[i][n] = i + 1.0;
  const auto s = SystemParams::sampled(3.0, 1.0, pt);
  EXPECT_NEAR(energy(u, c), energy(u, s), 1e-12);
}

TEST(System, GridMismatchRejected) {
  const auto params = SystemParams::constant(kGrid, 3.0, 0.0, {1, 1, 1});
  const auto other = make_grid(1, 20, 256);
  EXPECT_THROW(energy(TriField(other), params), GridMismatch);
  EXPECT_THROW(TriField(Field(kGrid), Field(other), Field(kGrid)), GridMismatch);
  EXPECT_THROW(fiber_coefficients(TriField(kGrid), params), InvalidArgument);
}
