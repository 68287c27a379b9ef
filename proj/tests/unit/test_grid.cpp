#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracle/closed_forms.hpp"
#include "triwave/field_io.hpp"
#include "triwave/grid.hpp"
#include "unit/helpers.hpp"

using namespace triwave;

namespace {

Field random_field(const GridSpec& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  Field f(g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = n(rng);
  return f;
}

}  // namespace

TEST(Grid, Validation) {
  EXPECT_THROW(make_grid(0, 20, 64), InvalidArgument);
  EXPECT_THROW(make_grid(4, 20, 64), InvalidArgument);
  EXPECT_THROW(make_grid(1, -1, 64), InvalidArgument);
  EXPECT_THROW(make_grid(1, 20, 4), InvalidArgument);
  const auto g = make_grid(2, 10, 32);
  EXPECT_EQ(g.size(), 32u * 32u);
  EXPECT_DOUBLE_EQ(g.spacing(), 20.0 / 32.0);
  EXPECT_DOUBLE_EQ(g.coordinate(0), -10.0);
  EXPECT_EQ(g.flat(g.indices(77)), 77u);
}

TEST(Grid, GaussianIntegral) {
  const auto g1 = make_grid(1, 20, 512);
  const Field f1 = sample(g1, [](const Point& x) { return std::exp(-x[0] * x[0]); });
  EXPECT_NEAR(integrate(f1), std::sqrt(std::numbers::pi), 1e-12);

  const auto g2 = make_grid(2, 10, 64);
  const Field f2 = sample(g2, [](const Point& x) { return std::exp(-x[0] * x[0] - x[1] * x[1]); });
  EXPECT_NEAR(integrate(f2), std::numbers::pi, 1e-12);
}

TEST(Grid, LaplacianOfSineIsEigenfunction) {
  const auto g = make_grid(1, 20, 128);
  const double k = 3.0 * std::numbers::pi / g.halfwidth;
  const Field f = sample(g, [&](const Point& x) { return std::sin(k * x[0]); });
  const Field lap = laplacian(f);
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(lap[i], -k * k * f[i], 1e-10);
}

TEST(Grid, LaplacianOfGaussian) {
  const auto g = make_grid(1, 20, 512);
  const Field f = sample(g, [](const Point& x) { return std::exp(-x[0] * x[0]); });
  const Field lap = laplacian(f);
  double err = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = g.node(i)[0];
    err = std::max(err, std::abs(lap[i] - (4.0 * x * x - 2.0) * std::exp(-x * x)));
  }
  EXPECT_LT(err, 1e-8);
}

TEST(Grid, LaplacianIn3D) {
  const auto g = make_grid(3, 6, 48);
  const Field f = sample(g, [](const Point& x) { return std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])); });
  const Field lap = laplacian(f);
  double err = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto x = g.node(i);
    const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    err = std::max(err, std::abs(lap[i] - (4.0 * r2 - 6.0) * std::exp(-r2)));
  }
  EXPECT_LT(err, 1e-6);
}

TEST(Grid, GradientNorm) {
  const auto g = make_grid(1, 10, 64);
  const Field s = sample(g, [&](const Point& x) { return std::sin(std::numbers::pi * x[0] / 10.0); });
  EXPECT_NEAR(gradient_norm_sq(s), std::numbers::pi * std::numbers::pi / 10.0, 1e-12);

  const auto g2 = make_grid(1, 20, 512);
  const Field u = sample_periodic(g2, [](const Point& x) { return std::sqrt(2.0) / std::cosh(x[0]); });
  EXPECT_NEAR(gradient_norm_sq(u), oracle::soliton_integrals().kinetic, 1e-10);
}

TEST(Grid, ParsevalAndIntegrationByParts) {
  const auto g = make_grid(2, 6, 16);
  const Field f = random_field(g, 1);
  const auto spec = detail::spectrum(f);
  double sum = 0.0;
  for (const auto& c : spec) sum += std::norm(c);
  EXPECT_NEAR(inner(f, f), g.cell_volume() * sum / static_cast<double>(g.size()), 1e-10 * inner(f, f));
  EXPECT_NEAR(gradient_norm_sq(f), -inner(f, laplacian(f)), 1e-9 * gradient_norm_sq(f));
}

TEST(Grid, LaplacianIsLinear) {
  const auto g = make_grid(1, 5, 64);
  const Field a = random_field(g, 2), b = random_field(g, 3);
  const Field lhs = laplacian(2.5 * a - b);
  const Field rhs = 2.5 * laplacian(a) - laplacian(b);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(lhs[i], rhs[i], 1e-9 * (1.0 + std::abs(rhs[i])));
}

TEST(Grid, ShiftRollReflect) {
  const auto g = make_grid(1, 20, 256);
  const Field f = sample_periodic(g, [](const Point& x) { return 1.0 / std::cosh(x[0] - 1.3); });
  const Field back = spectral_shift(spectral_shift(f, {0.37, 0, 0}), {-0.37, 0, 0});
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(back[i], f[i], 1e-12);

  const Field shifted = spectral_shift(f, {1.3, 0, 0});
  const Field expect = sample_periodic(g, [](const Point& x) { return 1.0 / std::cosh(x[0] - 2.6); });
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(shifted[i], expect[i], 1e-10);

  const Field rolled = roll(f, {5, 0, 0});
  EXPECT_EQ(rolled[5], f[0]);
  EXPECT_EQ(rolled[0], f[g.points_per_axis - 5]);

  const Field even = sample(g, [](const Point& x) { return std::exp(-x[0] * x[0]); });
  const Field r = reflect(even);
  for (std::size_t i = 0; i < even.size(); ++i) EXPECT_NEAR(r[i], even[i], 1e-15);
}

TEST(Grid, FieldArithmeticAndMismatch) {
  const auto g = make_grid(1, 5, 16);
  const Field a = random_field(g, 4);
  Field c = a;
  c.add_scaled(-1.0, a);
  EXPECT_TRUE(c.is_zero());
  const Field other(make_grid(1, 5, 32));
  EXPECT_THROW(a + other, GridMismatch);
  EXPECT_THROW(inner(a, other), GridMismatch);
  EXPECT_THROW(Field(g, std::vector<double>(3, 0.0)), InvalidArgument);
  EXPECT_THROW(Field(g, std::vector<double>(16, std::nan(""))), InvalidArgument);
}

TEST(Grid, BoundaryMagnitude) {
  const auto g = make_grid(2, 5, 16);
  Field f(g);
  f[g.flat({8, 8, 0})] = 3.0;
  EXPECT_EQ(boundary_max_abs(f), 0.0);
  f[g.flat({0, 4, 0})] = -2.0;
  EXPECT_EQ(boundary_max_abs(f), 2.0);
}

TEST(FieldIo, RoundTripTextAndBinary) {
  testing_support::TempDir dir;
  const auto g = make_grid(2, 7.25, 12);
  const Field f = random_field(g, 5);
  for (auto fmt : {FieldFormat::Text, FieldFormat::Binary}) {
    const auto path = dir / (fmt == FieldFormat::Text ? "f.txt" : "f.bin");
    save_field(path, f, fmt);
    const Field back = load_field(path);
    ASSERT_EQ(back.spec(), g);
    for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ(back[i], f[i]);
  }
}

TEST(FieldIo, RejectsMalformedInput) {
  EXPECT_THROW(decode_field("not a field\n1 2 3\n"), InvalidArgument);
  const auto g = make_grid(1, 1, 8);
  std::string text = encode_field(Field(g));
  text += "1.0\n";
  EXPECT_THROW(decode_field(text), InvalidArgument);
  EXPECT_THROW(load_field("/nonexistent/path/u1.field"), Error);
}
