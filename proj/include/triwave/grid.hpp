#pragma once

// Periodic-box discretization of R^N (N = 1, 2, 3) with Fourier spectral
// differentiation and rectangle-rule quadrature.  Fields are real-valued and
// stored in row-major axis order (axis 0 varies slowest).

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "triwave/error.hpp"

namespace triwave {

using Point = std::array<double, 3>;
using Complex = std::complex<double>;

/// Box [-L, L)^N sampled with M points per axis.
struct GridSpec {
  int dimension = 1;
  double halfwidth = 20.0;
  int points_per_axis = 512;

  void validate() const {
    detail::require(dimension >= 1 && dimension <= 3, "grid dimension must be 1, 2 or 3");
    detail::require(std::isfinite(halfwidth) && halfwidth > 0.0, "grid halfwidth must be positive");
    detail::require(points_per_axis >= 8, "grid needs at least 8 points per axis");
  }

  double spacing() const { return 2.0 * halfwidth / points_per_axis; }

  std::size_t size() const {
    std::size_t n = 1;
    for (int a = 0; a < dimension; ++a) n *= static_cast<std::size_t>(points_per_axis);
    return n;
  }

  double cell_volume() const { return std::pow(spacing(), dimension); }

  double coordinate(int j) const { return -halfwidth + j * spacing(); }

  /// Per-axis indices of a flat row-major index.
  std::array<int, 3> indices(std::size_t flat) const {
    std::array<int, 3> idx{0, 0, 0};
    const auto m = static_cast<std::size_t>(points_per_axis);
    for (int a = dimension - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(flat % m);
      flat /= m;
    }
    return idx;
  }

  std::size_t flat(const std::array<int, 3>& idx) const {
    std::size_t f = 0;
    for (int a = 0; a < dimension; ++a) f = f * points_per_axis + static_cast<std::size_t>(idx[a]);
    return f;
  }

  Point node(std::size_t flat_index) const {
    const auto idx = indices(flat_index);
    Point x{0.0, 0.0, 0.0};
    for (int a = 0; a < dimension; ++a) x[a] = coordinate(idx[a]);
    return x;
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

inline GridSpec make_grid(int dimension, double halfwidth, int points_per_axis) {
  GridSpec g{dimension, halfwidth, points_per_axis};
  g.validate();
  return g;
}

inline std::string describe(const GridSpec& g) {
  return "N=" + std::to_string(g.dimension) + " L=" + std::to_string(g.halfwidth) +
         " M=" + std::to_string(g.points_per_axis);
}

/// A real function sampled on the nodes of a GridSpec.
class Field {
 public:
  explicit Field(const GridSpec& spec) : spec_(spec), values_((spec.validate(), spec.size()), 0.0) {}

  Field(const GridSpec& spec, std::vector<double> values) : spec_(spec), values_(std::move(values)) {
    spec_.validate();
    detail::require(values_.size() == spec_.size(),
                    "field has " + std::to_string(values_.size()) + " values, grid needs " +
                        std::to_string(spec_.size()));
    detail::require(std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); }),
                    "field values must be finite");
  }

  const GridSpec& spec() const { return spec_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<double> data() { return values_; }

  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  Field& operator+=(const Field& other) {
    check_same_grid(other);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
  }
  Field& operator-=(const Field& other) {
    check_same_grid(other);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    return *this;
  }
  Field& operator*=(double s) {
    for (auto& v : values_) v *= s;
    return *this;
  }

  /// this += s * other
  Field& add_scaled(double s, const Field& other) {
    check_same_grid(other);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += s * other.values_[i];
    return *this;
  }

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double s, Field a) { return a *= s; }
  friend Field operator*(Field a, double s) { return a *= s; }

  bool is_zero() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
  }

  void check_same_grid(const Field& other) const {
    if (!(spec_ == other.spec_)) {
      throw GridMismatch("fields live on different grids (" + describe(spec_) + " vs " +
                         describe(other.spec_) + ")");
    }
  }

 private:
  GridSpec spec_;
  std::vector<double> values_;
};

namespace detail {

/// Pairwise (cascade) summation of term(i) for i in [begin, end).  The
/// summation tree depends only on the range, so results are reproducible.
template <typename Term>
double pairwise_sum(std::size_t begin, std::size_t end, const Term& term) {
  constexpr std::size_t kBlock = 128;
  if (end - begin <= kBlock) {
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) s += term(i);
    return s;
  }
  const std::size_t mid = begin + (end - begin) / 2;
  return pairwise_sum(begin, mid, term) + pairwise_sum(mid, end, term);
}

inline Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> engine;
  return engine;
}

/// Signed angular wavenumbers of one axis, FFT ordering.
inline std::vector<double> axis_wavenumbers(const GridSpec& g) {
  const int m = g.points_per_axis;
  const double dk = std::numbers::pi / g.halfwidth;
  std::vector<double> k(m);
  for (int j = 0; j < m; ++j) k[j] = dk * (j <= (m - 1) / 2 ? j : j - m);
  return k;
}

inline double wavenumber_sq(const GridSpec& g, const std::vector<double>& k, std::size_t flat) {
  const auto idx = g.indices(flat);
  double s = 0.0;
  for (int a = 0; a < g.dimension; ++a) s += k[idx[a]] * k[idx[a]];
  return s;
}

/// In-place multidimensional DFT, one axis at a time.  The inverse includes
/// the 1/M^N normalization.
inline void transform(std::vector<Complex>& data, const GridSpec& g, bool inverse) {
  const auto m = static_cast<std::size_t>(g.points_per_axis);
  const std::size_t total = data.size();
  std::vector<Complex> in(m), out(m);
  auto& fft = fft_engine();
  std::size_t stride = total;
  for (int axis = 0; axis < g.dimension; ++axis) {
    stride /= m;
    const std::size_t lines = total / m;
    for (std::size_t l = 0; l < lines; ++l) {
      const std::size_t outer = l / stride;
      const std::size_t inner = l % stride;
      const std::size_t base = outer * stride * m + inner;
      for (std::size_t j = 0; j < m; ++j) in[j] = data[base + j * stride];
      if (inverse) {
        fft.inv(out.data(), in.data(), static_cast<Eigen::Index>(m));
      } else {
        fft.fwd(out.data(), in.data(), static_cast<Eigen::Index>(m));
      }
      for (std::size_t j = 0; j < m; ++j) data[base + j * stride] = out[j];
    }
  }
}

inline std::vector<Complex> spectrum(const Field& f) {
  std::vector<Complex> data(f.values().begin(), f.values().end());
  transform(data, f.spec(), false);
  return data;
}

inline Field from_spectrum(std::vector<Complex> data, const GridSpec& g) {
  transform(data, g, true);
  Field out(g);
  for (std::size_t i = 0; i < data.size(); ++i) out[i] = data[i].real();
  return out;
}

}  // namespace detail

/// Samples fn at every node.
template <typename Fn>
Field sample(const GridSpec& g, const Fn& fn) {
  Field f(g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = fn(g.node(i));
  return f;
}

/// Samples the periodization sum_n fn(x + 2L n) over the nearest images
/// n in {-1, 0, 1}^N.  For a function decaying well inside the box this
/// removes the derivative kink that plain sampling leaves at x = +-L.
template <typename Fn>
Field sample_periodic(const GridSpec& g, const Fn& fn) {
  const double period = 2.0 * g.halfwidth;
  int images = 1;
  for (int a = 0; a < g.dimension; ++a) images *= 3;
  Field f(g);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Point x = g.node(i);
    double s = 0.0;
    for (int c = 0; c < images; ++c) {
      Point y = x;
      int code = c;
      for (int a = 0; a < g.dimension; ++a) {
        y[a] += period * ((code % 3) - 1);
        code /= 3;
      }
      s += fn(y);
    }
    f[i] = s;
  }
  return f;
}

/// h^N * sum_j f(x_j): the periodic trapezoid rule.
inline double integrate(const Field& f) {
  const auto v = f.values();
  return f.spec().cell_volume() * detail::pairwise_sum(0, v.size(), [&](std::size_t i) { return v[i]; });
}

/// Integral of the pointwise product f * g.
inline double inner(const Field& f, const Field& g) {
  f.check_same_grid(g);
  const auto a = f.values();
  const auto b = g.values();
  return f.spec().cell_volume() * detail::pairwise_sum(0, a.size(), [&](std::size_t i) { return a[i] * b[i]; });
}

/// Integral of f1 * f2 * f3.
inline double triple_product(const Field& f1, const Field& f2, const Field& f3) {
  f1.check_same_grid(f2);
  f1.check_same_grid(f3);
  const auto a = f1.values();
  const auto b = f2.values();
  const auto c = f3.values();
  return f1.spec().cell_volume() *
         detail::pairwise_sum(0, a.size(), [&](std::size_t i) { return a[i] * b[i] * c[i]; });
}

inline double l2_norm(const Field& f) { return std::sqrt(inner(f, f)); }

inline double max_abs(const Field& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

/// Multiplies the Fourier coefficients of f by multiplier(|k|^2).
template <typename Multiplier>
Field apply_fourier_multiplier(const Field& f, const Multiplier& multiplier) {
  const GridSpec& g = f.spec();
  auto data = detail::spectrum(f);
  const auto k = detail::axis_wavenumbers(g);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] *= multiplier(detail::wavenumber_sq(g, k, i));
  return detail::from_spectrum(std::move(data), g);
}

/// Spectral Laplacian (Fourier symbol -|k|^2).
inline Field laplacian(const Field& f) {
  return apply_fourier_multiplier(f, [](double k2) { return -k2; });
}

/// Integral of |grad f|^2 evaluated on the Fourier side (Parseval).
inline double gradient_norm_sq(const Field& f) {
  const GridSpec& g = f.spec();
  const auto data = detail::spectrum(f);
  const auto k = detail::axis_wavenumbers(g);
  const double sum = detail::pairwise_sum(0, data.size(), [&](std::size_t i) {
    return detail::wavenumber_sq(g, k, i) * std::norm(data[i]);
  });
  return g.cell_volume() * sum / static_cast<double>(g.size());
}

/// Returns x -> f(x - displacement), exact for band-limited fields.
inline Field spectral_shift(const Field& f, const Point& displacement) {
  const GridSpec& g = f.spec();
  auto data = detail::spectrum(f);
  const auto k = detail::axis_wavenumbers(g);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto idx = g.indices(i);
    double phase = 0.0;
    for (int a = 0; a < g.dimension; ++a) phase -= k[idx[a]] * displacement[a];
    data[i] *= std::polar(1.0, phase);
  }
  return detail::from_spectrum(std::move(data), g);
}

/// Circular shift by whole grid cells: result[j] = f[j - shift].
inline Field roll(const Field& f, const std::array<int, 3>& shift) {
  const GridSpec& g = f.spec();
  const int m = g.points_per_axis;
  Field out(g);
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto idx = g.indices(i);
    for (int a = 0; a < g.dimension; ++a) idx[a] = ((idx[a] + shift[a]) % m + m) % m;
    out[g.flat(idx)] = f[i];
  }
  return out;
}

/// Returns x -> f(-x).  Node j maps to node (M - j) mod M on every axis.
inline Field reflect(const Field& f) {
  const GridSpec& g = f.spec();
  const int m = g.points_per_axis;
  Field out(g);
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto idx = g.indices(i);
    for (int a = 0; a < g.dimension; ++a) idx[a] = (m - idx[a]) % m;
    out[g.flat(idx)] = f[i];
  }
  return out;
}

/// Largest |f| over nodes with some axis index equal to 0 or M-1.
inline double boundary_max_abs(const Field& f) {
  const GridSpec& g = f.spec();
  const int last = g.points_per_axis - 1;
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto idx = g.indices(i);
    bool on_shell = false;
    for (int a = 0; a < g.dimension; ++a) on_shell = on_shell || idx[a] == 0 || idx[a] == last;
    if (on_shell) m = std::max(m, std::abs(f[i]));
  }
  return m;
}

}  // namespace triwave
