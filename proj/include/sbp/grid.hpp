#pragma once

// Periodic cubic grid on the box [-L, L]^3 with n cells per axis and the
// real scalar fields living on it.  Quadrature is the midpoint rule on the
// uniform grid (spectrally accurate for smooth periodic integrands).
//
// Sample points: x_i = -L + i*dx, dx = 2L/n.
// Per-axis wavenumbers in FFT index order: k_j = pi*j/L with signed j.

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbp/fft.hpp"

namespace sbp {

struct Grid {
  int n = 0;
  double L = 0.0;
  double dx = 0.0;
  double cell_volume = 0.0;
  std::vector<double> wavenumbers;  // k_j = pi*j/L, FFT index order
  std::vector<double> coords;       // x_i = -L + i*dx

  std::size_t size() const { return std::size_t(n) * n * n; }
  std::size_t index(int i, int j, int l) const {
    return (std::size_t(i) * n + j) * n + l;
  }
};

inline Grid make_grid(int n, double L) {
  if (n < 8)
    throw std::invalid_argument("make_grid: n must be at least 8, got " + std::to_string(n));
  if (n % 2 != 0)
    throw std::invalid_argument("make_grid: n must be even, got " + std::to_string(n));
  if (!(L > 0.0) || !std::isfinite(L))
    throw std::invalid_argument("make_grid: L must be positive and finite");
  Grid g;
  g.n = n;
  g.L = L;
  g.dx = 2.0 * L / n;
  g.cell_volume = g.dx * g.dx * g.dx;
  g.wavenumbers.resize(n);
  g.coords.resize(n);
  for (int i = 0; i < n; ++i) {
    const int j = (i <= n / 2) ? i : i - n;
    g.wavenumbers[i] = std::numbers::pi * j / L;
    g.coords[i] = -L + i * g.dx;
  }
  return g;
}

inline bool same_grid(const Grid& a, const Grid& b) { return a.n == b.n && a.L == b.L; }

struct Field {
  Grid grid;
  std::vector<double> values;
};

inline Field make_field(const Grid& g) { return Field{g, std::vector<double>(g.size(), 0.0)}; }

inline void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!same_grid(a, b)) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

inline bool all_finite(const Field& f) {
  for (double v : f.values)
    if (!std::isfinite(v)) return false;
  return true;
}

inline double integral(const Field& f) {
  double acc = 0.0;
  for (double v : f.values) acc += v;
  return acc * f.grid.cell_volume;
}

// (cell_volume * sum |f_i|^p)^(1/p); p >= 1.
inline double lp_norm(const Field& f, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  double acc = 0.0;
  if (p == 2.0) {
    for (double v : f.values) acc += v * v;
  } else {
    for (double v : f.values) acc += std::pow(std::abs(v), p);
  }
  return std::pow(f.grid.cell_volume * acc, 1.0 / p);
}

inline double inner_l2(const Field& f, const Field& g) {
  require_same_grid(f.grid, g.grid, "inner_l2");
  double acc = 0.0;
  for (std::size_t j = 0; j < f.values.size(); ++j) acc += f.values[j] * g.values[j];
  return acc * f.grid.cell_volume;
}

// Visit every mode of the r2c half spectrum.  `weight` is 2 for modes whose
// conjugate partner is folded away, 1 on the self-conjugate planes.
template <class Fn>
inline void for_each_mode(const Grid& g, Fn&& fn) {
  const int n = g.n;
  const int nz = n / 2 + 1;
  std::size_t flat = 0;
  for (int i = 0; i < n; ++i) {
    const double kx = g.wavenumbers[i];
    for (int j = 0; j < n; ++j) {
      const double ky = g.wavenumbers[j];
      for (int l = 0; l < nz; ++l, ++flat) {
        const double w = (l == 0 || l == n / 2) ? 1.0 : 2.0;
        fn(flat, kx, ky, g.wavenumbers[l], w);
      }
    }
  }
}

// sum_k |k|^2 |fhat(k)|^2 with the Parseval normalization; equals
// ||grad f||_2^2 for band-limited f.
inline double grad_norm_sq(const Field& f) {
  const auto spec = fft::forward(f.grid.n, f.values);
  double acc = 0.0;
  for_each_mode(f.grid, [&](std::size_t m, double kx, double ky, double kz, double w) {
    acc += w * (kx * kx + ky * ky + kz * kz) * std::norm(spec[m]);
  });
  return acc * f.grid.cell_volume / double(f.grid.size());
}

// Pointwise real spectral multiplier m(kx, ky, kz).
template <class Fn>
inline Field apply_spectral_multiplier(const Field& f, Fn&& m) {
  auto spec = fft::forward(f.grid.n, f.values);
  for_each_mode(f.grid, [&](std::size_t mm, double kx, double ky, double kz, double) {
    spec[mm] *= m(kx, ky, kz);
  });
  return Field{f.grid, fft::inverse(f.grid.n, spec)};
}

inline Field neg_laplacian(const Field& f) {
  return apply_spectral_multiplier(f, [](double kx, double ky, double kz) {
    return kx * kx + ky * ky + kz * kz;
  });
}

// Spectral translation: returns x -> f(x + delta).
inline Field shift_field(const Field& f, const std::array<double, 3>& delta) {
  auto spec = fft::forward(f.grid.n, f.values);
  for_each_mode(f.grid, [&](std::size_t m, double kx, double ky, double kz, double) {
    spec[m] *= std::polar(1.0, kx * delta[0] + ky * delta[1] + kz * delta[2]);
  });
  return Field{f.grid, fft::inverse(f.grid.n, spec)};
}

// Circular center of mass of the density u^2 on the periodic box.
inline std::array<double, 3> density_center(const Field& u) {
  const Grid& g = u.grid;
  const int n = g.n;
  std::vector<double> sin_t(n), cos_t(n);
  for (int i = 0; i < n; ++i) {
    const double angle = std::numbers::pi * g.coords[i] / g.L;
    sin_t[i] = std::sin(angle);
    cos_t[i] = std::cos(angle);
  }
  double S[3] = {0, 0, 0}, C[3] = {0, 0, 0};
  std::size_t flat = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l, ++flat) {
        const double w = u.values[flat] * u.values[flat];
        S[0] += w * sin_t[i];
        C[0] += w * cos_t[i];
        S[1] += w * sin_t[j];
        C[1] += w * cos_t[j];
        S[2] += w * sin_t[l];
        C[2] += w * cos_t[l];
      }
  std::array<double, 3> c{};
  for (int d = 0; d < 3; ++d)
    c[d] = (S[d] == 0.0 && C[d] == 0.0) ? 0.0 : std::atan2(S[d], C[d]) * g.L / std::numbers::pi;
  return c;
}

// Translate so the density center of mass sits at the origin.
inline Field recenter(const Field& u) {
  const auto c = density_center(u);
  const double tiny = 1e-12 * u.grid.dx;
  if (std::abs(c[0]) < tiny && std::abs(c[1]) < tiny && std::abs(c[2]) < tiny) return u;
  return shift_field(u, c);
}

}  // namespace sbp
