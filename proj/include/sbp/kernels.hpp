#pragma once

// The three radial kernels behind the nonlocal couplings:
//   coulomb            1/r
//   bopp_podolsky      kappa_a(r) = (1 - exp(-r/a))/r, range ]0, 1/a[
//   pure_exponential   exp(-r/a)
// together with their truncated radial Fourier transforms.  Free-space
// convolution on the periodic grid works on the doubled (zero-padded) grid
// with the kernel truncated at T = 2*L, half the padded period.  At that
// radius the periodized kernel has no overlapping images, and every pair
// within distance 2L is convolved exactly; pairs farther apart exist only
// in the box corners, where the working fields carry no mass (the box rule
// keeps the squared mass outside |x| <= L/2 below 1e-12).  Truncating at
// the full box diameter 2*L*sqrt(3) instead would fold kernel images back
// onto near-center sources and corrupt the potential at the percent level.

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "sbp/grid.hpp"

namespace sbp {

enum class KernelKind { coulomb, bopp_podolsky, pure_exponential };

inline const char* kernel_name(KernelKind k) {
  switch (k) {
    case KernelKind::coulomb: return "coulomb";
    case KernelKind::bopp_podolsky: return "bopp_podolsky";
    case KernelKind::pure_exponential: return "pure_exponential";
  }
  return "?";
}

struct KernelSpec {
  KernelKind kind = KernelKind::coulomb;
  double a = 0.0;  // screening length; ignored for coulomb
  double T = 0.0;  // truncation radius
};

inline void validate(const KernelSpec& s) {
  if (!(s.T > 0.0) || !std::isfinite(s.T))
    throw std::invalid_argument("KernelSpec: truncation radius T must be positive");
  if (s.kind != KernelKind::coulomb && (!(s.a > 0.0) || !std::isfinite(s.a)))
    throw std::invalid_argument("KernelSpec: screening length a must be positive");
}

// kappa(a, r) = (1 - exp(-r/a))/r for a > 0; the a = 0 limit is 1/r.
// expm1 keeps full precision near r/a = 0, where the value approaches 1/a.
inline double kappa(double a, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("kappa: r must be positive");
  if (a < 0.0) throw std::invalid_argument("kappa: a must be nonnegative");
  if (a == 0.0) return 1.0 / r;
  return -std::expm1(-r / a) / r;
}

inline double kernel_value(const KernelSpec& s, double r) {
  switch (s.kind) {
    case KernelKind::coulomb: return 1.0 / r;
    case KernelKind::bopp_podolsky: return kappa(s.a, r);
    case KernelKind::pure_exponential: return std::exp(-r / s.a);
  }
  return 0.0;
}

namespace detail {

// r * f(r); smooth down to r = 0 for all three kernels.
inline double kernel_times_r(const KernelSpec& s, double r) {
  switch (s.kind) {
    case KernelKind::coulomb: return 1.0;
    case KernelKind::bopp_podolsky: return -std::expm1(-r / s.a);
    case KernelKind::pure_exponential: return r * std::exp(-r / s.a);
  }
  return 0.0;
}

// 15-point Kronrod rule with the embedded 7-point Gauss estimate (the
// QUADPACK dqk15 pair).
struct GkEstimate {
  double value;
  double error;
};

template <class G>
inline GkEstimate gk15(G&& g, double a, double b) {
  static constexpr double xk[8] = {
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
  static constexpr double wk[8] = {
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static constexpr double wg[4] = {
      0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double gk = 0.0, gauss = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double f1 = g(c - h * xk[i]);
    const double f2 = g(c + h * xk[i]);
    const double pair = (i == 7) ? f1 : f1 + f2;
    gk += wk[i] * pair;
    if (i % 2 == 1) gauss += wg[i / 2] * pair;  // gauss nodes sit at odd slots
  }
  return {gk * h, std::abs(gk - gauss) * h};
}

template <class G>
inline double adaptive_gk(G&& g, double a, double b, double abs_tol, int depth) {
  const GkEstimate e = gk15(g, a, b);
  if (e.error <= abs_tol || depth <= 0) return e.value;
  const double m = 0.5 * (a + b);
  return adaptive_gk(g, a, m, abs_tol * 0.5, depth - 1) +
         adaptive_gk(g, m, b, abs_tol * 0.5, depth - 1);
}

// Adaptive quadrature of g over [0, T], pre-split into `panels` pieces so
// the per-panel refinement stays shallow on oscillatory integrands.  The
// per-panel target sits two decades above the ulp floor of the embedded
// error estimate; the refinement only fires where the integrand genuinely
// bends faster than the panel width.
template <class G>
inline double panel_integrate(G&& g, double T, int panels) {
  // crude magnitude bound to set the absolute refinement target
  double mag = 0.0;
  for (int i = 0; i <= 32; ++i) mag = std::max(mag, std::abs(g(T * i / 32.0)));
  if (mag == 0.0) mag = 1.0;
  double acc = 0.0;
  const double h = T / panels;
  const double tol = 1e-14 * mag * h;
  for (int i = 0; i < panels; ++i) {
    const double r0 = i * h;
    const double r1 = (i + 1 == panels) ? T : (i + 1) * h;
    acc += adaptive_gk(g, r0, r1, tol, 8);
  }
  return acc;
}

}  // namespace detail

// 3D radial Fourier transform of the kernel multiplied by the indicator of
// {|x| <= T}:
//   F(k) = (4 pi / k) * int_0^T sin(k r) f(r) r dr          (k > 0)
//   F(0) = 4 pi * int_0^T f(r) r^2 dr                        (analytic limit)
// For the coulomb kernel this matches the closed form 4 pi (1 - cos(kT))/k^2.
inline double truncated_ft(const KernelSpec& s, double k) {
  validate(s);
  if (!(k >= 0.0)) throw std::invalid_argument("truncated_ft: k must be nonnegative");
  constexpr double pi = std::numbers::pi;
  if (k == 0.0) {
    const double I = detail::panel_integrate(
        [&](double r) { return detail::kernel_times_r(s, r) * r; }, s.T, 16);
    return 4.0 * pi * I;
  }
  // one panel per quarter oscillation of sin(k r)
  int panels = int(std::ceil(2.0 * k * s.T / pi));
  if (panels < 8) panels = 8;
  const double I = detail::panel_integrate(
      [&](double r) { return std::sin(k * r) * detail::kernel_times_r(s, r); }, s.T, panels);
  return 4.0 * pi / k * I;
}

inline double default_truncation(const Grid& g) { return 2.0 * g.L; }

// Spectral table m(|k|) = truncated_ft(spec, |k|) over the half spectrum of
// the doubled grid.  Values depend on |k| only, so they are computed once per
// integer j1^2+j2^2+j3^2.  Tables are cached: solvers reuse one table across
// thousands of convolutions.
//
// T must cover the diameter sqrt(3)*L of the mass-carrying region
// |x| <= L/2 and must not exceed half the padded period 2L, or the
// periodization of the truncated kernel stops being image-free.
inline std::shared_ptr<const std::vector<double>> multiplier_table(const Grid& g,
                                                                   const KernelSpec& spec) {
  validate(spec);
  if (spec.T < std::sqrt(3.0) * g.L * (1.0 - 1e-12))
    throw std::invalid_argument(
        "multiplier_table: truncation radius T below the sqrt(3)*L pair-distance bound");
  if (spec.T > 2.0 * g.L * (1.0 + 1e-12))
    throw std::invalid_argument(
        "multiplier_table: truncation radius T beyond half the padded period 2*L");

  using Key = std::tuple<int, double, double, int, double>;
  static std::map<Key, std::shared_ptr<const std::vector<double>>> cache;
  static std::mutex mtx;
  const Key key{int(spec.kind), spec.a, spec.T, g.n, g.L};

  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  const int np = 2 * g.n;
  const double Lp = 2.0 * g.L;
  const double k1 = std::numbers::pi / Lp;
  const int half = np / 2;
  const int smax = 3 * half * half;
  std::vector<double> by_s(std::size_t(smax) + 1,
                           std::numeric_limits<double>::quiet_NaN());
  auto value_for = [&](int ssum) {
    double& slot = by_s[ssum];
    if (std::isnan(slot)) slot = truncated_ft(spec, k1 * std::sqrt(double(ssum)));
    return slot;
  };

  auto table = std::make_shared<std::vector<double>>(fft::spectrum_size(np));
  const int nz = half + 1;
  std::size_t flat = 0;
  for (int i = 0; i < np; ++i) {
    const int ji = (i <= half) ? i : i - np;
    for (int j = 0; j < np; ++j) {
      const int jj = (j <= half) ? j : j - np;
      for (int l = 0; l < nz; ++l, ++flat)
        (*table)[flat] = value_for(ji * ji + jj * jj + l * l);
    }
  }
  cache.emplace(key, table);
  return table;
}

}  // namespace sbp
