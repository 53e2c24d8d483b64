#pragma once

// Test-only oracles, kept independent of the library's numerics: adaptive
// Simpson quadrature in 1D, radial reductions for norms and kinetic terms,
// and the pair-distance reduction for Gaussian densities (for a Gaussian of
// width sigma the distance R between two independent samples of u^2/rho^2
// has density sqrt(2/pi) r^2 sigma^-3 exp(-r^2/(2 sigma^2)), so every
// pair-kernel coupling collapses to a 1D integral).

#include <cmath>
#include <functional>
#include <numbers>

namespace oracles {

inline double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                          double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12, int depth = 40) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

// int_0^inf 4 pi r^2 g(r) dr with a finite cutoff
inline double radial_integral(const std::function<double(double)>& g, double rmax,
                              double tol = 1e-12) {
  return integrate([&](double r) { return 4.0 * std::numbers::pi * r * r * g(r); }, 0.0, rmax,
                   tol);
}

struct Gaussian {
  double rho = 1.0;
  double sigma = 1.0;
  double amplitude() const {
    return rho * std::pow(std::numbers::pi * sigma * sigma, -0.75);
  }
  double operator()(double r) const {
    return amplitude() * std::exp(-r * r / (2.0 * sigma * sigma));
  }
};

// ||u||_q^q for the Gaussian by radial quadrature
inline double gaussian_lq_q(const Gaussian& u, double q) {
  return radial_integral([&](double r) { return std::pow(u(r), q); }, 12.0 * u.sigma);
}

// ||grad u||_2^2 by radial quadrature of u'(r)^2
inline double gaussian_grad_sq(const Gaussian& u) {
  return radial_integral(
      [&](double r) {
        const double du = -r / (u.sigma * u.sigma) * u(r);
        return du * du;
      },
      12.0 * u.sigma);
}

// E[g(R)] with R the Maxwell pair distance of the Gaussian density.  The
// density vanishes quadratically at r = 0, so r^2 g(r) -> 0 for every kernel
// in use; the r = 0 endpoint is defined accordingly.
inline double maxwell_expectation(double sigma, const std::function<double(double)>& g) {
  return integrate(
      [&](double r) {
        if (r == 0.0) return 0.0;
        const double d = std::sqrt(2.0 / std::numbers::pi) * r * r / (sigma * sigma * sigma) *
                         std::exp(-r * r / (2.0 * sigma * sigma));
        return d * g(r);
      },
      0.0, 14.0 * sigma);
}

// D_kernel(u) = rho^4 E[kernel(R)] for pair kernels against the Gaussian
inline double gaussian_pair_coupling(const Gaussian& u,
                                     const std::function<double(double)>& kernel) {
  return std::pow(u.rho, 4.0) * maxwell_expectation(u.sigma, kernel);
}

// Newtonian potential of the Gaussian density u^2: rho^2 erf(r/sigma)/r
inline double gaussian_phi0(const Gaussian& u, double r) {
  if (r < 1e-12 * u.sigma)
    return u.rho * u.rho * 2.0 / (u.sigma * std::sqrt(std::numbers::pi));
  return u.rho * u.rho * std::erf(r / u.sigma) / r;
}

}  // namespace oracles
