#pragma once

// Analytic radial profiles.  Rescaling acts on profiles exactly,
//   u_{beta,theta}(x) = theta^(1 - 3 beta/2) * u(theta^(-beta) x),
// so that the L2 mass scales by theta; fields are sampled fresh from the
// rescaled profile, never interpolated on the grid.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "sbp/grid.hpp"

namespace sbp {

struct Profile {
  enum class Kind { gaussian, tabulated };
  Kind kind = Kind::gaussian;

  // gaussian: u(r) = amplitude * exp(-r^2 / (2 sigma^2))
  double amplitude = 0.0;
  double sigma = 1.0;

  // tabulated: linear interpolation on increasing nodes, zero beyond the last
  std::vector<double> nodes;
  std::vector<double> values;

  double operator()(double r) const {
    if (kind == Kind::gaussian) return amplitude * std::exp(-r * r / (2.0 * sigma * sigma));
    if (r <= nodes.front()) return values.front();
    if (r >= nodes.back()) return 0.0;
    const auto it = std::upper_bound(nodes.begin(), nodes.end(), r);
    const std::size_t hi = std::size_t(it - nodes.begin());
    const double t = (r - nodes[hi - 1]) / (nodes[hi] - nodes[hi - 1]);
    return values[hi - 1] * (1.0 - t) + values[hi] * t;
  }
};

// Gaussian with ||u||_L2 = mass: u(x) = mass * (pi sigma^2)^(-3/4) * exp(-|x|^2 / 2 sigma^2).
inline Profile gaussian_profile(double mass, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_profile: sigma must be positive");
  if (!(mass >= 0.0)) throw std::invalid_argument("gaussian_profile: mass must be nonnegative");
  Profile pr;
  pr.kind = Profile::Kind::gaussian;
  pr.sigma = sigma;
  pr.amplitude = mass * std::pow(std::numbers::pi * sigma * sigma, -0.75);
  return pr;
}

inline Profile tabulated_profile(std::vector<double> nodes, std::vector<double> values) {
  if (nodes.size() < 2 || nodes.size() != values.size())
    throw std::invalid_argument("tabulated_profile: need matching node/value tables");
  if (!std::is_sorted(nodes.begin(), nodes.end()))
    throw std::invalid_argument("tabulated_profile: nodes must be increasing");
  for (double v : values)
    if (!std::isfinite(v)) throw std::invalid_argument("tabulated_profile: non-finite value");
  Profile pr;
  pr.kind = Profile::Kind::tabulated;
  pr.nodes = std::move(nodes);
  pr.values = std::move(values);
  return pr;
}

inline Profile rescale(const Profile& pr, double beta, double theta) {
  if (!(theta > 0.0)) throw std::invalid_argument("rescale: theta must be positive");
  const double amp = std::pow(theta, 1.0 - 1.5 * beta);
  const double len = std::pow(theta, beta);
  Profile out = pr;
  if (pr.kind == Profile::Kind::gaussian) {
    out.amplitude = amp * pr.amplitude;
    out.sigma = len * pr.sigma;
  } else {
    for (double& r : out.nodes) r *= len;
    for (double& v : out.values) v *= amp;
  }
  return out;
}

inline Field sample(const Grid& g, const Profile& pr) {
  Field f = make_field(g);
  const int n = g.n;
  std::size_t flat = 0;
  for (int i = 0; i < n; ++i) {
    const double x = g.coords[i];
    for (int j = 0; j < n; ++j) {
      const double y = g.coords[j];
      for (int l = 0; l < n; ++l, ++flat) {
        const double z = g.coords[l];
        f.values[flat] = pr(std::sqrt(x * x + y * y + z * z));
      }
    }
  }
  return f;
}

// int_{r0}^{r1} 4 pi r^2 u(r)^2 dr by composite Simpson.
inline double radial_mass_sq(const Profile& pr, double r0, double r1, int panels = 4096) {
  if (!(r1 > r0)) return 0.0;
  const double h = (r1 - r0) / panels;
  auto f = [&](double r) {
    const double u = pr(r);
    return 4.0 * std::numbers::pi * r * r * u * u;
  };
  double acc = f(r0) + f(r1);
  for (int i = 1; i < panels; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(r0 + i * h);
  return acc * h / 3.0;
}

// Fraction of the squared-L2 mass outside radius R.
inline double mass_fraction_outside(const Profile& pr, double R) {
  if (pr.kind == Profile::Kind::gaussian) {
    const double t = R / pr.sigma;
    //  P(|x| > R) for density prop. to exp(-r^2/sigma^2)
    return 2.0 * t / std::sqrt(std::numbers::pi) * std::exp(-t * t) + std::erfc(t);
  }
  if (R >= pr.nodes.back()) return 0.0;
  const double total = radial_mass_sq(pr, 0.0, pr.nodes.back());
  if (total <= 0.0) return 0.0;
  return radial_mass_sq(pr, R, pr.nodes.back()) / total;
}

// Rejects profiles whose mass leaks past the box half-width.
inline void require_fits_box(const Profile& pr, const Grid& g, double tol = 1e-10) {
  const double out = mass_fraction_outside(pr, g.L);
  if (!(out <= tol))
    throw std::domain_error("profile does not fit the box: squared-mass fraction outside |x| <= L is " +
                            std::to_string(out));
}

}  // namespace sbp
