#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "sbp/grid.hpp"
#include "sbp/profile.hpp"

using namespace sbp;

namespace {
Field gaussian_field(const Grid& g, double rho, double sigma) {
  return sample(g, gaussian_profile(rho, sigma));
}
}  // namespace

TEST_CASE("make_grid populates tables", "[grid]") {
  const Grid g = make_grid(8, 4.0);
  CHECK(g.dx == 1.0);
  CHECK(g.cell_volume == 1.0);
  CHECK(g.coords.front() == -4.0);

  const Grid h = make_grid(64, 8.0);
  CHECK(h.dx == 0.25);
  CHECK(h.wavenumbers[1] == Catch::Approx(std::numbers::pi / 8.0));

  // wavenumber multiset is closed under negation except the Nyquist entry
  for (int i = 1; i < h.n; ++i) {
    if (i == h.n / 2) continue;
    CHECK(h.wavenumbers[i] == -h.wavenumbers[h.n - i]);
  }
  CHECK(h.wavenumbers[h.n / 2] == Catch::Approx(std::numbers::pi * (h.n / 2) / h.L));
}

TEST_CASE("make_grid rejects bad arguments", "[grid]") {
  CHECK_THROWS_AS(make_grid(7, 4.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(6, 4.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(16, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(16, -1.0), std::invalid_argument);
}

TEST_CASE("lp_norm against radial quadrature oracles", "[grid]") {
  const Grid g = make_grid(64, 8.0);
  const oracles::Gaussian u{1.0, 1.0};
  const Field f = gaussian_field(g, 1.0, 1.0);

  const double mass_oracle = std::sqrt(oracles::gaussian_lq_q(u, 2.0));
  CHECK(mass_oracle == Catch::Approx(1.0).epsilon(1e-10));
  CHECK(lp_norm(f, 2.0) == Catch::Approx(1.0).margin(1e-8));

  const double p = 2.5;
  const double lp_oracle = oracles::gaussian_lq_q(u, p);
  // closed form rho^p (pi sigma^2)^(-3p/4) (2 pi sigma^2 / p)^(3/2)
  const double closed = std::pow(std::numbers::pi, -0.75 * p) *
                        std::pow(2.0 * std::numbers::pi / p, 1.5);
  CHECK(lp_oracle == Catch::Approx(closed).epsilon(1e-10));
  CHECK(lp_oracle == Catch::Approx(0.46581).epsilon(1e-4));
  CHECK(std::pow(lp_norm(f, p), p) == Catch::Approx(lp_oracle).epsilon(1e-8));

  CHECK(lp_norm(make_field(g), 2.5) == 0.0);
  CHECK_THROWS_AS(lp_norm(f, 0.5), std::invalid_argument);
}

TEST_CASE("grad_norm_sq against oracles", "[grid]") {
  const Grid g = make_grid(64, 8.0);
  const Field f = gaussian_field(g, 1.0, 1.0);

  const double oracle = oracles::gaussian_grad_sq(oracles::Gaussian{1.0, 1.0});
  CHECK(oracle == Catch::Approx(1.5).epsilon(1e-10));
  CHECK(grad_norm_sq(f) == Catch::Approx(1.5).margin(1e-6));

  Field c = make_field(g);
  for (double& v : c.values) v = 3.25;
  CHECK(grad_norm_sq(c) == Catch::Approx(0.0).margin(1e-18));

  // single mode: f = sin(pi x / L) has ||grad f||^2 = (pi/L)^2 ||f||^2
  Field s = make_field(g);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      for (int l = 0; l < g.n; ++l)
        s.values[g.index(i, j, l)] = std::sin(std::numbers::pi * g.coords[i] / g.L);
  const double k1 = std::numbers::pi / g.L;
  CHECK(grad_norm_sq(s) ==
        Catch::Approx(k1 * k1 * std::pow(lp_norm(s, 2.0), 2.0)).epsilon(1e-12));
}

TEST_CASE("inner_l2", "[grid]") {
  const Grid g = make_grid(32, 8.0);
  const Field f = gaussian_field(g, 1.0, 1.5);
  CHECK(inner_l2(f, f) == Catch::Approx(std::pow(lp_norm(f, 2.0), 2.0)).epsilon(1e-14));
  CHECK(inner_l2(f, make_field(g)) == 0.0);

  // brute-force sum cross-check on an asymmetric integrand
  Field h = f;
  for (std::size_t j = 0; j < h.values.size(); ++j) {
    const double v = f.values[j];
    h.values[j] = v * v * v * ((j % 3 == 0) ? -1.0 : 1.0);
  }
  double brute = 0.0;
  for (std::size_t j = 0; j < h.values.size(); ++j) brute += f.values[j] * h.values[j];
  brute *= g.cell_volume;
  CHECK(inner_l2(f, h) == Catch::Approx(brute).epsilon(1e-14));

  const Grid g2 = make_grid(16, 8.0);
  CHECK_THROWS_AS(inner_l2(f, make_field(g2)), std::invalid_argument);
}

TEST_CASE("spectral kinetic term converges to finite differences at order 2", "[grid]") {
  auto fd_grad_sq = [](const Field& f) {
    const Grid& g = f.grid;
    const int n = g.n;
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
          const double v = f.values[g.index(i, j, l)];
          const double d1 = f.values[g.index((i + 1) % n, j, l)] - v;
          const double d2 = f.values[g.index(i, (j + 1) % n, l)] - v;
          const double d3 = f.values[g.index(i, j, (l + 1) % n)] - v;
          acc += d1 * d1 + d2 * d2 + d3 * d3;
        }
    return acc * g.cell_volume / (g.dx * g.dx);
  };
  const Profile pr = gaussian_profile(1.0, 1.2);
  const Grid coarse = make_grid(32, 8.0), fine = make_grid(64, 8.0);
  const double e1 = std::abs(fd_grad_sq(sample(coarse, pr)) - grad_norm_sq(sample(coarse, pr)));
  const double e2 = std::abs(fd_grad_sq(sample(fine, pr)) - grad_norm_sq(sample(fine, pr)));
  CHECK(std::log2(e1 / e2) == Catch::Approx(2.0).margin(0.3));
}

TEST_CASE("whole-cell translation leaves norms unchanged", "[grid]") {
  const Grid g = make_grid(32, 8.0);
  const Field f = gaussian_field(g, 0.7, 1.1);
  Field t = make_field(g);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      for (int l = 0; l < g.n; ++l)
        t.values[g.index(i, j, l)] =
            f.values[g.index((i + 5) % g.n, (j + 2) % g.n, (l + g.n - 3) % g.n)];
  CHECK(std::abs(lp_norm(t, 2.0) - lp_norm(f, 2.0)) < 1e-12);
  CHECK(std::abs(lp_norm(t, 2.5) - lp_norm(f, 2.5)) < 1e-12);
  CHECK(std::abs(grad_norm_sq(t) - grad_norm_sq(f)) < 1e-12);
}

TEST_CASE("spectral shift and recentering", "[grid]") {
  const Grid g = make_grid(32, 8.0);
  const Field f = gaussian_field(g, 1.0, 1.0);
  // shifting by whole cells matches the index permutation
  const Field s = shift_field(f, {3.0 * g.dx, 0.0, 0.0});
  double worst = 0.0;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      for (int l = 0; l < g.n; ++l)
        worst = std::max(worst, std::abs(s.values[g.index(i, j, l)] -
                                         f.values[g.index((i + 3) % g.n, j, l)]));
  CHECK(worst < 1e-12);

  const auto c = density_center(s);
  CHECK(c[0] == Catch::Approx(-3.0 * g.dx).margin(1e-10));
  CHECK(std::abs(c[1]) < 1e-10);
  const Field r = recenter(s);
  worst = 0.0;
  for (std::size_t j = 0; j < r.values.size(); ++j)
    worst = std::max(worst, std::abs(r.values[j] - f.values[j]));
  CHECK(worst < 1e-10);
}
