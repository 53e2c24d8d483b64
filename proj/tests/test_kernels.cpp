#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "sbp/kernels.hpp"

using namespace sbp;

TEST_CASE("kappa point values", "[kernels]") {
  CHECK(kappa(1.0, 1.0) == Catch::Approx(1.0 - std::exp(-1.0)).epsilon(1e-15));
  CHECK(kappa(1.0, 1e-8) == Catch::Approx(1.0).epsilon(1e-7));  // approaches 1/a
  CHECK(kappa(0.0, 2.0) == 0.5);
  CHECK_THROWS_AS(kappa(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(kappa(1.0, -1.0), std::invalid_argument);
}

TEST_CASE("kappa range and decomposition on the documented lattice", "[kernels]") {
  // lattice: a in {0.2, 1, 5}, r/a log-spaced in [0.02, 30].  Beyond
  // r/a ~ 36 the strict bound kappa < 1/r stops being representable in
  // doubles (exp(-r/a) drops below one ulp), below ~0.02 the split form
  // 1/r - exp(-r/a)/r loses the 1e-14 decomposition accuracy to cancellation.
  for (double a : {0.2, 1.0, 5.0}) {
    for (int i = 0; i <= 60; ++i) {
      const double x = 0.02 * std::pow(30.0 / 0.02, i / 60.0);
      const double r = x * a;
      const double v = kappa(a, r);
      CHECK(v > 0.0);
      CHECK(v < 1.0 / r);
      CHECK(v < 1.0 / a);
      const double split = kappa(0.0, r) - std::exp(-r / a) / r;
      CHECK(std::abs(v - split) / v < 1e-14);
    }
  }
}

TEST_CASE("kappa is strictly decreasing in a", "[kernels]") {
  for (double r : {0.05, 0.7, 3.0}) {
    double prev = kappa(0.0, r);  // the a -> 0 limit dominates
    for (double a = r / 25.0; a < 30.0; a *= 1.4) {
      const double v = kappa(a, r);
      CHECK(v < prev);
      prev = v;
    }
  }
}

TEST_CASE("coulomb truncated transform matches its closed form over 6 decades", "[kernels]") {
  const KernelSpec spec{KernelKind::coulomb, 0.0, 1.0};
  // k log-spaced in [1e-3, 1e3]; points with 1 - cos(kT) near zero carry no
  // relative scale and are excluded from the relative comparison
  for (int i = 0; i <= 60; ++i) {
    const double k = 1e-3 * std::pow(1e6, i / 60.0);
    const double closed = 4.0 * std::numbers::pi * (1.0 - std::cos(k * spec.T)) / (k * k);
    if (std::abs(1.0 - std::cos(k * spec.T)) < 0.1) continue;
    CHECK(std::abs(truncated_ft(spec, k) - closed) <= 1e-12 * std::abs(closed));
  }
  CHECK(truncated_ft(spec, std::numbers::pi) == Catch::Approx(8.0 / std::numbers::pi).epsilon(1e-13));
  CHECK(truncated_ft(spec, 0.0) == Catch::Approx(2.0 * std::numbers::pi).epsilon(1e-13));
}

TEST_CASE("bopp_podolsky transform against an independent quadrature oracle", "[kernels]") {
  const KernelSpec spec{KernelKind::bopp_podolsky, 1.0, 4.0};
  for (double k : {0.3, 1.0, 2.7, 9.0}) {
    const double oracle =
        4.0 * std::numbers::pi / k *
        oracles::integrate([&](double r) { return std::sin(k * r) * (-std::expm1(-r)); }, 0.0,
                           spec.T, 1e-14);
    CHECK(std::abs(truncated_ft(spec, k) - oracle) < 1e-10);
  }
}

TEST_CASE("pure exponential transform against the oracle at random k", "[kernels]") {
  const KernelSpec spec{KernelKind::pure_exponential, 1.0, 6.0};
  std::uint64_t state = 42;
  for (int trial = 0; trial < 10; ++trial) {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    const double k = 0.1 + double(state >> 40) / double(1 << 24) * 12.0;
    const double oracle =
        4.0 * std::numbers::pi / k *
        oracles::integrate([&](double r) { return std::sin(k * r) * r * std::exp(-r); }, 0.0,
                           spec.T, 1e-14);
    CHECK(std::abs(truncated_ft(spec, k) - oracle) < 1e-10);
  }
}

TEST_CASE("multiplier_table entries and preconditions", "[kernels]") {
  const Grid g = make_grid(16, 4.0);
  const double T = default_truncation(g);
  const auto table = multiplier_table(g, KernelSpec{KernelKind::coulomb, 0.0, T});
  CHECK((*table)[0] == Catch::Approx(2.0 * std::numbers::pi * T * T).epsilon(1e-12));
  CHECK(table->size() == fft::spectrum_size(32));

  // the same object comes back from the cache
  const auto again = multiplier_table(g, KernelSpec{KernelKind::coulomb, 0.0, T});
  CHECK(table.get() == again.get());

  CHECK_THROWS_AS(multiplier_table(g, KernelSpec{KernelKind::coulomb, 0.0, g.L}),
                  std::invalid_argument);

  // spot check entries against truncated_ft at the padded wavenumbers
  const Grid pg = make_grid(32, 8.0);
  const KernelSpec bp{KernelKind::bopp_podolsky, 0.7, T};
  const auto tb = multiplier_table(g, bp);
  std::size_t flat = 0;
  const int np = 32, nz = 17;
  for (int i = 0; i < np && flat < tb->size(); ++i)
    for (int j = 0; j < np; ++j)
      for (int l = 0; l < nz; ++l, ++flat) {
        if ((i * 7 + j * 3 + l) % 997 != 0) continue;
        const double kx = pg.wavenumbers[i], ky = pg.wavenumbers[j], kz = pg.wavenumbers[l];
        const double k = std::sqrt(kx * kx + ky * ky + kz * kz);
        CHECK((*tb)[flat] == Catch::Approx(truncated_ft(bp, k)).margin(1e-12));
      }
}

TEST_CASE("kernel spec validation", "[kernels]") {
  CHECK_THROWS_AS(truncated_ft(KernelSpec{KernelKind::bopp_podolsky, 0.0, 1.0}, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(truncated_ft(KernelSpec{KernelKind::coulomb, 0.0, 0.0}, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(truncated_ft(KernelSpec{KernelKind::coulomb, 0.0, 1.0}, -1.0),
                  std::invalid_argument);
}
