#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "sbp/rescale.hpp"

using namespace sbp;

namespace {
const Grid& grid64() {
  static const Grid g = make_grid(64, 12.0);
  return g;
}
}  // namespace

TEST_CASE("profile rescaling acts on amplitude and width", "[rescale]") {
  const Profile pr = gaussian_profile(1.0, 1.0);

  const Profile same = rescale(pr, 0.7, 1.0);
  CHECK(same.amplitude == pr.amplitude);
  CHECK(same.sigma == pr.sigma);

  const Profile amp = rescale(pr, 0.0, 2.0);
  CHECK(amp.amplitude == Catch::Approx(2.0 * pr.amplitude));
  CHECK(amp.sigma == pr.sigma);
  CHECK(lp_norm(sample(grid64(), amp), 2.0) ==
        Catch::Approx(2.0 * lp_norm(sample(grid64(), pr), 2.0)).epsilon(1e-12));

  const Profile rs = rescale(gaussian_profile(1.0, 1.0), 2.0 / 3.0, 2.0);
  CHECK(rs.amplitude == Catch::Approx(gaussian_profile(1.0, 1.0).amplitude));  // 2^0
  CHECK(rs.sigma == Catch::Approx(std::pow(2.0, 2.0 / 3.0)));
  CHECK(lp_norm(sample(grid64(), rs), 2.0) == Catch::Approx(2.0).margin(1e-8));

  CHECK_THROWS_AS(rescale(pr, 0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(rescale(pr, 0.5, -1.0), std::invalid_argument);
}

TEST_CASE("tabulated profiles rescale like gaussians", "[rescale]") {
  // tabulate a gaussian and compare the two rescaling paths
  std::vector<double> nodes, vals;
  const Profile ref = gaussian_profile(1.0, 1.0);
  for (int i = 0; i <= 4000; ++i) {
    nodes.push_back(i * 0.005);
    vals.push_back(ref(nodes.back()));
  }
  const Profile tab = tabulated_profile(nodes, vals);
  const Profile t1 = rescale(tab, 0.5, 1.3);
  const Profile g1 = rescale(ref, 0.5, 1.3);
  for (double r : {0.0, 0.4, 1.1, 2.7}) CHECK(t1(r) == Catch::Approx(g1(r)).margin(1e-5));
}

TEST_CASE("scaling laws for mass, kinetic term and Lp norm", "[rescale]") {
  const Grid& g = grid64();
  const Profile pr = gaussian_profile(1.0, 1.0);
  const Field base = sample(g, pr);
  const double m0 = lp_norm(base, 2.0);
  const double g0 = grad_norm_sq(base);
  const double p = 2.5;
  const double p0 = std::pow(lp_norm(base, p), p);

  for (double beta : {-1.0, -0.5, 0.0, 0.5, 1.0})
    for (double theta : {0.85, 1.15}) {
      const double sig = std::pow(theta, beta);
      if (sig < 4.0 * g.dx || sig > g.L / 8.0) continue;  // clamp per the box rule
      const Field rs = sample(g, rescale(pr, beta, theta));
      CHECK(lp_norm(rs, 2.0) == Catch::Approx(theta * m0).epsilon(1e-8));
      CHECK(grad_norm_sq(rs) ==
            Catch::Approx(std::pow(theta, 2.0 - 2.0 * beta) * g0).epsilon(1e-6));
      const double q = (1.0 - 1.5 * beta) * p + 3.0 * beta;
      CHECK(std::pow(lp_norm(rs, p), p) ==
            Catch::Approx(std::pow(theta, q) * p0).epsilon(1e-6));
    }
}

TEST_CASE("h_beta basics", "[rescale]") {
  const Grid& g = grid64();
  const Profile pr = gaussian_profile(1.0, 1.0);
  const Params params{1.0, 1.0, 2.5};

  CHECK(h_beta(g, pr, params, 0.7, 1.0) == 0.0);

  // beta = 0: the kinetic contribution cancels, h = nonlocal + Lp parts
  const double theta = 1.2;
  const oracles::Gaussian go{1.0, 1.0};
  const double D_theta =  // D_a(u_{0,theta}) = theta^4 D_a(u) at beta = 0
      std::pow(theta, 4.0) *
      oracles::gaussian_pair_coupling(go, [](double r) { return -std::expm1(-r) / r; });
  const double D_base =
      oracles::gaussian_pair_coupling(go, [](double r) { return -std::expm1(-r) / r; });
  const double P = oracles::gaussian_lq_q(go, 2.5);
  const double q0 = 2.5;  // (1 - 0) p + 0
  const double expected = 0.25 * (D_theta - theta * theta * D_base) -
                          (std::pow(theta, q0) - theta * theta) * P / 2.5;
  CHECK(h_beta(g, pr, params, 0.0, theta) == Catch::Approx(expected).margin(1e-6));

  // box-too-small guard: a wide rescaling must be rejected
  CHECK_THROWS_AS(h_beta(g, pr, params, -4.0, 0.5), std::domain_error);
}

TEST_CASE("h_beta matches the displayed expansion at (2/3, 1.1)", "[rescale]") {
  const Grid& g = grid64();
  const Profile pr = gaussian_profile(1.0, 1.0);
  const Params params{1.0, 1.0, 2.5};
  const double beta = 2.0 / 3.0, theta = 1.1;

  const oracles::Gaussian go{1.0, 1.0};
  const double G = oracles::gaussian_grad_sq(go);
  const double D = oracles::gaussian_pair_coupling(go, [](double r) { return -std::expm1(-r) / r; });
  // C(theta) = int int kappa_a(theta^beta (y-x)) u^2 u^2 via the Maxwell oracle
  const double tb = std::pow(theta, beta);
  const double C = oracles::gaussian_pair_coupling(
      go, [&](double r) { return -std::expm1(-tb * r) / (tb * r); });
  const double P = oracles::gaussian_lq_q(go, 2.5);
  const double q = (1.0 - 1.5 * beta) * params.p + 3.0 * beta;

  const double expected = 0.5 * (std::pow(theta, 2.0 - 2.0 * beta) - theta * theta) * G +
                          0.25 * (std::pow(theta, 4.0) * C - theta * theta * D) -
                          (std::pow(theta, q) - theta * theta) * P / params.p;
  CHECK(h_beta(g, pr, params, beta, theta) == Catch::Approx(expected).margin(1e-6));
}

TEST_CASE("h_beta_prime_at_1 closed form", "[rescale]") {
  const Grid& g = grid64();
  const Profile pr = gaussian_profile(1.0, 1.0);
  const Field u = sample(g, pr);

  // beta = 0 reduces to D_a/2 - ((p-2)/p) ||u||_p^p
  const Params params{1.0, 1.0, 2.5};
  const double D = coupling(g, u, 1.0);
  const double P = std::pow(lp_norm(u, 2.5), 2.5);
  CHECK(h_beta_prime_at_1(g, u, params, 0.0) ==
        Catch::Approx(0.5 * D - (params.p - 2.0) / params.p * P).epsilon(1e-12));

  // centered differences at the example point (a, p, beta) = (1, 2.5, 0.5)
  {
    const double beta = 0.5, d = 1e-3;
    const double closed = h_beta_prime_at_1(g, u, params, beta);
    const double fd =
        (h_beta(g, pr, params, beta, 1.0 + d) - h_beta(g, pr, params, beta, 1.0 - d)) / (2.0 * d);
    CHECK(std::abs(closed - fd) / std::abs(closed) < 1e-4);
  }

  // and uniformly over a small (beta, a, p) lattice
  for (double beta : {-0.5, 0.25, 0.75})
    for (double a : {0.5, 2.0})
      for (double p : {2.3, 3.1}) {
        const Params prm{a, 1.0, p};
        const double d = 1e-3;
        const double closed = h_beta_prime_at_1(g, u, prm, beta);
        const double fd =
            (h_beta(g, pr, prm, beta, 1.0 + d) - h_beta(g, pr, prm, beta, 1.0 - d)) / (2.0 * d);
        CHECK(std::abs(closed - fd) / std::max(1e-10, std::abs(closed)) < 1e-4);
      }

  CHECK_THROWS_AS(h_beta_prime_at_1(g, u, Params{0.0, 1.0, 2.5}, 0.5), std::invalid_argument);
}

TEST_CASE("h prime is negative on negative-energy states in the concentration window",
          "[rescale]") {
  // on a small box a tight gaussian at large mass has J_a < 0; beta = -2 lies
  // in the admissible window for p = 3.2 and the closed form must be negative
  const Grid g = make_grid(48, 0.05);
  const Params params{1.0, 26.0, 3.2};
  const Field u = sample(g, gaussian_profile(26.0, 0.004));
  REQUIRE(energy(g, u, params).total < 0.0);
  CHECK(h_beta_prime_at_1(g, u, params, -2.0) < 0.0);
}

TEST_CASE("nonlocal rescaling inequality and equality route", "[rescale]") {
  const Grid& g = grid64();
  const Profile pr = gaussian_profile(1.0, 1.0);

  {
    const auto chk = nonlocal_rescaling_check(g, pr, 1.0, 0.5, 1.0);
    CHECK(chk.lhs <= chk.rhs + 1e-8 * chk.rhs);
    CHECK(chk.lhs == Catch::Approx(chk.lhs_scaled_kernel).epsilon(1e-8));
  }

  {
    // (a, beta, theta) = (1, 1, 2): lhs <= 2^3 D_0(u), both sides from oracles
    const auto chk = nonlocal_rescaling_check(g, pr, 1.0, 1.0, 2.0);
    const oracles::Gaussian go{1.0, 1.0};
    const double d0_oracle =
        oracles::gaussian_pair_coupling(go, [](double r) { return 1.0 / r; });
    CHECK(chk.rhs == Catch::Approx(8.0 * d0_oracle).epsilon(1e-6));
    // lhs oracle: theta^4 rho^4 E[kappa_a(theta^beta R)] at mass 1
    const double lhs_oracle =
        16.0 * oracles::gaussian_pair_coupling(
                   go, [](double r) { return -std::expm1(-2.0 * r) / (2.0 * r); });
    CHECK(chk.lhs == Catch::Approx(lhs_oracle).epsilon(1e-6));
    CHECK(chk.lhs <= chk.rhs);
    CHECK(chk.lhs == Catch::Approx(chk.lhs_scaled_kernel).epsilon(1e-8));
  }

  for (double beta : {-0.5, 0.5})
    for (double theta : {0.9, 1.2}) {
      const auto chk = nonlocal_rescaling_check(g, pr, 0.7, beta, theta);
      CHECK(chk.lhs <= chk.rhs + 1e-8 * chk.rhs);
      CHECK(chk.lhs == Catch::Approx(chk.lhs_scaled_kernel).epsilon(1e-8));
    }

  CHECK_THROWS_AS(nonlocal_rescaling_check(g, pr, 0.0, 0.5, 1.1), std::invalid_argument);
  CHECK_THROWS_AS(nonlocal_rescaling_check(g, pr, 1.0, -4.0, 0.5), std::domain_error);
}
