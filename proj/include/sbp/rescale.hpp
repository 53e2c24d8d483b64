#pragma once

// The fiber function along the mass-scaling path,
//   h_beta(theta) = J_a(u_{beta,theta}) - theta^2 J_a(u),
// its derivative at theta = 1 in closed form, and the two-route check of
// the nonlocal rescaling identity
//   D_a(u_{beta,theta}) = theta^4 int [u^2 * kappa_a(theta^beta .)] u^2
//                       <= theta^(4-beta) D_0(u).
//
// Note on exponents: ||u_{beta,theta}||_p^p = theta^((1-3beta/2)p+3beta) ||u||_p^p
// by direct change of variables; the derivative coefficient at theta = 1 is
// (1-3beta/2)p + 3beta - 2 once the theta^2 subtraction is included.  Both
// are verified against finite differences in the tests.

#include <cmath>
#include <stdexcept>

#include "sbp/energy.hpp"
#include "sbp/profile.hpp"

namespace sbp {

inline double h_beta(const Grid& g, const Profile& pr, const Params& params, double beta,
                     double theta) {
  validate(params);
  if (!(theta > 0.0)) throw std::invalid_argument("h_beta: theta must be positive");
  require_fits_box(pr, g);
  const Profile scaled = rescale(pr, beta, theta);
  require_fits_box(scaled, g);
  const double J0 = energy(g, sample(g, pr), params).total;
  const double J1 = energy(g, sample(g, scaled), params).total;
  return J1 - theta * theta * J0;
}

// (h_beta)'(1) = -beta ||grad u||^2
//              + 1/4 [ (beta/a) E_a(u) + (2-beta) D_a(u) ]
//              - (1/p) [ (1-3beta/2)p + 3beta - 2 ] ||u||_p^p
inline double h_beta_prime_at_1(const Grid& g, const Field& u, const Params& params,
                                double beta) {
  validate(params);
  if (!(params.a > 0.0))
    throw std::invalid_argument("h_beta_prime_at_1: requires a > 0");
  const double G = grad_norm_sq(u);
  const double D = coupling(g, u, params.a);
  const double E = exp_coupling(g, u, params.a);
  const double P = std::pow(lp_norm(u, params.p), params.p);
  const double lp_coeff = (1.0 - 1.5 * beta) * params.p + 3.0 * beta - 2.0;
  return -beta * G + 0.25 * ((beta / params.a) * E + (2.0 - beta) * D) -
         lp_coeff * P / params.p;
}

struct RescalingCheck {
  double lhs = 0.0;                // D_a(u_{beta,theta}) via solve_phi
  double rhs = 0.0;                // theta^(4-beta) D_0(u), the upper bound
  double lhs_scaled_kernel = 0.0;  // equality route via the scaled kernel
};

// The scaled kernel obeys kappa_a(theta^beta r) = theta^(-beta) kappa_a'(r)
// with a' = a theta^(-beta), so the equality route is
//   theta^4 int [u^2 * kappa_a(theta^beta .)] u^2 = theta^(4-beta) D_{a'}(u).
inline RescalingCheck nonlocal_rescaling_check(const Grid& g, const Profile& pr, double a,
                                               double beta, double theta) {
  if (!(theta > 0.0)) throw std::invalid_argument("nonlocal_rescaling_check: theta must be positive");
  if (!(a > 0.0)) throw std::invalid_argument("nonlocal_rescaling_check: a must be positive");
  require_fits_box(pr, g);
  const Profile scaled = rescale(pr, beta, theta);
  require_fits_box(scaled, g);
  const Field base = sample(g, pr);
  RescalingCheck out;
  out.lhs = coupling(g, sample(g, scaled), a);
  const double factor = std::pow(theta, 4.0 - beta);
  out.rhs = factor * coupling(g, base, 0.0);
  out.lhs_scaled_kernel = factor * coupling(g, base, a * std::pow(theta, -beta));
  return out;
}

}  // namespace sbp
