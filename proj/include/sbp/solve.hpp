#pragma once

// Constrained minimization of J_a over the mass sphere S_rho.
//
// minimize        projected Sobolev-gradient descent with Armijo
//                 backtracking; retraction = renormalization to S_rho.
// riesz_iterate   fixed point u <- (-lap + omega0)^{-1} [ u|u|^{p-2}
//                 - phi_a^u u + (omega0 - omega(u)) u ], renormalized.
// nls_ground_state  the same descent with the nonlocal term dropped.
//
// Stopping: L2 norm of the tangential gradient g - (<g,u>/rho^2) u below
// tol.  Results are canonicalized by sign (positive mean) and recentered at
// the density's center of mass.

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbp/energy.hpp"
#include "sbp/field_io.hpp"
#include "sbp/profile.hpp"

namespace sbp {

struct InitSpec {
  enum class Kind { gaussian, file, perturbed, field };
  Kind kind = Kind::gaussian;
  double sigma = 0.0;          // gaussian/perturbed width; 0 = mass-scaling heuristic
  std::string path;            // file
  std::uint64_t seed = 0;      // perturbed
  double amplitude = 0.0;      // perturbed noise amplitude
  std::optional<Field> field;  // direct initial state (warm starts)
};

struct SolverConfig {
  double tol = 1e-8;
  int max_iter = 20000;
  bool precondition = true;
  double precond_shift = 1.0;  // shift s in (s + |k|^2)^{-1}; 0 tracks the multiplier estimate
  double step0 = 0.5;
  double backtrack = 0.5;
  double armijo = 1e-4;
  InitSpec init;
};

inline void validate(const SolverConfig& c) {
  if (!(c.tol > 0.0)) throw std::invalid_argument("SolverConfig: tol must be positive");
  if (c.max_iter < 1) throw std::invalid_argument("SolverConfig: max_iter must be >= 1");
  if (!(c.backtrack > 0.0 && c.backtrack < 1.0))
    throw std::invalid_argument("SolverConfig: backtrack must lie in ]0,1[");
  if (!(c.armijo > 0.0)) throw std::invalid_argument("SolverConfig: armijo must be positive");
  if (!(c.step0 > 0.0)) throw std::invalid_argument("SolverConfig: step0 must be positive");
  if (!(c.precond_shift >= 0.0))
    throw std::invalid_argument("SolverConfig: precond_shift must be nonnegative");
}

struct HistoryEntry {
  int iter = 0;
  double energy = 0.0;
  double residual = 0.0;
};

struct MinimizeResult {
  Field u;
  EnergyBreakdown energy;
  double omega = 0.0;
  double residual = 0.0;
  int iters = 0;
  std::vector<HistoryEntry> history;
  bool converged = false;
  double h1_sup = 0.0;     // sup over iterates of ||u||_{H1}^2
  double c_rho_fit = 0.0;  // largest C with J + C rho^2 >= C ||u||_{H1}^2 along the run
};

class SolverDivergence : public std::runtime_error {
 public:
  SolverDivergence(const std::string& msg, std::vector<HistoryEntry> hist)
      : std::runtime_error(msg), history(std::move(hist)) {}
  std::vector<HistoryEntry> history;
};

namespace detail {

inline Field normalized_to_mass(Field u, double rho) {
  const double m = lp_norm(u, 2.0);
  if (!(m > 0.0) || !std::isfinite(m))
    throw std::invalid_argument("cannot normalize a zero or non-finite field");
  const double s = rho / m;
  for (double& v : u.values) v *= s;
  return u;
}

// Mass-scaling heuristic for the initial width: the limiting semilinear
// profile contracts like rho^beta with beta = -(2p-4)/(10-3p).
inline double heuristic_sigma(const Grid& g, double rho, double p) {
  const double beta = -(2.0 * p - 4.0) / (10.0 - 3.0 * p);
  const double w = 3.0 * std::pow(rho, beta);
  return std::clamp(w, 4.0 * g.dx, g.L / 8.0);
}

// splitmix64 + Box-Muller; self-contained so runs are bit reproducible.
struct NormalRng {
  std::uint64_t state;
  explicit NormalRng(std::uint64_t seed) : state(seed) {}
  double uniform() {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    z = z ^ (z >> 31);
    return double(z >> 11) * 0x1.0p-53 + 0x1.0p-54;
  }
  double normal() {
    const double u1 = uniform(), u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }
};

inline Field init_field(const Grid& g, double rho, double p, const InitSpec& init) {
  switch (init.kind) {
    case InitSpec::Kind::field: {
      if (!init.field) throw std::invalid_argument("init: no field supplied");
      require_same_grid(g, init.field->grid, "init");
      return normalized_to_mass(*init.field, rho);
    }
    case InitSpec::Kind::file: {
      auto loaded = io::read_field(init.path);
      require_same_grid(g, loaded.field.grid, "init file");
      return normalized_to_mass(std::move(loaded.field), rho);
    }
    case InitSpec::Kind::gaussian: {
      const double sigma = init.sigma > 0.0 ? init.sigma : heuristic_sigma(g, rho, p);
      return normalized_to_mass(sample(g, gaussian_profile(rho, sigma)), rho);
    }
    case InitSpec::Kind::perturbed: {
      const double sigma = init.sigma > 0.0 ? init.sigma : heuristic_sigma(g, rho, p);
      Field base = sample(g, gaussian_profile(rho, sigma));
      NormalRng rng(init.seed * 0x9e3779b97f4a7c15ull + 1);
      Field noise = make_field(g);
      for (double& v : noise.values) v = rng.normal();
      // low-pass so the perturbation is resolved on the grid
      const double sf = std::max(2.0 * g.dx, sigma / 4.0);
      noise = apply_spectral_multiplier(noise, [sf](double kx, double ky, double kz) {
        return std::exp(-0.5 * sf * sf * (kx * kx + ky * ky + kz * kz));
      });
      double peak = 0.0;
      for (double v : noise.values) peak = std::max(peak, std::abs(v));
      if (peak > 0.0)
        for (std::size_t j = 0; j < base.values.size(); ++j)
          base.values[j] *= 1.0 + init.amplitude * noise.values[j] / peak;
      return normalized_to_mass(std::move(base), rho);
    }
  }
  throw std::logic_error("init: unknown kind");
}

struct RunAccumulator {
  std::vector<HistoryEntry> history;
  double h1_sup = 0.0;
  double c_fit = std::numeric_limits<double>::infinity();
  void record(int iter, const EnergyBreakdown& J, double res, double rho) {
    history.push_back({iter, J.total, res});
    const double gsq = 2.0 * J.kinetic;
    h1_sup = std::max(h1_sup, gsq + rho * rho);
    if (gsq > 0.0) c_fit = std::min(c_fit, J.total / gsq);
  }
};

inline void finalize(MinimizeResult& out, const Grid& g, const EnergyModel& model,
                     const RunAccumulator& acc, Field u) {
  const double rho = model.params.rho;
  double mean = 0.0;
  for (double v : u.values) mean += v;
  if (mean < 0.0)
    for (double& v : u.values) v = -v;
  u = normalized_to_mass(recenter(u), rho);
  const auto st = eval_state(g, model, std::move(u));
  Field grad = gradient_from_state(st, model);
  const double gu = inner_l2(grad, st.u);
  for (std::size_t j = 0; j < grad.values.size(); ++j)
    grad.values[j] -= gu / (rho * rho) * st.u.values[j];
  out.u = st.u;
  out.energy = st.J;
  out.omega = multiplier_from_breakdown(st.J, model.params, rho);
  out.residual = lp_norm(grad, 2.0);
  out.history = acc.history;
  out.h1_sup = acc.h1_sup;
  out.c_rho_fit = std::isfinite(acc.c_fit) ? acc.c_fit : 0.0;
}

inline void require_solver_params(const Params& params) {
  validate(params);
  if (params.p == 3.0)
    throw std::invalid_argument("solver: p = 3 is excluded for solver targets");
}

inline MinimizeResult minimize_model(const Grid& g, const EnergyModel& model,
                                     const SolverConfig& cfg) {
  require_solver_params(model.params);
  validate(cfg);
  const double rho = model.params.rho;
  Field u = init_field(g, rho, model.params.p, cfg.init);
  auto st = eval_state(g, model, std::move(u));

  RunAccumulator acc;
  MinimizeResult out;
  double step = cfg.step0;
  int iter = 0;
  for (;; ++iter) {
    Field grad = gradient_from_state(st, model);
    const double gu = inner_l2(grad, st.u);
    Field gt = grad;
    for (std::size_t j = 0; j < gt.values.size(); ++j)
      gt.values[j] -= gu / (rho * rho) * st.u.values[j];
    const double res = lp_norm(gt, 2.0);
    if (!std::isfinite(res) || !std::isfinite(st.J.total))
      throw SolverDivergence("minimize: non-finite energy or residual", acc.history);
    acc.record(iter, st.J, res, rho);
    if (res <= cfg.tol) {
      out.converged = true;
      break;
    }
    if (iter >= cfg.max_iter) break;

    Field dir = gt;
    if (cfg.precondition) {
      const double shift = cfg.precond_shift > 0.0
                               ? cfg.precond_shift
                               : std::max(1e-6, std::abs(multiplier_from_breakdown(
                                                     st.J, model.params, rho)));
      dir = apply_spectral_multiplier(gt, [shift](double kx, double ky, double kz) {
        return 1.0 / (shift + kx * kx + ky * ky + kz * kz);
      });
    }
    double slope = inner_l2(gt, dir);
    if (!(slope > 0.0)) {
      dir = gt;  // preconditioner lost positivity numerically; fall back
      slope = res * res;
    }

    bool accepted = false;
    double s = step;
    while (s > 1e-18 * cfg.step0) {
      Field cand = st.u;
      for (std::size_t j = 0; j < cand.values.size(); ++j) cand.values[j] -= s * dir.values[j];
      cand = normalized_to_mass(std::move(cand), rho);
      auto cst = eval_state(g, model, std::move(cand));
      if (std::isfinite(cst.J.total) &&
          cst.J.total <= st.J.total - cfg.armijo * s * slope) {
        st = std::move(cst);
        accepted = true;
        break;
      }
      s *= cfg.backtrack;
    }
    if (!accepted) break;  // line search exhausted; report the last iterate
    step = std::min(s / cfg.backtrack, 1e6);
  }
  out.iters = iter;
  finalize(out, g, model, acc, std::move(st.u));
  return out;
}

}  // namespace detail

inline MinimizeResult minimize(const Grid& g, const Params& params, const SolverConfig& cfg) {
  return detail::minimize_model(g, detail::EnergyModel{params, true}, cfg);
}

inline MinimizeResult nls_ground_state(const Grid& g, double rho, double p,
                                       const SolverConfig& cfg) {
  Params params{0.0, rho, p};
  return detail::minimize_model(g, detail::EnergyModel{params, false}, cfg);
}

// Fixed-point iteration through the Riesz map (-lap + omega0), omega0 > 0;
// each step is renormalized to S_rho.  Same stopping contract as minimize.
inline MinimizeResult riesz_iterate(const Grid& g, const Params& params,
                                    const SolverConfig& cfg, double omega0) {
  detail::require_solver_params(params);
  validate(cfg);
  if (!(omega0 > 0.0))
    throw std::invalid_argument("riesz_iterate: omega0 must be positive");
  const detail::EnergyModel model{params, true};
  const double rho = params.rho;
  Field u = detail::init_field(g, rho, params.p, cfg.init);
  auto st = detail::eval_state(g, model, std::move(u));

  detail::RunAccumulator acc;
  MinimizeResult out;
  const double pm1 = params.p - 1.0;
  int iter = 0;
  for (;; ++iter) {
    Field grad = detail::gradient_from_state(st, model);
    const double gu = inner_l2(grad, st.u);
    Field gt = grad;
    for (std::size_t j = 0; j < gt.values.size(); ++j)
      gt.values[j] -= gu / (rho * rho) * st.u.values[j];
    const double res = lp_norm(gt, 2.0);
    if (!std::isfinite(res) || !std::isfinite(st.J.total))
      throw SolverDivergence("riesz_iterate: non-finite energy or residual", acc.history);
    acc.record(iter, st.J, res, rho);
    if (res <= cfg.tol) {
      out.converged = true;
      break;
    }
    if (iter >= cfg.max_iter) break;

    const double omega = detail::multiplier_from_breakdown(st.J, params, rho);
    Field rhs = st.u;
    for (std::size_t j = 0; j < rhs.values.size(); ++j) {
      const double uv = st.u.values[j];
      rhs.values[j] = std::copysign(std::pow(std::abs(uv), pm1), uv) -
                      st.phi.values[j] * uv + (omega0 - omega) * uv;
    }
    Field next = apply_spectral_multiplier(rhs, [omega0](double kx, double ky, double kz) {
      return 1.0 / (omega0 + kx * kx + ky * ky + kz * kz);
    });
    st = detail::eval_state(g, model, detail::normalized_to_mass(std::move(next), rho));
  }
  out.iters = iter;
  detail::finalize(out, g, model, acc, std::move(st.u));
  return out;
}

}  // namespace sbp
