#pragma once

// Theory-check layer: beta windows, trial-scaling thresholds, rho- and
// a-sweeps with verdicts, radiality diagnostics, and the multiplier-limit
// experiment against the limiting semilinear ground state.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbp/energy.hpp"
#include "sbp/profile.hpp"
#include "sbp/rescale.hpp"
#include "sbp/solve.hpp"

namespace sbp {

enum class Regime { small_rho, large_rho };

inline const char* regime_name(Regime r) {
  return r == Regime::small_rho ? "small_rho" : "large_rho";
}

struct BetaWindow {
  Regime regime = Regime::small_rho;
  double p = 0.0;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  bool nonempty = false;
};

// Admissible beta for the trial-scaling sign argument.  With
// q(beta) = (1 - 3 beta/2) p + 3 beta, the small-rho regime needs
//   0 < q < min(4 - beta, 2 - 2 beta)
// and the large-rho regime needs
//   q > max(4 - beta, 2 - 2 beta, 0).
// The window is assembled directly from the three linear-in-beta
// inequalities (and cross-checked against a dense beta scan in the tests).
inline BetaWindow beta_window(double p, Regime regime) {
  BetaWindow w;
  w.regime = regime;
  w.p = p;
  const double inf = std::numeric_limits<double>::infinity();
  double lo = -inf, hi = inf;
  // q vs 4 - beta: p - 4 + beta (4 - 1.5 p) compared with 0
  const double c1 = 4.0 - 1.5 * p;
  // q vs 2 - 2 beta: p - 2 + beta (5 - 1.5 p) compared with 0 (5 - 1.5p > 0 here)
  const double b2 = (4.0 - 2.0 * p) / (10.0 - 3.0 * p);
  // q vs 0: p + beta (3 - 1.5 p) compared with 0 (3 - 1.5p < 0 for p > 2)
  const double b3 = 2.0 * p / (3.0 * p - 6.0);
  if (regime == Regime::small_rho) {
    if (!(p > 2.0 && p < 3.0))
      throw std::invalid_argument("beta_window: small_rho regime requires 2 < p < 3");
    if (c1 > 0.0)
      hi = std::min(hi, (8.0 - 2.0 * p) / (8.0 - 3.0 * p));
    else if (c1 < 0.0)
      lo = std::max(lo, (2.0 * p - 8.0) / (3.0 * p - 8.0));
    hi = std::min(hi, b2);
    hi = std::min(hi, b3);
  } else {
    if (!(p > 3.0 && p < 10.0 / 3.0))
      throw std::invalid_argument("beta_window: large_rho regime requires 3 < p < 10/3");
    // all three inequalities reversed
    if (c1 > 0.0)
      lo = std::max(lo, (8.0 - 2.0 * p) / (8.0 - 3.0 * p));
    else if (c1 < 0.0)
      hi = std::min(hi, (2.0 * p - 8.0) / (3.0 * p - 8.0));
    lo = std::max(lo, b2);
    hi = std::min(hi, b3);
  }
  w.lower = lo;
  w.upper = hi;
  w.nonempty = lo < hi;
  return w;
}

// Root in rho of the bracketed trial energy for a unit-mass profile:
//   small_rho:  rho^alpha (G/2 + D0/4) = P/p,  alpha = min(4-b, 2-2b) - q
//   large_rho:  G/2 + D0/4 = rho^alpha P/p,    alpha = q - max(4-b, 2-2b)
// The certified sign region is rho < min(R, 1) resp. rho > max(R, 1).
inline double trial_threshold(const Grid& g, const Profile& unit_mass_profile, double p,
                              double beta, Regime regime) {
  const BetaWindow w = beta_window(p, regime);
  if (!(w.lower < beta && beta < w.upper))
    throw std::domain_error("trial_threshold: beta outside the admissible window");
  const Field s = sample(g, unit_mass_profile);
  const double mass = lp_norm(s, 2.0);
  if (std::abs(mass - 1.0) > 1e-8)
    throw std::invalid_argument("trial_threshold: profile must have unit mass on the grid");
  const double G = grad_norm_sq(s);
  const double D0 = coupling(g, s, 0.0);
  const double P = std::pow(lp_norm(s, p), p);
  const double q = (1.0 - 1.5 * beta) * p + 3.0 * beta;
  if (regime == Regime::small_rho) {
    const double alpha = std::min(4.0 - beta, 2.0 - 2.0 * beta) - q;
    return std::pow((P / p) / (0.5 * G + 0.25 * D0), 1.0 / alpha);
  }
  const double alpha = q - std::max(4.0 - beta, 2.0 - 2.0 * beta);
  return std::pow(p * (0.5 * G + 0.25 * D0) / P, 1.0 / alpha);
}

// Best certificate reachable by scanning beta over the window with a unit
// gaussian trial on a self-contained grid.  small_rho: returns the largest
// certified mass (sup over beta of min(R, 1)); large_rho: the smallest
// (inf over beta of max(R, 1)).
inline double certified_rho_bound(double p, Regime regime) {
  const Grid g = make_grid(64, 8.0);
  const Profile pr = gaussian_profile(1.0, 1.0);
  const BetaWindow w = beta_window(p, regime);
  double best = regime == Regime::small_rho ? 0.0 : std::numeric_limits<double>::infinity();
  for (int i = 1; i <= 160; ++i) {
    double beta;
    if (regime == Regime::small_rho) {
      beta = w.upper - 0.15 * i;  // window is a half line
      if (std::isfinite(w.lower) && beta <= w.lower) break;
    } else {
      beta = w.lower + (w.upper - w.lower) * i / 161.0;
    }
    const double R = trial_threshold(g, pr, p, beta, regime);
    if (regime == Regime::small_rho)
      best = std::max(best, std::min(R, 1.0));
    else
      best = std::min(best, std::max(R, 1.0));
  }
  return best;
}

// Recenter at the density's center of mass, then group grid points by the
// exact squared radius class (integer (r/dx)^2 after recentering) and
// measure the relative L2 distance to the per-class spherical averages.
inline double radiality_deviation(const Grid& g, const Field& u) {
  require_same_grid(g, u.grid, "radiality_deviation");
  const double mass = lp_norm(u, 2.0);
  if (!(mass > 0.0)) throw std::invalid_argument("radiality_deviation: zero field");
  const Field v = recenter(u);
  const int n = g.n;
  const int half = n / 2;
  const int smax = 3 * half * half;
  std::vector<double> sum(std::size_t(smax) + 1, 0.0);
  std::vector<std::int32_t> count(std::size_t(smax) + 1, 0);
  std::vector<std::int32_t> axis_sq(n);
  for (int i = 0; i < n; ++i) {
    const long j = std::lround(g.coords[i] / g.dx);
    axis_sq[i] = std::int32_t(j * j);
  }
  std::size_t flat = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l, ++flat) {
        const int s = axis_sq[i] + axis_sq[j] + axis_sq[l];
        sum[s] += v.values[flat];
        count[s] += 1;
      }
  double dev = 0.0, tot = 0.0;
  flat = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l, ++flat) {
        const int s = axis_sq[i] + axis_sq[j] + axis_sq[l];
        const double d = v.values[flat] - sum[s] / count[s];
        dev += d * d;
        tot += v.values[flat] * v.values[flat];
      }
  return std::sqrt(dev / tot);
}

struct SweepOptions {
  double md_margin = 1e-6;      // relative margin for strict monotone decrease
  double subadd_margin = 1e-6;  // relative margin for strict subadditivity
  int threads = 1;
  bool validate_regime = true;
  double rho_match_tol = 1e-9;  // matching sqrt(rho^2 - mu^2) against the list
};

struct SweepRecord {
  double a = 0.0, rho = 0.0, p = 0.0;
  double J = 0.0, omega = 0.0, residual = 0.0;
  double h1_norm = 0.0, l125 = 0.0, l83 = 0.0, lp = 0.0;
  double radial_dev = 0.0;
  bool converged = false;
  std::string provenance;
};

struct RhoSweepVerdicts {
  bool all_negative = false;
  bool md_strict = false;
  bool subadd_strict = false;
  bool aborted = false;
  std::string note;
};

struct RhoSweepReport {
  std::vector<SweepRecord> records;
  std::vector<MinimizeResult> results;
  RhoSweepVerdicts verdicts;
};

namespace detail {

inline std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string provenance_hash(const Grid& g, const Params& prm, const SolverConfig& cfg) {
  std::string s = std::to_string(g.n) + "," + std::to_string(g.L) + "," + std::to_string(prm.a) +
                  "," + std::to_string(prm.rho) + "," + std::to_string(prm.p) + "," +
                  std::to_string(cfg.tol) + "," + std::to_string(cfg.max_iter) + "," +
                  std::to_string(cfg.precondition) + "," + std::to_string(cfg.step0);
  return fnv1a_hex(s);
}

inline SweepRecord record_from_result(const Grid& g, const Params& prm, const SolverConfig& cfg,
                                      const MinimizeResult& r) {
  SweepRecord rec;
  rec.a = prm.a;
  rec.rho = prm.rho;
  rec.p = prm.p;
  rec.J = r.energy.total;
  rec.omega = r.omega;
  rec.residual = r.residual;
  rec.h1_norm = std::sqrt(grad_norm_sq(r.u) + prm.rho * prm.rho);
  rec.l125 = lp_norm(r.u, 12.0 / 5.0);
  rec.l83 = lp_norm(r.u, 8.0 / 3.0);
  rec.lp = lp_norm(r.u, prm.p);
  rec.radial_dev = radiality_deviation(g, r.u);
  rec.converged = r.converged;
  rec.provenance = provenance_hash(g, prm, cfg);
  return rec;
}

// Run one minimize per parameter point, optionally in parallel; results are
// merged by index, so the report is identical for any thread count.
inline std::vector<MinimizeResult> run_points(const Grid& g, const std::vector<Params>& points,
                                              const SolverConfig& cfg, int threads) {
  std::vector<MinimizeResult> out(points.size());
  if (threads <= 1) {
    for (std::size_t i = 0; i < points.size(); ++i) out[i] = minimize(g, points[i], cfg);
    return out;
  }
  std::vector<std::future<MinimizeResult>> futs(points.size());
  std::size_t next = 0;
  while (next < points.size()) {
    const std::size_t batch = std::min<std::size_t>(threads, points.size() - next);
    for (std::size_t b = 0; b < batch; ++b)
      futs[next + b] = std::async(std::launch::async,
                                  [&, i = next + b] { return minimize(g, points[i], cfg); });
    for (std::size_t b = 0; b < batch; ++b) out[next + b] = futs[next + b].get();
    next += batch;
  }
  return out;
}

}  // namespace detail

inline RhoSweepReport sweep_rho(const Grid& g, double a, double p, std::vector<double> rhos,
                                const SolverConfig& cfg, const SweepOptions& opt = {}) {
  if (rhos.empty()) throw std::invalid_argument("sweep_rho: empty rho list");
  for (std::size_t i = 1; i < rhos.size(); ++i)
    if (!(rhos[i] > rhos[i - 1]))
      throw std::invalid_argument("sweep_rho: rhos must be strictly increasing");
  if (opt.validate_regime) {
    const Regime regime = p < 3.0 ? Regime::small_rho : Regime::large_rho;
    const double bound = certified_rho_bound(p, regime);
    if (regime == Regime::small_rho && rhos.back() > bound)
      throw std::domain_error("sweep_rho: rho " + std::to_string(rhos.back()) +
                              " exceeds the certified small-mass bound " + std::to_string(bound));
    if (regime == Regime::large_rho && rhos.front() < bound)
      throw std::domain_error("sweep_rho: rho " + std::to_string(rhos.front()) +
                              " is below the certified large-mass bound " + std::to_string(bound));
  }

  std::vector<Params> points;
  for (double rho : rhos) points.push_back(Params{a, rho, p});
  RhoSweepReport rep;
  rep.results = detail::run_points(g, points, cfg, opt.threads);
  for (std::size_t i = 0; i < points.size(); ++i) {
    rep.records.push_back(detail::record_from_result(g, points[i], cfg, rep.results[i]));
    if (!rep.results[i].converged) {
      rep.verdicts.aborted = true;
      rep.verdicts.note = "non-converged run at rho = " + std::to_string(points[i].rho);
      rep.records.resize(i + 1);
      rep.results.resize(i + 1);
      return rep;
    }
  }

  rep.verdicts.all_negative = true;
  for (const auto& r : rep.records) rep.verdicts.all_negative &= r.J < 0.0;

  rep.verdicts.md_strict = true;
  for (std::size_t i = 1; i < rep.records.size(); ++i) {
    const double prev = rep.records[i - 1].J / (rhos[i - 1] * rhos[i - 1]);
    const double cur = rep.records[i].J / (rhos[i] * rhos[i]);
    rep.verdicts.md_strict &= cur < prev - opt.md_margin * std::abs(prev);
  }

  rep.verdicts.subadd_strict = true;
  for (std::size_t i = 0; i < rhos.size(); ++i)
    for (std::size_t j = 0; j < rhos.size(); ++j) {
      if (!(rhos[j] < rhos[i])) continue;
      const double nu = std::sqrt(rhos[i] * rhos[i] - rhos[j] * rhos[j]);
      for (std::size_t k = 0; k < rhos.size(); ++k) {
        if (std::abs(rhos[k] - nu) > opt.rho_match_tol) continue;
        const double sum = rep.records[j].J + rep.records[k].J;
        rep.verdicts.subadd_strict &=
            rep.records[i].J < sum - opt.subadd_margin * (std::abs(rep.records[j].J) +
                                                          std::abs(rep.records[k].J));
      }
    }
  return rep;
}

struct AToZeroRow {
  SweepRecord base;
  double gap_J = 0.0;         // J_{0,rho} - J_{a,rho}
  double du_h1 = 0.0;         // ||u_a - u_0||_{H1} after recentering
  double dphi_d12 = 0.0;      // ||grad(phi_a - phi_0)||_2
  double a_lap_phi_l2 = 0.0;  // a ||lap phi_a||_2
  double domega = 0.0;        // |omega_a - omega_0|
  double f_a = 0.0;           // D_0(u_a) - D_a(u_a)
  double f_a_bound = 0.0;     // 4 pi a |log a| ||u||_{8/3}^4 + K a ||u||_{12/5}^4
};

struct AToZeroReport {
  SweepRecord reference;  // the a = 0 solve
  std::vector<AToZeroRow> rows;
  double measured_K = 0.0;
  bool gap_decreasing = false, du_decreasing = false, dphi_decreasing = false;
  bool alap_decreasing = false, domega_decreasing = false;
  bool f_within_bound = false;
  bool aborted = false;
  std::string note;
};

inline AToZeroReport sweep_a(const Grid& g, double rho, double p, std::vector<double> as,
                             const SolverConfig& cfg, const SweepOptions& opt = {}) {
  if (!(p > 2.0 && p < 14.0 / 5.0))
    throw std::invalid_argument("sweep_a: requires 2 < p < 14/5");
  if (as.empty()) throw std::invalid_argument("sweep_a: empty a list");
  for (double a : as)
    if (!(a > 0.0))
      throw std::invalid_argument("sweep_a: every a must be positive (a = 0 is the reference solve)");
  for (std::size_t i = 1; i < as.size(); ++i)
    if (!(as[i] < as[i - 1]))
      throw std::invalid_argument("sweep_a: a list must be strictly decreasing");
  if (opt.validate_regime) {
    const double bound = certified_rho_bound(p, Regime::small_rho);
    if (rho > bound)
      throw std::domain_error("sweep_a: rho exceeds the certified small-mass bound " +
                              std::to_string(bound));
  }

  AToZeroReport rep;
  rep.measured_K = measured_hls_constant();

  const Params ref_params{0.0, rho, p};
  MinimizeResult ref = minimize(g, ref_params, cfg);
  rep.reference = detail::record_from_result(g, ref_params, cfg, ref);
  if (!ref.converged) {
    rep.aborted = true;
    rep.note = "reference (a = 0) run did not converge";
    return rep;
  }
  const auto phi0_hat = phi_spectrum(g, ref.u, hartree_kernel(g, 0.0));

  std::vector<Params> points;
  for (double a : as) points.push_back(Params{a, rho, p});
  auto results = detail::run_points(g, points, cfg, opt.threads);

  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& r = results[i];
    AToZeroRow row;
    row.base = detail::record_from_result(g, points[i], cfg, r);
    if (!r.converged) {
      rep.rows.push_back(row);
      rep.aborted = true;
      rep.note = "non-converged run at a = " + std::to_string(points[i].a);
      return rep;
    }
    const double a = points[i].a;
    row.gap_J = rep.reference.J - r.energy.total;
    Field diff = r.u;
    for (std::size_t j = 0; j < diff.values.size(); ++j) diff.values[j] -= ref.u.values[j];
    row.du_h1 = std::sqrt(grad_norm_sq(diff) + std::pow(lp_norm(diff, 2.0), 2.0));
    const auto phia_hat = phi_spectrum(g, r.u, hartree_kernel(g, a));
    row.dphi_d12 = std::sqrt(spectral_diff_norm_sq(phia_hat, phi0_hat, 1));
    row.a_lap_phi_l2 = a * std::sqrt(spectral_norm_sq(phia_hat, 2));
    row.domega = std::abs(r.omega - ref.omega);
    row.f_a = coupling_gap(g, r.u, a);
    row.f_a_bound = coupling_gap_bound(g, r.u, a);
    rep.rows.push_back(row);
  }

  auto decreasing = [&](auto&& get) {
    for (std::size_t i = 1; i < rep.rows.size(); ++i)
      if (!(get(rep.rows[i]) < get(rep.rows[i - 1]))) return false;
    return true;
  };
  rep.gap_decreasing = decreasing([](const AToZeroRow& r) { return r.gap_J; });
  rep.du_decreasing = decreasing([](const AToZeroRow& r) { return r.du_h1; });
  rep.dphi_decreasing = decreasing([](const AToZeroRow& r) { return r.dphi_d12; });
  rep.alap_decreasing = decreasing([](const AToZeroRow& r) { return r.a_lap_phi_l2; });
  rep.domega_decreasing = decreasing([](const AToZeroRow& r) { return r.domega; });
  rep.f_within_bound = true;
  for (const auto& row : rep.rows) rep.f_within_bound &= row.f_a <= row.f_a_bound;
  return rep;
}

struct OmegaRow {
  double rho = 0.0;
  double omega = 0.0;            // multiplier of the a = 0 solve at this mass
  double omega_ref = 0.0;        // Omega_unit * rho^(-2 beta), mapped reference
  double diff = 0.0;             // |omega - omega_ref|
  double omega_rescaled = 0.0;   // omega * rho^(2 beta), the rescaled-frame value
  bool converged = false;
};

struct OmegaReport {
  double p = 0.0;
  double alpha = 0.0;       // (28 - 10 p)/(10 - 3 p)
  double beta = 0.0;        // -(2p - 4)/(4 - 3(p - 2))
  double omega_unit = 0.0;  // multiplier of the limiting problem at unit mass
  std::vector<OmegaRow> rows;
  bool diffs_decreasing = false;
  bool all_positive = false;
  bool aborted = false;
  std::string note;
};

inline double gpv_alpha(double p) { return (28.0 - 10.0 * p) / (10.0 - 3.0 * p); }
inline double gpv_beta(double p) { return -(2.0 * p - 4.0) / (4.0 - 3.0 * (p - 2.0)); }

inline OmegaReport multiplier_limit(const Grid& g, double p, std::vector<double> rhos,
                                    const SolverConfig& cfg, const SweepOptions& opt = {}) {
  if (!(p > 2.0 && p < 14.0 / 5.0))
    throw std::invalid_argument("multiplier_limit: requires 2 < p < 14/5 (alpha(p) > 0)");
  if (rhos.empty()) throw std::invalid_argument("multiplier_limit: empty rho list");
  for (std::size_t i = 1; i < rhos.size(); ++i)
    if (!(rhos[i] < rhos[i - 1]))
      throw std::invalid_argument("multiplier_limit: rhos must be strictly decreasing");

  OmegaReport rep;
  rep.p = p;
  rep.alpha = gpv_alpha(p);
  rep.beta = gpv_beta(p);

  MinimizeResult limit = nls_ground_state(g, 1.0, p, cfg);
  if (!limit.converged) {
    rep.aborted = true;
    rep.note = "limiting unit-mass run did not converge";
    return rep;
  }
  rep.omega_unit = limit.omega;

  std::vector<Params> points;
  for (double rho : rhos) points.push_back(Params{0.0, rho, p});
  auto results = detail::run_points(g, points, cfg, opt.threads);
  for (std::size_t i = 0; i < points.size(); ++i) {
    OmegaRow row;
    row.rho = rhos[i];
    row.converged = results[i].converged;
    row.omega = results[i].omega;
    row.omega_ref = rep.omega_unit * std::pow(rhos[i], -2.0 * rep.beta);
    row.diff = std::abs(row.omega - row.omega_ref);
    row.omega_rescaled = row.omega * std::pow(rhos[i], 2.0 * rep.beta);
    rep.rows.push_back(row);
    if (!row.converged) {
      rep.aborted = true;
      rep.note = "non-converged run at rho = " + std::to_string(rhos[i]);
      return rep;
    }
  }
  rep.diffs_decreasing = true;
  for (std::size_t i = 1; i < rep.rows.size(); ++i)
    rep.diffs_decreasing &= rep.rows[i].diff < rep.rows[i - 1].diff;
  rep.all_positive = true;
  for (const auto& row : rep.rows) rep.all_positive &= row.omega > 0.0;
  return rep;
}

// ---------------------------------------------------------------------------
// identity-check table (the `check-identities` command)

struct CheckResult {
  std::string name;
  bool pass = false;
  double err = 0.0;  // worst observed error, check specific
};

inline std::vector<CheckResult> run_identity_checks(const Grid& g, const Params& params) {
  validate(params);
  std::vector<CheckResult> out;
  auto push = [&](const std::string& name, double err, double tol) {
    out.push_back({name, std::isfinite(err) && err <= tol, err});
  };

  // kernel decomposition kappa_a = 1/r - exp(-r/a)/r on the documented lattice
  {
    double worst = 0.0;
    for (double a : {0.2, 1.0, 5.0})
      for (int i = 0; i <= 40; ++i) {
        const double x = 0.02 * std::pow(30.0 / 0.02, i / 40.0);  // r/a in [0.02, 30]
        const double r = x * a;
        const double direct = kappa(a, r);
        const double split = kappa(0.0, r) - std::exp(-r / a) / r;
        worst = std::max(worst, std::abs(direct - split) / direct);
      }
    push("kernel.decomposition", worst, 1e-14);
  }
  // kernel range 0 < kappa < min(1/r, 1/a)
  {
    bool ok = true;
    for (double a : {0.2, 1.0, 5.0})
      for (int i = 0; i <= 40; ++i) {
        const double r = a * 0.02 * std::pow(30.0 / 0.02, i / 40.0);
        const double v = kappa(a, r);
        ok &= v > 0.0 && v < 1.0 / r && v < 1.0 / a;
      }
    push("kernel.range_bounds", ok ? 0.0 : 1.0, 0.5);
  }
  // truncated coulomb transform against its closed form
  {
    const KernelSpec spec{KernelKind::coulomb, 0.0, 1.0};
    double worst = 0.0;
    for (int i = 0; i <= 60; ++i) {
      const double k = 1e-3 * std::pow(1e6, i / 60.0);
      const double closed = 4.0 * std::numbers::pi * (1.0 - std::cos(k * spec.T)) / (k * k);
      if (std::abs(1.0 - std::cos(k * spec.T)) < 0.1) continue;  // skip near-zeros
      worst = std::max(worst, std::abs(truncated_ft(spec, k) - closed) / std::abs(closed));
    }
    push("kernel.coulomb_closed_form", worst, 1e-12);
  }
  // monotonicity of a -> kappa(a, r)
  {
    bool ok = true;
    for (double r : {0.1, 1.0, 7.0})
      for (double a = 0.25; a < 4.0; a *= 1.5) ok &= kappa(a * 1.5, r) < kappa(a, r);
    push("kernel.monotone_in_a", ok ? 0.0 : 1.0, 0.5);
  }

  const Field u = sample(g, gaussian_profile(params.rho, std::min(1.0, g.L / 10.0)));
  const double a_pos = params.a > 0.0 ? params.a : 1.0;

  // hartree comparison D_a <= D_0 and Young bound D_a <= rho^4 / a
  {
    const double D0 = coupling(g, u, 0.0);
    double worst = -std::numeric_limits<double>::infinity();
    bool young = true;
    const double m4 = std::pow(lp_norm(u, 2.0), 4.0);
    for (double a : {0.25, 1.0, 4.0}) {
      const double Da = coupling(g, u, a);
      worst = std::max(worst, (Da - D0) / D0);
      young &= Da <= m4 / a * (1.0 + 1e-12);
    }
    push("energy.hartree_comparison", std::max(worst, 0.0), 1e-12);
    push("energy.young_bound", young ? 0.0 : 1.0, 0.5);
  }
  // energy ordering J_a <= J_0
  {
    Params pa = params;
    pa.a = a_pos;
    Params p0 = params;
    p0.a = 0.0;
    const double Ja = energy(g, u, pa).total;
    const double J0 = energy(g, u, p0).total;
    push("energy.ordering_a_vs_0", std::max(Ja - J0, 0.0), 1e-12);
  }
  // gradient vs centered differences along 3 fixed directions
  {
    Params pa = params;
    pa.a = a_pos;
    const Field grad = gradient(g, u, pa);
    detail::NormalRng rng(1234);
    double worst = 0.0;
    for (int dir = 0; dir < 3; ++dir) {
      Field v = make_field(g);
      for (double& x : v.values) x = rng.normal();
      v = apply_spectral_multiplier(v, [&](double kx, double ky, double kz) {
        return std::exp(-0.25 * (kx * kx + ky * ky + kz * kz));
      });
      const double nv = lp_norm(v, 2.0);
      for (double& x : v.values) x /= nv;
      const double eps = 1e-4;
      Field up = u, um = u;
      for (std::size_t j = 0; j < u.values.size(); ++j) {
        up.values[j] += eps * v.values[j];
        um.values[j] -= eps * v.values[j];
      }
      const double fd = (energy(g, up, pa).total - energy(g, um, pa).total) / (2.0 * eps);
      const double an = inner_l2(grad, v);
      worst = std::max(worst, std::abs(fd - an) / std::abs(an));
    }
    push("energy.gradient_fd", worst, 1e-5);
  }
  // phi solves its fourth-order equation on the box
  push("energy.phi_pde_residual", phi_pde_residual(g, u, a_pos), 1e-6);

  // rescaling laws on a small (beta, theta) lattice
  {
    const Profile pr = gaussian_profile(params.rho, std::min(1.0, g.L / 10.0));
    const Field base = sample(g, pr);
    const double m0 = lp_norm(base, 2.0);
    const double g0 = grad_norm_sq(base);
    const double p0 = std::pow(lp_norm(base, params.p), params.p);
    double worst_mass = 0.0, worst_kin = 0.0, worst_lp = 0.0;
    for (double beta : {-0.5, 0.0, 0.5})
      for (double theta : {0.9, 1.1}) {
        const Field rs = sample(g, rescale(pr, beta, theta));
        worst_mass = std::max(worst_mass, std::abs(lp_norm(rs, 2.0) / (theta * m0) - 1.0));
        worst_kin = std::max(
            worst_kin, std::abs(grad_norm_sq(rs) / (std::pow(theta, 2.0 - 2.0 * beta) * g0) - 1.0));
        const double q = (1.0 - 1.5 * beta) * params.p + 3.0 * beta;
        worst_lp = std::max(worst_lp, std::abs(std::pow(lp_norm(rs, params.p), params.p) /
                                                   (std::pow(theta, q) * p0) -
                                               1.0));
      }
    push("rescale.mass_law", worst_mass, 1e-8);
    push("rescale.kinetic_law", worst_kin, 1e-6);
    push("rescale.lp_law", worst_lp, 1e-6);
  }
  // nonlocal rescaling inequality and its equality route
  {
    const Profile pr = gaussian_profile(params.rho, std::min(1.0, g.L / 10.0));
    double worst_gap = -std::numeric_limits<double>::infinity();
    double worst_eq = 0.0;
    for (double beta : {-0.5, 0.5})
      for (double theta : {0.9, 1.1}) {
        const auto chk = nonlocal_rescaling_check(g, pr, a_pos, beta, theta);
        worst_gap = std::max(worst_gap, (chk.lhs - chk.rhs) / chk.rhs);
        worst_eq = std::max(worst_eq, std::abs(chk.lhs - chk.lhs_scaled_kernel) / chk.lhs);
      }
    push("rescale.nonlocal_inequality", std::max(worst_gap, 0.0), 1e-8);
    push("rescale.nonlocal_equality_route", worst_eq, 1e-8);
  }
  // h'(1) closed form vs centered differences
  {
    const Profile pr = gaussian_profile(params.rho, std::min(1.0, g.L / 10.0));
    Params pa = params;
    pa.a = a_pos;
    double worst = 0.0;
    for (double beta : {-0.5, 0.0, 0.5}) {
      const double closed = h_beta_prime_at_1(g, sample(g, pr), pa, beta);
      const double d = 1e-3;
      const double fd = (h_beta(g, pr, pa, beta, 1.0 + d) - h_beta(g, pr, pa, beta, 1.0 - d)) /
                        (2.0 * d);
      worst = std::max(worst, std::abs(closed - fd) / std::max(1e-12, std::abs(closed)));
    }
    push("rescale.h_prime_closed_form", worst, 1e-4);
  }
  // parseval: spectral kinetic vs one-sided differences converges at order 2
  {
    auto fd_grad = [](const Field& f) {
      const Grid& gg = f.grid;
      const int n = gg.n;
      double acc = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int l = 0; l < n; ++l) {
            const double v = f.values[gg.index(i, j, l)];
            const double dx1 = f.values[gg.index((i + 1) % n, j, l)] - v;
            const double dx2 = f.values[gg.index(i, (j + 1) % n, l)] - v;
            const double dx3 = f.values[gg.index(i, j, (l + 1) % n)] - v;
            acc += dx1 * dx1 + dx2 * dx2 + dx3 * dx3;
          }
      return acc * gg.cell_volume / (gg.dx * gg.dx);
    };
    const Grid g1 = make_grid(g.n / 2, g.L);
    const Profile pr = gaussian_profile(params.rho, std::min(1.0, g.L / 10.0));
    const double e1 = std::abs(fd_grad(sample(g1, pr)) - grad_norm_sq(sample(g1, pr)));
    const double e2 = std::abs(fd_grad(sample(g, pr)) - grad_norm_sq(sample(g, pr)));
    const double order = std::log2(e1 / e2);
    push("grid.parseval_fd_order2", std::abs(order - 2.0), 0.35);
  }
  // translation invariance of the norms under whole-cell shifts
  {
    Field shifted = u;
    const int n = g.n;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l)
          shifted.values[g.index(i, j, l)] = u.values[g.index((i + 3) % n, j, (l + n - 2) % n)];
    const double e1 = std::abs(lp_norm(shifted, 2.0) - lp_norm(u, 2.0));
    const double e2 = std::abs(grad_norm_sq(shifted) - grad_norm_sq(u));
    push("grid.translation_invariance", std::max(e1, e2), 1e-12);
  }
  return out;
}

}  // namespace sbp
