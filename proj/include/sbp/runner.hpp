#pragma once

// Batch entry point shared by the command-line tool and the tests: takes a
// parsed RunConfig, executes the named command, and writes the artifacts
// (CSV with '.' decimals, 17 significant digits, LF endings) plus a manifest
// that references every file written.  Exit status 0 only if all runs
// converge and all verdicts pass.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <fftw3.h>

#include "sbp/analysis.hpp"
#include "sbp/config.hpp"
#include "sbp/field_io.hpp"
#include "sbp/version.hpp"

namespace sbp {

struct RunOutcome {
  int exit_status = 0;
  std::vector<std::string> artifacts;
  std::vector<std::pair<std::string, bool>> verdicts;
  std::string error;
};

namespace detail_run {

inline void write_text(const std::filesystem::path& path, const std::string& body) {
  std::ofstream os(path, std::ios::binary);  // binary keeps LF endings everywhere
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << body;
}

inline std::string history_csv(const MinimizeResult& r) {
  std::string s = "iter,J,residual\n";
  for (const auto& h : r.history)
    s += std::to_string(h.iter) + "," + io::g17(h.energy) + "," + io::g17(h.residual) + "\n";
  return s;
}

inline std::string summary_text(const MinimizeResult& r) {
  std::string s;
  s += "J=" + io::g17(r.energy.total) + "\n";
  s += "kinetic=" + io::g17(r.energy.kinetic) + "\n";
  s += "nonlocal=" + io::g17(r.energy.nonlocal) + "\n";
  s += "potential=" + io::g17(r.energy.potential) + "\n";
  s += "omega=" + io::g17(r.omega) + "\n";
  s += "residual=" + io::g17(r.residual) + "\n";
  s += "iters=" + std::to_string(r.iters) + "\n";
  s += "converged=" + std::string(r.converged ? "1" : "0") + "\n";
  s += "h1_sup=" + io::g17(r.h1_sup) + "\n";
  s += "c_rho_fit=" + io::g17(r.c_rho_fit) + "\n";
  return s;
}

inline std::string sweep_record_row(const SweepRecord& r) {
  return io::g17(r.a) + "," + io::g17(r.rho) + "," + io::g17(r.p) + "," + io::g17(r.J) + "," +
         io::g17(r.J / (r.rho * r.rho)) + "," + io::g17(r.omega) + "," + io::g17(r.residual) +
         "," + io::g17(r.h1_norm) + "," + io::g17(r.radial_dev) + "," +
         (r.converged ? "1" : "0");
}

constexpr const char* kSweepHeader =
    "a,rho,p,J,J_over_rho2,omega,residual,h1_norm,radial_dev,converged";

}  // namespace detail_run

inline RunOutcome run(const RunConfig& cfg, int threads = 1) {
  namespace fs = std::filesystem;
  using detail_run::write_text;
  const auto t0 = std::chrono::steady_clock::now();

  RunOutcome out;
  const fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  {
    // probe writability before any solve
    std::ofstream probe(dir / "manifest.txt", std::ios::binary);
    if (!probe) {
      out.exit_status = 2;
      out.error = "output directory not writable: " + dir.string();
      return out;
    }
  }

  auto emit = [&](const std::string& name, const std::string& body) {
    write_text(dir / name, body);
    out.artifacts.push_back(name);
  };
  auto verdict = [&](const std::string& name, bool ok) {
    out.verdicts.emplace_back(name, ok);
    if (!ok) out.exit_status = std::max(out.exit_status, 1);
  };

  SweepOptions opt;
  opt.md_margin = cfg.md_margin;
  opt.subadd_margin = cfg.subadd_margin;
  opt.threads = threads;

  try {
    if (cfg.command == "solve") {
      const Grid g = make_grid(cfg.n, cfg.L);
      const MinimizeResult r = minimize(g, cfg.params, cfg.solver);
      io::write_field(dir / "u.field", r.u, cfg.params, "u");
      out.artifacts.push_back("u.field");
      emit("summary.txt", detail_run::summary_text(r));
      emit("history.csv", detail_run::history_csv(r));
      verdict("converged", r.converged);
    } else if (cfg.command == "sweep-rho") {
      const Grid g = make_grid(cfg.n, cfg.L);
      const auto rep = sweep_rho(g, cfg.params.a, cfg.params.p, cfg.rhos, cfg.solver, opt);
      std::string csv = std::string(detail_run::kSweepHeader) + "\n";
      for (const auto& r : rep.records) csv += detail_run::sweep_record_row(r) + "\n";
      emit("sweep.csv", csv);
      for (std::size_t i = 0; i < rep.results.size(); ++i) {
        const std::string name = "u_" + std::to_string(i) + ".field";
        Params prm = cfg.params;
        prm.rho = rep.records[i].rho;
        io::write_field(dir / name, rep.results[i].u, prm, "u");
        out.artifacts.push_back(name);
        emit("history_" + std::to_string(i) + ".csv", detail_run::history_csv(rep.results[i]));
      }
      std::string v;
      v += std::string("all_J_negative=") + (rep.verdicts.all_negative ? "pass" : "fail") + "\n";
      v += std::string("J_over_rho2_strictly_decreasing=") +
           (rep.verdicts.md_strict ? "pass" : "fail") + "\n";
      v += std::string("strict_subadditivity=") + (rep.verdicts.subadd_strict ? "pass" : "fail") +
           "\n";
      if (rep.verdicts.aborted) v += "aborted=" + rep.verdicts.note + "\n";
      emit("verdicts.txt", v);
      verdict("all_runs_converged", !rep.verdicts.aborted);
      verdict("all_J_negative", rep.verdicts.all_negative);
      verdict("md_strict", rep.verdicts.md_strict);
      verdict("subadd_strict", rep.verdicts.subadd_strict);
    } else if (cfg.command == "sweep-a") {
      const Grid g = make_grid(cfg.n, cfg.L);
      const auto rep = sweep_a(g, cfg.params.rho, cfg.params.p, cfg.as, cfg.solver, opt);
      std::string csv = std::string(detail_run::kSweepHeader) +
                        ",gap_J,du_H1,dphi_D12,a_lap_phi_L2,f_a,f_a_bound\n";
      csv += detail_run::sweep_record_row(rep.reference) + ",0,0,0,0,0,0\n";
      for (const auto& row : rep.rows)
        csv += detail_run::sweep_record_row(row.base) + "," + io::g17(row.gap_J) + "," +
               io::g17(row.du_h1) + "," + io::g17(row.dphi_d12) + "," +
               io::g17(row.a_lap_phi_l2) + "," + io::g17(row.f_a) + "," +
               io::g17(row.f_a_bound) + "\n";
      emit("a_to_zero.csv", csv);
      std::string v;
      v += "measured_K=" + io::g17(rep.measured_K) + "\n";
      v += std::string("gap_J_decreasing=") + (rep.gap_decreasing ? "pass" : "fail") + "\n";
      v += std::string("du_H1_decreasing=") + (rep.du_decreasing ? "pass" : "fail") + "\n";
      v += std::string("dphi_D12_decreasing=") + (rep.dphi_decreasing ? "pass" : "fail") + "\n";
      v += std::string("a_lap_phi_decreasing=") + (rep.alap_decreasing ? "pass" : "fail") + "\n";
      v += std::string("omega_gap_decreasing=") + (rep.domega_decreasing ? "pass" : "fail") + "\n";
      v += std::string("f_within_bound=") + (rep.f_within_bound ? "pass" : "fail") + "\n";
      if (rep.aborted) v += "aborted=" + rep.note + "\n";
      emit("verdicts.txt", v);
      verdict("all_runs_converged", !rep.aborted);
      verdict("gap_J_decreasing", rep.gap_decreasing);
      verdict("du_H1_decreasing", rep.du_decreasing);
      verdict("dphi_D12_decreasing", rep.dphi_decreasing);
      verdict("a_lap_phi_decreasing", rep.alap_decreasing);
      verdict("omega_gap_decreasing", rep.domega_decreasing);
      verdict("f_within_bound", rep.f_within_bound);
    } else if (cfg.command == "check-identities") {
      const Grid g = make_grid(cfg.n, cfg.L);
      const auto checks = run_identity_checks(g, cfg.params);
      std::string table = "check,status,err\n";
      bool all = true;
      for (const auto& c : checks) {
        table += c.name + "," + (c.pass ? "pass" : "fail") + "," + io::g17(c.err) + "\n";
        all &= c.pass;
      }
      emit("identities.csv", table);
      verdict("all_identities", all);
    } else if (cfg.command == "beta-window") {
      const Regime regime = cfg.regime == "small_rho" ? Regime::small_rho : Regime::large_rho;
      const BetaWindow w = beta_window(cfg.params.p, regime);
      std::string s;
      s += "regime=" + std::string(regime_name(regime)) + "\n";
      s += "p=" + io::g17(w.p) + "\n";
      s += "lower=" + io::g17(w.lower) + "\n";
      s += "upper=" + io::g17(w.upper) + "\n";
      s += "nonempty=" + std::string(w.nonempty ? "1" : "0") + "\n";
      emit("beta_window.txt", s);
      verdict("window_nonempty", w.nonempty);
    } else if (cfg.command == "multiplier-limit") {
      const Grid g = make_grid(cfg.n, cfg.L);
      const auto rep = multiplier_limit(g, cfg.params.p, cfg.rhos, cfg.solver, opt);
      std::string csv = "rho,omega,omega_ref,abs_diff,omega_rescaled,converged\n";
      for (const auto& row : rep.rows)
        csv += io::g17(row.rho) + "," + io::g17(row.omega) + "," + io::g17(row.omega_ref) + "," +
               io::g17(row.diff) + "," + io::g17(row.omega_rescaled) + "," +
               (row.converged ? "1" : "0") + "\n";
      emit("omega.csv", csv);
      std::string v;
      v += "alpha=" + io::g17(rep.alpha) + "\n";
      v += "beta=" + io::g17(rep.beta) + "\n";
      v += "omega_unit=" + io::g17(rep.omega_unit) + "\n";
      v += std::string("diffs_decreasing=") + (rep.diffs_decreasing ? "pass" : "fail") + "\n";
      v += std::string("all_omega_positive=") + (rep.all_positive ? "pass" : "fail") + "\n";
      if (rep.aborted) v += "aborted=" + rep.note + "\n";
      emit("verdicts.txt", v);
      verdict("all_runs_converged", !rep.aborted);
      verdict("diffs_decreasing", rep.diffs_decreasing);
      verdict("all_omega_positive", rep.all_positive);
    } else {
      out.exit_status = 2;
      out.error = "unknown command '" + cfg.command + "'";
    }
  } catch (const std::exception& ex) {
    out.exit_status = 1;
    out.error = ex.what();
  }

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::string manifest;
  manifest += "version=" + std::string(version) + "\n";
  manifest += "fftw=" + std::string(fftw_version) + "\n";
  manifest += "command=" + cfg.command + "\n";
  manifest += "threads=" + std::to_string(threads) + "\n";
  manifest += "seed=" + std::to_string(cfg.seed) + "\n";
  manifest += "wall_time_s=" + io::g17(wall) + "\n";
  manifest += "exit_status=" + std::to_string(out.exit_status) + "\n";
  if (!out.error.empty()) manifest += "error=" + out.error + "\n";
  for (const auto& [name, ok] : out.verdicts)
    manifest += "verdict." + name + "=" + (ok ? "pass" : "fail") + "\n";
  for (const auto& a : out.artifacts) manifest += "artifact=" + a + "\n";
  manifest += "config.grid.n=" + std::to_string(cfg.n) + "\n";
  manifest += "config.grid.L=" + io::g17(cfg.L) + "\n";
  manifest += "config.params.a=" + io::g17(cfg.params.a) + "\n";
  manifest += "config.params.rho=" + io::g17(cfg.params.rho) + "\n";
  manifest += "config.params.p=" + io::g17(cfg.params.p) + "\n";
  manifest += "config.solver.tol=" + io::g17(cfg.solver.tol) + "\n";
  manifest += "config.solver.max_iter=" + std::to_string(cfg.solver.max_iter) + "\n";
  write_text(dir / "manifest.txt", manifest);
  return out;
}

}  // namespace sbp
