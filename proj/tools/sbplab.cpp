// Command-line front end.  All numerics come from the config file; the flag
// set stays small so runs are reproducible from the config alone.

#include <clocale>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "sbp/runner.hpp"

int main(int argc, char** argv) {
  std::setlocale(LC_NUMERIC, "C");

  CLI::App app{"sbplab: constrained minimization lab for screened Hartree energies"};
  std::string config_path;
  std::string output_override;
  int threads = 1;
  bool serial = false;
  app.add_option("--config", config_path, "run configuration file")->required();
  app.add_option("--output", output_override, "override [run] output_dir");
  app.add_option("--threads", threads, "parallel sweep points (default 1)");
  app.add_flag("--serial", serial, "force serial execution (bit-reproducible runs)");
  app.set_version_flag("--version", std::string(sbp::version));
  CLI11_PARSE(app, argc, argv);

  std::ifstream is(config_path);
  if (!is) {
    std::cerr << "error: cannot open config file '" << config_path << "'\n";
    return 2;
  }
  std::stringstream buf;
  buf << is.rdbuf();

  sbp::RunConfig cfg;
  try {
    cfg = sbp::parse_config(buf.str());
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
  if (!output_override.empty()) cfg.output_dir = output_override;
  if (serial || threads < 1) threads = 1;

  const sbp::RunOutcome outcome = sbp::run(cfg, threads);
  if (!outcome.error.empty()) std::cerr << "error: " << outcome.error << "\n";
  for (const auto& [name, ok] : outcome.verdicts)
    std::cout << name << ": " << (ok ? "pass" : "fail") << "\n";
  return outcome.exit_status;
}
