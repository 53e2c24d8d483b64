#pragma once

// Line-oriented run configuration: `[section]` headers and `key = value`
// lines, sections run/grid/params/solver.  Unknown keys are hard errors;
// duplicates report both line numbers; range violations cite the line.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbp/energy.hpp"
#include "sbp/solve.hpp"

namespace sbp {

struct RunConfig {
  std::string command;
  int n = 0;
  double L = 0.0;
  Params params{1.0, 0.5, 2.5};
  SolverConfig solver;
  std::string output_dir = "out";
  std::uint64_t seed = 0;
  std::vector<double> rhos;  // sweep-rho, multiplier-limit
  std::vector<double> as;    // sweep-a
  std::string regime;        // beta-window
  double md_margin = 1e-6;
  double subadd_margin = 1e-6;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& msg)
      : std::runtime_error("config line " + std::to_string(line) + ": " + msg), line(line) {}
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg), line(0) {}
  int line;
};

namespace detail_config {

struct Entry {
  std::string value;
  int line = 0;
};

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const Entry& e, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ConfigError(e.line, key + ": expected a number, got '" + e.value + "'");
  }
}

inline long parse_int(const Entry& e, const std::string& key) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ConfigError(e.line, key + ": expected an integer, got '" + e.value + "'");
  }
}

inline bool parse_bool(const Entry& e, const std::string& key) {
  if (e.value == "true" || e.value == "1" || e.value == "on") return true;
  if (e.value == "false" || e.value == "0" || e.value == "off") return false;
  throw ConfigError(e.line, key + ": expected true/false, got '" + e.value + "'");
}

inline std::vector<double> parse_list(const Entry& e, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(e.value);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) throw ConfigError(e.line, key + ": empty list element");
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument("");
    } catch (...) {
      throw ConfigError(e.line, key + ": bad list element '" + tok + "'");
    }
  }
  if (out.empty()) throw ConfigError(e.line, key + ": empty list");
  return out;
}

// init = gaussian | gaussian(<sigma>) | file(<path>) | perturbed(<seed>,<amp>)
inline InitSpec parse_init(const Entry& e) {
  const std::string& v = e.value;
  InitSpec init;
  const auto open = v.find('(');
  const std::string head = open == std::string::npos ? v : v.substr(0, open);
  std::string args;
  if (open != std::string::npos) {
    if (v.back() != ')') throw ConfigError(e.line, "init: missing ')'");
    args = v.substr(open + 1, v.size() - open - 2);
  }
  if (head == "gaussian") {
    init.kind = InitSpec::Kind::gaussian;
    if (!args.empty()) init.sigma = parse_double({args, e.line}, "init sigma");
  } else if (head == "file") {
    init.kind = InitSpec::Kind::file;
    if (args.empty()) throw ConfigError(e.line, "init: file(<path>) needs a path");
    init.path = trim(args);
  } else if (head == "perturbed") {
    init.kind = InitSpec::Kind::perturbed;
    const auto comma = args.find(',');
    if (comma == std::string::npos)
      throw ConfigError(e.line, "init: perturbed(<seed>,<amplitude>) needs two arguments");
    init.seed = std::uint64_t(parse_int({trim(args.substr(0, comma)), e.line}, "init seed"));
    init.amplitude = parse_double({trim(args.substr(comma + 1)), e.line}, "init amplitude");
  } else {
    throw ConfigError(e.line, "init: unknown kind '" + head + "'");
  }
  return init;
}

}  // namespace detail_config

inline RunConfig parse_config(const std::string& text) {
  using detail_config::Entry;
  static const std::set<std::string> commands = {"solve",         "sweep-rho",  "sweep-a",
                                                 "check-identities", "beta-window",
                                                 "multiplier-limit"};
  static const std::map<std::string, std::set<std::string>> known = {
      {"run", {"command", "output_dir", "seed", "rhos", "as", "regime", "md_margin",
               "subadd_margin"}},
      {"grid", {"n", "L"}},
      {"params", {"a", "rho", "p"}},
      {"solver", {"tol", "max_iter", "precondition", "precond_shift", "step0", "backtrack",
                  "armijo", "init"}},
  };

  std::map<std::string, Entry> entries;  // "section.key" -> value/line
  std::string section;
  int lineno = 0;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    ++lineno;
    const std::string t = detail_config::trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError(lineno, "malformed section header");
      section = t.substr(1, t.size() - 2);
      if (!known.count(section)) throw ConfigError(lineno, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError(lineno, "expected key = value");
    const std::string key = detail_config::trim(t.substr(0, eq));
    const std::string value = detail_config::trim(t.substr(eq + 1));
    if (section.empty()) throw ConfigError(lineno, "key '" + key + "' outside any section");
    if (!known.at(section).count(key))
      throw ConfigError(lineno, "unknown key '" + key + "' in section [" + section + "]");
    const std::string full = section + "." + key;
    auto [it, fresh] = entries.emplace(full, Entry{value, lineno});
    if (!fresh)
      throw ConfigError(lineno, "duplicate key '" + full + "' (first defined at line " +
                                    std::to_string(it->second.line) + ")");
  }

  auto get = [&](const std::string& full) -> std::optional<Entry> {
    auto it = entries.find(full);
    if (it == entries.end()) return std::nullopt;
    return it->second;
  };
  auto require = [&](const std::string& full) -> Entry {
    auto e = get(full);
    if (!e) throw ConfigError("missing required key '" + full + "'");
    return *e;
  };

  RunConfig cfg;
  {
    const Entry e = require("run.command");
    if (!commands.count(e.value))
      throw ConfigError(e.line, "unknown command '" + e.value + "'");
    cfg.command = e.value;
  }
  if (auto e = get("run.output_dir")) cfg.output_dir = e->value;
  if (auto e = get("run.seed")) cfg.seed = std::uint64_t(detail_config::parse_int(*e, "seed"));
  if (auto e = get("run.rhos")) cfg.rhos = detail_config::parse_list(*e, "rhos");
  if (auto e = get("run.as")) cfg.as = detail_config::parse_list(*e, "as");
  if (auto e = get("run.regime")) {
    if (e->value != "small_rho" && e->value != "large_rho")
      throw ConfigError(e->line, "regime: expected small_rho or large_rho");
    cfg.regime = e->value;
  }
  if (auto e = get("run.md_margin")) cfg.md_margin = detail_config::parse_double(*e, "md_margin");
  if (auto e = get("run.subadd_margin"))
    cfg.subadd_margin = detail_config::parse_double(*e, "subadd_margin");

  const bool needs_grid = cfg.command != "beta-window";
  if (needs_grid) {
    {
      const Entry e = require("grid.n");
      const long n = detail_config::parse_int(e, "n");
      if (n < 8 || n % 2 != 0)
        throw ConfigError(e.line, "n must be even and at least 8, got " + e.value);
      cfg.n = int(n);
    }
    {
      const Entry e = require("grid.L");
      cfg.L = detail_config::parse_double(e, "L");
      if (!(cfg.L > 0.0)) throw ConfigError(e.line, "L must be positive");
    }
  }

  auto require_p = [&]() {
    const Entry e = require("params.p");
    const double p = detail_config::parse_double(e, "p");
    if (!(p > 2.0 && p < 10.0 / 3.0) || p == 3.0)
      throw ConfigError(e.line, "p = " + e.value + " out of range: p ∈ ]2,10/3[ \\ {3}");
    cfg.params.p = p;
  };
  auto require_a = [&]() {
    const Entry e = require("params.a");
    const double a = detail_config::parse_double(e, "a");
    if (!(a >= 0.0)) throw ConfigError(e.line, "a must be nonnegative");
    cfg.params.a = a;
  };
  auto require_rho = [&]() {
    const Entry e = require("params.rho");
    const double rho = detail_config::parse_double(e, "rho");
    if (!(rho > 0.0)) throw ConfigError(e.line, "rho must be positive");
    cfg.params.rho = rho;
  };

  if (cfg.command == "solve" || cfg.command == "check-identities") {
    require_a();
    require_rho();
    require_p();
  } else if (cfg.command == "sweep-rho") {
    require_a();
    require_p();
    if (cfg.rhos.empty()) throw ConfigError("sweep-rho requires run.rhos");
  } else if (cfg.command == "sweep-a") {
    require_rho();
    require_p();
    if (cfg.as.empty()) throw ConfigError("sweep-a requires run.as");
  } else if (cfg.command == "beta-window") {
    require_p();
    if (cfg.regime.empty()) throw ConfigError("beta-window requires run.regime");
  } else if (cfg.command == "multiplier-limit") {
    require_p();
    if (cfg.rhos.empty()) throw ConfigError("multiplier-limit requires run.rhos");
  }

  if (auto e = get("solver.tol")) {
    cfg.solver.tol = detail_config::parse_double(*e, "tol");
    if (!(cfg.solver.tol > 0.0)) throw ConfigError(e->line, "tol must be positive");
  }
  if (auto e = get("solver.max_iter")) {
    const long m = detail_config::parse_int(*e, "max_iter");
    if (m < 1) throw ConfigError(e->line, "max_iter must be at least 1");
    cfg.solver.max_iter = int(m);
  }
  if (auto e = get("solver.precondition"))
    cfg.solver.precondition = detail_config::parse_bool(*e, "precondition");
  if (auto e = get("solver.precond_shift")) {
    cfg.solver.precond_shift = detail_config::parse_double(*e, "precond_shift");
    if (!(cfg.solver.precond_shift >= 0.0))
      throw ConfigError(e->line, "precond_shift must be nonnegative");
  }
  if (auto e = get("solver.step0")) {
    cfg.solver.step0 = detail_config::parse_double(*e, "step0");
    if (!(cfg.solver.step0 > 0.0)) throw ConfigError(e->line, "step0 must be positive");
  }
  if (auto e = get("solver.backtrack")) {
    cfg.solver.backtrack = detail_config::parse_double(*e, "backtrack");
    if (!(cfg.solver.backtrack > 0.0 && cfg.solver.backtrack < 1.0))
      throw ConfigError(e->line, "backtrack must lie in ]0,1[");
  }
  if (auto e = get("solver.armijo")) {
    cfg.solver.armijo = detail_config::parse_double(*e, "armijo");
    if (!(cfg.solver.armijo > 0.0)) throw ConfigError(e->line, "armijo must be positive");
  }
  if (auto e = get("solver.init")) cfg.solver.init = detail_config::parse_init(*e);

  return cfg;
}

}  // namespace sbp
