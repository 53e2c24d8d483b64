#pragma once

// Field file format: `key=value` header lines (n, L, a, rho, p, kind), one
// blank line, then n^3 little-endian 8-byte ieee doubles in row-major axis
// order.  Round trips are bit exact.

#include <bit>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>

#include "sbp/energy.hpp"
#include "sbp/grid.hpp"

namespace sbp::io {

inline std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline void put_le_double(std::ostream& os, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = char((bits >> (8 * i)) & 0xff);
  os.write(b, 8);
}

inline double get_le_double(std::istream& is) {
  char b[8];
  is.read(b, 8);
  if (!is) throw std::runtime_error("field file: truncated payload");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= std::uint64_t(std::uint8_t(b[i])) << (8 * i);
  return std::bit_cast<double>(bits);
}

}  // namespace detail

struct LoadedField {
  Field field;
  Params params;
  std::string kind;
};

inline void write_field(const std::filesystem::path& path, const Field& f, const Params& params,
                        const std::string& kind) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_field: cannot open " + path.string());
  os << "n=" << f.grid.n << "\n";
  os << "L=" << g17(f.grid.L) << "\n";
  os << "a=" << g17(params.a) << "\n";
  os << "rho=" << g17(params.rho) << "\n";
  os << "p=" << g17(params.p) << "\n";
  os << "kind=" << kind << "\n";
  os << "\n";
  for (double v : f.values) detail::put_le_double(os, v);
  if (!os) throw std::runtime_error("write_field: short write to " + path.string());
}

inline LoadedField read_field(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_field: cannot open " + path.string());
  std::map<std::string, std::string> header;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) break;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("read_field: malformed header line '" + line + "'");
    header[line.substr(0, eq)] = line.substr(eq + 1);
  }
  for (const char* key : {"n", "L", "a", "rho", "p", "kind"})
    if (!header.count(key))
      throw std::runtime_error(std::string("read_field: missing header key ") + key);
  LoadedField out;
  const int n = std::stoi(header["n"]);
  const double L = std::stod(header["L"]);
  out.params.a = std::stod(header["a"]);
  out.params.rho = std::stod(header["rho"]);
  out.params.p = std::stod(header["p"]);
  out.kind = header["kind"];
  out.field = make_field(make_grid(n, L));
  for (double& v : out.field.values) v = detail::get_le_double(is);
  return out;
}

}  // namespace sbp::io
