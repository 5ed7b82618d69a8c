#pragma once

// Binary snapshot layout (all little-endian):
//
//   offset  size  field
//        0     8  magic "GRVWIGN1"
//        8     8  n_q (uint64)
//       16     8  n_p (uint64)
//       24     8  q_min (float64)
//       32     8  q_max (float64)
//       40     8  p_min (float64)
//       48     8  p_max (float64)
//       56     8  hbar (float64)
//       64     8  time (float64)
//       72  8*N  values (float64), row-major in q: index iq * n_p + ip
//
// A sidecar "<path>.meta" holds the same header fields as key = value text.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "gravint/config.hpp"
#include "gravint/errors.hpp"
#include "gravint/phasespace/grid.hpp"

namespace gravint::phasespace {

inline constexpr char kSnapshotMagic[8] = {'G', 'R', 'V', 'W', 'I', 'G', 'N', '1'};

namespace detail {

inline void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

inline std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) {
    throw ParseError("truncated snapshot");
  }
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

inline void put_f64(std::ostream& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

inline double get_f64(std::istream& in) {
  return std::bit_cast<double>(get_u64(in));
}

}  // namespace detail

inline void write_snapshot(const std::string& path, const WignerGrid& w) {
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write snapshot '" + path + "'");
    out.write(kSnapshotMagic, sizeof(kSnapshotMagic));
    detail::put_u64(out, w.q.n);
    detail::put_u64(out, w.p.n);
    for (double v : {w.q.min, w.q.max, w.p.min, w.p.max, w.hbar, w.time}) {
      detail::put_f64(out, v);
    }
    for (double v : w.values) detail::put_f64(out, v);
    if (!out) throw InputError("failed writing snapshot '" + path + "'");
  }
  std::ofstream meta(path + ".meta", std::ios::trunc);
  if (!meta) throw InputError("cannot write snapshot metadata for '" + path + "'");
  using gravint::detail::format_double;
  meta << "format = GRVWIGN1\n"
       << "byte_order = little-endian\n"
       << "layout = row-major-q\n"
       << "n_q = " << w.q.n << "\n"
       << "n_p = " << w.p.n << "\n"
       << "q_min = " << format_double(w.q.min) << "\n"
       << "q_max = " << format_double(w.q.max) << "\n"
       << "p_min = " << format_double(w.p.min) << "\n"
       << "p_max = " << format_double(w.p.max) << "\n"
       << "hbar = " << format_double(w.hbar) << "\n"
       << "time = " << format_double(w.time) << "\n";
}

inline WignerGrid read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open snapshot '" + path + "'");
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kSnapshotMagic, 8) != 0) {
    throw ParseError("'" + path + "' is not a Wigner snapshot");
  }
  const auto n_q = detail::get_u64(in);
  const auto n_p = detail::get_u64(in);
  const double q_min = detail::get_f64(in), q_max = detail::get_f64(in);
  const double p_min = detail::get_f64(in), p_max = detail::get_f64(in);
  const double hbar = detail::get_f64(in), time = detail::get_f64(in);
  if (n_q > (1u << 16) || n_p > (1u << 16)) {
    throw ParseError("implausible snapshot dimensions");
  }
  WignerGrid w(Axis{q_min, q_max, n_q}, Axis{p_min, p_max, n_p}, hbar, time);
  for (double& v : w.values) v = detail::get_f64(in);
  return w;
}

}  // namespace gravint::phasespace
