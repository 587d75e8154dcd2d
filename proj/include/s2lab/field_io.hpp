#pragma once

// Field serialization: CSV (node coordinates + components) and a compact
// binary dump.
//
// Binary layout, little-endian throughout:
//   bytes 0..7   magic "S2FIELD1"
//   bytes 8..15  uint64 node count n
//   then n records of three IEEE-754 binary64 values (m1, m2, m3).

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <ostream>
#include <span>
#include <string>

#include "s2lab/core.hpp"
#include "s2lab/energy.hpp"
#include "s2lab/mesh.hpp"

namespace s2lab {

inline constexpr char binary_field_magic[8] = {'S', '2', 'F', 'I', 'E', 'L', 'D', '1'};

/// Shortest decimal form that round-trips (17 significant digits).
inline std::string format_double(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline void put_u64(std::ostream& os, std::uint64_t v)
{
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xffu);
  os.write(reinterpret_cast<const char*>(b), 8);
}

inline std::uint64_t get_u64(std::istream& is)
{
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw ValidationError("truncated binary field");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

}  // namespace detail

inline void write_field_binary(std::ostream& os, std::span<const Vec3> field)
{
  os.write(binary_field_magic, 8);
  detail::put_u64(os, field.size());
  for (const Vec3& v : field)
    for (double x : v) detail::put_u64(os, std::bit_cast<std::uint64_t>(x));
}

inline SphereField read_field_binary(std::istream& is)
{
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, binary_field_magic, 8) != 0)
    throw ValidationError("not an s2lab binary field");
  const std::uint64_t n = detail::get_u64(is);
  if (n > (std::uint64_t{1} << 32)) throw ValidationError("implausible node count in binary field");
  SphereField field(n);
  for (auto& v : field)
    for (double& x : v) x = std::bit_cast<double>(detail::get_u64(is));
  return field;
}

inline void save_field_binary(const std::string& path, std::span<const Vec3> field)
{
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ValidationError("cannot open " + path + " for writing");
  write_field_binary(os, field);
}

inline SphereField load_field_binary(const std::string& path)
{
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("cannot open " + path);
  return read_field_binary(is);
}

inline void write_field_csv(std::ostream& os, const Mesh& mesh, std::span<const Vec3> field)
{
  detail::check_size(mesh, field.size(), "field");
  os << "x,y,m1,m2,m3\n";
  const auto p = mesh.nodes();
  for (std::size_t i = 0; i < field.size(); ++i)
    os << format_double(p[i].x) << ',' << format_double(p[i].y) << ',' << format_double(field[i][0]) << ','
       << format_double(field[i][1]) << ',' << format_double(field[i][2]) << '\n';
}

inline void write_phase_csv(std::ostream& os, const Mesh& mesh, std::span<const double> phase)
{
  detail::check_size(mesh, phase.size(), "phase");
  os << "x,y,phi\n";
  const auto p = mesh.nodes();
  for (std::size_t i = 0; i < phase.size(); ++i)
    os << format_double(p[i].x) << ',' << format_double(p[i].y) << ',' << format_double(phase[i]) << '\n';
}

}  // namespace s2lab
