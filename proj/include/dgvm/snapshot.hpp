// Binary snapshot files for DG fields: self-describing (axes, degree,
// components, metadata) and bit-exact on round trip.
#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dgvm/field.hpp"

namespace dgvm {

namespace detail {

inline void put_u32(std::ostream& os, uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
inline void put_u64(std::ostream& os, uint64_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
inline void put_f64(std::ostream& os, double v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
inline void put_str(std::ostream& os, const std::string& s) {
  put_u32(os, static_cast<uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline uint32_t get_u32(std::istream& is) {
  uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}
inline uint64_t get_u64(std::istream& is) {
  uint64_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}
inline double get_f64(std::istream& is) {
  double v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}
inline std::string get_str(std::istream& is) {
  const uint32_t n = get_u32(is);
  std::string s(n, '\0');
  is.read(s.data(), n);
  return s;
}

inline constexpr char kMagic[9] = "DGVMSNP1";

}  // namespace detail

struct Snapshot {
  std::map<std::string, std::string> meta;
  std::vector<std::pair<std::string, DGField>> fields;

  const DGField& field(const std::string& name) const {
    for (const auto& [n, f] : fields)
      if (n == name) return f;
    throw std::invalid_argument("snapshot has no field named " + name);
  }
  bool has(const std::string& name) const {
    for (const auto& [n, f] : fields)
      if (n == name) return true;
    return false;
  }
};

inline void write_snapshot(
    std::ostream& os,
    const std::vector<std::pair<std::string, const DGField*>>& fields,
    const std::map<std::string, std::string>& meta) {
  os.write(detail::kMagic, 8);
  detail::put_u32(os, static_cast<uint32_t>(meta.size()));
  for (const auto& [k, v] : meta) {
    detail::put_str(os, k);
    detail::put_str(os, v);
  }
  detail::put_u32(os, static_cast<uint32_t>(fields.size()));
  for (const auto& [name, f] : fields) {
    detail::put_str(os, name);
    const Mesh& m = f->mesh();
    detail::put_u32(os, static_cast<uint32_t>(m.dim_x()));
    detail::put_u32(os, static_cast<uint32_t>(m.dim_v()));
    for (int a = 0; a < m.dim(); ++a) {
      detail::put_f64(os, m.axis(a).lo);
      detail::put_f64(os, m.axis(a).hi);
      detail::put_u32(os, static_cast<uint32_t>(m.axis(a).n_cells));
    }
    detail::put_u32(os, static_cast<uint32_t>(f->degree()));
    detail::put_u32(os, static_cast<uint32_t>(f->n_comp()));
    detail::put_u64(os, f->coeffs().size());
    os.write(reinterpret_cast<const char*>(f->coeffs().data()),
             static_cast<std::streamsize>(f->coeffs().size() * sizeof(double)));
  }
  if (!os) throw std::runtime_error("snapshot write failed");
}

inline void write_snapshot(
    const std::string& path,
    const std::vector<std::pair<std::string, const DGField*>>& fields,
    const std::map<std::string, std::string>& meta) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_snapshot(os, fields, meta);
}

inline Snapshot read_snapshot(std::istream& is) {
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, detail::kMagic, 8) != 0)
    throw std::runtime_error("not a dgvm snapshot file");
  Snapshot snap;
  const uint32_t n_meta = detail::get_u32(is);
  for (uint32_t i = 0; i < n_meta; ++i) {
    std::string k = detail::get_str(is);
    snap.meta[k] = detail::get_str(is);
  }
  const uint32_t n_fields = detail::get_u32(is);
  for (uint32_t i = 0; i < n_fields; ++i) {
    std::string name = detail::get_str(is);
    const int dim_x = static_cast<int>(detail::get_u32(is));
    const int dim_v = static_cast<int>(detail::get_u32(is));
    std::vector<AxisSpec> xa, va;
    for (int a = 0; a < dim_x + dim_v; ++a) {
      AxisSpec ax;
      ax.lo = detail::get_f64(is);
      ax.hi = detail::get_f64(is);
      ax.n_cells = static_cast<int>(detail::get_u32(is));
      ax.periodic = a < dim_x;
      (a < dim_x ? xa : va).push_back(ax);
    }
    const int degree = static_cast<int>(detail::get_u32(is));
    const int n_comp = static_cast<int>(detail::get_u32(is));
    const uint64_t n_coeffs = detail::get_u64(is);
    auto mesh = std::make_shared<Mesh>(xa, va);
    DGField f(mesh, degree, n_comp);
    if (f.coeffs().size() != n_coeffs)
      throw std::runtime_error("snapshot coefficient count mismatch");
    is.read(reinterpret_cast<char*>(f.coeffs().data()),
            static_cast<std::streamsize>(n_coeffs * sizeof(double)));
    snap.fields.emplace_back(std::move(name), std::move(f));
  }
  if (!is) throw std::runtime_error("snapshot read failed");
  return snap;
}

inline Snapshot read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_snapshot(is);
}

}  // namespace dgvm
