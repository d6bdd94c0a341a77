// Run diagnostics: conserved-quantity monitors, error reports against
// analytic references, and convergence-table assembly/emission.
#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "dgvm/rhs.hpp"

namespace dgvm {

struct ConservedQuantities {
  double mass = 0.0;    // integral of f over phase space
  double l2f = 0.0;     // L2 norm of f
  double energy = 0.0;  // kinetic + field energy
  double mean_e = 0.0;  // x-average of E (VA) or E1 (SW)
};

/// Quadrature-exact values for the piecewise polynomials.
inline ConservedQuantities conserved_quantities(const SimulationState& state,
                                                SystemKind kind) {
  ConservedQuantities out;
  const Mesh& pm = state.f.mesh();
  const int dim = pm.dim();
  const double jac = pm.element_volume() / std::pow(2.0, dim);

  out.l2f = l2_norm(state.f);

  // Mass and kinetic energy from a (k+2)-point rule (|v|^2 f has degree k+2).
  const QuadratureRule rule = gauss_rule(state.f.degree() + 2, dim);
  const BasisTable tab = tabulate(state.f.basis(), rule.nodes);
  Point x{0, 0, 0};
  for (long e = 0; e < pm.n_elements(); ++e) {
    const MultiIndex idx = pm.unflatten(e);
    const auto ce = state.f.element_coeffs(e);
    for (int q = 0; q < rule.n_points(); ++q) {
      double fq = 0.0;
      for (int m = 0; m < state.f.n_modes(); ++m)
        fq += ce[m] * tab.value(q, m);
      detail::node_position(pm, idx, rule.nodes[q], x);
      double v2 = 0.0;
      for (int a = pm.dim_x(); a < dim; ++a) v2 += x[a] * x[a];
      const double w = rule.weights[q] * jac;
      out.mass += w * fq;
      out.energy += 0.5 * w * fq * v2;
    }
  }

  // Field energy: exact modal sums per component.
  for (int c = 0; c < state.fields.n_comp(); ++c) {
    const double nrm = l2_norm(state.fields, c);
    out.energy += 0.5 * nrm * nrm;
  }

  const Mesh& xm = state.fields.mesh();
  double total_e = 0.0;
  for (long e = 0; e < xm.n_elements(); ++e)
    total_e += state.fields.at(e, 0, 0) * xm.axis(0).h() / std::sqrt(2.0);
  out.mean_e = total_e / xm.axis(0).extent();
  return out;
}

/// Pre-/post-filter error norms of one named quantity.
struct QuantityErrors {
  std::string name;
  double l2 = 0.0;
  double linf = 0.0;
  double l2_post = 0.0;
  double linf_post = 0.0;
};

struct ErrorReport {
  int nx = 0;
  int nv = 0;
  int degree = 0;
  double t_final = 0.0;
  double dt = 0.0;
  long n_steps = 0;
  double runtime_seconds = 0.0;
  bool filtered = false;
  std::vector<QuantityErrors> quantities;  // f first, then field components

  const QuantityErrors& quantity(const std::string& name) const {
    for (const auto& q : quantities)
      if (q.name == name) return q;
    throw std::invalid_argument("no quantity named " + name);
  }
};

struct ConvergenceTable {
  std::vector<ErrorReport> rows;
};

/// order = log(e_coarse / e_fine) / log(h_coarse / h_fine); NaN marks the
/// first row and exact-zero errors.
struct OrderTable {
  std::vector<std::string> quantity_names;
  // orders[row][quantity][0] = pre-filter, [1] = post-filter
  std::vector<std::vector<std::array<double, 2>>> orders;
};

inline OrderTable convergence_orders(const ConvergenceTable& table) {
  OrderTable out;
  if (table.rows.empty()) return out;
  for (const auto& q : table.rows.front().quantities)
    out.quantity_names.push_back(q.name);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (size_t r = 0; r < table.rows.size(); ++r) {
    std::vector<std::array<double, 2>> row;
    for (size_t qi = 0; qi < out.quantity_names.size(); ++qi) {
      std::array<double, 2> ord{nan, nan};
      if (r > 0) {
        const auto& prev = table.rows[r - 1];
        const auto& cur = table.rows[r];
        if (cur.nx <= prev.nx)
          throw std::invalid_argument("meshes must be strictly refining");
        const double ratio =
            static_cast<double>(cur.nx) / static_cast<double>(prev.nx);
        const auto& qp = prev.quantities[qi];
        const auto& qc = cur.quantities[qi];
        if (qp.l2 > 0.0 && qc.l2 > 0.0)
          ord[0] = std::log(qp.l2 / qc.l2) / std::log(ratio);
        if (qp.l2_post > 0.0 && qc.l2_post > 0.0)
          ord[1] = std::log(qp.l2_post / qc.l2_post) / std::log(ratio);
      }
      row.push_back(ord);
    }
    out.orders.push_back(row);
  }
  return out;
}

namespace detail {

inline std::string sci3(double v) {
  if (std::isnan(v)) return "-";
  std::ostringstream os;
  os << std::scientific << std::setprecision(2) << v;
  return os.str();
}

inline std::string ord2(double v) {
  if (std::isnan(v)) return "-";
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << v;
  return os.str();
}

}  // namespace detail

/// CSV layout mirroring the paper-style tables: per quantity the pre-filter
/// error/order columns, then the post-filter ones. Errors are printed with
/// three significant digits; write_table_sidecar keeps full precision.
inline void emit_table(const ConvergenceTable& table, std::ostream& os) {
  if (table.rows.empty()) return;
  const OrderTable orders = convergence_orders(table);
  os << "mesh";
  for (const auto& name : orders.quantity_names)
    os << ",err_" << name << ",ord_" << name;
  for (const auto& name : orders.quantity_names)
    os << ",err_" << name << "_pp,ord_" << name << "_pp";
  os << '\n';
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    os << row.nx << 'x' << row.nv;
    for (size_t qi = 0; qi < row.quantities.size(); ++qi)
      os << ',' << detail::sci3(row.quantities[qi].l2) << ','
         << detail::ord2(orders.orders[r][qi][0]);
    for (size_t qi = 0; qi < row.quantities.size(); ++qi)
      os << ',' << detail::sci3(row.quantities[qi].l2_post) << ','
         << detail::ord2(orders.orders[r][qi][1]);
    os << '\n';
  }
}

inline void emit_table(const ConvergenceTable& table, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  emit_table(table, os);
}

/// Full-precision companion: flat key = value lines.
inline void write_table_sidecar(const ConvergenceTable& table,
                                std::ostream& os,
                                const std::map<std::string, std::string>& meta) {
  os.precision(17);
  for (const auto& [k, v] : meta) os << "meta." << k << " = " << v << '\n';
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string p = "row" + std::to_string(r) + ".";
    os << p << "nx = " << row.nx << '\n';
    os << p << "nv = " << row.nv << '\n';
    os << p << "degree = " << row.degree << '\n';
    os << p << "t_final = " << row.t_final << '\n';
    os << p << "dt = " << row.dt << '\n';
    os << p << "n_steps = " << row.n_steps << '\n';
    os << p << "runtime_seconds = " << row.runtime_seconds << '\n';
    for (const auto& q : row.quantities) {
      os << p << q.name << ".l2 = " << q.l2 << '\n';
      os << p << q.name << ".linf = " << q.linf << '\n';
      os << p << q.name << ".l2_post = " << q.l2_post << '\n';
      os << p << q.name << ".linf_post = " << q.linf_post << '\n';
    }
  }
}

inline void write_table_sidecar(
    const ConvergenceTable& table, const std::string& path,
    const std::map<std::string, std::string>& meta) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_table_sidecar(table, os, meta);
}

}  // namespace dgvm
