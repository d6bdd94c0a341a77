// Semi-discrete DG operators for the two reduced kinetic systems:
// Vlasov transport with upwind fluxes, the Ampere / reduced-Maxwell field
// updates, velocity moments, and Gauss-law initialization.
#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "dgvm/field.hpp"

namespace dgvm {

enum class SystemKind {
  VlasovAmpere1D1V,     // f(x,v), E(x);           dE/dt = -(J - mean J)
  StreamingWeibel1D2V,  // f(x,v1,v2), (E1,E2,B3); reduced Maxwell in 1D
};

// Component slots of the field DGField for StreamingWeibel1D2V.
inline constexpr int kE1 = 0;
inline constexpr int kE2 = 1;
inline constexpr int kB3 = 2;

inline int field_components(SystemKind kind) {
  return kind == SystemKind::VlasovAmpere1D1V ? 1 : 3;
}

struct SimulationState {
  DGField f;       // distribution on the phase-space mesh
  DGField fields;  // E (VA) or (E1,E2,B3) (SW) on the x mesh
  double t = 0.0;
};

struct Moments {
  DGField rho;      // charge density on the x mesh
  DGField current;  // d_v components
};

struct StateDeriv {
  DGField df;
  DGField dfields;
};

inline void validate_state(const SimulationState& state, SystemKind kind) {
  const Mesh& pm = state.f.mesh();
  const Mesh& xm = state.fields.mesh();
  if (xm.dim() != 1 || pm.dim_x() != 1)
    throw std::invalid_argument("state: expected one spatial axis");
  if (!(pm.axis(0) == xm.axis(0)))
    throw std::invalid_argument("state: f and fields disagree on the x axis");
  if (state.f.degree() != state.fields.degree())
    throw std::invalid_argument("state: f and fields disagree on degree");
  const int want_dv = kind == SystemKind::VlasovAmpere1D1V ? 1 : 2;
  if (pm.dim_v() != want_dv)
    throw std::invalid_argument("state: wrong velocity dimension for system");
  if (state.fields.n_comp() != field_components(kind))
    throw std::invalid_argument("state: wrong field component count");
}

namespace detail {

/// Values of an x-mesh field at the per-cell 1D quadrature nodes,
/// layout [cell * n_nodes * n_comp + node * n_comp + comp].
inline std::vector<double> field_at_line_nodes(const DGField& xfield,
                                               const Quadrature1D& line) {
  const Mesh& xm = xfield.mesh();
  const Basis b1 = make_basis(xfield.degree(), 1);
  const int nn = line.size();
  const int nc = xfield.n_comp();
  std::vector<double> vals(static_cast<size_t>(xm.axis(0).n_cells) * nn * nc,
                           0.0);
  std::vector<double> phi(b1.n_modes());
  for (int i = 0; i < nn; ++i) {
    const double xi = line.nodes[i];
    basis_eval(b1, std::span<const double>(&xi, 1), phi);
    for (int cell = 0; cell < xm.axis(0).n_cells; ++cell)
      for (int c = 0; c < nc; ++c) {
        double s = 0.0;
        for (int m = 0; m < b1.n_modes(); ++m)
          s += xfield.at(cell, m, c) * phi[m];
        vals[(static_cast<size_t>(cell) * nn + i) * nc + c] = s;
      }
  }
  return vals;
}

/// Quadrature + basis tables reused across elements in one operator sweep.
struct VlasovWork {
  int dim = 2;
  int n1d = 0;
  QuadratureRule vol;
  BasisTable vol_table;
  std::vector<int> vol_decode;            // [q * dim + a] -> 1D node index
  std::array<BasisTable, kMaxDim> trace_lo;
  std::array<BasisTable, kMaxDim> trace_hi;
  std::array<std::vector<int>, kMaxDim> face_decode;  // [qf * dim + b]
  int n_face = 0;
  std::vector<double> node_coord;  // [a][cell * n1d + i] physical coordinate
  std::array<int, kMaxDim> coord_off{};

  VlasovWork(const Mesh& mesh, const Basis& basis, int n_quad) {
    dim = mesh.dim();
    n1d = n_quad;
    vol = gauss_rule(n_quad, dim);
    vol_table = tabulate(basis, vol.nodes);
    vol_decode.resize(static_cast<size_t>(vol.n_points()) * dim);
    for (int q = 0; q < vol.n_points(); ++q)
      for (int a = 0; a < dim; ++a)
        vol_decode[q * dim + a] = vol.axis_node(q, a);

    n_face = 1;
    for (int a = 0; a < dim - 1; ++a) n_face *= n1d;
    for (int a = 0; a < dim; ++a) {
      std::vector<Point> lo_pts(n_face), hi_pts(n_face);
      face_decode[a].assign(static_cast<size_t>(n_face) * dim, 0);
      for (int qf = 0; qf < n_face; ++qf) {
        int rest = qf;
        // Spanned axes enumerated ascending, slowest first.
        std::array<int, kMaxDim> node{};
        for (int b = dim - 1; b >= 0; --b) {
          if (b == a) continue;
          node[b] = rest % n1d;
          rest /= n1d;
        }
        Point lo{0.0, 0.0, 0.0}, hi{0.0, 0.0, 0.0};
        for (int b = 0; b < dim; ++b) {
          if (b == a) {
            lo[b] = -1.0;
            hi[b] = 1.0;
          } else {
            lo[b] = hi[b] = vol.line.nodes[node[b]];
            face_decode[a][qf * dim + b] = node[b];
          }
        }
        lo_pts[qf] = lo;
        hi_pts[qf] = hi;
      }
      trace_lo[a] = tabulate(basis, lo_pts);
      trace_hi[a] = tabulate(basis, hi_pts);
    }

    int off = 0;
    for (int a = 0; a < dim; ++a) {
      coord_off[a] = off;
      off += mesh.axis(a).n_cells * n1d;
    }
    node_coord.resize(off);
    for (int a = 0; a < dim; ++a)
      for (int cell = 0; cell < mesh.axis(a).n_cells; ++cell)
        for (int i = 0; i < n1d; ++i)
          node_coord[coord_off[a] + cell * n1d + i] =
              mesh.from_reference(a, cell, vol.line.nodes[i]);
  }

  double coord(int axis, int cell, int node) const {
    return node_coord[coord_off[axis] + cell * n1d + node];
  }

  double face_weight(int qf, int axis) const {
    double w = 1.0;
    for (int b = 0; b < dim; ++b)
      if (b != axis) w *= vol.line.weights[face_decode[axis][qf * dim + b]];
    return w;
  }
};

}  // namespace detail

/// Velocity moments of f: charge density and current, exact for the
/// piecewise polynomial (both are again degree-k polynomials in x).
inline Moments compute_moments(const DGField& f) {
  const Mesh& pm = f.mesh();
  const int dv = pm.dim_v();
  auto xmesh = std::make_shared<Mesh>(pm.x_mesh());
  Moments mom{DGField(xmesh, f.degree(), 1), DGField(xmesh, f.degree(), dv)};

  const int nq = f.degree() + 2;
  detail::VlasovWork work(pm, f.basis(), nq);
  const Basis xbasis = make_basis(f.degree(), 1);
  std::vector<Point> line_pts(nq);
  for (int i = 0; i < nq; ++i) line_pts[i] = Point{work.vol.line.nodes[i], 0, 0};
  const BasisTable xtab = tabulate(xbasis, line_pts);

  double v_jac = 1.0;  // product of h_a/2 over velocity axes
  for (int a = 1; a < pm.dim(); ++a) v_jac *= 0.5 * pm.axis(a).h();

  const int n_modes = f.n_modes();
  std::vector<double> fq(work.vol.n_points());
  for (long e = 0; e < pm.n_elements(); ++e) {
    const MultiIndex idx = pm.unflatten(e);
    const auto ce = f.element_coeffs(e);
    for (int q = 0; q < work.vol.n_points(); ++q) {
      double s = 0.0;
      for (int m = 0; m < n_modes; ++m) s += ce[m] * work.vol_table.value(q, m);
      fq[q] = s;
    }
    for (int q = 0; q < work.vol.n_points(); ++q) {
      const int i0 = work.vol_decode[q * pm.dim() + 0];
      const double wf = work.vol.weights[q] * fq[q] * v_jac;
      double vw[2] = {1.0, 1.0};
      for (int a = 1; a < pm.dim(); ++a)
        vw[a - 1] = work.coord(a, idx[a], work.vol_decode[q * pm.dim() + a]);
      for (int p = 0; p < xbasis.n_modes(); ++p) {
        const double phip = xtab.value(i0, p);
        mom.rho.at(idx[0], p, 0) += wf * phip;
        for (int c = 0; c < dv; ++c)
          mom.current.at(idx[0], p, c) += wf * vw[c] * phip;
      }
    }
  }
  return mom;
}

/// Semi-discrete Vlasov operator: df/dt coefficients from the current state.
/// Volume terms plus pointwise-upwinded face terms; x faces wrap, outer v
/// faces admit outflow only (consistent with f -> 0 at the v boundary).
inline DGField vlasov_rhs(const SimulationState& state, SystemKind kind) {
  validate_state(state, kind);
  const DGField& f = state.f;
  const Mesh& pm = f.mesh();
  const int dim = pm.dim();
  const int n_modes = f.n_modes();
  const int nq = f.degree() + 2;

  detail::VlasovWork work(pm, f.basis(), nq);
  const std::vector<double> fld =
      detail::field_at_line_nodes(state.fields, work.vol.line);
  const int nfc = state.fields.n_comp();

  DGField rhs(f.mesh_ptr(), f.degree(), 1);

  double inv_h2[kMaxDim];  // 2/h_a per axis
  for (int a = 0; a < dim; ++a) inv_h2[a] = 2.0 / pm.axis(a).h();

  // Transport speed along `axis` at a node with per-axis 1D indices `node`
  // and element multi-index `idx`. For faces the index along `axis` is
  // unused. ix_node is the 1D x-quadrature index of the node.
  const auto speed = [&](int axis, const MultiIndex& idx, const int* node,
                         int ix_node) -> double {
    if (kind == SystemKind::VlasovAmpere1D1V) {
      if (axis == 0) return work.coord(1, idx[1], node[1]);  // v
      return fld[(static_cast<size_t>(idx[0]) * nq + ix_node) * nfc + 0];  // E
    }
    const auto fval = [&](int c) {
      return fld[(static_cast<size_t>(idx[0]) * nq + ix_node) * nfc + c];
    };
    if (axis == 0) return work.coord(2, idx[2], node[2]);  // v2
    if (axis == 1)
      return fval(kE1) + work.coord(2, idx[2], node[2]) * fval(kB3);
    return fval(kE2) - work.coord(1, idx[1], node[1]) * fval(kB3);
  };

  std::vector<double> fq(work.vol.n_points());
  std::vector<double> flux(work.n_face);

  for (long e = 0; e < pm.n_elements(); ++e) {
    const MultiIndex idx = pm.unflatten(e);
    const auto ce = f.element_coeffs(e);

    // Volume: sum_q w_q f_q sum_a s_a (2/h_a) dphi_m/dxi_a.
    for (int q = 0; q < work.vol.n_points(); ++q) {
      double s = 0.0;
      for (int m = 0; m < n_modes; ++m) s += ce[m] * work.vol_table.value(q, m);
      fq[q] = s;
    }
    for (int q = 0; q < work.vol.n_points(); ++q) {
      const int* node = &work.vol_decode[q * dim];
      const double wf = work.vol.weights[q] * fq[q];
      double sa[kMaxDim];
      for (int a = 0; a < dim; ++a)
        sa[a] = wf * inv_h2[a] * speed(a, idx, node, node[0]);
      for (int m = 0; m < n_modes; ++m) {
        double acc = 0.0;
        for (int a = 0; a < dim; ++a) acc += sa[a] * work.vol_table.grad(q, m, a);
        rhs.at(e, m) += acc;
      }
    }

    // High face along every axis, plus outer v boundaries.
    for (int a = 0; a < dim; ++a) {
      const int nb = pm.neighbor_index(idx[a], a, /*high=*/true);
      const bool is_x_axis = a < pm.dim_x();

      if (nb != Mesh::kBoundary) {
        MultiIndex nidx = idx;
        nidx[a] = nb;
        const long er = pm.flatten(std::span<const int>(nidx.data(), dim));
        const auto cr = f.element_coeffs(er);
        for (int qf = 0; qf < work.n_face; ++qf) {
          double sl = 0.0, sr = 0.0;
          for (int m = 0; m < n_modes; ++m) {
            sl += ce[m] * work.trace_hi[a].value(qf, m);
            sr += cr[m] * work.trace_lo[a].value(qf, m);
          }
          const int* node = &work.face_decode[a][qf * dim];
          const double sig = speed(a, idx, node, node[0]);
          flux[qf] = work.face_weight(qf, a) *
                     (sig >= 0.0 ? sig * sl : sig * sr);
        }
        for (int m = 0; m < n_modes; ++m) {
          double gl = 0.0, gr = 0.0;
          for (int qf = 0; qf < work.n_face; ++qf) {
            gl += flux[qf] * work.trace_hi[a].value(qf, m);
            gr += flux[qf] * work.trace_lo[a].value(qf, m);
          }
          rhs.at(e, m) -= inv_h2[a] * gl;
          rhs.at(er, m) += inv_h2[a] * gr;
        }
      } else {
        // Outer wall at the high end: pure-upwind outflow, zero inflow.
        for (int qf = 0; qf < work.n_face; ++qf) {
          double s = 0.0;
          for (int m = 0; m < n_modes; ++m)
            s += ce[m] * work.trace_hi[a].value(qf, m);
          const int* node = &work.face_decode[a][qf * dim];
          const double sig = speed(a, idx, node, node[0]);
          flux[qf] = work.face_weight(qf, a) * std::max(sig, 0.0) * s;
        }
        for (int m = 0; m < n_modes; ++m) {
          double g = 0.0;
          for (int qf = 0; qf < work.n_face; ++qf)
            g += flux[qf] * work.trace_hi[a].value(qf, m);
          rhs.at(e, m) -= inv_h2[a] * g;
        }
      }

      if (!is_x_axis && idx[a] == 0) {
        // Outer wall at the low end (outward normal -1).
        for (int qf = 0; qf < work.n_face; ++qf) {
          double s = 0.0;
          for (int m = 0; m < n_modes; ++m)
            s += ce[m] * work.trace_lo[a].value(qf, m);
          const int* node = &work.face_decode[a][qf * dim];
          const double sig = speed(a, idx, node, node[0]);
          flux[qf] = work.face_weight(qf, a) * std::max(-sig, 0.0) * s;
        }
        for (int m = 0; m < n_modes; ++m) {
          double g = 0.0;
          for (int qf = 0; qf < work.n_face; ++qf)
            g += flux[qf] * work.trace_lo[a].value(qf, m);
          rhs.at(e, m) -= inv_h2[a] * g;
        }
      }
    }
  }
  return rhs;
}

/// VA field update dE/dt = -(J - mean J). Subtracting the spatial mean keeps
/// the x-average of E invariant, consistent with Gauss-law solvability on a
/// periodic domain.
inline DGField ampere_rhs(const Moments& moments) {
  const DGField& J = moments.current;
  const Mesh& xm = J.mesh();
  DGField dE(J.mesh_ptr(), J.degree(), 1);
  const double h = xm.axis(0).h();
  const double length = xm.axis(0).extent();
  double total = 0.0;
  for (long e = 0; e < xm.n_elements(); ++e)
    total += J.at(e, 0, 0) * h / std::sqrt(2.0);
  const double mean = total / length;
  for (long e = 0; e < xm.n_elements(); ++e)
    for (int m = 0; m < J.n_modes(); ++m) dE.at(e, m, 0) = -J.at(e, m, 0);
  for (long e = 0; e < xm.n_elements(); ++e)
    dE.at(e, 0, 0) += mean * std::sqrt(2.0);
  return dE;
}

/// Reduced Maxwell update for the streaming Weibel system:
///   dB3 = d(E1)/dx,  dE1 = d(B3)/dx - j1,  dE2 = -j2
/// with upwind characteristic fluxes  E1~ = {E1} - [B3]/2,  B3~ = {B3} - [E1]/2
/// (jump convention [q] = q_left - q_right).
inline DGField maxwell_rhs(const SimulationState& state,
                           const Moments& moments) {
  validate_state(state, SystemKind::StreamingWeibel1D2V);
  const DGField& F = state.fields;
  const Mesh& xm = F.mesh();
  const int k = F.degree();
  const int n_modes = F.n_modes();
  const int n = xm.axis(0).n_cells;
  const double inv_h2 = 2.0 / xm.axis(0).h();

  DGField out(F.mesh_ptr(), k, 3);

  // Volume quadrature (integrands of degree 2k-1).
  const QuadratureRule rule = gauss_rule(k + 2, 1);
  const Basis b1 = make_basis(k, 1);
  const BasisTable tab = tabulate(b1, rule.nodes);

  std::vector<double> phi_lo(n_modes), phi_hi(n_modes), dphi(n_modes);
  {
    std::vector<double> tmp(n_modes);
    double xi = -1.0;
    basis_eval(b1, std::span<const double>(&xi, 1), phi_lo);
    xi = 1.0;
    basis_eval(b1, std::span<const double>(&xi, 1), phi_hi);
  }

  for (int e = 0; e < n; ++e) {
    for (int q = 0; q < rule.n_points(); ++q) {
      double e1 = 0.0, b3 = 0.0;
      for (int m = 0; m < n_modes; ++m) {
        e1 += F.at(e, m, kE1) * tab.value(q, m);
        b3 += F.at(e, m, kB3) * tab.value(q, m);
      }
      const double w = rule.weights[q] * inv_h2;
      for (int m = 0; m < n_modes; ++m) {
        out.at(e, m, kE1) -= w * b3 * tab.grad(q, m, 0);
        out.at(e, m, kB3) -= w * e1 * tab.grad(q, m, 0);
      }
    }
    for (int m = 0; m < n_modes; ++m) {
      out.at(e, m, kE1) -= moments.current.at(e, m, 0);
      out.at(e, m, kE2) -= moments.current.at(e, m, 1);
    }
  }

  // Faces (periodic): single flux per face, scattered to both sides.
  for (int e = 0; e < n; ++e) {
    const int er = (e + 1) % n;
    double e1l = 0.0, b3l = 0.0, e1r = 0.0, b3r = 0.0;
    for (int m = 0; m < n_modes; ++m) {
      e1l += F.at(e, m, kE1) * phi_hi[m];
      b3l += F.at(e, m, kB3) * phi_hi[m];
      e1r += F.at(er, m, kE1) * phi_lo[m];
      b3r += F.at(er, m, kB3) * phi_lo[m];
    }
    const double e1_tilde = 0.5 * (e1l + e1r) + 0.5 * (b3r - b3l);
    const double b3_tilde = 0.5 * (b3l + b3r) + 0.5 * (e1r - e1l);
    for (int m = 0; m < n_modes; ++m) {
      out.at(e, m, kE1) += inv_h2 * b3_tilde * phi_hi[m];
      out.at(er, m, kE1) -= inv_h2 * b3_tilde * phi_lo[m];
      out.at(e, m, kB3) += inv_h2 * e1_tilde * phi_hi[m];
      out.at(er, m, kB3) -= inv_h2 * e1_tilde * phi_lo[m];
    }
  }
  return out;
}

/// Electric field from Gauss's law on the periodic 1D x mesh: exact
/// antidifferentiation of rho - background, zero-mean, projected to degree k.
inline DGField gauss_law_init(const DGField& rho, double background) {
  const Mesh& xm = rho.mesh();
  if (xm.dim() != 1)
    throw std::invalid_argument("gauss_law_init expects a 1D x mesh");
  const int k = rho.degree();
  const int n = xm.axis(0).n_cells;
  const double h = xm.axis(0).h();

  // Reference antiderivative of normalized Legendre modes at xi:
  // p = 0: (xi+1)/sqrt(2); p >= 1: s_p (P_{p+1} - P_{p-1}) / (2p+1).
  const auto mode_antideriv = [](int p, double xi) {
    if (p == 0) return (xi + 1.0) / std::sqrt(2.0);
    double pp, dpp, pm, dpm;
    legendre_pair(p + 1, xi, pp, dpp);
    legendre_pair(p - 1, xi, pm, dpm);
    return std::sqrt((2.0 * p + 1.0) / 2.0) * (pp - pm) / (2.0 * p + 1.0);
  };

  // Accumulate E at cell starts.
  std::vector<double> e0(n + 1, 0.0);
  for (int e = 0; e < n; ++e) {
    double inc = 0.0;
    for (int m = 0; m < rho.n_modes(); ++m)
      inc += rho.at(e, m, 0) * mode_antideriv(m, 1.0);
    e0[e + 1] = e0[e] + 0.5 * h * inc - background * h;
  }
  if (std::abs(e0[n]) > 1e-10)
    throw std::invalid_argument(
        "gauss_law_init: rho minus background is not neutral");

  auto mesh = rho.mesh_ptr();
  const PointFn efun = [=, &rho](std::span<const double> x) {
    const int cell = mesh->locate(0, x[0]);
    double xw = x[0];
    const AxisSpec& ax = mesh->axis(0);
    xw -= ax.extent() * std::floor((xw - ax.lo) / ax.extent());
    const double xi = mesh->to_reference(0, cell, xw);
    double s = 0.0;
    for (int m = 0; m < rho.n_modes(); ++m)
      s += rho.at(cell, m, 0) * mode_antideriv(m, xi);
    return e0[cell] + 0.5 * h * s - background * 0.5 * h * (xi + 1.0);
  };

  DGField E = l2_project(efun, mesh, k, k + 3);
  double total = 0.0;
  for (int e = 0; e < n; ++e) total += E.at(e, 0, 0) * h / std::sqrt(2.0);
  const double mean = total / xm.axis(0).extent();
  for (int e = 0; e < n; ++e) E.at(e, 0, 0) -= mean * std::sqrt(2.0);
  return E;
}

/// f(x,v) -> f(x,-v), exact: mirrored element indices with per-mode parity
/// factors. Requires velocity axes symmetric about zero.
inline DGField reflect_v(const DGField& f) {
  const Mesh& pm = f.mesh();
  for (int a = pm.dim_x(); a < pm.dim(); ++a)
    if (std::abs(pm.axis(a).lo + pm.axis(a).hi) >
        1e-12 * std::abs(pm.axis(a).hi - pm.axis(a).lo))
      throw std::invalid_argument(
          "reflect_v requires v axes symmetric about zero");
  DGField out(f.mesh_ptr(), f.degree(), f.n_comp());
  const int dim = pm.dim();
  for (long e = 0; e < pm.n_elements(); ++e) {
    MultiIndex idx = pm.unflatten(e);
    for (int a = pm.dim_x(); a < dim; ++a)
      idx[a] = pm.axis(a).n_cells - 1 - idx[a];
    const long er = pm.flatten(std::span<const int>(idx.data(), dim));
    for (int m = 0; m < f.n_modes(); ++m) {
      int parity = 0;
      for (int a = pm.dim_x(); a < dim; ++a) parity += f.basis().modes[m][a];
      const double sign = (parity % 2 == 0) ? 1.0 : -1.0;
      for (int c = 0; c < f.n_comp(); ++c)
        out.at(er, m, c) = sign * f.at(e, m, c);
    }
  }
  return out;
}

/// Combined time derivative of (f, fields) for the chosen system.
inline StateDeriv state_rhs(const SimulationState& state, SystemKind kind) {
  StateDeriv d;
  d.df = vlasov_rhs(state, kind);
  const Moments mom = compute_moments(state.f);
  d.dfields = kind == SystemKind::VlasovAmpere1D1V
                  ? ampere_rhs(mom)
                  : maxwell_rhs(state, mom);
  return d;
}

}  // namespace dgvm
