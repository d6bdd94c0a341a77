// Modal basis for P^k(K): products of normalized Legendre polynomials with
// total degree <= k, orthonormal in the L2 inner product on [-1,1]^d.
#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "dgvm/mesh.hpp"
#include "dgvm/quadrature.hpp"

namespace dgvm {

/// Normalized Legendre: Lhat_p = sqrt((2p+1)/2) P_p, so (Lhat_p, Lhat_q) = delta_pq.
inline void legendre_normalized(int p, double x, double& val, double& dval) {
  double v, dv;
  legendre_pair(p, x, v, dv);
  const double s = std::sqrt((2.0 * p + 1.0) / 2.0);
  val = s * v;
  dval = s * dv;
}

struct Basis {
  int degree = 0;
  int dim = 1;
  std::vector<MultiIndex> modes;  // graded order, mode 0 = constant

  int n_modes() const { return static_cast<int>(modes.size()); }
};

inline Basis make_basis(int degree, int dim) {
  if (degree < 0 || degree > 15)
    throw std::invalid_argument("basis degree must be in [0,15]");
  if (dim < 1 || dim > kMaxDim)
    throw std::invalid_argument("basis dimension out of range");
  Basis b;
  b.degree = degree;
  b.dim = dim;
  for (int total = 0; total <= degree; ++total) {
    if (dim == 1) {
      b.modes.push_back({total, 0, 0});
    } else if (dim == 2) {
      for (int p0 = total; p0 >= 0; --p0)
        b.modes.push_back({p0, total - p0, 0});
    } else {
      for (int p0 = total; p0 >= 0; --p0)
        for (int p1 = total - p0; p1 >= 0; --p1)
          b.modes.push_back({p0, p1, total - p0 - p1});
    }
  }
  return b;
}

/// Values (and, if grads != nullptr, reference-coordinate gradients) of all
/// modes at a reference point. values has n_modes entries; grads is
/// n_modes x dim, row-major.
inline void basis_eval(const Basis& basis, std::span<const double> point,
                       std::span<double> values, double* grads = nullptr) {
  // Per-axis 1D values/derivatives up to the basis degree.
  double v1d[kMaxDim][16];
  double d1d[kMaxDim][16];
  for (int a = 0; a < basis.dim; ++a)
    for (int p = 0; p <= basis.degree; ++p)
      legendre_normalized(p, point[a], v1d[a][p], d1d[a][p]);

  for (int m = 0; m < basis.n_modes(); ++m) {
    const MultiIndex& mi = basis.modes[m];
    double val = 1.0;
    for (int a = 0; a < basis.dim; ++a) val *= v1d[a][mi[a]];
    values[m] = val;
    if (grads) {
      for (int a = 0; a < basis.dim; ++a) {
        double g = 1.0;
        for (int b = 0; b < basis.dim; ++b)
          g *= (b == a) ? d1d[b][mi[b]] : v1d[b][mi[b]];
        grads[m * basis.dim + a] = g;
      }
    }
  }
}

/// Tabulated basis data at the points of a quadrature rule.
struct BasisTable {
  int n_points = 0;
  int n_modes = 0;
  int dim = 1;
  std::vector<double> values;  // [q * n_modes + m]
  std::vector<double> grads;   // [(q * n_modes + m) * dim + a]

  double value(int q, int m) const { return values[q * n_modes + m]; }
  double grad(int q, int m, int a) const {
    return grads[(q * n_modes + m) * dim + a];
  }
};

inline BasisTable tabulate(const Basis& basis,
                           std::span<const Point> points) {
  BasisTable t;
  t.n_points = static_cast<int>(points.size());
  t.n_modes = basis.n_modes();
  t.dim = basis.dim;
  t.values.resize(static_cast<size_t>(t.n_points) * t.n_modes);
  t.grads.resize(static_cast<size_t>(t.n_points) * t.n_modes * basis.dim);
  std::vector<double> vals(t.n_modes);
  std::vector<double> grd(static_cast<size_t>(t.n_modes) * basis.dim);
  for (int q = 0; q < t.n_points; ++q) {
    basis_eval(basis, std::span<const double>(points[q].data(), basis.dim),
               vals, grd.data());
    for (int m = 0; m < t.n_modes; ++m) {
      t.values[q * t.n_modes + m] = vals[m];
      for (int a = 0; a < basis.dim; ++a)
        t.grads[(q * t.n_modes + m) * basis.dim + a] = grd[m * basis.dim + a];
    }
  }
  return t;
}

}  // namespace dgvm
