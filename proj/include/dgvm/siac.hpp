// SIAC post-processing: the B-spline convolution kernel K_h^{2(k+1),k+1},
// its polynomial-reproducing coefficients, exact piecewise convolution of DG
// fields, and the divided-difference operators.
#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "dgvm/field.hpp"

namespace dgvm {

/// Centered cardinal B-spline of order n (degree n-1, support [-n/2, n/2]):
/// the indicator of (-1/2,1/2) convolved with itself n-1 times, evaluated by
/// the lifting recurrence.
inline double bspline_eval(int order, double x) {
  if (order < 1) throw std::invalid_argument("B-spline order must be >= 1");
  if (order == 1) {
    if (std::abs(x) < 0.5) return 1.0;
    return std::abs(x) == 0.5 ? 0.5 : 0.0;
  }
  const double half = 0.5 * order;
  if (std::abs(x) >= half) return 0.0;
  return ((half + x) * bspline_eval(order - 1, x + 0.5) +
          (half - x) * bspline_eval(order - 1, x - 0.5)) /
         (order - 1);
}

/// Coefficients c_{-k..k} of the kernel built from 2k+1 B-splines of order
/// k+1, chosen so the kernel reproduces polynomials of degree up to 2k:
/// sum_gamma c_gamma int y^j psi(y-gamma) dy = delta_{j0}, j = 0..2k.
inline std::vector<double> kernel_coefficients(int k) {
  if (k < 0) throw std::invalid_argument("kernel degree must be >= 0");
  const int n = 2 * k + 1;
  const int order = k + 1;

  // Raw moments mu_i = int u^i psi(u) du over the unit knot intervals.
  const int n_mom = 2 * k + 1;
  std::vector<double> mu(n_mom, 0.0);
  const Quadrature1D gq = gauss_legendre(2 * k + 2);
  const double lo = -0.5 * order;
  for (int cell = 0; cell < order; ++cell) {
    const double a = lo + cell, b = a + 1.0;
    for (int g = 0; g < gq.size(); ++g) {
      const double u = 0.5 * (a + b) + 0.5 * (b - a) * gq.nodes[g];
      const double w = 0.5 * (b - a) * gq.weights[g];
      const double psi = bspline_eval(order, u);
      double upow = 1.0;
      for (int i = 0; i < n_mom; ++i) {
        mu[i] += w * psi * upow;
        upow *= u;
      }
    }
  }

  // Moment matrix: m_j(gamma) = int y^j psi(y-gamma) dy
  //              = sum_i C(j,i) gamma^{j-i} mu_i.
  std::vector<double> binom((n_mom) * (n_mom), 0.0);
  for (int j = 0; j < n_mom; ++j) {
    binom[j * n_mom + 0] = 1.0;
    for (int i = 1; i <= j; ++i)
      binom[j * n_mom + i] =
          binom[(j - 1) * n_mom + i - 1] +
          (i < j ? binom[(j - 1) * n_mom + i] : 0.0);
  }
  std::vector<double> A(static_cast<size_t>(n) * n, 0.0);
  std::vector<double> rhs(n, 0.0);
  rhs[0] = 1.0;
  for (int j = 0; j < n; ++j)
    for (int col = 0; col < n; ++col) {
      const double gamma = col - k;
      double entry = 0.0;
      double gpow = 1.0;  // gamma^{j-i}, descending i from j
      for (int i = j; i >= 0; --i) {
        entry += binom[j * n_mom + i] * gpow * mu[i];
        gpow *= gamma;
      }
      A[j * n + col] = entry;
    }

  // Gaussian elimination with partial pivoting.
  std::vector<double> c(rhs);
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(A[r * n + col]) > std::abs(A[piv * n + col])) piv = r;
    if (A[piv * n + col] == 0.0)
      throw std::runtime_error("kernel moment system is singular");
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(A[piv * n + j], A[col * n + j]);
      std::swap(c[piv], c[col]);
    }
    for (int r = col + 1; r < n; ++r) {
      const double factor = A[r * n + col] / A[col * n + col];
      for (int j = col; j < n; ++j) A[r * n + j] -= factor * A[col * n + j];
      c[r] -= factor * c[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    for (int j = r + 1; j < n; ++j) c[r] -= A[r * n + j] * c[j];
    c[r] /= A[r * n + r];
  }
  return c;
}

/// Scaled tensor-product kernel: per-axis coefficients c_gamma and B-spline
/// order k+1, with the scaling h taken from each mesh axis.
struct SiacKernel {
  int k = 1;
  std::vector<double> coeffs;  // c_{-k..k}
  std::vector<double> h;       // per-axis scaling

  int order() const { return k + 1; }
  /// Half-width of the unscaled support: gamma range k plus spline half.
  double support_radius() const { return k + 0.5 * order(); }

  double eval_unscaled(double u) const {
    double s = 0.0;
    for (int g = -k; g <= k; ++g)
      s += coeffs[g + k] * bspline_eval(order(), u - g);
    return s;
  }
};

inline SiacKernel make_kernel(int k, const Mesh& mesh) {
  SiacKernel ker;
  ker.k = k;
  ker.coeffs = kernel_coefficients(k);
  for (int a = 0; a < mesh.dim(); ++a) ker.h.push_back(mesh.axis(a).h());
  return ker;
}

namespace detail {

/// Per-axis pieces of the convolution at a fixed target coordinate:
/// integrals of the scaled kernel against each local Legendre mode of every
/// mesh cell intersecting the kernel support (cells indexed with wrap).
struct AxisMoments {
  std::vector<int> cells;              // wrapped cell indices
  std::vector<double> integrals;       // [cell_slot * (degree+1) + p]
};

inline AxisMoments siac_axis_moments(const Mesh& mesh, int axis,
                                     const SiacKernel& kernel, int degree,
                                     double x) {
  const AxisSpec& ax = mesh.axis(axis);
  const double h = kernel.h[axis];
  const double radius = kernel.support_radius() * h;
  const int n_modes = degree + 1;

  // Integration breakpoints: kernel knots (unit spacing in u) merged with
  // the cell faces covered by the support.
  std::vector<double> breaks;
  const double u_max = kernel.support_radius();
  const int n_knots = static_cast<int>(std::lround(2 * u_max));
  for (int j = 0; j <= n_knots; ++j) breaks.push_back(x - (u_max - j) * h);
  const double y_lo = x - radius, y_hi = x + radius;
  const long f_lo = static_cast<long>(std::ceil((y_lo - ax.lo) / ax.h()));
  const long f_hi = static_cast<long>(std::floor((y_hi - ax.lo) / ax.h()));
  for (long f = f_lo; f <= f_hi; ++f) breaks.push_back(ax.lo + f * ax.h());
  std::sort(breaks.begin(), breaks.end());

  AxisMoments out;
  const long c_first =
      static_cast<long>(std::floor((y_lo - ax.lo) / ax.h()));
  const long c_last = static_cast<long>(std::floor((y_hi - ax.lo) / ax.h()));
  const int n_cells = static_cast<int>(c_last - c_first + 1);
  out.cells.resize(n_cells);
  for (int i = 0; i < n_cells; ++i) {
    long c = (c_first + i) % ax.n_cells;
    if (c < 0) c += ax.n_cells;
    out.cells[i] = static_cast<int>(c);
  }
  out.integrals.assign(static_cast<size_t>(n_cells) * n_modes, 0.0);

  const Quadrature1D gq = gauss_legendre(kernel.k + 2);
  std::vector<double> lvals(n_modes), ldum(n_modes);
  for (size_t s = 0; s + 1 < breaks.size(); ++s) {
    const double a = breaks[s], b = breaks[s + 1];
    if (b - a < 1e-14 * h) continue;
    const long cell_abs =
        static_cast<long>(std::floor((0.5 * (a + b) - ax.lo) / ax.h()));
    const int slot = static_cast<int>(cell_abs - c_first);
    if (slot < 0 || slot >= n_cells) continue;
    const double cell_lo = ax.lo + cell_abs * ax.h();
    for (int g = 0; g < gq.size(); ++g) {
      const double y = 0.5 * (a + b) + 0.5 * (b - a) * gq.nodes[g];
      const double w = 0.5 * (b - a) * gq.weights[g];
      const double u = (x - y) / h;
      const double kval = kernel.eval_unscaled(u) / h;
      const double xi = 2.0 * (y - cell_lo) / ax.h() - 1.0;
      for (int p = 0; p < n_modes; ++p) {
        double v, dv;
        legendre_normalized(p, xi, v, dv);
        out.integrals[static_cast<size_t>(slot) * n_modes + p] += w * kval * v;
      }
    }
  }
  return out;
}

}  // namespace detail

/// Convolution of the field with the scaled kernel at one point, by exact
/// piecewise integration (kernel knots and element faces split the domain;
/// each piece is a polynomial integrated with a (k+2)-point Gauss rule).
/// Every axis is extended periodically, including velocity axes.
inline double postprocess_point(const DGField& field,
                                std::span<const double> point,
                                const SiacKernel& kernel, int comp = 0) {
  const Mesh& mesh = field.mesh();
  const int dim = mesh.dim();
  const int deg = field.degree();
  const int n1 = deg + 1;

  std::array<detail::AxisMoments, kMaxDim> ax;
  for (int a = 0; a < dim; ++a)
    ax[a] = detail::siac_axis_moments(mesh, a, kernel, deg, point[a]);

  double total = 0.0;
  MultiIndex idx{0, 0, 0};
  const int n0 = static_cast<int>(ax[0].cells.size());
  const int n1c = dim > 1 ? static_cast<int>(ax[1].cells.size()) : 1;
  const int n2c = dim > 2 ? static_cast<int>(ax[2].cells.size()) : 1;
  for (int i0 = 0; i0 < n0; ++i0) {
    idx[0] = ax[0].cells[i0];
    for (int i1 = 0; i1 < n1c; ++i1) {
      if (dim > 1) idx[1] = ax[1].cells[i1];
      for (int i2 = 0; i2 < n2c; ++i2) {
        if (dim > 2) idx[2] = ax[2].cells[i2];
        const long e = mesh.flatten(std::span<const int>(idx.data(), dim));
        const auto ce = field.element_coeffs(e);
        const int nm = field.n_modes();
        double acc = 0.0;
        for (int m = 0; m < nm; ++m) {
          const MultiIndex& mi = field.basis().modes[m];
          double w = ax[0].integrals[static_cast<size_t>(i0) * n1 + mi[0]];
          if (dim > 1)
            w *= ax[1].integrals[static_cast<size_t>(i1) * n1 + mi[1]];
          if (dim > 2)
            w *= ax[2].integrals[static_cast<size_t>(i2) * n1 + mi[2]];
          acc += ce[m * field.n_comp() + comp] * w;
        }
        total += acc;
      }
    }
  }
  return total;
}

/// Filtered values on a tensor grid (per-element Gauss points); carries the
/// quadrature weights so norms can be recomputed from the sample alone.
struct FilteredSample {
  int dim = 1;
  long n_points = 0;
  std::vector<double> points;   // [i * dim + a]
  std::vector<double> values;   // [i]
  std::vector<double> weights;  // physical quadrature weight per point

  NormPair error_vs(const PointFn& ref) const {
    NormPair out;
    double acc = 0.0;
    for (long i = 0; i < n_points; ++i) {
      const double diff =
          values[i] - ref(std::span<const double>(&points[i * dim], dim));
      acc += weights[i] * diff * diff;
      out.linf = std::max(out.linf, std::abs(diff));
    }
    out.l2 = std::sqrt(acc);
    return out;
  }

  /// Columnar text: one point per line, coordinates then value.
  void write_columns(std::ostream& os) const {
    os.precision(17);
    for (long i = 0; i < n_points; ++i) {
      for (int a = 0; a < dim; ++a) os << points[i * dim + a] << ' ';
      os << values[i] << '\n';
    }
  }
};

/// Apply the kernel over per-element Gauss grids with n_1d points per axis
/// (degree+3 by default). Per-axis kernel moments are cached per distinct
/// grid coordinate, so the cost is one tensor contraction per output point.
inline FilteredSample postprocess_field(const DGField& field,
                                        const SiacKernel& kernel,
                                        int n_1d = 0, int comp = 0) {
  const Mesh& mesh = field.mesh();
  const int dim = mesh.dim();
  const int deg = field.degree();
  const int nq = n_1d > 0 ? n_1d : deg + 3;
  const Quadrature1D line = gauss_legendre(nq);
  const int n1 = deg + 1;

  // Distinct coordinates and their axis moments, per axis.
  std::array<std::vector<detail::AxisMoments>, kMaxDim> moments;
  std::array<std::vector<double>, kMaxDim> coords;
  for (int a = 0; a < dim; ++a) {
    const int nc = mesh.axis(a).n_cells;
    coords[a].resize(static_cast<size_t>(nc) * nq);
    moments[a].resize(static_cast<size_t>(nc) * nq);
    for (int cell = 0; cell < nc; ++cell)
      for (int i = 0; i < nq; ++i) {
        const double x = mesh.from_reference(a, cell, line.nodes[i]);
        coords[a][cell * nq + i] = x;
        moments[a][cell * nq + i] =
            detail::siac_axis_moments(mesh, a, kernel, deg, x);
      }
  }

  FilteredSample sample;
  sample.dim = dim;
  long total = mesh.n_elements();
  int per_elem = 1;
  for (int a = 0; a < dim; ++a) per_elem *= nq;
  sample.n_points = total * per_elem;
  sample.points.resize(static_cast<size_t>(sample.n_points) * dim);
  sample.values.resize(sample.n_points);
  sample.weights.resize(sample.n_points);

  const int nm = field.n_modes();
  long out_i = 0;
  for (long e = 0; e < mesh.n_elements(); ++e) {
    const MultiIndex eidx = mesh.unflatten(e);
    std::array<int, kMaxDim> node{};
    for (int q = 0; q < per_elem; ++q) {
      int rest = q;
      for (int a = dim - 1; a >= 0; --a) {
        node[a] = rest % nq;
        rest /= nq;
      }
      double w = 1.0;
      for (int a = 0; a < dim; ++a)
        w *= line.weights[node[a]] * 0.5 * mesh.axis(a).h();

      double value = 0.0;
      MultiIndex idx{0, 0, 0};
      const detail::AxisMoments* am[kMaxDim] = {nullptr, nullptr, nullptr};
      for (int a = 0; a < dim; ++a)
        am[a] = &moments[a][static_cast<size_t>(eidx[a]) * nq + node[a]];
      const int c0 = static_cast<int>(am[0]->cells.size());
      const int c1 = dim > 1 ? static_cast<int>(am[1]->cells.size()) : 1;
      const int c2 = dim > 2 ? static_cast<int>(am[2]->cells.size()) : 1;
      for (int i0 = 0; i0 < c0; ++i0) {
        idx[0] = am[0]->cells[i0];
        for (int i1 = 0; i1 < c1; ++i1) {
          if (dim > 1) idx[1] = am[1]->cells[i1];
          for (int i2 = 0; i2 < c2; ++i2) {
            if (dim > 2) idx[2] = am[2]->cells[i2];
            const long el =
                mesh.flatten(std::span<const int>(idx.data(), dim));
            const auto ce = field.element_coeffs(el);
            double acc = 0.0;
            for (int m = 0; m < nm; ++m) {
              const MultiIndex& mi = field.basis().modes[m];
              double wm =
                  am[0]->integrals[static_cast<size_t>(i0) * n1 + mi[0]];
              if (dim > 1)
                wm *= am[1]->integrals[static_cast<size_t>(i1) * n1 + mi[1]];
              if (dim > 2)
                wm *= am[2]->integrals[static_cast<size_t>(i2) * n1 + mi[2]];
              acc += ce[m * field.n_comp() + comp] * wm;
            }
            value += acc;
          }
        }
      }

      for (int a = 0; a < dim; ++a)
        sample.points[out_i * dim + a] =
            coords[a][static_cast<size_t>(eidx[a]) * nq + node[a]];
      sample.values[out_i] = value;
      sample.weights[out_i] = w;
      ++out_i;
    }
  }
  return sample;
}

/// Central difference quotient with half-cell offsets along one axis,
/// composed per multi-index: the divided differences of the error bound.
inline PointFn divided_difference(PointFn w, std::span<const int> lambda,
                                  std::span<const double> h) {
  const int dim = static_cast<int>(lambda.size());
  PointFn cur = std::move(w);
  for (int a = 0; a < dim; ++a)
    for (int rep = 0; rep < lambda[a]; ++rep) {
      const PointFn prev = cur;
      const double ha = h[a];
      cur = [prev, a, ha](std::span<const double> x) {
        Point xp{0, 0, 0}, xm{0, 0, 0};
        for (size_t b = 0; b < x.size(); ++b) xp[b] = xm[b] = x[b];
        xp[a] += 0.5 * ha;
        xm[a] -= 0.5 * ha;
        const auto n = x.size();
        return (prev(std::span<const double>(xp.data(), n)) -
                prev(std::span<const double>(xm.data(), n))) /
               ha;
      };
    }
  return cur;
}

}  // namespace dgvm
