// Piecewise-polynomial fields: modal coefficient storage, L2 projection,
// point evaluation and quadrature-based norms.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "dgvm/basis.hpp"
#include "dgvm/mesh.hpp"
#include "dgvm/quadrature.hpp"

namespace dgvm {

/// Scalar function of a physical point (dim entries used).
using PointFn = std::function<double(std::span<const double>)>;

/// DG field: coefficients indexed (element, mode, component), element-major.
/// The mesh is shared immutable state; coefficient updates never mutate it.
class DGField {
 public:
  DGField() = default;

  DGField(std::shared_ptr<const Mesh> mesh, int degree, int n_comp = 1)
      : mesh_(std::move(mesh)),
        basis_(make_basis(degree, mesh_->dim())),
        n_comp_(n_comp),
        coeffs_(static_cast<size_t>(mesh_->n_elements()) * basis_.n_modes() *
                    n_comp_,
                0.0) {
    if (n_comp < 1) throw std::invalid_argument("component count must be >= 1");
  }

  const Mesh& mesh() const { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
  const Basis& basis() const { return basis_; }
  int degree() const { return basis_.degree; }
  int n_comp() const { return n_comp_; }
  int n_modes() const { return basis_.n_modes(); }
  long n_elements() const { return mesh_->n_elements(); }

  std::span<double> coeffs() { return coeffs_; }
  std::span<const double> coeffs() const { return coeffs_; }

  double& at(long element, int mode, int comp = 0) {
    return coeffs_[(element * basis_.n_modes() + mode) * n_comp_ + comp];
  }
  double at(long element, int mode, int comp = 0) const {
    return coeffs_[(element * basis_.n_modes() + mode) * n_comp_ + comp];
  }

  std::span<const double> element_coeffs(long element) const {
    return std::span<const double>(coeffs_)
        .subspan(static_cast<size_t>(element) * basis_.n_modes() * n_comp_,
                 static_cast<size_t>(basis_.n_modes()) * n_comp_);
  }

  /// Value at a reference point of a given element.
  double eval_ref(long element, std::span<const double> xi,
                  int comp = 0) const {
    std::vector<double> vals(basis_.n_modes());
    basis_eval(basis_, xi, vals);
    double s = 0.0;
    for (int m = 0; m < basis_.n_modes(); ++m)
      s += at(element, m, comp) * vals[m];
    return s;
  }

  /// Value at a physical point (half-open cell convention on faces).
  double eval(std::span<const double> x, int comp = 0) const {
    MultiIndex idx{0, 0, 0};
    Point xi{0.0, 0.0, 0.0};
    for (int a = 0; a < mesh_->dim(); ++a) {
      idx[a] = mesh_->locate(a, x[a]);
      double xw = x[a];
      const AxisSpec& ax = mesh_->axis(a);
      if (ax.periodic)
        xw -= ax.extent() * std::floor((xw - ax.lo) / ax.extent());
      xi[a] = mesh_->to_reference(a, idx[a], xw);
    }
    const long e = mesh_->flatten(std::span<const int>(idx.data(), mesh_->dim()));
    return eval_ref(e, std::span<const double>(xi.data(), mesh_->dim()), comp);
  }

  /// Value with every axis wrapped periodically (v axes included); used by
  /// the post-processor and divided differences.
  double eval_periodic_ext(std::span<const double> x, int comp = 0) const {
    Point xw{0.0, 0.0, 0.0};
    for (int a = 0; a < mesh_->dim(); ++a) {
      const AxisSpec& ax = mesh_->axis(a);
      xw[a] = x[a] - ax.extent() * std::floor((x[a] - ax.lo) / ax.extent());
    }
    return eval(std::span<const double>(xw.data(), mesh_->dim()), comp);
  }

  bool all_finite() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(),
                       [](double c) { return std::isfinite(c); });
  }

 private:
  std::shared_ptr<const Mesh> mesh_;
  Basis basis_;
  int n_comp_ = 1;
  std::vector<double> coeffs_;
};

namespace detail {

/// Physical coordinates of a tensor quadrature node in an element.
inline void node_position(const Mesh& mesh, const MultiIndex& idx,
                          const Point& xi, Point& x) {
  for (int a = 0; a < mesh.dim(); ++a)
    x[a] = mesh.from_reference(a, idx[a], xi[a]);
}

}  // namespace detail

/// Element-wise L2 projection. Quadrature defaults to degree+2 points per
/// axis; pass n_quad explicitly when projecting rougher integrands.
inline DGField l2_project(const std::vector<PointFn>& fns,
                          std::shared_ptr<const Mesh> mesh, int degree,
                          int n_quad = 0) {
  const int n_comp = static_cast<int>(fns.size());
  DGField field(mesh, degree, n_comp);
  const Mesh& msh = field.mesh();
  const int nq = n_quad > 0 ? n_quad : degree + 2;
  const QuadratureRule rule = gauss_rule(nq, msh.dim());
  const BasisTable table = tabulate(field.basis(), rule.nodes);
  const int n_modes = field.n_modes();

  Point x{0.0, 0.0, 0.0};
  for (long e = 0; e < msh.n_elements(); ++e) {
    const MultiIndex idx = msh.unflatten(e);
    for (int q = 0; q < rule.n_points(); ++q) {
      detail::node_position(msh, idx, rule.nodes[q], x);
      for (int c = 0; c < n_comp; ++c) {
        const double fv =
            fns[c](std::span<const double>(x.data(), msh.dim()));
        if (!std::isfinite(fv))
          throw std::invalid_argument("l2_project: non-finite sample value");
        const double wf = rule.weights[q] * fv;
        for (int m = 0; m < n_modes; ++m)
          field.at(e, m, c) += wf * table.value(q, m);
      }
    }
  }
  return field;
}

inline DGField l2_project(const PointFn& fn, std::shared_ptr<const Mesh> mesh,
                          int degree, int n_quad = 0) {
  return l2_project(std::vector<PointFn>{fn}, std::move(mesh), degree, n_quad);
}

/// L2 norm of one component; exact via modal orthonormality.
inline double l2_norm(const DGField& field, int comp = 0) {
  const double jac = field.mesh().element_volume() /
                     std::pow(2.0, field.mesh().dim());
  double acc = 0.0;
  for (long e = 0; e < field.n_elements(); ++e)
    for (int m = 0; m < field.n_modes(); ++m) {
      const double c = field.at(e, m, comp);
      acc += c * c;
    }
  return std::sqrt(jac * acc);
}

struct NormPair {
  double l2 = 0.0;
  double linf = 0.0;
};

/// L2 and Linf distance to a reference function, measured on a tensor Gauss
/// grid with degree+3 points per axis (Linf is the grid max, not a true sup).
inline NormPair error_norms(const DGField& field, const PointFn& ref,
                            int comp = 0, int n_quad = 0) {
  const Mesh& msh = field.mesh();
  const int nq = n_quad > 0 ? n_quad : field.degree() + 3;
  const QuadratureRule rule = gauss_rule(nq, msh.dim());
  const BasisTable table = tabulate(field.basis(), rule.nodes);
  const double jac = msh.element_volume() / std::pow(2.0, msh.dim());
  const int n_modes = field.n_modes();

  NormPair out;
  double acc = 0.0;
  Point x{0.0, 0.0, 0.0};
  for (long e = 0; e < msh.n_elements(); ++e) {
    const MultiIndex idx = msh.unflatten(e);
    for (int q = 0; q < rule.n_points(); ++q) {
      double uh = 0.0;
      for (int m = 0; m < n_modes; ++m)
        uh += field.at(e, m, comp) * table.value(q, m);
      detail::node_position(msh, idx, rule.nodes[q], x);
      const double diff =
          uh - ref(std::span<const double>(x.data(), msh.dim()));
      acc += rule.weights[q] * jac * diff * diff;
      out.linf = std::max(out.linf, std::abs(diff));
    }
  }
  out.l2 = std::sqrt(acc);
  return out;
}

inline double l2_error(const DGField& field, const PointFn& ref, int comp = 0,
                       int n_quad = 0) {
  return error_norms(field, ref, comp, n_quad).l2;
}

inline double linf_error(const DGField& field, const PointFn& ref,
                         int comp = 0, int n_quad = 0) {
  return error_norms(field, ref, comp, n_quad).linf;
}

}  // namespace dgvm
