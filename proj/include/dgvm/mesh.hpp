// Uniform tensor-product phase-space mesh: periodic in x, wall-bounded in v.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dgvm {

inline constexpr int kMaxDim = 3;

using Point = std::array<double, kMaxDim>;
using MultiIndex = std::array<int, kMaxDim>;

/// One coordinate axis of the mesh. Cells are uniform by construction.
struct AxisSpec {
  double lo = 0.0;
  double hi = 1.0;
  int n_cells = 1;
  bool periodic = false;

  double extent() const { return hi - lo; }
  double h() const { return (hi - lo) / n_cells; }

  bool operator==(const AxisSpec&) const = default;
};

inline void validate_axis(const AxisSpec& ax, const std::string& name) {
  if (!(ax.hi > ax.lo))
    throw std::invalid_argument("axis " + name + ": hi must exceed lo");
  if (ax.n_cells < 1)
    throw std::invalid_argument("axis " + name + ": n_cells must be >= 1");
  if (!std::isfinite(ax.lo) || !std::isfinite(ax.hi))
    throw std::invalid_argument("axis " + name + ": bounds must be finite");
}

/// Cartesian product of axes; x axes first, then v axes. Elements are
/// flattened row-major with axis 0 slowest, so orderings (and hence
/// reductions over elements) are deterministic.
class Mesh {
 public:
  static constexpr int kBoundary = -1;

  Mesh() = default;

  Mesh(std::vector<AxisSpec> x_axes, std::vector<AxisSpec> v_axes)
      : axes_(std::move(x_axes)), dim_x_(static_cast<int>(axes_.size())) {
    axes_.insert(axes_.end(), v_axes.begin(), v_axes.end());
    dim_v_ = static_cast<int>(axes_.size()) - dim_x_;
    if (dim() < 1 || dim() > kMaxDim)
      throw std::invalid_argument("mesh dimension must be in [1," +
                                  std::to_string(kMaxDim) + "]");
    for (int a = 0; a < dim(); ++a) {
      const bool is_x = a < dim_x_;
      validate_axis(axes_[a], (is_x ? "x" : "v") + std::to_string(a));
      if (is_x && !axes_[a].periodic)
        throw std::invalid_argument("x axes must be periodic");
      if (!is_x && axes_[a].periodic)
        throw std::invalid_argument("v axes must not be periodic");
    }
    strides_.assign(dim(), 1);
    for (int a = dim() - 2; a >= 0; --a)
      strides_[a] = strides_[a + 1] * axes_[a + 1].n_cells;
    n_elements_ = strides_[0] * axes_[0].n_cells;
  }

  int dim() const { return static_cast<int>(axes_.size()); }
  int dim_x() const { return dim_x_; }
  int dim_v() const { return dim_v_; }
  long n_elements() const { return n_elements_; }
  const AxisSpec& axis(int a) const { return axes_[a]; }

  double element_volume() const {
    double vol = 1.0;
    for (const auto& ax : axes_) vol *= ax.h();
    return vol;
  }

  long flatten(std::span<const int> idx) const {
    long id = 0;
    for (int a = 0; a < dim(); ++a) id += strides_[a] * idx[a];
    return id;
  }

  MultiIndex unflatten(long id) const {
    MultiIndex idx{0, 0, 0};
    for (int a = 0; a < dim(); ++a) {
      idx[a] = static_cast<int>(id / strides_[a]);
      id -= idx[a] * strides_[a];
    }
    return idx;
  }

  /// Index of the cell across the given face; kBoundary on outer v faces.
  int neighbor_index(int cell, int axis, bool high_side) const {
    const int n = axes_[axis].n_cells;
    int j = cell + (high_side ? 1 : -1);
    if (j < 0 || j >= n) {
      if (!axes_[axis].periodic) return kBoundary;
      j = (j + n) % n;
    }
    return j;
  }

  double cell_lo(int axis, int cell) const {
    return axes_[axis].lo + cell * axes_[axis].h();
  }

  Point element_center(long id) const {
    const MultiIndex idx = unflatten(id);
    Point c{0.0, 0.0, 0.0};
    for (int a = 0; a < dim(); ++a)
      c[a] = cell_lo(a, idx[a]) + 0.5 * axes_[a].h();
    return c;
  }

  /// Cell containing a physical coordinate (half-open convention; the top
  /// cell is closed). Periodic axes wrap, others throw for outside points.
  int locate(int axis, double x) const {
    const AxisSpec& ax = axes_[axis];
    if (ax.periodic) {
      x -= ax.extent() * std::floor((x - ax.lo) / ax.extent());
    } else if (x < ax.lo || x > ax.hi) {
      throw std::domain_error("coordinate outside mesh domain");
    }
    int i = static_cast<int>(std::floor((x - ax.lo) / ax.h()));
    if (i < 0) i = 0;
    if (i >= ax.n_cells) i = ax.n_cells - 1;
    return i;
  }

  /// Map a physical coordinate into [-1,1] within a given cell.
  double to_reference(int axis, int cell, double x) const {
    return 2.0 * (x - cell_lo(axis, cell)) / axes_[axis].h() - 1.0;
  }

  double from_reference(int axis, int cell, double xi) const {
    return cell_lo(axis, cell) + 0.5 * (xi + 1.0) * axes_[axis].h();
  }

  /// Sub-mesh consisting of the x axes only (for fields living on Omega_x).
  Mesh x_mesh() const {
    return Mesh(std::vector<AxisSpec>(axes_.begin(), axes_.begin() + dim_x_),
                {});
  }

  bool same_layout(const Mesh& other) const {
    return axes_ == other.axes_ && dim_x_ == other.dim_x_;
  }

 private:
  std::vector<AxisSpec> axes_;
  int dim_x_ = 0;
  int dim_v_ = 0;
  std::vector<long> strides_;
  long n_elements_ = 0;
};

/// Mesh for one of the reduced systems: d_x = 1, d_v in {0,1,2}.
inline Mesh build_mesh(const std::vector<AxisSpec>& x_axes,
                       const std::vector<AxisSpec>& v_axes) {
  if (x_axes.size() != 1)
    throw std::invalid_argument("exactly one spatial axis is supported");
  if (v_axes.size() > 2)
    throw std::invalid_argument("at most two velocity axes are supported");
  return Mesh(x_axes, v_axes);
}

}  // namespace dgvm
