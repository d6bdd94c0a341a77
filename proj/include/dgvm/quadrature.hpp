// Gauss-Legendre quadrature on [-1,1] and tensorized rules on [-1,1]^d.
#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "dgvm/mesh.hpp"

namespace dgvm {

/// 1D Gauss-Legendre rule; exact for polynomials of degree <= 2n-1.
struct Quadrature1D {
  std::vector<double> nodes;
  std::vector<double> weights;
  int size() const { return static_cast<int>(nodes.size()); }
};

/// Legendre P_n(x) and its derivative by the three-term recurrences.
inline void legendre_pair(int n, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = x;
  double d0 = 0.0, d1 = 1.0;
  if (n == 0) {
    p = p0;
    dp = d0;
    return;
  }
  for (int m = 1; m < n; ++m) {
    const double p2 = ((2 * m + 1) * x * p1 - m * p0) / (m + 1);
    const double d2 = (2 * m + 1) * p1 + d0;  // P'_{m+1} = (2m+1) P_m + P'_{m-1}
    p0 = p1;
    p1 = p2;
    d0 = d1;
    d1 = d2;
  }
  p = p1;
  dp = d1;
}

/// Nodes by Newton iteration from the Chebyshev initial guess.
inline Quadrature1D gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("quadrature needs >= 1 point");
  Quadrature1D q;
  q.nodes.resize(n);
  q.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p, dp;
    for (int it = 0; it < 100; ++it) {
      legendre_pair(n, x, p, dp);
      const double dx = -p / dp;
      x += dx;
      if (std::abs(dx) < 1e-15) break;
    }
    legendre_pair(n, x, p, dp);
    q.nodes[n - 1 - i] = x;  // ascending order
    q.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return q;
}

/// Tensor product of identical 1D rules over d axes. Point q decodes to
/// per-axis node indices with axis 0 slowest (same convention as Mesh).
struct QuadratureRule {
  int dim = 1;
  int n_1d = 1;
  Quadrature1D line;
  std::vector<Point> nodes;     // size n_points
  std::vector<double> weights;  // reference weights, sum = 2^d

  int n_points() const { return static_cast<int>(weights.size()); }

  int axis_node(int q, int axis) const {
    int rest = q;
    for (int a = dim - 1; a > axis; --a) rest /= n_1d;
    return rest % n_1d;
  }
};

inline QuadratureRule gauss_rule(int n_points, int dim) {
  if (dim < 1 || dim > kMaxDim)
    throw std::invalid_argument("tensor rule dimension out of range");
  QuadratureRule r;
  r.dim = dim;
  r.n_1d = n_points;
  r.line = gauss_legendre(n_points);
  int total = 1;
  for (int a = 0; a < dim; ++a) total *= n_points;
  r.nodes.resize(total);
  r.weights.assign(total, 1.0);
  for (int q = 0; q < total; ++q) {
    int rest = q;
    for (int a = dim - 1; a >= 0; --a) {
      const int i = rest % n_points;
      rest /= n_points;
      r.nodes[q][a] = r.line.nodes[i];
      r.weights[q] *= r.line.weights[i];
    }
  }
  return r;
}

}  // namespace dgvm
