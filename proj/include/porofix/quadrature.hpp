#pragma once

#include <array>
#include <vector>

namespace porofix {

/// Tensor Gauss rule on the reference interval [0,1] or square [0,1]^2.
/// Weights sum to 1. For dim == 1 only the first coordinate is used.
struct QuadratureRule {
  int dim = 1;
  std::vector<std::array<double, 2>> points;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
};

struct GaussLegendre1D {
  std::vector<double> nodes;    // ascending, in (0,1)
  std::vector<double> weights;  // sum to 1
};

/// Gauss-Legendre nodes and weights on [0,1] via Newton iteration on the
/// three-term Legendre recurrence.
GaussLegendre1D gauss_legendre(int npts);

/// Tensor Gauss-Legendre rule, exact for per-direction degree <= 2*npts-1.
QuadratureRule gauss_rule(int npts, int dim);

/// Gauss-Lobatto nodes on [0,1] for polynomial order 1 or 2.
std::vector<double> gauss_lobatto_nodes(int order);

}  // namespace porofix
