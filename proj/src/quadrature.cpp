#include "porofix/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "porofix/errors.hpp"

namespace porofix {

GaussLegendre1D gauss_legendre(int npts) {
  if (npts < 1) throw ConfigError("quadrature: number of Gauss points must be >= 1");
  GaussLegendre1D rule;
  rule.nodes.resize(static_cast<std::size_t>(npts));
  rule.weights.resize(static_cast<std::size_t>(npts));
  const int n = npts;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Chebyshev-like initial guess for the i-th root of P_n on [-1,1].
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    // Recompute derivative at the converged root.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Map [-1,1] -> [0,1]; roots come out descending, store ascending.
    rule.nodes[static_cast<std::size_t>(i)] = 0.5 * (1.0 - x);
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = 0.5 * (1.0 + x);
    rule.weights[static_cast<std::size_t>(i)] = 0.5 * w;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = 0.5 * w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.5;
  return rule;
}

QuadratureRule gauss_rule(int npts, int dim) {
  if (dim != 1 && dim != 2) throw ConfigError("quadrature: dim must be 1 or 2");
  const GaussLegendre1D g = gauss_legendre(npts);
  QuadratureRule q;
  q.dim = dim;
  if (dim == 1) {
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      q.points.push_back({g.nodes[i], 0.0});
      q.weights.push_back(g.weights[i]);
    }
    return q;
  }
  for (std::size_t j = 0; j < g.nodes.size(); ++j) {
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      q.points.push_back({g.nodes[i], g.nodes[j]});
      q.weights.push_back(g.weights[i] * g.weights[j]);
    }
  }
  return q;
}

std::vector<double> gauss_lobatto_nodes(int order) {
  switch (order) {
    case 1:
      return {0.0, 1.0};
    case 2:
      return {0.0, 0.5, 1.0};
    default:
      throw ConfigError("Gauss-Lobatto nodes: unsupported order " + std::to_string(order));
  }
}

}  // namespace porofix
