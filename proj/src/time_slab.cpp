#include "porofix/time_slab.hpp"

#include <algorithm>
#include <span>
#include <string>

#include "porofix/errors.hpp"
#include "porofix/fem_spaces.hpp"
#include "porofix/quadrature.hpp"

namespace porofix {

TimePartition::TimePartition(std::vector<double> times) : times_(std::move(times)) {
  if (times_.size() < 2) throw ConfigError("time: partition needs at least one slab");
  if (times_.front() != 0.0) throw ConfigError("time: partition must start at t = 0");
  for (std::size_t i = 1; i < times_.size(); ++i) {
    if (!(times_[i] > times_[i - 1])) throw ConfigError("time: node times must be strictly increasing");
  }
}

TimePartition TimePartition::uniform(double t_end, int num_slabs) {
  if (num_slabs < 1) throw ConfigError("time.N must be >= 1");
  if (!(t_end > 0.0)) throw ConfigError("time.T must be > 0");
  std::vector<double> t(static_cast<std::size_t>(num_slabs) + 1);
  for (int n = 0; n < num_slabs; ++n) t[static_cast<std::size_t>(n)] = t_end * n / num_slabs;
  t.back() = t_end;
  return TimePartition(std::move(t));
}

double TimePartition::tau_max() const {
  double m = 0.0;
  for (int n = 1; n <= num_slabs(); ++n) m = std::max(m, tau(n));
  return m;
}

Eigen::VectorXd SlabBasis::weights_at(double t_hat) const {
  Eigen::VectorXd w(num_nodes());
  lagrange_1d(nodes, t_hat, std::span<double>(w.data(), static_cast<std::size_t>(w.size())), {});
  return w;
}

SlabBasis slab_coefficients(int r) {
  if (r < 0 || r > 1) throw ConfigError("orders.r: unsupported time order " + std::to_string(r));
  SlabBasis b;
  b.r = r;
  const GaussLegendre1D g = gauss_legendre(r + 1);
  b.nodes = g.nodes;
  b.weights = g.weights;
  const int n = r + 1;
  b.gamma = b.weights_at(0.0);

  // Integrands are of degree <= 2r; an (r+2)-point rule is exact.
  const GaussLegendre1D q = gauss_legendre(r + 2);
  b.alpha = Eigen::MatrixXd::Zero(n, n);
  b.beta = Eigen::VectorXd::Zero(n);
  std::vector<double> val(static_cast<std::size_t>(n));
  std::vector<double> der(static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < q.nodes.size(); ++k) {
    lagrange_1d(b.nodes, q.nodes[k], val, der);
    for (int i = 0; i < n; ++i) {
      b.beta[i] += q.weights[k] * val[static_cast<std::size_t>(i)] * val[static_cast<std::size_t>(i)];
      for (int j = 0; j < n; ++j) {
        b.alpha(i, j) += q.weights[k] * der[static_cast<std::size_t>(j)] * val[static_cast<std::size_t>(i)];
      }
    }
  }
  b.alpha += b.gamma * b.gamma.transpose();
  return b;
}

Eigen::VectorXd eval_polynomial(const SlabBasis& basis, const std::vector<Eigen::VectorXd>& coeffs,
                                double t_hat) {
  if (static_cast<int>(coeffs.size()) != basis.num_nodes()) {
    throw ConfigError("eval_polynomial: expected one coefficient vector per time node");
  }
  const Eigen::VectorXd w = basis.weights_at(t_hat);
  Eigen::VectorXd out = w[0] * coeffs[0];
  for (int j = 1; j < basis.num_nodes(); ++j) out += w[j] * coeffs[static_cast<std::size_t>(j)];
  return out;
}

}  // namespace porofix
