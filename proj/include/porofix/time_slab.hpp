#pragma once

#include <vector>

#include <Eigen/Dense>

namespace porofix {

/// 0 = t_0 < t_1 < ... < t_N = T.
class TimePartition {
 public:
  explicit TimePartition(std::vector<double> times);
  static TimePartition uniform(double t_end, int num_slabs);

  int num_slabs() const { return static_cast<int>(times_.size()) - 1; }
  double t_start(int n) const { return times_.at(static_cast<std::size_t>(n - 1)); }
  double t_end(int n) const { return times_.at(static_cast<std::size_t>(n)); }
  /// Length of slab n (1-based).
  double tau(int n) const { return t_end(n) - t_start(n); }
  double tau_max() const;
  double final_time() const { return times_.back(); }
  const std::vector<double>& times() const { return times_; }

 private:
  std::vector<double> times_;
};

/// dG(r) reference-slab data: Gauss nodes on [0,1], their Lagrange basis and
/// the coefficient arrays of the slab equations
///   alpha_ij = int_0^1 phi_j' phi_i dt + gamma_i gamma_j,
///   beta_ii  = int_0^1 phi_i^2 dt,
///   gamma_i  = phi_i(0+).
/// The physical slab length enters only as the explicit tau_n factors.
struct SlabBasis {
  int r = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
  Eigen::MatrixXd alpha;
  Eigen::VectorXd beta;
  Eigen::VectorXd gamma;

  int num_nodes() const { return r + 1; }
  /// Lagrange weights phi_j(t_hat), t_hat in [0,1].
  Eigen::VectorXd weights_at(double t_hat) const;
  /// Physical time of node j on slab [t_start, t_start + tau].
  double node_time(double t_start, double tau, int j) const {
    return t_start + tau * nodes.at(static_cast<std::size_t>(j));
  }
};

/// Throws ConfigError for r outside {0,1}.
SlabBasis slab_coefficients(int r);

/// sum_j phi_j(t_hat) * coeffs[j].
Eigen::VectorXd eval_polynomial(const SlabBasis& basis, const std::vector<Eigen::VectorXd>& coeffs,
                                double t_hat);

}  // namespace porofix
