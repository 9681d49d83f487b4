#pragma once

#include <memory>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace porofix {

using SpMat = Eigen::SparseMatrix<double>;

/// Sparse LU factorization of a general square system (saddle point or SPD),
/// with iterative refinement in `solve`. Throws LinearSolveError tagged with
/// the system name when the matrix is structurally or numerically singular.
class SparseLuSolver {
 public:
  SparseLuSolver(const SpMat& matrix, std::string tag);
  ~SparseLuSolver();
  SparseLuSolver(const SparseLuSolver&) = delete;
  SparseLuSolver& operator=(const SparseLuSolver&) = delete;

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  /// Relative residual ||Ax - b|| / ||b|| of the most recent solve.
  double last_residual() const { return last_residual_; }
  int size() const { return static_cast<int>(matrix_.rows()); }

 private:
  struct Impl;
  SpMat matrix_;
  std::string tag_;
  std::unique_ptr<Impl> impl_;
  mutable double last_residual_ = 0.0;
};

/// Cholesky factorization of a symmetric matrix that must be positive
/// definite. Throws IndefiniteOperatorError otherwise.
class SpdSolver {
 public:
  SpdSolver(const SpMat& matrix, std::string tag);
  ~SpdSolver();
  SpdSolver(const SpdSolver&) = delete;
  SpdSolver& operator=(const SpdSolver&) = delete;

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  double last_residual() const { return last_residual_; }
  int size() const { return static_cast<int>(matrix_.rows()); }

 private:
  struct Impl;
  SpMat matrix_;
  std::string tag_;
  std::unique_ptr<Impl> impl_;
  mutable double last_residual_ = 0.0;
};

/// One-shot solve of a square sparse system.
Eigen::VectorXd linear_solve(const SpMat& matrix, const Eigen::VectorXd& rhs,
                             const std::string& tag = "system");

/// ||Ax - b|| / ||b||, or ||Ax|| when b = 0.
double relative_residual(const SpMat& matrix, const Eigen::VectorXd& x, const Eigen::VectorXd& rhs);

}  // namespace porofix
