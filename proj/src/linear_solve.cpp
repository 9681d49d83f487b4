#include "porofix/linear_solve.hpp"

#include <cmath>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "porofix/errors.hpp"

namespace porofix {

namespace {

// Refinement stops once the residual reaches round-off level.
constexpr double kRefineTarget = 1e-15;
constexpr int kMaxRefine = 3;
// A residual this large after refinement means the factorization is useless.
constexpr double kResidualFailure = 1e-6;

template <typename Factor>
Eigen::VectorXd refined_solve(const Factor& factor, const SpMat& a, const Eigen::VectorXd& rhs,
                              const std::string& tag, double& residual) {
  if (a.rows() == 0) {
    residual = 0.0;
    return Eigen::VectorXd();
  }
  Eigen::VectorXd x = factor.solve(rhs);
  residual = relative_residual(a, x, rhs);
  for (int it = 0; it < kMaxRefine && residual > kRefineTarget; ++it) {
    const Eigen::VectorXd r = rhs - a * x;
    const Eigen::VectorXd candidate = x + factor.solve(r);
    const double res = relative_residual(a, candidate, rhs);
    if (!(res < residual)) break;
    x = candidate;
    residual = res;
  }
  if (!x.allFinite() || !(residual <= kResidualFailure)) {
    throw LinearSolveError(tag + ": solve failed, relative residual " + std::to_string(residual));
  }
  return x;
}

}  // namespace

double relative_residual(const SpMat& matrix, const Eigen::VectorXd& x, const Eigen::VectorXd& rhs) {
  const double r = (matrix * x - rhs).norm();
  const double bn = rhs.norm();
  return bn > 0.0 ? r / bn : r;
}

struct SparseLuSolver::Impl {
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
};

SparseLuSolver::SparseLuSolver(const SpMat& matrix, std::string tag)
    : matrix_(matrix), tag_(std::move(tag)), impl_(std::make_unique<Impl>()) {
  if (matrix_.rows() != matrix_.cols()) throw LinearSolveError(tag_ + ": matrix is not square");
  if (matrix_.rows() == 0) return;
  matrix_.makeCompressed();
  impl_->lu.analyzePattern(matrix_);
  impl_->lu.factorize(matrix_);
  if (impl_->lu.info() != Eigen::Success) {
    throw LinearSolveError(tag_ + ": singular system (" + impl_->lu.lastErrorMessage() + ")");
  }
}

SparseLuSolver::~SparseLuSolver() = default;

Eigen::VectorXd SparseLuSolver::solve(const Eigen::VectorXd& rhs) const {
  return refined_solve(impl_->lu, matrix_, rhs, tag_, last_residual_);
}

struct SpdSolver::Impl {
  Eigen::SimplicialLLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> llt;
};

SpdSolver::SpdSolver(const SpMat& matrix, std::string tag)
    : matrix_(matrix), tag_(std::move(tag)), impl_(std::make_unique<Impl>()) {
  if (matrix_.rows() != matrix_.cols()) throw LinearSolveError(tag_ + ": matrix is not square");
  if (matrix_.rows() == 0) return;
  impl_->llt.compute(matrix_);
  if (impl_->llt.info() != Eigen::Success) {
    throw IndefiniteOperatorError(tag_ +
                                  ": operator is not positive definite; increase the interior "
                                  "penalty sip.delta0");
  }
}

SpdSolver::~SpdSolver() = default;

Eigen::VectorXd SpdSolver::solve(const Eigen::VectorXd& rhs) const {
  return refined_solve(impl_->llt, matrix_, rhs, tag_, last_residual_);
}

Eigen::VectorXd linear_solve(const SpMat& matrix, const Eigen::VectorXd& rhs, const std::string& tag) {
  const SparseLuSolver solver(matrix, tag);
  return solver.solve(rhs);
}

}  // namespace porofix
