#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "porofix/mesh.hpp"
#include "porofix/params.hpp"
#include "porofix/solvers.hpp"

namespace porofix {

/// Closed-form pressure and displacement with the derivatives needed to
/// derive the Biot forcing by substitution.
struct ManufacturedSolution {
  std::string id;
  std::function<double(Point2, double)> p;
  std::function<Point2(Point2, double)> grad_p;
  std::function<Eigen::Matrix2d(Point2, double)> hess_p;
  std::function<double(Point2, double)> dt_p;
  std::function<Point2(Point2, double)> u;
  /// (c, d) entry: d u_c / d x_d.
  std::function<Eigen::Matrix2d(Point2, double)> grad_u;
  /// Per component c: Hessian of u_c.
  std::function<std::array<Eigen::Matrix2d, 2>(Point2, double)> hess_u;
  std::function<double(Point2, double)> dt_div_u;
};

/// p = u = 0.
ManufacturedSolution mms_zero();
/// p = t sin(pi x/Lx) sin(pi y/Ly), u = 0.
ManufacturedSolution mms_pressure_only(double lx = 1.0, double ly = 1.0);
/// p = t X, u = t (X, X) with X = sin(pi x/Lx) sin(pi y/Ly).
ManufacturedSolution mms_coupled(double lx = 1.0, double ly = 1.0);
/// p = sin(pi t) X, u = sin(pi t) (X, X); genuinely transient in time.
ManufacturedSolution mms_coupled_transient(double lx = 1.0, double ly = 1.0);

/// f = d_t(c0 p + b div u) - div(K grad p),
/// g = -(1/rho_b) div(2 mu eps(u) + lambda div u I - b p I).
SourceData mms_forcing(const ManufacturedSolution& exact, const PhysParams& params);

/// Throws ConfigError if p or u do not vanish on the boundary of `mesh` or at t = 0.
void check_mms_compatible(const ManufacturedSolution& exact, const Mesh& mesh, double t_end);

/// Exact Darcy velocity q = -K grad p.
Point2 exact_flux(const ManufacturedSolution& exact, const PhysParams& params, Point2 x, double t);

// ---------------------------------------------------------------------------
// Discrete representatives of exact fields.
// ---------------------------------------------------------------------------

Eigen::VectorXd project_pressure(const BiotDiscretization& disc, const std::function<double(Point2)>& p);
/// Canonical RT interpolant (edge and interior moments).
Eigen::VectorXd interpolate_flux(const BiotDiscretization& disc, const std::function<Point2(Point2)>& q);
/// Nodal interpolant on the free Gauss-Lobatto nodes.
Eigen::VectorXd interpolate_displacement(const BiotDiscretization& disc,
                                         const std::function<Point2(Point2)>& u);

// ---------------------------------------------------------------------------

struct ErrorReport {
  double p_L2_T = 0.0;    // ||p_h(T^-) - p(T)||
  double q_L2_T = 0.0;    // ||q_h(T^-) - q(T)||
  double u_L2_T = 0.0;    // broken ||u_h(T^-) - u(T)||
  double p_L2L2 = 0.0;    // L2(I; L2)
  double q_L2L2 = 0.0;
  double u_L2L2 = 0.0;
  double u_H1_T = 0.0;    // broken |u_h(T^-) - u(T)|_1
};

ErrorReport error_norms(const BiotDiscretization& disc, const Trajectory& trajectory,
                        const ManufacturedSolution& exact, const TimePartition& partition);

/// L2 distance between a discrete field at one instant and exact fields.
struct FieldErrors {
  double p = 0.0;
  double q = 0.0;
  double u = 0.0;
  /// Broken H1 seminorm of the displacement error.
  double u_grad = 0.0;
};

FieldErrors field_errors(const BiotDiscretization& disc, const Eigen::VectorXd& p,
                         const Eigen::VectorXd& q, const Eigen::VectorXd& u,
                         const ManufacturedSolution& exact, double t);

/// order_i = log(e_i / e_{i+1}) / log(h_i / h_{i+1}); empty where an error is 0.
/// Throws ConfigError for fewer than two entries or non-positive sizes.
std::vector<std::optional<double>> observed_order(const std::vector<double>& errors,
                                                  const std::vector<double>& sizes);

// ---------------------------------------------------------------------------

/// Split-versus-monolithic diagnostics, indexed [k-1][i] for iteration k and node i.
struct ContractionDiag {
  std::vector<std::vector<Eigen::VectorXd>> E_p;
  std::vector<std::vector<Eigen::VectorXd>> S_p;
  std::vector<std::vector<double>> S_p_norm;
  std::vector<std::vector<std::optional<double>>> S_p_ratio;
  /// Errors of the end values at t_n^- per iteration.
  std::vector<double> ep_trace;
  std::vector<double> eq_trace;
  std::vector<double> eu_trace;

  int num_iterations() const { return static_cast<int>(E_p.size()); }
  /// max_i ||S_p^{i,k}||.
  double max_S_p_norm(int k) const;
};

ContractionDiag contraction_diagnostics(const BiotDiscretization& disc,
                                        const std::vector<SlabState>& iterates,
                                        const SlabState& monolithic);

struct ContractionRun {
  SlabResult split;
  SlabState monolithic;
  ContractionDiag diag;
};

/// Cold-start split run on one slab with every iterate recorded, the
/// monolithic oracle for the same slab, and the diagnostics relating them.
ContractionRun run_contraction_study(const BiotDiscretization& disc, const SlabProblem& slab,
                                     const SplitConfig& split);

/// sum over interior edges of int_e [p]^2 ds.
double pressure_jump_indicator(const BiotDiscretization& disc, const Eigen::VectorXd& p);

}  // namespace porofix
