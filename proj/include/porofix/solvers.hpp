#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "porofix/assembly.hpp"
#include "porofix/fem_spaces.hpp"
#include "porofix/linear_solve.hpp"
#include "porofix/mesh.hpp"
#include "porofix/params.hpp"
#include "porofix/time_slab.hpp"

namespace porofix {

/// Fixed-stress split settings. `L` is the stabilization (1/Pa).
struct SplitConfig {
  double L = 0.0;
  double tol = 1e-10;
  int max_iter = 200;
  bool warm_start = true;

  void validate() const;
};

enum class StopCause { converged, max_iter };

const char* to_string(StopCause cause);

struct IterationRecord {
  int k = 0;
  /// max_j ||P^{j,k} - P^{j,k-1}|| in the L2(Omega) norm.
  double dp_norm = 0.0;
  /// max_j ||U^{j,k} - U^{j,k-1}|| in the broken L2 norm.
  double du_norm = 0.0;
  /// dp_norm(k) / dp_norm(k-1); present from k = 2 on.
  std::optional<double> ratio;
  /// dp_norm relative to max_j ||P^{j,k}||.
  double relative_dp = 0.0;
};

struct IterationReport {
  std::vector<IterationRecord> iterations;
  StopCause stop = StopCause::max_iter;

  int num_iterations() const { return static_cast<int>(iterations.size()); }
};

/// Coefficient vectors at the r+1 Gauss nodes of one slab.
struct SlabState {
  std::vector<Eigen::VectorXd> P;
  std::vector<Eigen::VectorXd> Q;
  std::vector<Eigen::VectorXd> U;

  static SlabState zeros(const Spaces& spaces, int num_nodes);
  /// Constant-in-time extension of end values.
  static SlabState constant(const SlabHistory& history, const Spaces& spaces, int num_nodes);
};

/// Mesh, spaces, assembled operators and the factorized elasticity matrix of
/// one configuration. The elasticity matrix is constant, so it is factorized
/// once at construction; this throws IndefiniteOperatorError when the SIP
/// penalty is too small for coercivity.
///
/// Not thread-safe: flow-system factorizations are cached lazily per (tau, L).
class BiotDiscretization {
 public:
  BiotDiscretization(Mesh mesh, int s, int r, PhysParams params, SipConfig sip);
  ~BiotDiscretization();

  const Mesh& mesh() const { return mesh_; }
  const Spaces& spaces() const { return spaces_; }
  const SlabBasis& basis() const { return basis_; }
  const PhysParams& params() const { return params_; }
  const SipConfig& sip() const { return sip_; }
  const AssembledOperators& ops() const { return ops_; }
  int num_nodes() const { return basis_.num_nodes(); }

  const SpdSolver& elasticity_solver() const { return *elasticity_; }
  const SparseLuSolver& flow_solver(double tau, double L) const;
  const SparseLuSolver& monolithic_solver(double tau) const;

  /// Block matrix of the coupled (P^j, Q^j) flow system over all nodes.
  SpMat flow_matrix(double tau, double L) const;
  /// Block matrix of the fully coupled (P^j, Q^j, U^j) system.
  SpMat monolithic_matrix(double tau) const;

  double pressure_norm(const Eigen::VectorXd& p) const;
  double flux_norm(const Eigen::VectorXd& q) const;
  double displacement_norm(const Eigen::VectorXd& u) const;

 private:
  Mesh mesh_;
  Spaces spaces_;
  SlabBasis basis_;
  PhysParams params_;
  SipConfig sip_;
  AssembledOperators ops_;
  std::unique_ptr<SpdSolver> elasticity_;
  mutable std::map<std::pair<double, double>, std::unique_ptr<SparseLuSolver>> flow_cache_;
  mutable std::map<double, std::unique_ptr<SparseLuSolver>> mono_cache_;
};

/// Everything that defines the equations of slab n given its history.
struct SlabProblem {
  int n = 1;
  double t_start = 0.0;
  double tau = 0.0;
  SlabHistory history;
  SlabRhs rhs;
};

/// `history` may be empty only for n == 1.
SlabProblem make_slab_problem(const BiotDiscretization& disc, const SourceData& sources,
                              const TimePartition& partition, int n,
                              const std::optional<SlabHistory>& history);

struct FlowStepResult {
  std::vector<Eigen::VectorXd> P;
  std::vector<Eigen::VectorXd> Q;
};

/// One flow solve of the split: all r+1 nodes of (P, Q) at once with the
/// mechanics lagged at `lagged`.
FlowStepResult solve_flow_step(const BiotDiscretization& disc, const SlabProblem& slab, double L,
                               const SlabState& lagged);

/// A U = C P + rho_b <g(t_{n,i}), z> for a single node i.
Eigen::VectorXd solve_mechanics_step(const BiotDiscretization& disc, const SlabProblem& slab,
                                     const Eigen::VectorXd& pressure, int node);

struct SlabResult {
  SlabState state;
  IterationReport report;
};

using IterateObserver = std::function<void(int k, const SlabState& iterate)>;

/// Fixed-stress iteration on one slab. Starts from `initial` (zeros if empty)
/// and stops when the relative pressure increment drops to `split.tol` (k >= 2),
/// the lagged data stop changing exactly, or at `split.max_iter`.
SlabResult fixed_stress_slab(const BiotDiscretization& disc, const SlabProblem& slab,
                             const SplitConfig& split, const std::optional<SlabState>& initial = {},
                             const IterateObserver& observer = {});

/// Fully coupled slab solve; the limit object of the split iteration.
SlabState solve_monolithic_slab(const BiotDiscretization& disc, const SlabProblem& slab);

enum class MarchMode { split, monolithic };

struct SlabRecord {
  int n = 0;
  double t_start = 0.0;
  double t_end = 0.0;
  SlabState state;
  std::optional<IterationReport> report;
  Eigen::VectorXd p_end;
  Eigen::VectorXd q_end;
  Eigen::VectorXd u_end;
};

struct Trajectory {
  std::vector<SlabRecord> slabs;

  int num_slabs() const { return static_cast<int>(slabs.size()); }
  const SlabRecord& last() const { return slabs.back(); }
};

/// Called after each slab, e.g. for diagnostics against the monolithic oracle.
using SlabObserver = std::function<void(const SlabProblem& slab, const SlabRecord& record)>;

/// Marches all slabs in order. Errors are rethrown as SolverError with the
/// slab index attached.
Trajectory march(const BiotDiscretization& disc, const SourceData& sources,
                 const TimePartition& partition, const SplitConfig& split, MarchMode mode,
                 const SlabObserver& observer = {});

/// End values of a slab state (polynomial at t_hat = 1).
SlabHistory end_values(const SlabBasis& basis, const SlabState& state);

}  // namespace porofix
