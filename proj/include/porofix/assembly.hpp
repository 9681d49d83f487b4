#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "porofix/fem_spaces.hpp"
#include "porofix/mesh.hpp"
#include "porofix/params.hpp"
#include "porofix/time_slab.hpp"

namespace porofix {

using SpMat = Eigen::SparseMatrix<double>;

// ---------------------------------------------------------------------------
// Traces on interior edges: [w] = w|K - w|K', {w} = (w|K + w|K') / 2, with
// (K, K') the stored orientation of the edge.
// ---------------------------------------------------------------------------

struct JumpAverage {
  double jump = 0.0;
  double average = 0.0;
};

struct VectorJumpAverage {
  Point2 jump;
  Point2 average;
};

JumpAverage trace_ops(double on_k, double on_kp);
VectorJumpAverage trace_ops(Point2 on_k, Point2 on_kp);

/// Pointwise traces at shared edge quadrature points. Throws ConfigError if
/// `edge` is a boundary edge.
std::vector<JumpAverage> trace_ops(const Edge& edge, std::span<const double> on_k,
                                   std::span<const double> on_kp);

/// Reference coordinates of the point with edge parameter t seen from the
/// first (K) and second (K') adjacent cell of an interior edge.
std::pair<Point2, Point2> edge_ref_points(const Edge& edge, double t);

// ---------------------------------------------------------------------------

/// Pieces of the SIP operator: A = volume + penalty - consistency, where
/// volume = sum_K <sigma(y), eps(z)>_K, penalty = J_delta, consistency = J_d.
struct ElasticityParts {
  SpMat volume;
  SpMat penalty;
  SpMat consistency;
};

ElasticityParts assemble_elasticity_parts(const Mesh& mesh, const Spaces& spaces,
                                          const PhysParams& params, const SipConfig& sip);

/// SIP elasticity matrix on the free displacement DOFs. Throws ConfigError
/// for delta0 <= 0.
SpMat assemble_elasticity(const Mesh& mesh, const Spaces& spaces, const PhysParams& params,
                          const SipConfig& sip);

struct FlowBlocks {
  SpMat Mp;  // <p, w>
  SpMat Mq;  // <K^{-1} q, v>
  SpMat D;   // rows: pressure, cols: flux; <div q, w>
};

/// Throws ConfigError if K is singular.
FlowBlocks assemble_flow_blocks(const Mesh& mesh, const Spaces& spaces, const PhysParams& params);

struct CouplingBlocks {
  /// rows: free displacement, cols: pressure; b <p, div z>_K - b J_p(p, z).
  SpMat C;
  /// rows: pressure, cols: free displacement; sum_K <div u, w>_K (no b).
  SpMat G;
};

CouplingBlocks assemble_coupling(const Mesh& mesh, const Spaces& spaces, const PhysParams& params);

/// Broken L2 mass matrix on the free displacement DOFs.
SpMat assemble_displacement_mass(const Mesh& mesh, const Spaces& spaces);

struct AssembledOperators {
  SpMat Mp;
  SpMat Mq;
  SpMat D;
  SpMat A;
  SpMat C;
  SpMat G;
  SpMat Mu;
};

AssembledOperators assemble_operators(const Mesh& mesh, const Spaces& spaces,
                                      const PhysParams& params, const SipConfig& sip);

/// <f(., t), w> for all pressure basis functions w.
Eigen::VectorXd pressure_load(const Mesh& mesh, const Spaces& spaces, const ScalarField& f,
                              double t);

/// rho_b <g(., t), z> for all free displacement basis functions z.
Eigen::VectorXd body_load(const Mesh& mesh, const Spaces& spaces, const PhysParams& params,
                          const VectorField& g, double t);

/// End-of-slab values p(t_{n-1}^-), u(t_{n-1}^-) carried into the next slab.
struct SlabHistory {
  Eigen::VectorXd p;
  Eigen::VectorXd u;
};

/// Per-node right-hand sides of one slab.
///   flow[i] = tau beta_ii <f(t_{n,i}), w> + gamma_i (c0 <p^-, w> + b sum_K <div u^-, w>_K)
///   mechanics[i] = rho_b <g(t_{n,i}), z>
struct SlabRhs {
  std::vector<Eigen::VectorXd> flow;
  std::vector<Eigen::VectorXd> mechanics;
};

/// `history` may be empty only for the first slab (n == 1), where it means zero.
SlabRhs assemble_slab_rhs(const Mesh& mesh, const Spaces& spaces, const AssembledOperators& ops,
                          const PhysParams& params, const SourceData& sources,
                          const SlabBasis& basis, int n, double t_start, double tau,
                          const std::optional<SlabHistory>& history);

/// Zero history vectors sized for `spaces`.
SlabHistory zero_history(const Spaces& spaces);

}  // namespace porofix
