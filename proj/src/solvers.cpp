#include "porofix/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "porofix/errors.hpp"

namespace porofix {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

void add_block(Triplets& t, const SpMat& m, int row0, int col0, double scale) {
  if (scale == 0.0) return;
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SpMat::InnerIterator it(m, k); it; ++it) {
      t.emplace_back(row0 + static_cast<int>(it.row()), col0 + static_cast<int>(it.col()), scale * it.value());
    }
  }
}

double weighted_norm(const SpMat& mass, const Eigen::VectorXd& v) {
  if (v.size() == 0) return 0.0;
  return std::sqrt(std::max(0.0, v.dot(mass * v)));
}

}  // namespace

void SplitConfig::validate() const {
  if (!(L >= 0.0)) throw ConfigError("split.L must be >= 0");
  if (!(tol > 0.0)) throw ConfigError("split.tol must be > 0");
  if (max_iter < 1) throw ConfigError("split.max_iter must be >= 1");
}

const char* to_string(StopCause cause) {
  return cause == StopCause::converged ? "converged" : "max_iter";
}

SlabState SlabState::zeros(const Spaces& spaces, int num_nodes) {
  SlabState s;
  for (int j = 0; j < num_nodes; ++j) {
    s.P.push_back(Eigen::VectorXd::Zero(spaces.pressure.num_dofs()));
    s.Q.push_back(Eigen::VectorXd::Zero(spaces.flux.num_dofs()));
    s.U.push_back(Eigen::VectorXd::Zero(spaces.displacement.num_free_dofs()));
  }
  return s;
}

SlabState SlabState::constant(const SlabHistory& history, const Spaces& spaces, int num_nodes) {
  SlabState s = zeros(spaces, num_nodes);
  for (int j = 0; j < num_nodes; ++j) {
    s.P[static_cast<std::size_t>(j)] = history.p;
    s.U[static_cast<std::size_t>(j)] = history.u;
  }
  return s;
}

// ---------------------------------------------------------------------------

BiotDiscretization::BiotDiscretization(Mesh mesh, int s, int r, PhysParams params, SipConfig sip)
    : mesh_(std::move(mesh)),
      spaces_(dof_layout(mesh_, s)),
      basis_(slab_coefficients(r)),
      params_(params),
      sip_(sip),
      ops_(assemble_operators(mesh_, spaces_, params_, sip_)),
      elasticity_(std::make_unique<SpdSolver>(ops_.A, "elasticity")) {}

BiotDiscretization::~BiotDiscretization() = default;

SpMat BiotDiscretization::flow_matrix(double tau, double L) const {
  const int np = spaces_.pressure.num_dofs();
  const int nq = spaces_.flux.num_dofs();
  const int nt = num_nodes();
  const SpMat dt = ops_.D.transpose();
  Triplets t;
  for (int i = 0; i < nt; ++i) {
    const int row_p = i * np;
    const int row_q = nt * np + i * nq;
    for (int j = 0; j < nt; ++j) {
      add_block(t, ops_.Mp, row_p, j * np, (params_.c0 + L) * basis_.alpha(i, j));
    }
    add_block(t, ops_.D, row_p, nt * np + i * nq, tau * basis_.beta[i]);
    add_block(t, ops_.Mq, row_q, nt * np + i * nq, 1.0);
    add_block(t, dt, row_q, i * np, -1.0);
  }
  SpMat m(nt * (np + nq), nt * (np + nq));
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SpMat BiotDiscretization::monolithic_matrix(double tau) const {
  const int np = spaces_.pressure.num_dofs();
  const int nq = spaces_.flux.num_dofs();
  const int nu = spaces_.displacement.num_free_dofs();
  const int nt = num_nodes();
  const int off_q = nt * np;
  const int off_u = nt * (np + nq);
  const SpMat dt = ops_.D.transpose();
  Triplets t;
  for (int i = 0; i < nt; ++i) {
    for (int j = 0; j < nt; ++j) {
      add_block(t, ops_.Mp, i * np, j * np, params_.c0 * basis_.alpha(i, j));
      add_block(t, ops_.G, i * np, off_u + j * nu, params_.b * basis_.alpha(i, j));
    }
    add_block(t, ops_.D, i * np, off_q + i * nq, tau * basis_.beta[i]);
    add_block(t, ops_.Mq, off_q + i * nq, off_q + i * nq, 1.0);
    add_block(t, dt, off_q + i * nq, i * np, -1.0);
    add_block(t, ops_.A, off_u + i * nu, off_u + i * nu, 1.0);
    add_block(t, ops_.C, off_u + i * nu, i * np, -1.0);
  }
  SpMat m(nt * (np + nq + nu), nt * (np + nq + nu));
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

const SparseLuSolver& BiotDiscretization::flow_solver(double tau, double L) const {
  auto& slot = flow_cache_[{tau, L}];
  if (!slot) slot = std::make_unique<SparseLuSolver>(flow_matrix(tau, L), "flow block system");
  return *slot;
}

const SparseLuSolver& BiotDiscretization::monolithic_solver(double tau) const {
  auto& slot = mono_cache_[tau];
  if (!slot) slot = std::make_unique<SparseLuSolver>(monolithic_matrix(tau), "monolithic system");
  return *slot;
}

double BiotDiscretization::pressure_norm(const Eigen::VectorXd& p) const { return weighted_norm(ops_.Mp, p); }
double BiotDiscretization::flux_norm(const Eigen::VectorXd& q) const { return weighted_norm(ops_.Mq, q); }
double BiotDiscretization::displacement_norm(const Eigen::VectorXd& u) const {
  return weighted_norm(ops_.Mu, u);
}

// ---------------------------------------------------------------------------

SlabProblem make_slab_problem(const BiotDiscretization& disc, const SourceData& sources,
                              const TimePartition& partition, int n,
                              const std::optional<SlabHistory>& history) {
  SlabProblem slab;
  slab.n = n;
  slab.t_start = partition.t_start(n);
  slab.tau = partition.tau(n);
  slab.history = history ? *history : zero_history(disc.spaces());
  slab.rhs = assemble_slab_rhs(disc.mesh(), disc.spaces(), disc.ops(), disc.params(), sources,
                               disc.basis(), n, slab.t_start, slab.tau, history);
  return slab;
}

FlowStepResult solve_flow_step(const BiotDiscretization& disc, const SlabProblem& slab, double L,
                               const SlabState& lagged) {
  const int np = disc.spaces().pressure.num_dofs();
  const int nq = disc.spaces().flux.num_dofs();
  const int nt = disc.num_nodes();
  const SlabBasis& basis = disc.basis();
  const AssembledOperators& ops = disc.ops();
  const double b = disc.params().b;

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nt * (np + nq));
  for (int i = 0; i < nt; ++i) {
    Eigen::VectorXd lagged_sum_p = Eigen::VectorXd::Zero(np);
    Eigen::VectorXd lagged_sum_u = Eigen::VectorXd::Zero(lagged.U[0].size());
    for (int j = 0; j < nt; ++j) {
      lagged_sum_p += basis.alpha(i, j) * lagged.P[static_cast<std::size_t>(j)];
      lagged_sum_u += basis.alpha(i, j) * lagged.U[static_cast<std::size_t>(j)];
    }
    Eigen::VectorXd seg = slab.rhs.flow[static_cast<std::size_t>(i)] - b * (ops.G * lagged_sum_u);
    if (L != 0.0) seg += L * (ops.Mp * lagged_sum_p);
    rhs.segment(i * np, np) = seg;
  }
  const Eigen::VectorXd x = disc.flow_solver(slab.tau, L).solve(rhs);
  FlowStepResult out;
  for (int i = 0; i < nt; ++i) {
    out.P.push_back(x.segment(i * np, np));
    out.Q.push_back(x.segment(nt * np + i * nq, nq));
  }
  return out;
}

Eigen::VectorXd solve_mechanics_step(const BiotDiscretization& disc, const SlabProblem& slab,
                                     const Eigen::VectorXd& pressure, int node) {
  const Eigen::VectorXd rhs = disc.ops().C * pressure + slab.rhs.mechanics.at(static_cast<std::size_t>(node));
  return disc.elasticity_solver().solve(rhs);
}

SlabResult fixed_stress_slab(const BiotDiscretization& disc, const SlabProblem& slab,
                             const SplitConfig& split, const std::optional<SlabState>& initial,
                             const IterateObserver& observer) {
  split.validate();
  const int nt = disc.num_nodes();
  const SlabBasis& basis = disc.basis();
  const AssembledOperators& ops = disc.ops();
  const double b = disc.params().b;

  SlabResult result;
  result.state = initial ? *initial : SlabState::zeros(disc.spaces(), nt);
  double prev_dp = 0.0;
  for (int k = 1; k <= split.max_iter; ++k) {
    SlabState next;
    FlowStepResult flow = solve_flow_step(disc, slab, split.L, result.state);
    next.P = std::move(flow.P);
    next.Q = std::move(flow.Q);
    for (int i = 0; i < nt; ++i) {
      next.U.push_back(solve_mechanics_step(disc, slab, next.P[static_cast<std::size_t>(i)], i));
    }

    IterationRecord rec;
    rec.k = k;
    double p_size = 0.0;
    bool lag_unchanged = true;
    for (int i = 0; i < nt; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      rec.dp_norm = std::max(rec.dp_norm, disc.pressure_norm(next.P[ii] - result.state.P[ii]));
      rec.du_norm = std::max(rec.du_norm, disc.displacement_norm(next.U[ii] - result.state.U[ii]));
      p_size = std::max(p_size, disc.pressure_norm(next.P[ii]));
      // Change of the lagged data seen by the next flow step.
      Eigen::VectorXd dp_sum = Eigen::VectorXd::Zero(next.P[ii].size());
      Eigen::VectorXd du_sum = Eigen::VectorXd::Zero(next.U[ii].size());
      for (int j = 0; j < nt; ++j) {
        const auto jj = static_cast<std::size_t>(j);
        dp_sum += basis.alpha(i, j) * (next.P[jj] - result.state.P[jj]);
        du_sum += basis.alpha(i, j) * (next.U[jj] - result.state.U[jj]);
      }
      const Eigen::VectorXd lag_change = split.L * (ops.Mp * dp_sum) - b * (ops.G * du_sum);
      if (!(lag_change.array() == 0.0).all()) lag_unchanged = false;
    }
    rec.relative_dp = p_size > 0.0 ? rec.dp_norm / p_size : rec.dp_norm;
    if (k >= 2) rec.ratio = prev_dp > 0.0 ? rec.dp_norm / prev_dp : 0.0;
    prev_dp = rec.dp_norm;
    result.state = std::move(next);
    result.report.iterations.push_back(rec);
    if (observer) observer(k, result.state);

    // k = 1 only measures the distance to the initial guess.
    if ((k >= 2 && rec.relative_dp <= split.tol) || lag_unchanged) {
      result.report.stop = StopCause::converged;
      return result;
    }
  }
  result.report.stop = StopCause::max_iter;
  return result;
}

SlabState solve_monolithic_slab(const BiotDiscretization& disc, const SlabProblem& slab) {
  const int np = disc.spaces().pressure.num_dofs();
  const int nq = disc.spaces().flux.num_dofs();
  const int nu = disc.spaces().displacement.num_free_dofs();
  const int nt = disc.num_nodes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nt * (np + nq + nu));
  for (int i = 0; i < nt; ++i) {
    rhs.segment(i * np, np) = slab.rhs.flow[static_cast<std::size_t>(i)];
    rhs.segment(nt * (np + nq) + i * nu, nu) = slab.rhs.mechanics[static_cast<std::size_t>(i)];
  }
  const Eigen::VectorXd x = disc.monolithic_solver(slab.tau).solve(rhs);
  SlabState s;
  for (int i = 0; i < nt; ++i) {
    s.P.push_back(x.segment(i * np, np));
    s.Q.push_back(x.segment(nt * np + i * nq, nq));
    s.U.push_back(x.segment(nt * (np + nq) + i * nu, nu));
  }
  return s;
}

SlabHistory end_values(const SlabBasis& basis, const SlabState& state) {
  return {eval_polynomial(basis, state.P, 1.0), eval_polynomial(basis, state.U, 1.0)};
}

Trajectory march(const BiotDiscretization& disc, const SourceData& sources,
                 const TimePartition& partition, const SplitConfig& split, MarchMode mode,
                 const SlabObserver& observer) {
  Trajectory traj;
  std::optional<SlabHistory> history;
  for (int n = 1; n <= partition.num_slabs(); ++n) {
    try {
      const SlabProblem slab = make_slab_problem(disc, sources, partition, n, history);
      SlabRecord rec;
      rec.n = n;
      rec.t_start = slab.t_start;
      rec.t_end = partition.t_end(n);
      if (mode == MarchMode::split) {
        std::optional<SlabState> initial;
        if (split.warm_start) initial = SlabState::constant(slab.history, disc.spaces(), disc.num_nodes());
        SlabResult res = fixed_stress_slab(disc, slab, split, initial);
        rec.state = std::move(res.state);
        rec.report = std::move(res.report);
      } else {
        rec.state = solve_monolithic_slab(disc, slab);
      }
      rec.p_end = eval_polynomial(disc.basis(), rec.state.P, 1.0);
      rec.q_end = eval_polynomial(disc.basis(), rec.state.Q, 1.0);
      rec.u_end = eval_polynomial(disc.basis(), rec.state.U, 1.0);
      history = SlabHistory{rec.p_end, rec.u_end};
      if (observer) observer(slab, rec);
      traj.slabs.push_back(std::move(rec));
    } catch (const SolverError& e) {
      throw SolverError("slab " + std::to_string(n) + ": " + e.what());
    }
  }
  return traj;
}

}  // namespace porofix
