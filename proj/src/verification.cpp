#include "porofix/verification.hpp"

#include <cmath>
#include <numbers>

#include "porofix/errors.hpp"
#include "porofix/linear_solve.hpp"
#include "porofix/quadrature.hpp"

namespace porofix {

namespace {

constexpr double pi = std::numbers::pi;

/// p = theta(t) X, u = theta(t) (X, X) if coupled, X = sin(a x) sin(c y).
ManufacturedSolution sine_family(std::string id, double lx, double ly, bool coupled,
                                 std::function<double(double)> theta,
                                 std::function<double(double)> dtheta) {
  const double a = pi / lx;
  const double c = pi / ly;
  auto X = [a, c](Point2 x) { return std::sin(a * x.x) * std::sin(c * x.y); };
  auto gradX = [a, c](Point2 x) {
    return Point2{a * std::cos(a * x.x) * std::sin(c * x.y), c * std::sin(a * x.x) * std::cos(c * x.y)};
  };
  auto hessX = [a, c](Point2 x) {
    const double s = std::sin(a * x.x) * std::sin(c * x.y);
    const double m = a * c * std::cos(a * x.x) * std::cos(c * x.y);
    Eigen::Matrix2d h;
    h << -a * a * s, m, m, -c * c * s;
    return h;
  };
  const double w = coupled ? 1.0 : 0.0;
  ManufacturedSolution m;
  m.id = std::move(id);
  m.p = [=](Point2 x, double t) { return theta(t) * X(x); };
  m.grad_p = [=](Point2 x, double t) {
    const Point2 g = gradX(x);
    return Point2{theta(t) * g.x, theta(t) * g.y};
  };
  m.hess_p = [=](Point2 x, double t) -> Eigen::Matrix2d { return theta(t) * hessX(x); };
  m.dt_p = [=](Point2 x, double t) { return dtheta(t) * X(x); };
  m.u = [=](Point2 x, double t) {
    const double v = w * theta(t) * X(x);
    return Point2{v, v};
  };
  m.grad_u = [=](Point2 x, double t) {
    const Point2 g = gradX(x);
    Eigen::Matrix2d gu;
    gu << g.x, g.y, g.x, g.y;
    return Eigen::Matrix2d(w * theta(t) * gu);
  };
  m.hess_u = [=](Point2 x, double t) {
    const Eigen::Matrix2d h = w * theta(t) * hessX(x);
    return std::array<Eigen::Matrix2d, 2>{h, h};
  };
  m.dt_div_u = [=](Point2 x, double t) {
    const Point2 g = gradX(x);
    return w * dtheta(t) * (g.x + g.y);
  };
  return m;
}

double at(Point2 p, int c) { return c == 0 ? p.x : p.y; }

}  // namespace

ManufacturedSolution mms_zero() {
  return sine_family("zero", 1.0, 1.0, false, [](double) { return 0.0; }, [](double) { return 0.0; });
}

ManufacturedSolution mms_pressure_only(double lx, double ly) {
  return sine_family("pressure_only", lx, ly, false, [](double t) { return t; }, [](double) { return 1.0; });
}

ManufacturedSolution mms_coupled(double lx, double ly) {
  return sine_family("coupled", lx, ly, true, [](double t) { return t; }, [](double) { return 1.0; });
}

ManufacturedSolution mms_coupled_transient(double lx, double ly) {
  return sine_family("coupled_transient", lx, ly, true, [](double t) { return std::sin(pi * t); },
                     [](double t) { return pi * std::cos(pi * t); });
}

SourceData mms_forcing(const ManufacturedSolution& ex, const PhysParams& prm) {
  SourceData src;
  src.f = [ex, prm](Point2 x, double t) {
    const Eigen::Matrix2d h = ex.hess_p(x, t);
    const double div_k_grad = (prm.K.cwiseProduct(h)).sum();
    return prm.c0 * ex.dt_p(x, t) + prm.b * ex.dt_div_u(x, t) - div_k_grad;
  };
  src.g = [ex, prm](Point2 x, double t) {
    const std::array<Eigen::Matrix2d, 2> hu = ex.hess_u(x, t);
    const Point2 gp = ex.grad_p(x, t);
    Point2 out;
    for (int c = 0; c < 2; ++c) {
      // d_c (div u) = sum_d d_c d_d u_d
      const double grad_div = hu[0](c, 0) + hu[1](c, 1);
      const double lap = hu[static_cast<std::size_t>(c)].trace();
      const double div_sigma = prm.mu * lap + (prm.mu + prm.lambda) * grad_div - prm.b * at(gp, c);
      (c == 0 ? out.x : out.y) = -div_sigma / prm.rho_b;
    }
    return out;
  };
  return src;
}

void check_mms_compatible(const ManufacturedSolution& ex, const Mesh& mesh, double t_end) {
  constexpr int samples = 9;
  constexpr double tol = 1e-12;
  for (int it = 0; it <= 4; ++it) {
    const double t = t_end * it / 4.0;
    for (int k = 0; k <= samples; ++k) {
      const double sx = mesh.lx() * k / samples;
      const double sy = mesh.ly() * k / samples;
      const std::array<Point2, 4> pts{Point2{sx, 0.0}, Point2{sx, mesh.ly()}, Point2{0.0, sy},
                                      Point2{mesh.lx(), sy}};
      for (const Point2& x : pts) {
        const Point2 u = ex.u(x, t);
        if (std::abs(ex.p(x, t)) > tol || std::abs(u.x) > tol || std::abs(u.y) > tol) {
          throw ConfigError("sources: manufactured solution '" + ex.id +
                            "' does not vanish on the boundary of the mesh domain");
        }
      }
    }
  }
  for (int j = 0; j <= samples; ++j) {
    for (int i = 0; i <= samples; ++i) {
      const Point2 x{mesh.lx() * i / samples, mesh.ly() * j / samples};
      const Point2 u = ex.u(x, 0.0);
      if (std::abs(ex.p(x, 0.0)) > tol || std::abs(u.x) > tol || std::abs(u.y) > tol) {
        throw ConfigError("sources: manufactured solution '" + ex.id + "' has nonzero initial data");
      }
    }
  }
}

Point2 exact_flux(const ManufacturedSolution& ex, const PhysParams& prm, Point2 x, double t) {
  const Point2 g = ex.grad_p(x, t);
  const Eigen::Vector2d q = -(prm.K * Eigen::Vector2d(g.x, g.y));
  return {q[0], q[1]};
}

// ---------------------------------------------------------------------------

Eigen::VectorXd project_pressure(const BiotDiscretization& disc, const std::function<double(Point2)>& p) {
  const Eigen::VectorXd load =
      pressure_load(disc.mesh(), disc.spaces(), [&p](Point2 x, double) { return p(x); }, 0.0);
  return linear_solve(disc.ops().Mp, load, "pressure projection");
}

Eigen::VectorXd interpolate_flux(const BiotDiscretization& disc, const std::function<Point2(Point2)>& q) {
  const Mesh& mesh = disc.mesh();
  const FluxSpace& fs = disc.spaces().flux;
  const int s = fs.order();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(fs.num_dofs());
  const GaussLegendre1D g = gauss_legendre(s + 4);
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const Edge& edge = mesh.edge(e);
    const Point2 a = mesh.vertices()[static_cast<std::size_t>(edge.vertices[0])];
    const Point2 b = mesh.vertices()[static_cast<std::size_t>(edge.vertices[1])];
    for (int k = 0; k <= s; ++k) {
      double sum = 0.0;
      for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const double t = g.nodes[i];
        const Point2 x{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
        const Point2 v = q(x);
        sum += g.weights[i] * (v.x * edge.normal.x + v.y * edge.normal.y) *
               RaviartThomasElement::moment_weight(k, t);
      }
      out[e * (s + 1) + k] = sum * edge.length;
    }
  }
  const auto& dofs = fs.element().dofs();
  const QuadratureRule qv = gauss_rule(s + 4, 2);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellMap map = cell_map(mesh, c);
    const auto cd = fs.cell_dofs(c);
    for (std::size_t l = 4 * static_cast<std::size_t>(s + 1); l < dofs.size(); ++l) {
      const RtLocalDof& d = dofs[l];
      double sum = 0.0;
      for (std::size_t qi = 0; qi < qv.size(); ++qi) {
        const Point2 ref{qv.points[qi][0], qv.points[qi][1]};
        const Point2 v = q(map.map(ref));
        if (d.component == 0) {
          sum += qv.weights[qi] * map.scale.y * v.x *
                 RaviartThomasElement::moment_weight(d.normal_index - 2, ref.x) *
                 RaviartThomasElement::moment_weight(d.tangent_index, ref.y);
        } else {
          sum += qv.weights[qi] * map.scale.x * v.y *
                 RaviartThomasElement::moment_weight(d.normal_index - 2, ref.y) *
                 RaviartThomasElement::moment_weight(d.tangent_index, ref.x);
        }
      }
      out[cd[l]] = sum;
    }
  }
  return out;
}

Eigen::VectorXd interpolate_displacement(const BiotDiscretization& disc,
                                         const std::function<Point2(Point2)>& u) {
  const Mesh& mesh = disc.mesh();
  const DisplacementSpace& ds = disc.spaces().displacement;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(ds.num_free_dofs());
  const int nn = ds.nodes_per_cell();
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellMap map = cell_map(mesh, c);
    const auto dofs = ds.cell_free_dofs(c);
    for (int a = 0; a < ds.local_dim(); ++a) {
      const int f = dofs[static_cast<std::size_t>(a)];
      if (f < 0) continue;
      const Point2 v = u(map.map(ds.node_ref(a % nn)));
      out[f] = at(v, a / nn);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

FieldErrors field_errors(const BiotDiscretization& disc, const Eigen::VectorXd& p,
                         const Eigen::VectorXd& q, const Eigen::VectorXd& u,
                         const ManufacturedSolution& ex, double t) {
  const Mesh& mesh = disc.mesh();
  const Spaces& sp = disc.spaces();
  const QuadratureRule qv = gauss_rule(sp.s + 4, 2);
  FieldErrors e;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellMap map = cell_map(mesh, c);
    for (std::size_t i = 0; i < qv.size(); ++i) {
      const Point2 ref{qv.points[i][0], qv.points[i][1]};
      const Point2 x = map.map(ref);
      const double w = qv.weights[i] * map.jacobian();
      const double dp = eval_pressure(sp.pressure, p, c, ref) - ex.p(x, t);
      const Point2 qh = eval_flux(sp.flux, mesh, q, c, ref);
      const Point2 qe = exact_flux(ex, disc.params(), x, t);
      const DisplacementSample us = eval_displacement(sp.displacement, mesh, u, c, ref);
      const Point2 uh = us.value;
      const Point2 ue = ex.u(x, t);
      const Eigen::Matrix2d gu = ex.grad_u(x, t);
      for (int k = 0; k < 2; ++k) {
        const Point2 gh = us.grad[static_cast<std::size_t>(k)];
        e.u_grad += w * ((gh.x - gu(k, 0)) * (gh.x - gu(k, 0)) + (gh.y - gu(k, 1)) * (gh.y - gu(k, 1)));
      }
      e.p += w * dp * dp;
      e.q += w * ((qh.x - qe.x) * (qh.x - qe.x) + (qh.y - qe.y) * (qh.y - qe.y));
      e.u += w * ((uh.x - ue.x) * (uh.x - ue.x) + (uh.y - ue.y) * (uh.y - ue.y));
    }
  }
  e.p = std::sqrt(e.p);
  e.q = std::sqrt(e.q);
  e.u = std::sqrt(e.u);
  e.u_grad = std::sqrt(e.u_grad);
  return e;
}

ErrorReport error_norms(const BiotDiscretization& disc, const Trajectory& traj,
                        const ManufacturedSolution& ex, const TimePartition& partition) {
  if (traj.num_slabs() != partition.num_slabs()) {
    throw ConfigError("error_norms: trajectory and time partition disagree");
  }
  ErrorReport rep;
  const SlabRecord& last = traj.last();
  const FieldErrors end = field_errors(disc, last.p_end, last.q_end, last.u_end, ex, partition.final_time());
  rep.p_L2_T = end.p;
  rep.q_L2_T = end.q;
  rep.u_L2_T = end.u;
  rep.u_H1_T = end.u_grad;

  const GaussLegendre1D gt = gauss_legendre(disc.basis().r + 2);
  for (const SlabRecord& s : traj.slabs) {
    const double tau = s.t_end - s.t_start;
    for (std::size_t g = 0; g < gt.nodes.size(); ++g) {
      const double th = gt.nodes[g];
      const FieldErrors fe = field_errors(disc, eval_polynomial(disc.basis(), s.state.P, th),
                                          eval_polynomial(disc.basis(), s.state.Q, th),
                                          eval_polynomial(disc.basis(), s.state.U, th), ex,
                                          s.t_start + tau * th);
      rep.p_L2L2 += tau * gt.weights[g] * fe.p * fe.p;
      rep.q_L2L2 += tau * gt.weights[g] * fe.q * fe.q;
      rep.u_L2L2 += tau * gt.weights[g] * fe.u * fe.u;
    }
  }
  rep.p_L2L2 = std::sqrt(rep.p_L2L2);
  rep.q_L2L2 = std::sqrt(rep.q_L2L2);
  rep.u_L2L2 = std::sqrt(rep.u_L2L2);
  return rep;
}

std::vector<std::optional<double>> observed_order(const std::vector<double>& errors,
                                                  const std::vector<double>& sizes) {
  if (errors.size() < 2 || errors.size() != sizes.size()) {
    throw ConfigError("observed_order: need at least two (error, size) pairs");
  }
  for (double h : sizes) {
    if (!(h > 0.0)) throw ConfigError("observed_order: sizes must be positive");
  }
  std::vector<std::optional<double>> out;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
    if (!(errors[i] > 0.0) || !(errors[i + 1] > 0.0)) {
      out.emplace_back();
      continue;
    }
    out.emplace_back(std::log(errors[i] / errors[i + 1]) / std::log(sizes[i] / sizes[i + 1]));
  }
  return out;
}

// ---------------------------------------------------------------------------

double ContractionDiag::max_S_p_norm(int k) const {
  double m = 0.0;
  for (double v : S_p_norm.at(static_cast<std::size_t>(k - 1))) m = std::max(m, v);
  return m;
}

ContractionDiag contraction_diagnostics(const BiotDiscretization& disc,
                                        const std::vector<SlabState>& iterates,
                                        const SlabState& mono) {
  const SlabBasis& basis = disc.basis();
  const int nt = basis.num_nodes();
  if (static_cast<int>(mono.P.size()) != nt) throw ConfigError("contraction_diagnostics: node count mismatch");
  ContractionDiag d;
  for (const SlabState& it : iterates) {
    if (static_cast<int>(it.P.size()) != nt || it.P[0].size() != mono.P[0].size()) {
      throw ConfigError("contraction_diagnostics: split iterate does not match the discretization");
    }
    std::vector<Eigen::VectorXd> ep, eq, eu, sp;
    for (int j = 0; j < nt; ++j) {
      const auto jj = static_cast<std::size_t>(j);
      ep.push_back(it.P[jj] - mono.P[jj]);
      eq.push_back(it.Q[jj] - mono.Q[jj]);
      eu.push_back(it.U[jj] - mono.U[jj]);
    }
    std::vector<double> norms;
    std::vector<std::optional<double>> ratios;
    for (int i = 0; i < nt; ++i) {
      Eigen::VectorXd s = Eigen::VectorXd::Zero(ep[0].size());
      for (int j = 0; j < nt; ++j) s += basis.alpha(i, j) * ep[static_cast<std::size_t>(j)];
      norms.push_back(disc.pressure_norm(s));
      if (!d.S_p_norm.empty()) {
        const double prev = d.S_p_norm.back()[static_cast<std::size_t>(i)];
        ratios.emplace_back(prev > 0.0 ? std::optional<double>(norms.back() / prev) : std::nullopt);
      } else {
        ratios.emplace_back();
      }
      sp.push_back(std::move(s));
    }
    d.ep_trace.push_back(disc.pressure_norm(eval_polynomial(basis, ep, 1.0)));
    d.eq_trace.push_back(disc.flux_norm(eval_polynomial(basis, eq, 1.0)));
    d.eu_trace.push_back(disc.displacement_norm(eval_polynomial(basis, eu, 1.0)));
    d.E_p.push_back(std::move(ep));
    d.S_p.push_back(std::move(sp));
    d.S_p_norm.push_back(std::move(norms));
    d.S_p_ratio.push_back(std::move(ratios));
  }
  return d;
}

ContractionRun run_contraction_study(const BiotDiscretization& disc, const SlabProblem& slab,
                                     const SplitConfig& split) {
  ContractionRun run;
  std::vector<SlabState> iterates;
  SplitConfig cold = split;
  cold.warm_start = false;
  run.split = fixed_stress_slab(disc, slab, cold, std::nullopt,
                                [&iterates](int, const SlabState& s) { iterates.push_back(s); });
  run.monolithic = solve_monolithic_slab(disc, slab);
  run.diag = contraction_diagnostics(disc, iterates, run.monolithic);
  return run;
}

double pressure_jump_indicator(const BiotDiscretization& disc, const Eigen::VectorXd& p) {
  const Mesh& mesh = disc.mesh();
  const PressureSpace& ps = disc.spaces().pressure;
  const GaussLegendre1D g = gauss_legendre(ps.order() + 2);
  double sum = 0.0;
  for (const Edge& e : mesh.edges()) {
    if (e.boundary) continue;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      const auto [rk, rkp] = edge_ref_points(e, g.nodes[i]);
      const JumpAverage ja = trace_ops(eval_pressure(ps, p, e.cell_k, rk), eval_pressure(ps, p, e.cell_kp, rkp));
      sum += g.weights[i] * e.length * ja.jump * ja.jump;
    }
  }
  return sum;
}

}  // namespace porofix
