#include "porofix/assembly.hpp"

#include <cmath>
#include <string>

#include "porofix/errors.hpp"
#include "porofix/quadrature.hpp"

namespace porofix {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

double at(Point2 p, int c) { return c == 0 ? p.x : p.y; }

double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }

int volume_points(const Spaces& spaces) { return spaces.s + 3; }
int edge_points(const Spaces& spaces) { return spaces.s + 3; }

/// Scalar nodal shape values and physical gradients at one reference point.
struct ScalarShapes {
  std::vector<double> value;
  std::vector<Point2> grad;
};

ScalarShapes displacement_shapes(const DisplacementSpace& space, Point2 h, Point2 ref) {
  NodalBasisValues nb = nodal_basis(space.order(), ref);
  ScalarShapes out;
  out.value = std::move(nb.values);
  out.grad.resize(nb.ref_gradients.size());
  for (std::size_t i = 0; i < nb.ref_gradients.size(); ++i) {
    out.grad[i] = {nb.ref_gradients[i].x / h.x, nb.ref_gradients[i].y / h.y};
  }
  return out;
}

/// sigma(phi) nu for phi = e_c psi with grad psi = g.
Point2 traction(const PhysParams& prm, int c, Point2 g, Point2 nu) {
  const double gn = dot(g, nu);
  const double gc = at(g, c);
  Point2 t{prm.mu * g.x * at(nu, c) + prm.lambda * gc * nu.x,
           prm.mu * g.y * at(nu, c) + prm.lambda * gc * nu.y};
  if (c == 0) t.x += prm.mu * gn;
  else t.y += prm.mu * gn;
  return t;
}

SpMat from_triplets(int rows, int cols, const Triplets& t) {
  SpMat m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------

JumpAverage trace_ops(double on_k, double on_kp) { return {on_k - on_kp, 0.5 * (on_k + on_kp)}; }

VectorJumpAverage trace_ops(Point2 on_k, Point2 on_kp) {
  return {{on_k.x - on_kp.x, on_k.y - on_kp.y}, {0.5 * (on_k.x + on_kp.x), 0.5 * (on_k.y + on_kp.y)}};
}

std::vector<JumpAverage> trace_ops(const Edge& edge, std::span<const double> on_k,
                                   std::span<const double> on_kp) {
  if (edge.boundary) throw ConfigError("trace_ops: boundary edge passed where interior edge required");
  if (on_k.size() != on_kp.size()) throw ConfigError("trace_ops: trace sample counts differ");
  std::vector<JumpAverage> out(on_k.size());
  for (std::size_t i = 0; i < on_k.size(); ++i) out[i] = trace_ops(on_k[i], on_kp[i]);
  return out;
}

std::pair<Point2, Point2> edge_ref_points(const Edge& edge, double t) {
  if (edge.axis == EdgeAxis::vertical) return {{1.0, t}, {0.0, t}};
  return {{t, 1.0}, {t, 0.0}};
}

// ---------------------------------------------------------------------------

ElasticityParts assemble_elasticity_parts(const Mesh& mesh, const Spaces& spaces,
                                          const PhysParams& prm, const SipConfig& sip) {
  const DisplacementSpace& ds = spaces.displacement;
  const int nfree = ds.num_free_dofs();
  const int nn = ds.nodes_per_cell();
  const int nloc = ds.local_dim();
  Triplets vol, pen, con;

  const QuadratureRule qv = gauss_rule(volume_points(spaces), 2);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Point2 h = mesh.cell_extent(c);
    const double jac = h.x * h.y;
    const auto dofs = ds.cell_free_dofs(c);
    Eigen::MatrixXd ke = Eigen::MatrixXd::Zero(nloc, nloc);
    for (std::size_t q = 0; q < qv.size(); ++q) {
      const ScalarShapes sh = displacement_shapes(ds, h, {qv.points[q][0], qv.points[q][1]});
      const double w = qv.weights[q] * jac;
      for (int a = 0; a < nloc; ++a) {
        const int ca = a / nn;
        const Point2 ga = sh.grad[static_cast<std::size_t>(a % nn)];
        for (int b = 0; b < nloc; ++b) {
          const int cb = b / nn;
          const Point2 gb = sh.grad[static_cast<std::size_t>(b % nn)];
          const double eps_eps = (ca == cb ? dot(ga, gb) : 0.0) + at(ga, cb) * at(gb, ca);
          ke(a, b) += w * (prm.mu * eps_eps + prm.lambda * at(ga, ca) * at(gb, cb));
        }
      }
    }
    for (int a = 0; a < nloc; ++a) {
      const int fa = dofs[static_cast<std::size_t>(a)];
      if (fa < 0) continue;
      for (int b = 0; b < nloc; ++b) {
        const int fb = dofs[static_cast<std::size_t>(b)];
        if (fb >= 0 && ke(a, b) != 0.0) vol.emplace_back(fa, fb, ke(a, b));
      }
    }
  }

  const GaussLegendre1D qe = gauss_legendre(edge_points(spaces));
  for (const Edge& e : mesh.edges()) {
    if (e.boundary) continue;
    const double penalty = sip.delta0 / std::pow(e.length, sip.beta_exp);
    const std::array<int, 2> cells{e.cell_k, e.cell_kp};
    const std::array<double, 2> sign{1.0, -1.0};
    Eigen::MatrixXd pe = Eigen::MatrixXd::Zero(2 * nloc, 2 * nloc);
    Eigen::MatrixXd ce = Eigen::MatrixXd::Zero(2 * nloc, 2 * nloc);
    for (std::size_t q = 0; q < qe.nodes.size(); ++q) {
      const auto [ref_k, ref_kp] = edge_ref_points(e, qe.nodes[q]);
      const std::array<ScalarShapes, 2> sh{displacement_shapes(ds, mesh.cell_extent(cells[0]), ref_k),
                                           displacement_shapes(ds, mesh.cell_extent(cells[1]), ref_kp)};
      const double w = qe.weights[q] * e.length;
      // jump[a] and average traction[a] of every combined local DOF.
      std::vector<Point2> jump(static_cast<std::size_t>(2 * nloc));
      std::vector<Point2> avg_t(static_cast<std::size_t>(2 * nloc));
      for (int side = 0; side < 2; ++side) {
        for (int a = 0; a < nloc; ++a) {
          const int comp = a / nn;
          const auto node = static_cast<std::size_t>(a % nn);
          const auto idx = static_cast<std::size_t>(side * nloc + a);
          const double v = sign[static_cast<std::size_t>(side)] * sh[static_cast<std::size_t>(side)].value[node];
          jump[idx] = comp == 0 ? Point2{v, 0.0} : Point2{0.0, v};
          const Point2 t = traction(prm, comp, sh[static_cast<std::size_t>(side)].grad[node], e.normal);
          avg_t[idx] = {0.5 * t.x, 0.5 * t.y};
        }
      }
      for (int a = 0; a < 2 * nloc; ++a) {
        for (int b = 0; b < 2 * nloc; ++b) {
          const auto ia = static_cast<std::size_t>(a);
          const auto ib = static_cast<std::size_t>(b);
          pe(a, b) += w * penalty * dot(jump[ia], jump[ib]);
          ce(a, b) += w * (dot(avg_t[ib], jump[ia]) + dot(avg_t[ia], jump[ib]));
        }
      }
    }
    for (int a = 0; a < 2 * nloc; ++a) {
      const int fa = ds.cell_free_dofs(cells[static_cast<std::size_t>(a / nloc)])[static_cast<std::size_t>(a % nloc)];
      if (fa < 0) continue;
      for (int b = 0; b < 2 * nloc; ++b) {
        const int fb = ds.cell_free_dofs(cells[static_cast<std::size_t>(b / nloc)])[static_cast<std::size_t>(b % nloc)];
        if (fb < 0) continue;
        if (pe(a, b) != 0.0) pen.emplace_back(fa, fb, pe(a, b));
        if (ce(a, b) != 0.0) con.emplace_back(fa, fb, ce(a, b));
      }
    }
  }
  return {from_triplets(nfree, nfree, vol), from_triplets(nfree, nfree, pen),
          from_triplets(nfree, nfree, con)};
}

SpMat assemble_elasticity(const Mesh& mesh, const Spaces& spaces, const PhysParams& params,
                          const SipConfig& sip) {
  sip.validate();
  const ElasticityParts parts = assemble_elasticity_parts(mesh, spaces, params, sip);
  SpMat a = parts.volume + parts.penalty - parts.consistency;
  a.prune(0.0);
  a.makeCompressed();
  return a;
}

// ---------------------------------------------------------------------------

FlowBlocks assemble_flow_blocks(const Mesh& mesh, const Spaces& spaces, const PhysParams& prm) {
  if (std::abs(prm.K.determinant()) <= 0.0 || !prm.K.allFinite()) {
    throw ConfigError("physics.K is singular");
  }
  const Eigen::Matrix2d kinv = prm.K.inverse();
  const PressureSpace& ps = spaces.pressure;
  const FluxSpace& fs = spaces.flux;
  const int np = ps.local_dim();
  const int nq = fs.local_dim();
  Triplets mp, mq, dd;
  const QuadratureRule qv = gauss_rule(volume_points(spaces), 2);
  std::vector<double> pv(static_cast<std::size_t>(np));
  RtBasisValues rt;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Point2 h = mesh.cell_extent(c);
    const double jac = h.x * h.y;
    const auto qdofs = fs.cell_dofs(c);
    Eigen::MatrixXd me = Eigen::MatrixXd::Zero(np, np);
    Eigen::MatrixXd qe = Eigen::MatrixXd::Zero(nq, nq);
    Eigen::MatrixXd de = Eigen::MatrixXd::Zero(np, nq);
    for (std::size_t q = 0; q < qv.size(); ++q) {
      const Point2 ref{qv.points[q][0], qv.points[q][1]};
      ps.eval(ref, pv);
      fs.element().eval(h, ref, rt);
      const double w = qv.weights[q] * jac;
      for (int a = 0; a < np; ++a) {
        for (int b = 0; b < np; ++b) me(a, b) += w * pv[static_cast<std::size_t>(a)] * pv[static_cast<std::size_t>(b)];
        for (int j = 0; j < nq; ++j) de(a, j) += w * pv[static_cast<std::size_t>(a)] * rt.divergence[static_cast<std::size_t>(j)];
      }
      for (int i = 0; i < nq; ++i) {
        const Eigen::Vector2d vi(rt.values[static_cast<std::size_t>(i)].x, rt.values[static_cast<std::size_t>(i)].y);
        const Eigen::Vector2d kvi = kinv * vi;
        for (int j = 0; j < nq; ++j) {
          qe(i, j) += w * (kvi[0] * rt.values[static_cast<std::size_t>(j)].x + kvi[1] * rt.values[static_cast<std::size_t>(j)].y);
        }
      }
    }
    for (int a = 0; a < np; ++a) {
      for (int b = 0; b < np; ++b) {
        if (me(a, b) != 0.0) mp.emplace_back(ps.dof(c, a), ps.dof(c, b), me(a, b));
      }
      for (int j = 0; j < nq; ++j) {
        if (de(a, j) != 0.0) dd.emplace_back(ps.dof(c, a), qdofs[static_cast<std::size_t>(j)], de(a, j));
      }
    }
    for (int i = 0; i < nq; ++i) {
      for (int j = 0; j < nq; ++j) {
        if (qe(i, j) != 0.0) mq.emplace_back(qdofs[static_cast<std::size_t>(i)], qdofs[static_cast<std::size_t>(j)], qe(i, j));
      }
    }
  }
  return {from_triplets(ps.num_dofs(), ps.num_dofs(), mp),
          from_triplets(fs.num_dofs(), fs.num_dofs(), mq),
          from_triplets(ps.num_dofs(), fs.num_dofs(), dd)};
}

// ---------------------------------------------------------------------------

CouplingBlocks assemble_coupling(const Mesh& mesh, const Spaces& spaces, const PhysParams& prm) {
  const PressureSpace& ps = spaces.pressure;
  const DisplacementSpace& ds = spaces.displacement;
  const int np = ps.local_dim();
  const int nn = ds.nodes_per_cell();
  const int nloc = ds.local_dim();
  Triplets ct, gt;
  std::vector<double> pv(static_cast<std::size_t>(np));

  const QuadratureRule qv = gauss_rule(volume_points(spaces), 2);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Point2 h = mesh.cell_extent(c);
    const double jac = h.x * h.y;
    const auto dofs = ds.cell_free_dofs(c);
    Eigen::MatrixXd ge = Eigen::MatrixXd::Zero(np, nloc);
    for (std::size_t q = 0; q < qv.size(); ++q) {
      const Point2 ref{qv.points[q][0], qv.points[q][1]};
      ps.eval(ref, pv);
      const ScalarShapes sh = displacement_shapes(ds, h, ref);
      const double w = qv.weights[q] * jac;
      for (int a = 0; a < nloc; ++a) {
        const double div = at(sh.grad[static_cast<std::size_t>(a % nn)], a / nn);
        for (int p = 0; p < np; ++p) ge(p, a) += w * pv[static_cast<std::size_t>(p)] * div;
      }
    }
    for (int a = 0; a < nloc; ++a) {
      const int fa = dofs[static_cast<std::size_t>(a)];
      if (fa < 0) continue;
      for (int p = 0; p < np; ++p) {
        if (ge(p, a) == 0.0) continue;
        gt.emplace_back(ps.dof(c, p), fa, ge(p, a));
        ct.emplace_back(fa, ps.dof(c, p), prm.b * ge(p, a));
      }
    }
  }

  // - b J_p(p, z) = - b sum_e <{p} nu, [z]>_e
  const GaussLegendre1D qe = gauss_legendre(edge_points(spaces));
  for (const Edge& e : mesh.edges()) {
    if (e.boundary) continue;
    const std::array<int, 2> cells{e.cell_k, e.cell_kp};
    const std::array<double, 2> sign{1.0, -1.0};
    Eigen::MatrixXd je = Eigen::MatrixXd::Zero(2 * nloc, 2 * np);
    for (std::size_t q = 0; q < qe.nodes.size(); ++q) {
      const auto [ref_k, ref_kp] = edge_ref_points(e, qe.nodes[q]);
      const std::array<Point2, 2> refs{ref_k, ref_kp};
      const double w = qe.weights[q] * e.length;
      for (int sp = 0; sp < 2; ++sp) {
        ps.eval(refs[static_cast<std::size_t>(sp)], pv);
        for (int sz = 0; sz < 2; ++sz) {
          const NodalBasisValues nb = nodal_basis(ds.order(), refs[static_cast<std::size_t>(sz)]);
          for (int a = 0; a < nloc; ++a) {
            const double jz = sign[static_cast<std::size_t>(sz)] * nb.values[static_cast<std::size_t>(a % nn)] *
                              at(e.normal, a / nn);
            if (jz == 0.0) continue;
            for (int p = 0; p < np; ++p) {
              je(sz * nloc + a, sp * np + p) += w * 0.5 * pv[static_cast<std::size_t>(p)] * jz;
            }
          }
        }
      }
    }
    for (int a = 0; a < 2 * nloc; ++a) {
      const int fa = ds.cell_free_dofs(cells[static_cast<std::size_t>(a / nloc)])[static_cast<std::size_t>(a % nloc)];
      if (fa < 0) continue;
      for (int p = 0; p < 2 * np; ++p) {
        if (je(a, p) == 0.0) continue;
        ct.emplace_back(fa, ps.dof(cells[static_cast<std::size_t>(p / np)], p % np), -prm.b * je(a, p));
      }
    }
  }
  return {from_triplets(ds.num_free_dofs(), ps.num_dofs(), ct),
          from_triplets(ps.num_dofs(), ds.num_free_dofs(), gt)};
}

SpMat assemble_displacement_mass(const Mesh& mesh, const Spaces& spaces) {
  const DisplacementSpace& ds = spaces.displacement;
  const int nn = ds.nodes_per_cell();
  const int nloc = ds.local_dim();
  Triplets t;
  const QuadratureRule qv = gauss_rule(volume_points(spaces), 2);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Point2 h = mesh.cell_extent(c);
    const auto dofs = ds.cell_free_dofs(c);
    Eigen::MatrixXd me = Eigen::MatrixXd::Zero(nn, nn);
    for (std::size_t q = 0; q < qv.size(); ++q) {
      const NodalBasisValues nb = nodal_basis(ds.order(), {qv.points[q][0], qv.points[q][1]});
      const double w = qv.weights[q] * h.x * h.y;
      for (int a = 0; a < nn; ++a) {
        for (int b = 0; b < nn; ++b) {
          me(a, b) += w * nb.values[static_cast<std::size_t>(a)] * nb.values[static_cast<std::size_t>(b)];
        }
      }
    }
    for (int a = 0; a < nloc; ++a) {
      const int fa = dofs[static_cast<std::size_t>(a)];
      if (fa < 0) continue;
      for (int b = 0; b < nloc; ++b) {
        const int fb = dofs[static_cast<std::size_t>(b)];
        if (fb < 0 || a / nn != b / nn) continue;
        t.emplace_back(fa, fb, me(a % nn, b % nn));
      }
    }
  }
  return from_triplets(ds.num_free_dofs(), ds.num_free_dofs(), t);
}

AssembledOperators assemble_operators(const Mesh& mesh, const Spaces& spaces,
                                      const PhysParams& params, const SipConfig& sip) {
  params.validate();
  FlowBlocks flow = assemble_flow_blocks(mesh, spaces, params);
  CouplingBlocks coupling = assemble_coupling(mesh, spaces, params);
  return {std::move(flow.Mp),
          std::move(flow.Mq),
          std::move(flow.D),
          assemble_elasticity(mesh, spaces, params, sip),
          std::move(coupling.C),
          std::move(coupling.G),
          assemble_displacement_mass(mesh, spaces)};
}

// ---------------------------------------------------------------------------

Eigen::VectorXd pressure_load(const Mesh& mesh, const Spaces& spaces, const ScalarField& f,
                              double t) {
  const PressureSpace& ps = spaces.pressure;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(ps.num_dofs());
  const QuadratureRule qv = gauss_rule(volume_points(spaces), 2);
  std::vector<double> pv(static_cast<std::size_t>(ps.local_dim()));
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellMap map = cell_map(mesh, c);
    for (std::size_t q = 0; q < qv.size(); ++q) {
      const Point2 ref{qv.points[q][0], qv.points[q][1]};
      ps.eval(ref, pv);
      const double w = qv.weights[q] * map.jacobian() * f(map.map(ref), t);
      for (int a = 0; a < ps.local_dim(); ++a) out[ps.dof(c, a)] += w * pv[static_cast<std::size_t>(a)];
    }
  }
  return out;
}

Eigen::VectorXd body_load(const Mesh& mesh, const Spaces& spaces, const PhysParams& params,
                          const VectorField& g, double t) {
  const DisplacementSpace& ds = spaces.displacement;
  const int nn = ds.nodes_per_cell();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(ds.num_free_dofs());
  const QuadratureRule qv = gauss_rule(volume_points(spaces), 2);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellMap map = cell_map(mesh, c);
    const auto dofs = ds.cell_free_dofs(c);
    for (std::size_t q = 0; q < qv.size(); ++q) {
      const Point2 ref{qv.points[q][0], qv.points[q][1]};
      const NodalBasisValues nb = nodal_basis(ds.order(), ref);
      const Point2 gv = g(map.map(ref), t);
      const double w = qv.weights[q] * map.jacobian() * params.rho_b;
      for (int a = 0; a < ds.local_dim(); ++a) {
        const int fa = dofs[static_cast<std::size_t>(a)];
        if (fa < 0) continue;
        out[fa] += w * at(gv, a / nn) * nb.values[static_cast<std::size_t>(a % nn)];
      }
    }
  }
  return out;
}

SlabHistory zero_history(const Spaces& spaces) {
  return {Eigen::VectorXd::Zero(spaces.pressure.num_dofs()),
          Eigen::VectorXd::Zero(spaces.displacement.num_free_dofs())};
}

SlabRhs assemble_slab_rhs(const Mesh& mesh, const Spaces& spaces, const AssembledOperators& ops,
                          const PhysParams& params, const SourceData& sources,
                          const SlabBasis& basis, int n, double t_start, double tau,
                          const std::optional<SlabHistory>& history) {
  if (n > 1 && !history) {
    throw ConfigError("assemble_slab_rhs: history state missing for slab " + std::to_string(n));
  }
  const SlabHistory hist = history ? *history : zero_history(spaces);
  const Eigen::VectorXd carried = params.c0 * (ops.Mp * hist.p) + params.b * (ops.G * hist.u);
  SlabRhs rhs;
  for (int i = 0; i < basis.num_nodes(); ++i) {
    const double ti = basis.node_time(t_start, tau, i);
    rhs.flow.push_back(tau * basis.beta[i] * pressure_load(mesh, spaces, sources.f, ti) +
                       basis.gamma[i] * carried);
    rhs.mechanics.push_back(body_load(mesh, spaces, params, sources.g, ti));
  }
  return rhs;
}

}  // namespace porofix
