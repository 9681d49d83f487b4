#include <cmath>
#include <random>

#include <Eigen/SparseCholesky>

#include "doctest.h"

#include "porofix/assembly.hpp"
#include "porofix/errors.hpp"
#include "porofix/quadrature.hpp"

using namespace porofix;

namespace {

PhysParams params(double mu = 1.0, double lambda = 1.0, double b = 1.0) {
  PhysParams p;
  p.mu = mu;
  p.lambda = lambda;
  p.b = b;
  return p;
}

SipConfig sip_for(const PhysParams& p, int s) { return SipConfig{SipConfig::default_delta0(p, s), 1.0}; }

/// Free-DOF vector holding nodal values of `f` on one cell and zero elsewhere.
Eigen::VectorXd on_cell(const Mesh& m, const DisplacementSpace& ds, int cell, const std::function<Point2(Point2)>& f) {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(ds.num_free_dofs());
  const CellMap map = cell_map(m, cell);
  for (int node = 0; node < ds.nodes_per_cell(); ++node) {
    const Point2 v = f(map.map(ds.node_ref(node)));
    for (int c = 0; c < 2; ++c) {
      const int fd = ds.free_dof(ds.raw_dof(cell, c, node));
      REQUIRE(fd >= 0);
      u[fd] = c == 0 ? v.x : v.y;
    }
  }
  return u;
}

/// Free-DOF vector of the nodal interpolant of a globally continuous field.
Eigen::VectorXd continuous(const Mesh& m, const DisplacementSpace& ds, const std::function<Point2(Point2)>& f) {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(ds.num_free_dofs());
  for (int c = 0; c < m.num_cells(); ++c) {
    const CellMap map = cell_map(m, c);
    for (int node = 0; node < ds.nodes_per_cell(); ++node) {
      const Point2 v = f(map.map(ds.node_ref(node)));
      for (int k = 0; k < 2; ++k) {
        const int fd = ds.free_dof(ds.raw_dof(c, k, node));
        if (fd >= 0) u[fd] = k == 0 ? v.x : v.y;
      }
    }
  }
  return u;
}

Eigen::VectorXd random_vector(int n, std::mt19937& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

struct Strain {
  double xx, yy, xy;
};

Strain strain(const DisplacementSample& s) {
  return {s.grad[0].x, s.grad[1].y, 0.5 * (s.grad[0].y + s.grad[1].x)};
}

/// Direct quadrature of sum_K <sigma(y), eps(z)>_K, J_delta, J_d and the coupling form.
struct DirectForms {
  double volume = 0.0, penalty = 0.0, consistency = 0.0, coupling = 0.0;
};

DirectForms direct_forms(const Mesh& m, const Spaces& sp, const PhysParams& prm, const SipConfig& sip,
                         const Eigen::VectorXd& y, const Eigen::VectorXd& z, const Eigen::VectorXd& p) {
  const DisplacementSpace& ds = sp.displacement;
  DirectForms out;
  const QuadratureRule q = gauss_rule(5, 2);
  for (int c = 0; c < m.num_cells(); ++c) {
    const CellMap map = cell_map(m, c);
    for (std::size_t i = 0; i < q.size(); ++i) {
      const Point2 ref{q.points[i][0], q.points[i][1]};
      const double w = q.weights[i] * map.jacobian();
      const Strain ey = strain(eval_displacement(ds, m, y, c, ref));
      const DisplacementSample zs = eval_displacement(ds, m, z, c, ref);
      const Strain ez = strain(zs);
      const double divy = ey.xx + ey.yy, divz = ez.xx + ez.yy;
      out.volume += w * (2 * prm.mu * (ey.xx * ez.xx + ey.yy * ez.yy + 2 * ey.xy * ez.xy) + prm.lambda * divy * divz);
      out.coupling += w * prm.b * eval_pressure(sp.pressure, p, c, ref) * divz;
    }
  }
  const QuadratureRule qe = gauss_rule(5, 1);
  for (const Edge& e : m.edges()) {
    if (e.boundary) continue;
    const bool vert = e.axis == EdgeAxis::vertical;
    for (std::size_t i = 0; i < qe.size(); ++i) {
      const double t = qe.points[i][0];
      const double w = qe.weights[i] * e.length;
      const Point2 rk = vert ? Point2{1.0, t} : Point2{t, 1.0};
      const Point2 rkp = vert ? Point2{0.0, t} : Point2{t, 0.0};
      const DisplacementSample yk = eval_displacement(ds, m, y, e.cell_k, rk);
      const DisplacementSample ykp = eval_displacement(ds, m, y, e.cell_kp, rkp);
      const DisplacementSample zk = eval_displacement(ds, m, z, e.cell_k, rk);
      const DisplacementSample zkp = eval_displacement(ds, m, z, e.cell_kp, rkp);
      const Point2 jy{yk.value.x - ykp.value.x, yk.value.y - ykp.value.y};
      const Point2 jz{zk.value.x - zkp.value.x, zk.value.y - zkp.value.y};
      auto traction = [&](const DisplacementSample& s) {
        const Strain e2 = strain(s);
        const double div = e2.xx + e2.yy;
        const double sxx = 2 * prm.mu * e2.xx + prm.lambda * div;
        const double syy = 2 * prm.mu * e2.yy + prm.lambda * div;
        const double sxy = 2 * prm.mu * e2.xy;
        return Point2{sxx * e.normal.x + sxy * e.normal.y, sxy * e.normal.x + syy * e.normal.y};
      };
      const Point2 ty_k = traction(yk), ty_kp = traction(ykp), tz_k = traction(zk), tz_kp = traction(zkp);
      const Point2 avg_ty{0.5 * (ty_k.x + ty_kp.x), 0.5 * (ty_k.y + ty_kp.y)};
      const Point2 avg_tz{0.5 * (tz_k.x + tz_kp.x), 0.5 * (tz_k.y + tz_kp.y)};
      out.penalty += w * sip.delta0 / std::pow(e.length, sip.beta_exp) * (jy.x * jz.x + jy.y * jz.y);
      out.consistency += w * (avg_ty.x * jz.x + avg_ty.y * jz.y + avg_tz.x * jy.x + avg_tz.y * jy.y);
      const double pavg = 0.5 * (eval_pressure(sp.pressure, p, e.cell_k, rk) + eval_pressure(sp.pressure, p, e.cell_kp, rkp));
      out.coupling -= w * prm.b * pavg * (e.normal.x * jz.x + e.normal.y * jz.y);
    }
  }
  return out;
}

bool is_spd(const SpMat& a) {
  Eigen::SimplicialLLT<SpMat> llt(a);
  return llt.info() == Eigen::Success;
}

double asymmetry(const SpMat& a) {
  const SpMat d = a - SpMat(a.transpose());
  return d.norm() / std::max(a.norm(), 1e-300);
}

}  // namespace

TEST_CASE("trace_ops examples") {
  const JumpAverage c = trace_ops(3.0, 3.0);
  CHECK(c.jump == 0.0);
  CHECK(c.average == 3.0);
  const JumpAverage d = trace_ops(1.0, 0.0);
  CHECK(d.jump == 1.0);
  CHECK(d.average == 0.5);
  const VectorJumpAverage v = trace_ops(Point2{2.0, 0.0}, Point2{0.0, 0.0});
  CHECK(v.jump.x == 2.0);
  CHECK(v.jump.y == 0.0);
  CHECK(v.average.x == 1.0);
  CHECK(v.average.y == 0.0);
}

TEST_CASE("trace_ops on edges: orientation and boundary guard") {
  const Mesh m = build_rect_mesh(2, 1, 1.0, 1.0);
  const std::vector<double> a{1.0, 2.0, -0.5}, b{0.25, 2.0, 1.5};
  for (const Edge& e : m.edges()) {
    if (e.boundary) {
      CHECK_THROWS_AS(trace_ops(e, a, b), ConfigError);
      continue;
    }
    const auto ab = trace_ops(e, a, b);
    const auto ba = trace_ops(e, b, a);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(ab[i].jump == -ba[i].jump);
      CHECK(ab[i].average == ba[i].average);
    }
    CHECK_THROWS_AS(trace_ops(e, a, std::vector<double>{1.0}), ConfigError);
  }
}

TEST_CASE("flow blocks on the unit cell and the 2x2 mesh") {
  const Mesh one = build_rect_mesh(1, 1, 1.0, 1.0);
  const FlowBlocks f = assemble_flow_blocks(one, dof_layout(one, 0), params());
  const Eigen::MatrixXd mq(f.Mq);
  for (int a = 0; a < 4; ++a) CHECK(mq(a, a) == doctest::Approx(1.0 / 3.0));
  // edges: 0 left, 1 right, 2 bottom, 3 top
  CHECK(std::abs(mq(0, 1)) == doctest::Approx(1.0 / 6.0));
  CHECK(std::abs(mq(2, 3)) == doctest::Approx(1.0 / 6.0));
  CHECK(std::abs(mq(0, 2)) < 1e-15);
  const Eigen::MatrixXd d(f.D);
  CHECK(d(0, 0) == doctest::Approx(-1.0));
  CHECK(d(0, 1) == doctest::Approx(1.0));
  CHECK(d(0, 2) == doctest::Approx(-1.0));
  CHECK(d(0, 3) == doctest::Approx(1.0));

  const Mesh two = build_rect_mesh(2, 2, 1.0, 1.0);
  const FlowBlocks g = assemble_flow_blocks(two, dof_layout(two, 0), params());
  CHECK((Eigen::MatrixXd(g.Mp) - 0.25 * Eigen::MatrixXd::Identity(4, 4)).norm() < 1e-15);

  PhysParams sing = params();
  sing.K << 1.0, 1.0, 1.0, 1.0;
  CHECK_THROWS_AS(assemble_flow_blocks(one, dof_layout(one, 0), sing), ConfigError);
}

TEST_CASE("flow blocks are SPD and K^{-1} scales the flux mass") {
  for (int s = 0; s <= 1; ++s) {
    const Mesh m = build_rect_mesh(3, 2, 1.0, 0.5);
    const Spaces sp = dof_layout(m, s);
    PhysParams p = params();
    const FlowBlocks f = assemble_flow_blocks(m, sp, p);
    CHECK(asymmetry(f.Mp) < 1e-14);
    CHECK(asymmetry(f.Mq) < 1e-14);
    CHECK(is_spd(f.Mp));
    CHECK(is_spd(f.Mq));
    p.K = 4.0 * Eigen::Matrix2d::Identity();
    const FlowBlocks g = assemble_flow_blocks(m, sp, p);
    CHECK((Eigen::MatrixXd(g.Mq) - 0.25 * Eigen::MatrixXd(f.Mq)).norm() < 1e-14);
  }
}

TEST_CASE("D pairs divergence with pressure exactly") {
  std::mt19937 rng(31);
  for (int s = 0; s <= 1; ++s) {
    const Mesh m = build_rect_mesh(2, 3, 2.0, 1.0);
    const Spaces sp = dof_layout(m, s);
    const FlowBlocks f = assemble_flow_blocks(m, sp, params());
    const Eigen::VectorXd q = random_vector(sp.flux.num_dofs(), rng);
    const Eigen::VectorXd p = random_vector(sp.pressure.num_dofs(), rng);
    double direct = 0.0;
    const QuadratureRule qr = gauss_rule(4, 2);
    for (int c = 0; c < m.num_cells(); ++c) {
      const CellMap map = cell_map(m, c);
      const auto dofs = sp.flux.cell_dofs(c);
      for (std::size_t i = 0; i < qr.size(); ++i) {
        const Point2 ref{qr.points[i][0], qr.points[i][1]};
        const RtBasisValues v = sp.flux.element().eval(map.scale, ref);
        double div = 0.0;
        for (std::size_t k = 0; k < dofs.size(); ++k) div += q[dofs[k]] * v.divergence[k];
        direct += qr.weights[i] * map.jacobian() * div * eval_pressure(sp.pressure, p, c, ref);
      }
    }
    CHECK(p.dot(f.D * q) == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("elasticity examples") {
  {
    const Mesh one = build_rect_mesh(1, 1, 1.0, 1.0);
    const PhysParams p = params();
    CHECK(assemble_elasticity(one, dof_layout(one, 0), p, sip_for(p, 0)).rows() == 0);
  }
  // 3x3 mesh of unit cells: the centre cell has all nodes free
  const Mesh m = build_rect_mesh(3, 3, 3.0, 3.0);
  const int centre = m.cell_index(1, 1);
  const PhysParams p = params(1.5, 2.0);
  const Spaces sp = dof_layout(m, 0);
  const SipConfig sip{7.0, 1.0};
  const ElasticityParts parts = assemble_elasticity_parts(m, sp, p, sip);

  const Eigen::VectorXd u = on_cell(m, sp.displacement, centre, [](Point2 x) { return Point2{x.x, -x.y}; });
  CHECK(u.dot(parts.volume * u) == doctest::Approx(4.0 * p.mu * 1.0));

  const Eigen::VectorXd z = on_cell(m, sp.displacement, centre, [](Point2) { return Point2{1.0, 0.0}; });
  // four edges with constant jump of unit size, delta0 / h * h each
  CHECK(z.dot(parts.penalty * z) == doctest::Approx(4.0 * sip.delta0));

  CHECK_THROWS_AS(assemble_elasticity(m, sp, p, SipConfig{0.0, 1.0}), ConfigError);
  CHECK_THROWS_AS(assemble_elasticity(m, sp, p, SipConfig{1.0, -1.0}), ConfigError);
}

TEST_CASE("elasticity forms match direct quadrature") {
  std::mt19937 rng(41);
  for (int s = 0; s <= 1; ++s) {
    const Mesh m = build_rect_mesh(3, 2, 1.5, 1.0);
    const PhysParams p = params(0.7, 3.0, 0.8);
    const Spaces sp = dof_layout(m, s);
    const SipConfig sip{5.0, 1.0};
    const ElasticityParts parts = assemble_elasticity_parts(m, sp, p, sip);
    const SpMat a = assemble_elasticity(m, sp, p, sip);
    const CouplingBlocks cb = assemble_coupling(m, sp, p);
    for (int trial = 0; trial < 3; ++trial) {
      const Eigen::VectorXd y = random_vector(sp.displacement.num_free_dofs(), rng);
      const Eigen::VectorXd z = random_vector(sp.displacement.num_free_dofs(), rng);
      const Eigen::VectorXd pr = random_vector(sp.pressure.num_dofs(), rng);
      const DirectForms d = direct_forms(m, sp, p, sip, y, z, pr);
      CAPTURE(s);
      CHECK(z.dot(parts.volume * y) == doctest::Approx(d.volume).epsilon(1e-12));
      CHECK(z.dot(parts.penalty * y) == doctest::Approx(d.penalty).epsilon(1e-12));
      CHECK(z.dot(parts.consistency * y) == doctest::Approx(d.consistency).epsilon(1e-12));
      CHECK(z.dot(a * y) == doctest::Approx(d.volume + d.penalty - d.consistency).epsilon(1e-12));
      // adjoint consistency of the coupling
      CHECK(z.dot(cb.C * pr) == doctest::Approx(d.coupling).epsilon(1e-12));
    }
  }
}

TEST_CASE("A is symmetric and positive definite at the default penalty") {
  for (int s = 0; s <= 1; ++s) {
    const Mesh m = build_rect_mesh(4, 4, 1.0, 1.0);
    const PhysParams p = params();
    const SpMat a = assemble_elasticity(m, dof_layout(m, s), p, sip_for(p, s));
    CHECK(asymmetry(a) < 1e-12);
    CHECK(is_spd(a));
  }
}

TEST_CASE("zero-jump null test") {
  for (int s = 0; s <= 1; ++s) {
    const Mesh m = build_rect_mesh(4, 3, 1.0, 1.0);
    const PhysParams p = params();
    const Spaces sp = dof_layout(m, s);
    const ElasticityParts parts = assemble_elasticity_parts(m, sp, p, sip_for(p, s));
    const Eigen::VectorXd y = continuous(m, sp.displacement, [](Point2 x) {
      const double bub = x.x * (1 - x.x) * x.y * (1 - x.y);
      return Point2{bub * (1 + x.x), bub * std::cos(x.y)};
    });
    CHECK((parts.penalty * y).norm() <= 1e-12 * (1.0 + parts.penalty.norm()));
    CHECK(std::abs(y.dot(parts.consistency * y)) <= 1e-12);
    // J_p against a continuous field vanishes: C p equals the volume part alone
    const CouplingBlocks cb = assemble_coupling(m, sp, p);
    const Eigen::VectorXd pr = Eigen::VectorXd::LinSpaced(sp.pressure.num_dofs(), -1.0, 2.0);
    const SpMat gt = SpMat(cb.G.transpose());
    CHECK(std::abs(y.dot(cb.C * pr) - p.b * y.dot(gt * pr)) <= 1e-12);
  }
}

TEST_CASE("coupling examples") {
  const Mesh m = build_rect_mesh(3, 3, 3.0, 3.0);
  const int centre = m.cell_index(1, 1);
  const PhysParams p = params(1.0, 1.0, 0.6);
  const Spaces sp = dof_layout(m, 0);
  const CouplingBlocks cb = assemble_coupling(m, sp, p);

  const Eigen::VectorXd u = on_cell(m, sp.displacement, centre, [](Point2 x) { return Point2{x.x, x.y}; });
  const Eigen::VectorXd gu = cb.G * u;
  CHECK(gu[sp.pressure.dof(centre, 0)] == doctest::Approx(2.0));

  // z = (1,0) on the centre cell: constant, so the volume part vanishes; with
  // p = 1 on the right neighbour only, {p} = 1/2 on the right edge, 0 on the left.
  const Eigen::VectorXd z = on_cell(m, sp.displacement, centre, [](Point2) { return Point2{1.0, 0.0}; });
  Eigen::VectorXd pr = Eigen::VectorXd::Zero(sp.pressure.num_dofs());
  pr[sp.pressure.dof(m.cell_index(2, 1), 0)] = 1.0;
  CHECK(z.dot(cb.C * pr) == doctest::Approx(-p.b * 0.5 * 1.0));
  // p = 1 everywhere: left and right contributions cancel
  pr.setOnes();
  CHECK(std::abs(z.dot(cb.C * pr)) < 1e-14);
}

TEST_CASE("slab right-hand sides") {
  const Mesh one = build_rect_mesh(1, 1, 1.0, 1.0);
  const Spaces sp = dof_layout(one, 0);
  PhysParams p = params();
  const AssembledOperators ops = assemble_operators(one, sp, p, sip_for(p, 0));
  const SlabBasis b0 = slab_coefficients(0);

  SourceData zero;
  const SlabRhs z = assemble_slab_rhs(one, sp, ops, p, zero, b0, 1, 0.0, 0.5, std::nullopt);
  CHECK(z.flow[0].norm() == 0.0);
  CHECK(z.mechanics[0].size() == 0);

  SourceData unit;
  unit.f = [](Point2, double) { return 1.0; };
  const SlabRhs u = assemble_slab_rhs(one, sp, ops, p, unit, b0, 1, 0.0, 0.5, std::nullopt);
  CHECK(u.flow[0][0] == doctest::Approx(0.5));

  const Mesh dom = build_rect_mesh(2, 2, 2.0, 1.5);
  const Spaces sp2 = dof_layout(dom, 0);
  const AssembledOperators ops2 = assemble_operators(dom, sp2, p, sip_for(p, 0));
  SlabHistory h = zero_history(sp2);
  h.p.setConstant(2.0);
  const SlabRhs hr = assemble_slab_rhs(dom, sp2, ops2, p, zero, b0, 2, 1.0, 0.5, h);
  CHECK(hr.flow[0].sum() == doctest::Approx(2.0 * 3.0));
  CHECK_THROWS_AS(assemble_slab_rhs(dom, sp2, ops2, p, zero, b0, 2, 1.0, 0.5, std::nullopt), ConfigError);
}

TEST_CASE("body load carries the bulk density") {
  const Mesh m = build_rect_mesh(3, 3, 1.0, 1.0);
  const Spaces sp = dof_layout(m, 1);
  PhysParams p = params();
  const VectorField g = [](Point2 x, double t) { return Point2{t * x.y, -t}; };
  const Eigen::VectorXd one = body_load(m, sp, p, g, 0.5);
  p.rho_b = 2.5;
  const Eigen::VectorXd two = body_load(m, sp, p, g, 0.5);
  CHECK((two - 2.5 * one).norm() <= 1e-14 * two.norm());
  CHECK(one.norm() > 0.0);
}
