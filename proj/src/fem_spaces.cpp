#include "porofix/fem_spaces.hpp"

#include <cmath>
#include <string>

#include "porofix/errors.hpp"
#include "porofix/quadrature.hpp"

namespace porofix {

double Poly1D::value(double x) const {
  double v = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * x + *it;
  return v;
}

double Poly1D::deriv(double x) const {
  double v = 0.0;
  for (std::size_t p = coeffs.size(); p-- > 1;) v = v * x + static_cast<double>(p) * coeffs[p];
  return v;
}

void lagrange_1d(std::span<const double> nodes, double x, std::span<double> values,
                 std::span<double> derivs) {
  const std::size_t n = nodes.size();
  for (std::size_t i = 0; i < n; ++i) {
    double v = 1.0;
    double d = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double denom = nodes[i] - nodes[j];
      // Product rule: d(v * (x-xj)/denom) = d*(x-xj)/denom + v/denom
      d = d * (x - nodes[j]) / denom + v / denom;
      v *= (x - nodes[j]) / denom;
    }
    values[i] = v;
    if (!derivs.empty()) derivs[i] = d;
  }
}

// ---------------------------------------------------------------------------

PressureSpace::PressureSpace(const Mesh& mesh, int order)
    : order_(order), num_cells_(mesh.num_cells()) {
  if (order < 0 || order > 1) {
    throw ConfigError("orders.s: unsupported pressure order " + std::to_string(order));
  }
  nodes_ = gauss_legendre(order + 1).nodes;
}

void PressureSpace::eval(Point2 ref, std::span<double> values) const {
  const int n = order_ + 1;
  std::array<double, 4> vx{};
  std::array<double, 4> vy{};
  lagrange_1d(nodes_, ref.x, std::span<double>(vx.data(), n), {});
  lagrange_1d(nodes_, ref.y, std::span<double>(vy.data(), n), {});
  for (int b = 0; b < n; ++b) {
    for (int a = 0; a < n; ++a) values[b * n + a] = vx[a] * vy[b];
  }
}

// ---------------------------------------------------------------------------

double RaviartThomasElement::moment_weight(int index, double t) {
  switch (index) {
    case 0:
      return 1.0;
    case 1:
      return 2.0 * t - 1.0;
    case 2:
      return 6.0 * t * t - 6.0 * t + 1.0;
    default:
      throw ConfigError("RT moment index out of range");
  }
}

namespace {

/// Monomial-coefficient polynomials dual to the given functionals.
/// functional(f, p) evaluates functional f on x^p.
template <typename Functional>
std::vector<Poly1D> dual_basis(int degree, Functional functional) {
  const int n = degree + 1;
  Eigen::MatrixXd f(n, n);
  for (int i = 0; i < n; ++i) {
    for (int p = 0; p < n; ++p) f(i, p) = functional(i, p);
  }
  const Eigen::MatrixXd c = f.inverse();
  std::vector<Poly1D> polys(static_cast<std::size_t>(n));
  for (int q = 0; q < n; ++q) {
    polys[static_cast<std::size_t>(q)].coeffs.resize(static_cast<std::size_t>(n));
    for (int p = 0; p < n; ++p) polys[static_cast<std::size_t>(q)].coeffs[static_cast<std::size_t>(p)] = c(p, q);
  }
  return polys;
}

double moment_of_monomial(int p, int m) {
  const GaussLegendre1D g = gauss_legendre(4);
  double sum = 0.0;
  for (std::size_t q = 0; q < g.nodes.size(); ++q) {
    sum += g.weights[q] * std::pow(g.nodes[q], p) * RaviartThomasElement::moment_weight(m, g.nodes[q]);
  }
  return sum;
}

}  // namespace

RaviartThomasElement::RaviartThomasElement(int order) : order_(order) {
  if (order < 0 || order > 1) {
    throw ConfigError("RT element: unsupported order " + std::to_string(order));
  }
  const int s = order;
  // Normal direction: degree s+1, functionals f(0), f(1), int f L_m (m < s).
  normal_polys_ = dual_basis(s + 1, [](int i, int p) {
    if (i == 0) return p == 0 ? 1.0 : 0.0;
    if (i == 1) return 1.0;
    return moment_of_monomial(p, i - 2);
  });
  // Tangential direction: degree s, functionals int f L_n (n <= s).
  tangent_polys_ = dual_basis(s, [](int i, int p) { return moment_of_monomial(p, i); });

  for (int k = 0; k <= s; ++k) dofs_.push_back({0, 0, k});  // left
  for (int k = 0; k <= s; ++k) dofs_.push_back({0, 1, k});  // right
  for (int k = 0; k <= s; ++k) dofs_.push_back({1, 0, k});  // bottom
  for (int k = 0; k <= s; ++k) dofs_.push_back({1, 1, k});  // top
  for (int comp = 0; comp < 2; ++comp) {
    for (int m = 0; m < s; ++m) {
      for (int k = 0; k <= s; ++k) dofs_.push_back({comp, 2 + m, k});
    }
  }
}

void RaviartThomasElement::eval(Point2 scale, Point2 ref, RtBasisValues& out) const {
  const std::size_t n = dofs_.size();
  out.values.resize(n);
  out.divergence.resize(n);
  const double jac = scale.x * scale.y;
  for (std::size_t i = 0; i < n; ++i) {
    const RtLocalDof& d = dofs_[i];
    const Poly1D& np = normal_polys_[static_cast<std::size_t>(d.normal_index)];
    const Poly1D& tp = tangent_polys_[static_cast<std::size_t>(d.tangent_index)];
    if (d.component == 0) {
      const double vhat = np.value(ref.x) * tp.value(ref.y);
      const double dhat = np.deriv(ref.x) * tp.value(ref.y);
      // Contravariant Piola with DF = diag(hx, hy).
      out.values[i] = {vhat / scale.y, 0.0};
      out.divergence[i] = dhat / jac;
    } else {
      const double vhat = np.value(ref.y) * tp.value(ref.x);
      const double dhat = np.deriv(ref.y) * tp.value(ref.x);
      out.values[i] = {0.0, vhat / scale.x};
      out.divergence[i] = dhat / jac;
    }
  }
}

RtBasisValues RaviartThomasElement::eval(Point2 scale, Point2 ref) const {
  RtBasisValues out;
  eval(scale, ref, out);
  return out;
}

RtBasisValues rt_basis(int s, Point2 scale, Point2 ref) {
  return RaviartThomasElement(s).eval(scale, ref);
}

FluxSpace::FluxSpace(const Mesh& mesh, int order)
    : element_(order), num_edges_(mesh.num_edges()) {
  const int s = order;
  const int per_edge = s + 1;
  const int per_cell = interior_dofs_per_cell();
  num_dofs_ = num_edges_ * per_edge + mesh.num_cells() * per_cell;
  const int nloc = local_dim();
  cell_dofs_.resize(static_cast<std::size_t>(mesh.num_cells() * nloc));
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& ce = mesh.cell_edges(c);
    int* out = &cell_dofs_[static_cast<std::size_t>(c * nloc)];
    int pos = 0;
    for (int side = 0; side < 4; ++side) {
      for (int k = 0; k < per_edge; ++k) out[pos++] = ce[static_cast<std::size_t>(side)] * per_edge + k;
    }
    for (int m = 0; m < per_cell; ++m) out[pos++] = num_edges_ * per_edge + c * per_cell + m;
  }
}

std::span<const int> FluxSpace::cell_dofs(int cell) const {
  const auto nloc = static_cast<std::size_t>(local_dim());
  return {cell_dofs_.data() + static_cast<std::size_t>(cell) * nloc, nloc};
}

int FluxSpace::owning_edge(int dof) const {
  return dof < num_edge_dofs() ? dof / dofs_per_edge() : -1;
}

// ---------------------------------------------------------------------------

NodalBasisValues nodal_basis(int order, Point2 ref) {
  const std::vector<double> nodes = gauss_lobatto_nodes(order);
  const int n = order + 1;
  std::array<double, 3> vx{}, dx{}, vy{}, dy{};
  lagrange_1d(nodes, ref.x, std::span<double>(vx.data(), n), std::span<double>(dx.data(), n));
  lagrange_1d(nodes, ref.y, std::span<double>(vy.data(), n), std::span<double>(dy.data(), n));
  NodalBasisValues out;
  out.values.resize(static_cast<std::size_t>(n * n));
  out.ref_gradients.resize(static_cast<std::size_t>(n * n));
  for (int b = 0; b < n; ++b) {
    for (int a = 0; a < n; ++a) {
      const auto i = static_cast<std::size_t>(b * n + a);
      out.values[i] = vx[a] * vy[b];
      out.ref_gradients[i] = {dx[a] * vy[b], vx[a] * dy[b]};
    }
  }
  return out;
}

DisplacementSpace::DisplacementSpace(const Mesh& mesh, int order)
    : order_(order), num_cells_(mesh.num_cells()) {
  if (order < 1 || order > 2) {
    throw ConfigError("displacement order " + std::to_string(order) + " unsupported (need 1 or 2)");
  }
  nodes_ = gauss_lobatto_nodes(order);
  free_index_.assign(static_cast<std::size_t>(num_raw_dofs()), -1);
  const int n = order + 1;
  for (int c = 0; c < num_cells_; ++c) {
    const int ci = c % mesh.nx();
    const int cj = c / mesh.nx();
    for (int comp = 0; comp < 2; ++comp) {
      for (int b = 0; b < n; ++b) {
        for (int a = 0; a < n; ++a) {
          // Node lies on the boundary iff it sits on an outer cell side.
          const bool on_boundary = (ci == 0 && a == 0) || (ci == mesh.nx() - 1 && a == n - 1) ||
                                   (cj == 0 && b == 0) || (cj == mesh.ny() - 1 && b == n - 1);
          if (!on_boundary) {
            free_index_[static_cast<std::size_t>(raw_dof(c, comp, b * n + a))] = num_free_++;
          }
        }
      }
    }
  }
}

std::span<const int> DisplacementSpace::cell_free_dofs(int cell) const {
  const auto nloc = static_cast<std::size_t>(local_dim());
  return {free_index_.data() + static_cast<std::size_t>(cell) * nloc, nloc};
}

Point2 DisplacementSpace::node_ref(int node) const {
  const int n = order_ + 1;
  return {nodes_[static_cast<std::size_t>(node % n)], nodes_[static_cast<std::size_t>(node / n)]};
}

Eigen::VectorXd DisplacementSpace::expand(const Eigen::VectorXd& free) const {
  Eigen::VectorXd raw = Eigen::VectorXd::Zero(num_raw_dofs());
  for (int i = 0; i < num_raw_dofs(); ++i) {
    const int f = free_index_[static_cast<std::size_t>(i)];
    if (f >= 0) raw[i] = free[f];
  }
  return raw;
}

Spaces dof_layout(const Mesh& mesh, int s) {
  if (s < 0 || s > 1) throw ConfigError("orders.s: unsupported order " + std::to_string(s));
  return Spaces{s, PressureSpace(mesh, s), FluxSpace(mesh, s), DisplacementSpace(mesh, s + 1)};
}

// ---------------------------------------------------------------------------

double eval_pressure(const PressureSpace& space, const Eigen::VectorXd& coeffs, int cell,
                     Point2 ref) {
  std::array<double, 4> vals{};
  space.eval(ref, std::span<double>(vals.data(), space.local_dim()));
  double p = 0.0;
  for (int a = 0; a < space.local_dim(); ++a) p += coeffs[space.dof(cell, a)] * vals[a];
  return p;
}

Point2 eval_flux(const FluxSpace& space, const Mesh& mesh, const Eigen::VectorXd& coeffs,
                 int cell, Point2 ref) {
  const RtBasisValues b = space.element().eval(mesh.cell_extent(cell), ref);
  const auto dofs = space.cell_dofs(cell);
  Point2 q;
  for (std::size_t i = 0; i < dofs.size(); ++i) {
    q.x += coeffs[dofs[i]] * b.values[i].x;
    q.y += coeffs[dofs[i]] * b.values[i].y;
  }
  return q;
}

DisplacementSample eval_displacement(const DisplacementSpace& space, const Mesh& mesh,
                                     const Eigen::VectorXd& free_coeffs, int cell, Point2 ref) {
  const NodalBasisValues b = nodal_basis(space.order(), ref);
  const Point2 h = mesh.cell_extent(cell);
  const auto dofs = space.cell_free_dofs(cell);
  const int nn = space.nodes_per_cell();
  DisplacementSample out;
  for (int comp = 0; comp < 2; ++comp) {
    double v = 0.0;
    Point2 g;
    for (int a = 0; a < nn; ++a) {
      const int f = dofs[static_cast<std::size_t>(comp * nn + a)];
      if (f < 0) continue;
      const double c = free_coeffs[f];
      v += c * b.values[static_cast<std::size_t>(a)];
      g.x += c * b.ref_gradients[static_cast<std::size_t>(a)].x / h.x;
      g.y += c * b.ref_gradients[static_cast<std::size_t>(a)].y / h.y;
    }
    (comp == 0 ? out.value.x : out.value.y) = v;
    out.grad[static_cast<std::size_t>(comp)] = g;
  }
  return out;
}

}  // namespace porofix
