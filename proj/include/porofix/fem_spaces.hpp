#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "porofix/mesh.hpp"

namespace porofix {

/// Dense 1D polynomial in monomial form, c[0] + c[1] x + ...
struct Poly1D {
  std::vector<double> coeffs;

  double value(double x) const;
  double deriv(double x) const;
};

/// Values of the 1D Lagrange polynomials on `nodes` at x (and derivatives).
void lagrange_1d(std::span<const double> nodes, double x, std::span<double> values,
                 std::span<double> derivs);

// ---------------------------------------------------------------------------
// Pressure space W_h^s: discontinuous Q_s, tensor Lagrange on Gauss points.
// ---------------------------------------------------------------------------

class PressureSpace {
 public:
  PressureSpace(const Mesh& mesh, int order);

  int order() const { return order_; }
  int local_dim() const { return (order_ + 1) * (order_ + 1); }
  int num_dofs() const { return num_cells_ * local_dim(); }
  int dof(int cell, int local) const { return cell * local_dim() + local; }

  /// Reference basis values at `ref` (size local_dim()).
  void eval(Point2 ref, std::span<double> values) const;
  const std::vector<double>& nodes_1d() const { return nodes_; }

 private:
  int order_;
  int num_cells_;
  std::vector<double> nodes_;
};

// ---------------------------------------------------------------------------
// Raviart-Thomas flux space V_h^s on rectangles.
//
// Reference space Q_{s+1,s} x Q_{s,s+1}. Local DOFs, in order: left, right,
// bottom, top edge moments (s+1 each, against shifted Legendre polynomials in
// the edge tangent coordinate, normal +x or +y), then interior moments of the
// x component, then of the y component (s*(s+1) each).
// ---------------------------------------------------------------------------

struct RtLocalDof {
  int component;  // 0: x, 1: y
  int normal_index;
  int tangent_index;
};

/// Physical-space RT basis values at one reference point.
struct RtBasisValues {
  std::vector<Point2> values;
  std::vector<double> divergence;
};

class RaviartThomasElement {
 public:
  explicit RaviartThomasElement(int order);

  int order() const { return order_; }
  int local_dim() const { return static_cast<int>(dofs_.size()); }
  const std::vector<RtLocalDof>& dofs() const { return dofs_; }

  /// Piola-mapped values and divergences on a cell of extent `scale`.
  void eval(Point2 scale, Point2 ref, RtBasisValues& out) const;
  RtBasisValues eval(Point2 scale, Point2 ref) const;

  /// Shifted Legendre polynomial used for edge / interior moments.
  static double moment_weight(int index, double t);

 private:
  int order_;
  std::vector<Poly1D> normal_polys_;   // degree s+1
  std::vector<Poly1D> tangent_polys_;  // degree s
  std::vector<RtLocalDof> dofs_;
};

/// Physical-space RT_s basis at a reference point. Throws for s outside {0,1}.
RtBasisValues rt_basis(int s, Point2 scale, Point2 ref);

class FluxSpace {
 public:
  FluxSpace(const Mesh& mesh, int order);

  int order() const { return element_.order(); }
  int local_dim() const { return element_.local_dim(); }
  int num_dofs() const { return num_dofs_; }
  int dofs_per_edge() const { return order() + 1; }
  int interior_dofs_per_cell() const { return 2 * order() * (order() + 1); }
  int num_edge_dofs() const { return num_edges_ * dofs_per_edge(); }

  /// Local-to-global DOF map of a cell.
  std::span<const int> cell_dofs(int cell) const;
  /// Owning edge of a global DOF, or -1 for cell-interior DOFs.
  int owning_edge(int dof) const;
  const RaviartThomasElement& element() const { return element_; }

 private:
  RaviartThomasElement element_;
  int num_edges_;
  int num_dofs_;
  std::vector<int> cell_dofs_;
};

// ---------------------------------------------------------------------------
// Broken displacement space H_h^l: vector Q_l on Gauss-Lobatto nodes, with
// every nodal value on the domain boundary constrained to zero.
// ---------------------------------------------------------------------------

struct NodalBasisValues {
  std::vector<double> values;
  std::vector<Point2> ref_gradients;
};

/// Scalar Q_l Lagrange basis on Gauss-Lobatto nodes, l in {1,2}.
/// Node (a,b) has local index b*(l+1)+a.
NodalBasisValues nodal_basis(int order, Point2 ref);

class DisplacementSpace {
 public:
  DisplacementSpace(const Mesh& mesh, int order);

  int order() const { return order_; }
  int nodes_per_cell() const { return (order_ + 1) * (order_ + 1); }
  int local_dim() const { return 2 * nodes_per_cell(); }
  int num_raw_dofs() const { return num_cells_ * local_dim(); }
  int num_free_dofs() const { return num_free_; }

  int raw_dof(int cell, int component, int node) const {
    return cell * local_dim() + component * nodes_per_cell() + node;
  }
  /// Free index of a raw DOF, or -1 if it is constrained to zero.
  int free_dof(int raw) const { return free_index_.at(static_cast<std::size_t>(raw)); }
  bool constrained(int raw) const { return free_dof(raw) < 0; }
  /// Free indices of the local DOFs of a cell (-1 where constrained).
  std::span<const int> cell_free_dofs(int cell) const;

  Point2 node_ref(int node) const;
  const std::vector<double>& nodes_1d() const { return nodes_; }

  /// Expands a free-DOF vector to raw storage (constrained entries zero).
  Eigen::VectorXd expand(const Eigen::VectorXd& free) const;

 private:
  int order_;
  int num_cells_;
  int num_free_ = 0;
  std::vector<double> nodes_;
  std::vector<int> free_index_;
};

struct Spaces {
  int s = 0;
  PressureSpace pressure;
  FluxSpace flux;
  DisplacementSpace displacement;
};

/// Builds W_h^s, V_h^s and H_h^{s+1} on `mesh`. Supported s: 0, 1.
Spaces dof_layout(const Mesh& mesh, int s);

// ---------------------------------------------------------------------------
// Field evaluation from coefficient vectors.
// ---------------------------------------------------------------------------

double eval_pressure(const PressureSpace& space, const Eigen::VectorXd& coeffs, int cell,
                     Point2 ref);

Point2 eval_flux(const FluxSpace& space, const Mesh& mesh, const Eigen::VectorXd& coeffs,
                 int cell, Point2 ref);

struct DisplacementSample {
  Point2 value;
  /// grad[c] = physical gradient of component c.
  std::array<Point2, 2> grad;
};

DisplacementSample eval_displacement(const DisplacementSpace& space, const Mesh& mesh,
                                     const Eigen::VectorXd& free_coeffs, int cell, Point2 ref);

}  // namespace porofix
