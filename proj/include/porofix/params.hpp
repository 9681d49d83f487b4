#pragma once

#include <functional>
#include <optional>

#include <Eigen/Dense>

#include "porofix/mesh.hpp"

namespace porofix {

/// Material data of the Biot system. Units: moduli in Pa, c0 = 1/M in 1/Pa,
/// K in m^2/(Pa s), rho_b in kg/m^3.
struct PhysParams {
  double mu = 1.0;
  double lambda = 1.0;
  double b = 1.0;
  double c0 = 1.0;
  Eigen::Matrix2d K = Eigen::Matrix2d::Identity();
  double rho_b = 1.0;

  /// Throws ConfigError naming the offending "physics.*" field.
  void validate() const;
  /// Fixed-stress threshold b^2 / (2 lambda).
  double auto_stabilization() const { return b * b / (2.0 * lambda); }
};

using ScalarField = std::function<double(Point2, double)>;
using VectorField = std::function<Point2(Point2, double)>;

/// Volumetric source f(x,t), body force g(x,t) and optional initial data.
/// Unset initial data means zero.
struct SourceData {
  ScalarField f = [](Point2, double) { return 0.0; };
  VectorField g = [](Point2, double) { return Point2{}; };
  std::optional<std::function<double(Point2)>> p0;
  std::optional<std::function<Point2(Point2)>> u0;

  /// Checks zero initial data and g(., 0) = 0 on a sample grid of the domain.
  /// Throws ConfigError when violated.
  void check_homogeneous_start(const Mesh& mesh) const;
};

/// Symmetric interior penalty settings; delta_e = delta0 on every edge and
/// the penalty scales as delta_e / |e|^beta_exp.
struct SipConfig {
  double delta0 = 0.0;
  double beta_exp = 1.0;

  /// 10 (2 mu + lambda) (s + 2)^2.
  static double default_delta0(const PhysParams& params, int s);
  void validate() const;
};

}  // namespace porofix
