#include "porofix/params.hpp"

#include <cmath>

#include "porofix/errors.hpp"

namespace porofix {

void PhysParams::validate() const {
  if (!(mu > 0.0)) throw ConfigError("physics.mu must be > 0");
  if (!(lambda > 0.0)) throw ConfigError("physics.lambda must be > 0");
  if (!(b > 0.0)) throw ConfigError("physics.b must be > 0");
  if (!(c0 >= 0.0)) throw ConfigError("physics.c0 must be >= 0");
  if (!(rho_b > 0.0)) throw ConfigError("physics.rho_b must be > 0");
  if (!K.allFinite() || std::abs(K(0, 1) - K(1, 0)) > 1e-14 * K.cwiseAbs().maxCoeff()) {
    throw ConfigError("physics.K must be symmetric");
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(K);
  if (!(eig.eigenvalues().minCoeff() > 0.0)) throw ConfigError("physics.K must be positive definite");
}

void SourceData::check_homogeneous_start(const Mesh& mesh) const {
  if (p0) throw ConfigError("sources: nonzero initial pressure given but homogeneous start required");
  if (u0) throw ConfigError("sources: nonzero initial displacement given but homogeneous start required");
  constexpr int samples = 7;
  for (int j = 0; j <= samples; ++j) {
    for (int i = 0; i <= samples; ++i) {
      const Point2 x{mesh.lx() * i / samples, mesh.ly() * j / samples};
      const Point2 g0 = g(x, 0.0);
      if (g0.x != 0.0 || g0.y != 0.0) throw ConfigError("sources: g(x, 0) must vanish");
    }
  }
}

double SipConfig::default_delta0(const PhysParams& params, int s) {
  return 10.0 * (2.0 * params.mu + params.lambda) * (s + 2.0) * (s + 2.0);
}

void SipConfig::validate() const {
  if (!(delta0 > 0.0)) throw ConfigError("sip.delta0 must be > 0");
  if (!(beta_exp > 0.0)) throw ConfigError("sip.beta_exp must be > 0");
}

}  // namespace porofix
