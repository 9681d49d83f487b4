#pragma once

// Implicit-Euler reference for the pure flow problem on a uniform rectangle
// with lowest-order Raviart-Thomas fluxes, built from scratch on dense
// matrices. Cells are row-major; edge numbering is private to this file.

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

struct FlowOracle {
  int nx, ny;
  double lx, ly, c0, kxx, kyy;

  int num_cells() const { return nx * ny; }
  int num_vertical() const { return (nx + 1) * ny; }
  int num_edges() const { return num_vertical() + nx * (ny + 1); }
  int vertical(int i, int j) const { return j * (nx + 1) + i; }
  int horizontal(int i, int j) const { return num_vertical() + j * nx + i; }

  // q = sum_e Q_e phi_e with int_e phi_e . (+axis) ds = 1
  Eigen::MatrixXd flux_mass() const {
    const double hx = lx / nx, hy = ly / ny;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(num_edges(), num_edges());
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const std::array<int, 2> v{vertical(i, j), vertical(i + 1, j)};
        const std::array<int, 2> h{horizontal(i, j), horizontal(i, j + 1)};
        const double ax = hx / hy / kxx, ay = hy / hx / kyy;
        for (int a = 0; a < 2; ++a) {
          for (int b = 0; b < 2; ++b) {
            m(v[a], v[b]) += ax * (a == b ? 1.0 / 3.0 : 1.0 / 6.0);
            m(h[a], h[b]) += ay * (a == b ? 1.0 / 3.0 : 1.0 / 6.0);
          }
        }
      }
    }
    return m;
  }

  // D(K, e) = int_K div phi_e
  Eigen::MatrixXd divergence() const {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(num_cells(), num_edges());
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const int c = j * nx + i;
        d(c, vertical(i, j)) = -1.0;
        d(c, vertical(i + 1, j)) = 1.0;
        d(c, horizontal(i, j)) = -1.0;
        d(c, horizontal(i, j + 1)) = 1.0;
      }
    }
    return d;
  }

  // int_K f(., t) by a 3x3 Gauss rule
  Eigen::VectorXd load(const std::function<double(double, double, double)>& f, double t) const {
    const double hx = lx / nx, hy = ly / ny;
    const double g = std::sqrt(0.6);
    const std::array<double, 3> pts{-g, 0.0, g}, wts{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    Eigen::VectorXd v(num_cells());
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        double s = 0.0;
        for (int a = 0; a < 3; ++a) {
          for (int b = 0; b < 3; ++b) {
            const double x = hx * (i + 0.5 + 0.5 * pts[a]);
            const double y = hy * (j + 0.5 + 0.5 * pts[b]);
            s += wts[a] * wts[b] * f(x, y, t);
          }
        }
        v[j * nx + i] = 0.25 * hx * hy * s;
      }
    }
    return v;
  }

  struct Step {
    Eigen::VectorXd p;  // cell values
    double q_norm;      // sqrt(Q^T Mq Q)
  };

  // c0 |K| (P - P_prev) + tau D Q = tau F(t_mid),  Mq Q - D^T P = 0
  std::vector<Step> march(const std::function<double(double, double, double)>& f, double t_end, int n) const {
    const int nc = num_cells(), ne = num_edges();
    const double area = (lx / nx) * (ly / ny), tau = t_end / n;
    const Eigen::MatrixXd mq = flux_mass(), d = divergence();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nc + ne, nc + ne);
    a.topLeftCorner(nc, nc) = c0 * area * Eigen::MatrixXd::Identity(nc, nc);
    a.topRightCorner(nc, ne) = tau * d;
    a.bottomLeftCorner(ne, nc) = -d.transpose();
    a.bottomRightCorner(ne, ne) = mq;
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    std::vector<Step> out;
    Eigen::VectorXd p = Eigen::VectorXd::Zero(nc);
    for (int k = 0; k < n; ++k) {
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nc + ne);
      rhs.head(nc) = tau * load(f, (k + 0.5) * tau) + c0 * area * p;
      const Eigen::VectorXd x = lu.solve(rhs);
      p = x.head(nc);
      const Eigen::VectorXd q = x.tail(ne);
      out.push_back({p, std::sqrt(q.dot(mq * q))});
    }
    return out;
  }
};

}  // namespace oracle
