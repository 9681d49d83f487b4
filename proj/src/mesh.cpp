#include "porofix/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "porofix/errors.hpp"

namespace porofix {

int Mesh::num_interior_edges() const {
  return static_cast<int>(
      std::count_if(edges_.begin(), edges_.end(), [](const Edge& e) { return !e.boundary; }));
}

Point2 Mesh::cell_extent(int cell) const {
  if (cell < 0 || cell >= num_cells()) {
    throw std::out_of_range("cell index " + std::to_string(cell) + " out of range");
  }
  return {lx_ / nx_, ly_ / ny_};
}

double Mesh::h_min() const { return std::min(lx_ / nx_, ly_ / ny_); }

double Mesh::h_max() const { return std::hypot(lx_ / nx_, ly_ / ny_); }

Mesh build_rect_mesh(int nx, int ny, double lx, double ly) {
  if (nx < 1) throw ConfigError("mesh.nx must be >= 1");
  if (ny < 1) throw ConfigError("mesh.ny must be >= 1");
  if (!(lx > 0.0)) throw ConfigError("mesh.Lx must be > 0");
  if (!(ly > 0.0)) throw ConfigError("mesh.Ly must be > 0");

  Mesh m;
  m.nx_ = nx;
  m.ny_ = ny;
  m.lx_ = lx;
  m.ly_ = ly;
  const double hx = lx / nx;
  const double hy = ly / ny;

  auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
  m.vertices_.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      // exact endpoints
      const double x = (i == nx) ? lx : i * hx;
      const double y = (j == ny) ? ly : j * hy;
      m.vertices_.push_back({x, y});
    }
  }

  m.cells_.reserve(static_cast<std::size_t>(nx * ny));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      m.cells_.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }
  }
  m.cell_edges_.assign(static_cast<std::size_t>(nx * ny), {-1, -1, -1, -1});

  // Vertical edges, column-major: x-index i in [0,nx], row j in [0,ny).
  for (int i = 0; i <= nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      Edge e;
      e.vertices = {vid(i, j), vid(i, j + 1)};
      e.length = hy;
      e.normal = {1.0, 0.0};
      e.axis = EdgeAxis::vertical;
      const int left = (i > 0) ? m.cell_index(i - 1, j) : -1;
      const int right = (i < nx) ? m.cell_index(i, j) : -1;
      if (left >= 0 && right >= 0) {
        e.cell_k = left;
        e.cell_kp = right;
      } else {
        e.cell_k = (left >= 0) ? left : right;
        e.boundary = true;
      }
      const int idx = static_cast<int>(m.edges_.size());
      if (left >= 0) m.cell_edges_[left][side_right] = idx;
      if (right >= 0) m.cell_edges_[right][side_left] = idx;
      m.edges_.push_back(e);
    }
  }
  // Horizontal edges, column-major: column i in [0,nx), y-index j in [0,ny].
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j <= ny; ++j) {
      Edge e;
      e.vertices = {vid(i, j), vid(i + 1, j)};
      e.length = hx;
      e.normal = {0.0, 1.0};
      e.axis = EdgeAxis::horizontal;
      const int below = (j > 0) ? m.cell_index(i, j - 1) : -1;
      const int above = (j < ny) ? m.cell_index(i, j) : -1;
      if (below >= 0 && above >= 0) {
        e.cell_k = below;
        e.cell_kp = above;
      } else {
        e.cell_k = (below >= 0) ? below : above;
        e.boundary = true;
      }
      const int idx = static_cast<int>(m.edges_.size());
      if (below >= 0) m.cell_edges_[below][side_top] = idx;
      if (above >= 0) m.cell_edges_[above][side_bottom] = idx;
      m.edges_.push_back(e);
    }
  }
  return m;
}

CellMap cell_map(const Mesh& mesh, int cell) {
  const Point2 ext = mesh.cell_extent(cell);
  const int i = cell % mesh.nx();
  const int j = cell / mesh.nx();
  return {{i * ext.x, j * ext.y}, ext};
}

}  // namespace porofix
