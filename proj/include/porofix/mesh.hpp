#pragma once

#include <array>
#include <vector>

namespace porofix {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

enum class EdgeAxis { vertical, horizontal };

/// Mesh edge. `normal` is fixed at construction: for interior edges it points
/// from `cell_k` (lower index) into `cell_kp`. Boundary edges keep the same
/// axis-aligned +x / +y convention and have `cell_kp == -1`.
struct Edge {
  std::array<int, 2> vertices{};
  double length = 0.0;
  Point2 normal;
  EdgeAxis axis = EdgeAxis::vertical;
  int cell_k = -1;
  int cell_kp = -1;
  bool boundary = false;
};

/// Affine reference-to-physical map of a rectangle: x = origin + (hx*xr, hy*yr).
struct CellMap {
  Point2 origin;
  Point2 scale;

  double jacobian() const { return scale.x * scale.y; }
  Point2 map(Point2 ref) const {
    return {origin.x + scale.x * ref.x, origin.y + scale.y * ref.y};
  }
};

/// Local edge slots of a rectangle.
enum CellSide : int { side_left = 0, side_right = 1, side_bottom = 2, side_top = 3 };

/// Uniform axis-aligned rectangular mesh of [0,Lx]x[0,Ly]. Immutable.
///
/// Cells are numbered row-major, cell(i,j) = j*nx + i. Vertical edges come
/// first in column-major order, then horizontal edges, also column-major.
class Mesh {
 public:
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double lx() const { return lx_; }
  double ly() const { return ly_; }

  int num_cells() const { return nx_ * ny_; }
  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_interior_edges() const;

  const std::vector<Point2>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 4>>& cells() const { return cells_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_.at(e); }

  int cell_index(int i, int j) const { return j * nx_ + i; }
  Point2 cell_extent(int cell) const;
  /// Edge indices of a cell, ordered by CellSide.
  const std::array<int, 4>& cell_edges(int cell) const { return cell_edges_.at(cell); }

  /// Smallest cell extent in either direction.
  double h_min() const;
  /// Largest cell diagonal.
  double h_max() const;

  friend Mesh build_rect_mesh(int nx, int ny, double lx, double ly);

 private:
  int nx_ = 0;
  int ny_ = 0;
  double lx_ = 0.0;
  double ly_ = 0.0;
  std::vector<Point2> vertices_;
  std::vector<std::array<int, 4>> cells_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 4>> cell_edges_;
};

/// Builds the uniform nx x ny grid. Throws ConfigError on non-positive input.
Mesh build_rect_mesh(int nx, int ny, double lx, double ly);

/// Affine map of `cell`. Throws std::out_of_range for invalid indices.
CellMap cell_map(const Mesh& mesh, int cell);

}  // namespace porofix
