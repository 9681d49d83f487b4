#include "porofix/output.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "porofix/quadrature.hpp"

namespace porofix {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  return buf;
}

std::string format_number(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw std::runtime_error("cannot create output directory " + dir.string());
  }
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out = open_for_write(path);
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  };
  line(header);
  for (const auto& r : rows) {
    if (r.size() != header.size()) throw std::logic_error("csv row width mismatch in " + path.string());
    line(r);
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_vtk(const std::filesystem::path& path, const BiotDiscretization& disc,
               const Eigen::VectorXd& p, const Eigen::VectorXd& u, const std::string& title) {
  const Mesh& mesh = disc.mesh();
  const Spaces& sp = disc.spaces();
  const int nc = mesh.num_cells();
  constexpr std::array<Point2, 4> corners{Point2{0, 0}, Point2{1, 0}, Point2{1, 1}, Point2{0, 1}};
  const QuadratureRule q = gauss_rule(sp.s + 1, 2);

  std::ofstream out = open_for_write(path);
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << 4 * nc << " double\n";
  for (int c = 0; c < nc; ++c) {
    const CellMap map = cell_map(mesh, c);
    for (const Point2& r : corners) {
      const Point2 x = map.map(r);
      out << format_number(x.x) << ' ' << format_number(x.y) << ' ' << format_number(0.0) << '\n';
    }
  }
  out << "CELLS " << nc << ' ' << 5 * nc << '\n';
  for (int c = 0; c < nc; ++c) {
    out << 4 << ' ' << 4 * c << ' ' << 4 * c + 1 << ' ' << 4 * c + 2 << ' ' << 4 * c + 3 << '\n';
  }
  out << "CELL_TYPES " << nc << '\n';
  for (int c = 0; c < nc; ++c) out << "9\n";

  out << "CELL_DATA " << nc << "\nSCALARS pressure double 1\nLOOKUP_TABLE default\n";
  for (int c = 0; c < nc; ++c) {
    double mean = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      mean += q.weights[i] * eval_pressure(sp.pressure, p, c, Point2{q.points[i][0], q.points[i][1]});
    }
    out << format_number(mean) << '\n';
  }
  out << "POINT_DATA " << 4 * nc << "\nVECTORS displacement double\n";
  for (int c = 0; c < nc; ++c) {
    for (const Point2& r : corners) {
      const Point2 v = eval_displacement(sp.displacement, mesh, u, c, r).value;
      out << format_number(v.x) << ' ' << format_number(v.y) << ' ' << format_number(0.0) << '\n';
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out = open_for_write(path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace porofix
