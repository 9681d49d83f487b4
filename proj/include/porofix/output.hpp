#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "porofix/solvers.hpp"

namespace porofix {

/// Scientific notation with 17 significant digits; "nan"/"inf" spelled out.
std::string format_number(double v);
/// Empty string for an absent value.
std::string format_number(const std::optional<double>& v);

/// Column names are written verbatim; each row must match their count.
/// Throws std::runtime_error if the file cannot be written.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

inline const std::vector<std::string> kIterationHeader{"slab", "iter",  "dp_norm", "du_norm",
                                                       "ratio", "Sp_norm", "stop"};
inline const std::vector<std::string> kRatesHeader{"level",    "h",        "tau",
                                                   "err_p_L2", "err_q_L2", "err_u_L2",
                                                   "order_p",  "order_q",  "order_u"};
inline const std::vector<std::string> kTracesHeader{"slab", "iter", "ep_trace", "eq_trace", "eu_trace"};

/// Legacy ASCII VTK unstructured grid. Each cell gets its own four corner
/// points so the broken displacement keeps its jumps; CELL_DATA "pressure"
/// holds the cell mean of p, POINT_DATA "displacement" the corner values of u.
void write_vtk(const std::filesystem::path& path, const BiotDiscretization& disc,
               const Eigen::VectorXd& p, const Eigen::VectorXd& u, const std::string& title);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// Creates `dir` (and parents). Throws std::runtime_error when impossible.
void ensure_directory(const std::filesystem::path& dir);

}  // namespace porofix
