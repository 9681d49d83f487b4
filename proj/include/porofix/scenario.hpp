#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "porofix/params.hpp"
#include "porofix/solvers.hpp"
#include "porofix/verification.hpp"

namespace porofix {

enum class RunMode { split, monolithic, both };
enum class StudyKind { none, l_sweep, h_refine, t_refine, locking };

const char* to_string(RunMode mode);
const char* to_string(StudyKind kind);

struct ScenarioConfig {
  struct MeshSection {
    int nx = 4;
    int ny = 4;
    double lx = 1.0;
    double ly = 1.0;
  } mesh;
  int s = 0;
  int r = 0;
  PhysParams physics;
  /// Empty means SipConfig::default_delta0.
  std::optional<double> delta0;
  double beta_exp = 1.0;
  struct SplitSection {
    /// Empty means "auto", b^2 / (2 lambda).
    std::optional<double> L;
    double tol = 1e-10;
    int max_iter = 200;
    bool warm_start = true;
    bool cold_start_diagnostics = false;
  } split;
  double T = 1.0;
  int N = 2;
  std::string sources = "unit_source";
  RunMode mode = RunMode::split;
  struct StudySection {
    StudyKind kind = StudyKind::none;
    std::vector<double> l_values;
    int levels = 3;
    std::vector<double> lambda_values;
  } study;
  struct OutputSection {
    std::string directory = "out";
    bool write_vtk = true;
    bool write_csv = true;
  } output;

  double resolved_L() const;
  double resolved_delta0() const;
  SipConfig sip() const;
  SplitConfig split_config() const;
  /// Serialized form with "auto" values resolved; parse_config accepts it.
  nlohmann::json to_json() const;
};

/// Parses and validates a config. Throws ConfigError whose message names the
/// offending field, e.g. "physics.lambda must be > 0".
ScenarioConfig parse_config(const nlohmann::json& j);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Source preset names accepted in "sources".
const std::vector<std::string>& source_presets();

struct ResolvedSources {
  SourceData data;
  std::optional<ManufacturedSolution> exact;
};

/// Builds the sources of a preset on the configured domain.
ResolvedSources make_sources(const ScenarioConfig& cfg);

/// One split slab run with per-iteration records and, when a monolithic
/// solve is available, contraction diagnostics against it.
struct SlabOutcome {
  SlabRecord record;
  std::optional<SlabState> monolithic;
  std::optional<ContractionDiag> diag;
};

struct ScenarioResult {
  std::vector<SlabOutcome> slabs;
  /// Present when the config has a manufactured solution.
  std::optional<ErrorReport> errors;
};

/// Marches the configured problem in the configured mode. In mode `both`
/// every slab is solved by the split iteration and by the monolithic oracle
/// from the same history; the split result is carried forward.
ScenarioResult simulate(const ScenarioConfig& cfg);

/// `porofix run`: simulate and write manifest.json, iterations.csv,
/// traces.csv and fields_slab<n>.vtk into `out`.
void run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out);

/// `porofix study`: execute cfg.study and write its CSV plus manifest.json.
void run_study(const ScenarioConfig& cfg, const std::filesystem::path& out);

// ---------------------------------------------------------------------------
// Study kernels, usable without touching the file system.
// ---------------------------------------------------------------------------

struct SweepRow {
  double L = 0.0;
  int slab = 0;
  IterationRecord it;
  StopCause stop = StopCause::max_iter;
  bool last = false;
};

std::vector<SweepRow> l_sweep(const ScenarioConfig& cfg);

struct RateRow {
  int level = 0;
  double h = 0.0;
  double tau = 0.0;
  double err_p = 0.0;
  double err_q = 0.0;
  double err_u = 0.0;
  /// Broken H1 seminorm of the displacement error; h_refinement only.
  double err_u_h1 = 0.0;
  std::optional<double> order_p;
  std::optional<double> order_q;
  std::optional<double> order_u;
};

/// Mesh halved per level, errors at T against the manufactured solution.
std::vector<RateRow> h_refinement(const ScenarioConfig& cfg);
/// tau halved per level on the configured mesh; errors at T against a
/// reference run with four times the finest number of slabs.
std::vector<RateRow> t_refinement(const ScenarioConfig& cfg);

struct LockingRow {
  double lambda = 0.0;
  bool completed = false;
  bool converged = false;
  bool finite = false;
  int total_iterations = 0;
  int max_iterations = 0;
  double jump_indicator = 0.0;
  double p_max = 0.0;
  std::string error;
};

/// c0 = 0 runs over cfg.study.lambda_values. Solver failures are recorded
/// in the row rather than thrown.
std::vector<LockingRow> locking_study(const ScenarioConfig& cfg);

}  // namespace porofix
