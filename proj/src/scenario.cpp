#include "porofix/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "porofix/errors.hpp"
#include "porofix/output.hpp"

namespace porofix {

using nlohmann::json;

const char* to_string(RunMode mode) {
  switch (mode) {
    case RunMode::split: return "split";
    case RunMode::monolithic: return "monolithic";
    case RunMode::both: return "both";
  }
  return "?";
}

const char* to_string(StudyKind kind) {
  switch (kind) {
    case StudyKind::none: return "none";
    case StudyKind::l_sweep: return "l_sweep";
    case StudyKind::h_refine: return "h_refine";
    case StudyKind::t_refine: return "t_refine";
    case StudyKind::locking: return "locking";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace {

/// Typed access to one JSON object; rejects keys that were never read.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError((path_.empty() ? "config" : path_) + " must be an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* get(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = get(key)) {
      if (!v->is_number()) throw ConfigError(field(key) + " must be a number");
      out = v->get<double>();
      if (!std::isfinite(out)) throw ConfigError(field(key) + " must be finite");
    }
  }

  void integer(const std::string& key, int& out) {
    if (const json* v = get(key)) {
      if (!v->is_number_integer()) throw ConfigError(field(key) + " must be an integer");
      out = v->get<int>();
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* v = get(key)) {
      if (!v->is_boolean()) throw ConfigError(field(key) + " must be true or false");
      out = v->get<bool>();
    }
  }

  void text(const std::string& key, std::string& out) {
    if (const json* v = get(key)) {
      if (!v->is_string()) throw ConfigError(field(key) + " must be a string");
      out = v->get<std::string>();
    }
  }

  /// Number or the string "auto" (empty optional).
  void number_or_auto(const std::string& key, std::optional<double>& out) {
    if (const json* v = get(key)) {
      if (v->is_string() && v->get<std::string>() == "auto") {
        out.reset();
      } else if (v->is_number()) {
        out = v->get<double>();
      } else {
        throw ConfigError(field(key) + " must be a number or \"auto\"");
      }
    }
  }

  void numbers(const std::string& key, std::vector<double>& out) {
    if (const json* v = get(key)) {
      if (!v->is_array()) throw ConfigError(field(key) + " must be an array of numbers");
      out.clear();
      for (const json& e : *v) {
        if (!e.is_number()) throw ConfigError(field(key) + " must be an array of numbers");
        out.push_back(e.get<double>());
      }
    }
  }

  std::optional<Section> child(const std::string& key) {
    if (const json* v = get(key)) return Section(*v, field(key));
    return std::nullopt;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(field(it.key()) + ": unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

const std::vector<std::string> kMmsIds{"zero", "pressure_only", "coupled", "coupled_transient"};

void validate(const ScenarioConfig& c) {
  if (c.mesh.nx < 1) throw ConfigError("mesh.nx must be >= 1");
  if (c.mesh.ny < 1) throw ConfigError("mesh.ny must be >= 1");
  if (!(c.mesh.lx > 0.0)) throw ConfigError("mesh.Lx must be > 0");
  if (!(c.mesh.ly > 0.0)) throw ConfigError("mesh.Ly must be > 0");
  if (c.s < 0 || c.s > 1) throw ConfigError("orders.s must be 0 or 1");
  if (c.r < 0 || c.r > 1) throw ConfigError("orders.r must be 0 or 1");
  c.physics.validate();
  if (c.delta0 && !(*c.delta0 > 0.0)) throw ConfigError("sip.delta0 must be > 0");
  if (!(c.beta_exp > 0.0)) throw ConfigError("sip.beta_exp must be > 0");
  if (c.split.L && !(*c.split.L >= 0.0)) throw ConfigError("split.L must be >= 0");
  if (!(c.split.tol > 0.0)) throw ConfigError("split.tol must be > 0");
  if (c.split.max_iter < 1) throw ConfigError("split.max_iter must be >= 1");
  if (!(c.T > 0.0)) throw ConfigError("time.T must be > 0");
  if (c.N < 1) throw ConfigError("time.N must be >= 1");
  const auto& presets = source_presets();
  if (std::find(presets.begin(), presets.end(), c.sources) == presets.end()) {
    throw ConfigError("sources: unknown preset '" + c.sources + "'");
  }
  switch (c.study.kind) {
    case StudyKind::l_sweep:
      if (c.study.l_values.empty()) throw ConfigError("study.values must not be empty");
      for (double v : c.study.l_values) {
        if (!(v >= 0.0)) throw ConfigError("study.values entries must be >= 0");
      }
      break;
    case StudyKind::h_refine:
    case StudyKind::t_refine:
      if (c.study.levels < 2) throw ConfigError("study.levels must be >= 2");
      if (c.sources.rfind("mms:", 0) != 0 && c.study.kind == StudyKind::h_refine) {
        throw ConfigError("sources: h_refine needs a manufactured solution (mms:<id>)");
      }
      break;
    case StudyKind::locking:
      if (c.study.lambda_values.empty()) throw ConfigError("study.lambda_values must not be empty");
      for (double v : c.study.lambda_values) {
        if (!(v > 0.0)) throw ConfigError("study.lambda_values entries must be > 0");
      }
      break;
    case StudyKind::none: break;
  }
}

}  // namespace

const std::vector<std::string>& source_presets() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v{"zero", "unit_source", "discontinuous_load"};
    for (const auto& id : kMmsIds) v.push_back("mms:" + id);
    return v;
  }();
  return names;
}

ScenarioConfig parse_config(const json& j) {
  ScenarioConfig c;
  Section root(j, "");
  if (auto m = root.child("mesh")) {
    m->integer("nx", c.mesh.nx);
    m->integer("ny", c.mesh.ny);
    m->number("Lx", c.mesh.lx);
    m->number("Ly", c.mesh.ly);
    m->finish();
  }
  if (auto o = root.child("orders")) {
    o->integer("s", c.s);
    o->integer("r", c.r);
    o->finish();
  }
  if (auto p = root.child("physics")) {
    p->number("mu", c.physics.mu);
    p->number("lambda", c.physics.lambda);
    p->number("b", c.physics.b);
    p->number("c0", c.physics.c0);
    p->number("rho_b", c.physics.rho_b);
    if (const json* k = p->get("K")) {
      const std::string f = p->field("K");
      if (!k->is_array() || k->size() != 2) throw ConfigError(f + " must be a 2x2 array");
      for (int a = 0; a < 2; ++a) {
        const json& row = (*k)[static_cast<std::size_t>(a)];
        if (!row.is_array() || row.size() != 2) throw ConfigError(f + " must be a 2x2 array");
        for (int b = 0; b < 2; ++b) {
          const json& e = row[static_cast<std::size_t>(b)];
          if (!e.is_number()) throw ConfigError(f + " entries must be numbers");
          c.physics.K(a, b) = e.get<double>();
        }
      }
    }
    p->finish();
  }
  if (auto s = root.child("sip")) {
    s->number_or_auto("delta0", c.delta0);
    s->number("beta_exp", c.beta_exp);
    s->finish();
  }
  if (auto s = root.child("split")) {
    s->number_or_auto("L", c.split.L);
    s->number("tol", c.split.tol);
    s->integer("max_iter", c.split.max_iter);
    s->boolean("warm_start", c.split.warm_start);
    s->boolean("cold_start_diagnostics", c.split.cold_start_diagnostics);
    s->finish();
  }
  if (auto t = root.child("time")) {
    t->number("T", c.T);
    t->integer("N", c.N);
    t->finish();
  }
  if (const json* src = root.get("sources")) {
    if (src->is_string()) {
      c.sources = src->get<std::string>();
    } else if (src->is_object()) {
      Section s(*src, "sources");
      std::string preset, mms;
      s.text("preset", preset);
      s.text("mms", mms);
      s.finish();
      if (preset.empty() == mms.empty()) throw ConfigError("sources must give exactly one of preset, mms");
      c.sources = preset.empty() ? "mms:" + mms : preset;
    } else {
      throw ConfigError("sources must be a preset name or an object");
    }
  }
  std::string mode = to_string(c.mode);
  root.text("mode", mode);
  if (mode == "split") {
    c.mode = RunMode::split;
  } else if (mode == "monolithic") {
    c.mode = RunMode::monolithic;
  } else if (mode == "both") {
    c.mode = RunMode::both;
  } else {
    throw ConfigError("mode must be split, monolithic or both");
  }
  if (auto st = root.child("study")) {
    std::string kind = "none";
    st->text("kind", kind);
    if (kind == "none") {
      c.study.kind = StudyKind::none;
    } else if (kind == "l_sweep") {
      c.study.kind = StudyKind::l_sweep;
      st->numbers("values", c.study.l_values);
    } else if (kind == "h_refine" || kind == "t_refine") {
      c.study.kind = kind == "h_refine" ? StudyKind::h_refine : StudyKind::t_refine;
      st->integer("levels", c.study.levels);
    } else if (kind == "locking") {
      c.study.kind = StudyKind::locking;
      st->numbers("lambda_values", c.study.lambda_values);
    } else {
      throw ConfigError("study.kind must be none, l_sweep, h_refine, t_refine or locking");
    }
    st->finish();
  }
  if (auto o = root.child("output")) {
    o->text("directory", c.output.directory);
    o->boolean("write_vtk", c.output.write_vtk);
    o->boolean("write_csv", c.output.write_csv);
    o->finish();
  }
  root.finish();
  validate(c);
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

double ScenarioConfig::resolved_L() const { return split.L ? *split.L : physics.auto_stabilization(); }

double ScenarioConfig::resolved_delta0() const {
  return delta0 ? *delta0 : SipConfig::default_delta0(physics, s);
}

SipConfig ScenarioConfig::sip() const { return SipConfig{resolved_delta0(), beta_exp}; }

SplitConfig ScenarioConfig::split_config() const {
  SplitConfig sc;
  sc.L = resolved_L();
  sc.tol = split.tol;
  sc.max_iter = split.max_iter;
  sc.warm_start = split.warm_start && !split.cold_start_diagnostics;
  return sc;
}

json ScenarioConfig::to_json() const {
  json j;
  j["mesh"] = {{"nx", mesh.nx}, {"ny", mesh.ny}, {"Lx", mesh.lx}, {"Ly", mesh.ly}};
  j["orders"] = {{"s", s}, {"r", r}};
  j["physics"] = {{"mu", physics.mu},
                  {"lambda", physics.lambda},
                  {"b", physics.b},
                  {"c0", physics.c0},
                  {"K", {{physics.K(0, 0), physics.K(0, 1)}, {physics.K(1, 0), physics.K(1, 1)}}},
                  {"rho_b", physics.rho_b}};
  j["sip"] = {{"delta0", resolved_delta0()}, {"beta_exp", beta_exp}};
  j["split"] = {{"L", resolved_L()},
                {"tol", split.tol},
                {"max_iter", split.max_iter},
                {"warm_start", split.warm_start},
                {"cold_start_diagnostics", split.cold_start_diagnostics}};
  j["time"] = {{"T", T}, {"N", N}};
  j["sources"] = sources;
  j["mode"] = to_string(mode);
  json st = {{"kind", to_string(study.kind)}};
  if (study.kind == StudyKind::l_sweep) st["values"] = study.l_values;
  if (study.kind == StudyKind::h_refine || study.kind == StudyKind::t_refine) st["levels"] = study.levels;
  if (study.kind == StudyKind::locking) st["lambda_values"] = study.lambda_values;
  j["study"] = st;
  j["output"] = {{"directory", output.directory}, {"write_vtk", output.write_vtk}, {"write_csv", output.write_csv}};
  return j;
}

// ---------------------------------------------------------------------------
// Sources
// ---------------------------------------------------------------------------

ResolvedSources make_sources(const ScenarioConfig& cfg) {
  ResolvedSources out;
  const std::string& name = cfg.sources;
  if (name == "zero") {
    // defaults of SourceData
  } else if (name == "unit_source") {
    out.data.f = [](Point2, double) { return 1.0; };
  } else if (name == "discontinuous_load") {
    const double half = 0.5 * cfg.mesh.lx;
    out.data.g = [half](Point2 x, double t) { return x.x < half ? Point2{0.0, -t} : Point2{}; };
  } else if (name.rfind("mms:", 0) == 0) {
    const std::string id = name.substr(4);
    const double lx = cfg.mesh.lx;
    const double ly = cfg.mesh.ly;
    if (id == "zero") {
      out.exact = mms_zero();
    } else if (id == "pressure_only") {
      out.exact = mms_pressure_only(lx, ly);
    } else if (id == "coupled") {
      out.exact = mms_coupled(lx, ly);
    } else if (id == "coupled_transient") {
      out.exact = mms_coupled_transient(lx, ly);
    } else {
      throw ConfigError("sources: unknown manufactured solution '" + id + "'");
    }
    out.data = mms_forcing(*out.exact, cfg.physics);
  } else {
    throw ConfigError("sources: unknown preset '" + name + "'");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

namespace {

Mesh config_mesh(const ScenarioConfig& cfg) {
  return build_rect_mesh(cfg.mesh.nx, cfg.mesh.ny, cfg.mesh.lx, cfg.mesh.ly);
}

ScenarioResult simulate_on(const BiotDiscretization& disc, const ResolvedSources& src, const TimePartition& partition, RunMode mode,
                           const SplitConfig& split) {
  ScenarioResult result;
  std::optional<SlabHistory> history;
  for (int n = 1; n <= partition.num_slabs(); ++n) {
    try {
      const SlabProblem slab = make_slab_problem(disc, src.data, partition, n, history);
      SlabOutcome oc;
      oc.record.n = n;
      oc.record.t_start = slab.t_start;
      oc.record.t_end = partition.t_end(n);
      if (mode != RunMode::monolithic) {
        std::vector<SlabState> iterates;
        std::optional<SlabState> initial;
        if (split.warm_start) initial = SlabState::constant(slab.history, disc.spaces(), disc.num_nodes());
        IterateObserver obs;
        if (mode == RunMode::both) obs = [&iterates](int, const SlabState& s) { iterates.push_back(s); };
        SlabResult res = fixed_stress_slab(disc, slab, split, initial, obs);
        oc.record.state = std::move(res.state);
        oc.record.report = std::move(res.report);
        if (mode == RunMode::both) {
          oc.monolithic = solve_monolithic_slab(disc, slab);
          oc.diag = contraction_diagnostics(disc, iterates, *oc.monolithic);
        }
      } else {
        oc.record.state = solve_monolithic_slab(disc, slab);
      }
      oc.record.p_end = eval_polynomial(disc.basis(), oc.record.state.P, 1.0);
      oc.record.q_end = eval_polynomial(disc.basis(), oc.record.state.Q, 1.0);
      oc.record.u_end = eval_polynomial(disc.basis(), oc.record.state.U, 1.0);
      history = SlabHistory{oc.record.p_end, oc.record.u_end};
      result.slabs.push_back(std::move(oc));
    } catch (const SolverError& e) {
      throw SolverError("slab " + std::to_string(n) + ": " + e.what());
    }
  }
  if (src.exact) {
    Trajectory traj;
    for (const auto& s : result.slabs) traj.slabs.push_back(s.record);
    result.errors = error_norms(disc, traj, *src.exact, partition);
  }
  return result;
}

void check_sources(const ScenarioConfig& cfg, const ResolvedSources& src, const Mesh& mesh) {
  if (src.exact) check_mms_compatible(*src.exact, mesh, cfg.T);
  src.data.check_homogeneous_start(mesh);
}

bool all_finite(const std::vector<Eigen::VectorXd>& vs) {
  return std::all_of(vs.begin(), vs.end(), [](const Eigen::VectorXd& v) { return v.allFinite(); });
}

}  // namespace

ScenarioResult simulate(const ScenarioConfig& cfg) {
  const Mesh mesh = config_mesh(cfg);
  const ResolvedSources src = make_sources(cfg);
  check_sources(cfg, src, mesh);
  const BiotDiscretization disc(mesh, cfg.s, cfg.r, cfg.physics, cfg.sip());
  return simulate_on(disc, src, TimePartition::uniform(cfg.T, cfg.N), cfg.mode, cfg.split_config());
}

namespace {

std::vector<std::string> iteration_row(int slab, const IterationRecord& it, const std::optional<double>& sp,
                                       const std::string& stop) {
  return {std::to_string(slab), std::to_string(it.k), format_number(it.dp_norm), format_number(it.du_norm),
          format_number(it.ratio), format_number(sp), stop};
}

std::string non_convergence(const ScenarioResult& res) {
  for (const auto& s : res.slabs) {
    if (s.record.report && s.record.report->stop != StopCause::converged) {
      const auto& its = s.record.report->iterations;
      return "slab " + std::to_string(s.record.n) + ": split iteration stopped at max_iter after " +
             std::to_string(its.size()) + " iterations (last increment " +
             format_number(its.empty() ? 0.0 : its.back().relative_dp) + ")";
    }
  }
  return {};
}

}  // namespace

void run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out) {
  const Mesh mesh = config_mesh(cfg);
  const ResolvedSources src = make_sources(cfg);
  check_sources(cfg, src, mesh);
  const BiotDiscretization disc(mesh, cfg.s, cfg.r, cfg.physics, cfg.sip());
  const ScenarioResult res =
      simulate_on(disc, src, TimePartition::uniform(cfg.T, cfg.N), cfg.mode, cfg.split_config());

  ensure_directory(out);
  json artifacts = json::array();
  if (cfg.output.write_csv && cfg.mode != RunMode::monolithic) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::vector<std::string>> trace_rows;
    for (const auto& s : res.slabs) {
      const auto& its = s.record.report->iterations;
      for (std::size_t i = 0; i < its.size(); ++i) {
        std::optional<double> sp;
        if (s.diag) sp = s.diag->max_S_p_norm(its[i].k);
        const bool last = i + 1 == its.size();
        rows.push_back(iteration_row(s.record.n, its[i], sp, last ? to_string(s.record.report->stop) : ""));
        if (s.diag) {
          trace_rows.push_back({std::to_string(s.record.n), std::to_string(its[i].k),
                                format_number(s.diag->ep_trace[i]), format_number(s.diag->eq_trace[i]),
                                format_number(s.diag->eu_trace[i])});
        }
      }
    }
    write_csv(out / "iterations.csv", kIterationHeader, rows);
    artifacts.push_back("iterations.csv");
    if (cfg.mode == RunMode::both) {
      write_csv(out / "traces.csv", kTracesHeader, trace_rows);
      artifacts.push_back("traces.csv");
    }
  }
  if (cfg.output.write_vtk) {
    for (const auto& s : res.slabs) {
      const std::string name = "fields_slab" + std::to_string(s.record.n) + ".vtk";
      write_vtk(out / name, disc, s.record.p_end, s.record.u_end,
                "porofix slab " + std::to_string(s.record.n) + " t=" + format_number(s.record.t_end));
      artifacts.push_back(name);
    }
  }

  json manifest;
  manifest["command"] = "run";
  manifest["config"] = cfg.to_json();
  manifest["resolved"] = {{"L", cfg.resolved_L()}, {"delta0", cfg.resolved_delta0()}};
  manifest["dofs"] = {{"pressure", disc.spaces().pressure.num_dofs()},
                      {"flux", disc.spaces().flux.num_dofs()},
                      {"displacement", disc.spaces().displacement.num_free_dofs()}};
  json slabs = json::array();
  for (const auto& s : res.slabs) {
    json js = {{"n", s.record.n}, {"t_end", s.record.t_end}};
    js["finite"] = all_finite(s.record.state.P) && all_finite(s.record.state.Q) && all_finite(s.record.state.U);
    if (s.record.report) {
      js["iterations"] = s.record.report->num_iterations();
      js["stop"] = to_string(s.record.report->stop);
    }
    if (s.monolithic) {
      const Eigen::VectorXd mp = eval_polynomial(disc.basis(), s.monolithic->P, 1.0);
      js["split_monolithic_gap_p"] = disc.pressure_norm(s.record.p_end - mp);
    }
    js["pressure_jump_indicator"] = pressure_jump_indicator(disc, s.record.p_end);
    slabs.push_back(js);
  }
  manifest["slabs"] = slabs;
  if (res.errors) {
    manifest["errors"] = {{"p_L2_T", res.errors->p_L2_T}, {"q_L2_T", res.errors->q_L2_T},
                          {"u_L2_T", res.errors->u_L2_T}, {"u_H1_T", res.errors->u_H1_T},
                          {"p_L2L2", res.errors->p_L2L2}, {"q_L2L2", res.errors->q_L2L2},
                          {"u_L2L2", res.errors->u_L2L2}};
  }
  artifacts.push_back("manifest.json");
  manifest["artifacts"] = artifacts;
  write_json(out / "manifest.json", manifest);

  const std::string failure = non_convergence(res);
  if (!failure.empty()) throw SolverError(failure);
}

// ---------------------------------------------------------------------------
// Studies
// ---------------------------------------------------------------------------

std::vector<SweepRow> l_sweep(const ScenarioConfig& cfg) {
  const Mesh mesh = config_mesh(cfg);
  const ResolvedSources src = make_sources(cfg);
  check_sources(cfg, src, mesh);
  const BiotDiscretization disc(mesh, cfg.s, cfg.r, cfg.physics, cfg.sip());
  const TimePartition partition = TimePartition::uniform(cfg.T, cfg.N);
  std::vector<SweepRow> rows;
  for (double L : cfg.study.l_values) {
    SplitConfig sc = cfg.split_config();
    sc.L = L;
    const ScenarioResult res = simulate_on(disc, src, partition, RunMode::split, sc);
    for (const auto& s : res.slabs) {
      const auto& its = s.record.report->iterations;
      for (std::size_t i = 0; i < its.size(); ++i) {
        rows.push_back({L, s.record.n, its[i], s.record.report->stop, i + 1 == its.size()});
      }
    }
  }
  return rows;
}

namespace {

void fill_orders(std::vector<RateRow>& rows, bool by_h) {
  if (rows.size() < 2) return;
  std::vector<double> ep, eq, eu, sz;
  for (const auto& r : rows) {
    ep.push_back(r.err_p);
    eq.push_back(r.err_q);
    eu.push_back(r.err_u);
    sz.push_back(by_h ? r.h : r.tau);
  }
  const auto op = observed_order(ep, sz);
  const auto oq = observed_order(eq, sz);
  const auto ou = observed_order(eu, sz);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    rows[i].order_p = op[i - 1];
    rows[i].order_q = oq[i - 1];
    rows[i].order_u = ou[i - 1];
  }
}

SplitConfig study_split(const ScenarioConfig& cfg) { return cfg.split_config(); }

}  // namespace

std::vector<RateRow> h_refinement(const ScenarioConfig& cfg) {
  const ResolvedSources src = make_sources(cfg);
  if (!src.exact) throw ConfigError("sources: h_refine needs a manufactured solution (mms:<id>)");
  const TimePartition partition = TimePartition::uniform(cfg.T, cfg.N);
  std::vector<RateRow> rows;
  for (int l = 0; l < cfg.study.levels; ++l) {
    const Mesh mesh = build_rect_mesh(cfg.mesh.nx << l, cfg.mesh.ny << l, cfg.mesh.lx, cfg.mesh.ly);
    check_sources(cfg, src, mesh);
    const BiotDiscretization disc(mesh, cfg.s, cfg.r, cfg.physics, cfg.sip());
    const RunMode mode = cfg.mode == RunMode::monolithic ? RunMode::monolithic : RunMode::split;
    const ScenarioResult res = simulate_on(disc, src, partition, mode, study_split(cfg));
    RateRow row;
    row.level = l;
    row.h = mesh.h_max();
    row.tau = partition.tau_max();
    row.err_p = res.errors->p_L2_T;
    row.err_q = res.errors->q_L2_T;
    row.err_u = res.errors->u_L2_T;
    row.err_u_h1 = res.errors->u_H1_T;
    rows.push_back(row);
  }
  fill_orders(rows, true);
  return rows;
}

std::vector<RateRow> t_refinement(const ScenarioConfig& cfg) {
  const Mesh mesh = config_mesh(cfg);
  const ResolvedSources src = make_sources(cfg);
  check_sources(cfg, src, mesh);
  const BiotDiscretization disc(mesh, cfg.s, cfg.r, cfg.physics, cfg.sip());
  const RunMode mode = cfg.mode == RunMode::monolithic ? RunMode::monolithic : RunMode::split;
  const int finest = cfg.N << (cfg.study.levels - 1);
  const TimePartition ref_partition = TimePartition::uniform(cfg.T, 4 * finest);
  const ScenarioResult ref = simulate_on(disc, src, ref_partition, mode, study_split(cfg));
  const SlabRecord& rl = ref.slabs.back().record;
  std::vector<RateRow> rows;
  for (int l = 0; l < cfg.study.levels; ++l) {
    const TimePartition partition = TimePartition::uniform(cfg.T, cfg.N << l);
    const ScenarioResult res = simulate_on(disc, src, partition, mode, study_split(cfg));
    const SlabRecord& last = res.slabs.back().record;
    RateRow row;
    row.level = l;
    row.h = mesh.h_max();
    row.tau = partition.tau_max();
    row.err_p = disc.pressure_norm(last.p_end - rl.p_end);
    row.err_q = disc.flux_norm(last.q_end - rl.q_end);
    row.err_u = disc.displacement_norm(last.u_end - rl.u_end);
    rows.push_back(row);
  }
  fill_orders(rows, false);
  return rows;
}

std::vector<LockingRow> locking_study(const ScenarioConfig& cfg) {
  const Mesh mesh = config_mesh(cfg);
  const ResolvedSources src = make_sources(cfg);
  check_sources(cfg, src, mesh);
  std::vector<LockingRow> rows;
  for (double lambda : cfg.study.lambda_values) {
    ScenarioConfig c = cfg;
    c.physics.lambda = lambda;
    c.physics.c0 = 0.0;
    LockingRow row;
    row.lambda = lambda;
    try {
      const BiotDiscretization disc(mesh, c.s, c.r, c.physics, c.sip());
      const ScenarioResult res =
          simulate_on(disc, src, TimePartition::uniform(c.T, c.N), RunMode::split, c.split_config());
      row.completed = true;
      row.converged = true;
      row.finite = true;
      for (const auto& s : res.slabs) {
        const IterationReport& rep = *s.record.report;
        row.converged = row.converged && rep.stop == StopCause::converged;
        row.finite = row.finite && all_finite(s.record.state.P) && all_finite(s.record.state.Q) &&
                     all_finite(s.record.state.U);
        row.total_iterations += rep.num_iterations();
        row.max_iterations = std::max(row.max_iterations, rep.num_iterations());
      }
      const SlabRecord& last = res.slabs.back().record;
      row.jump_indicator = pressure_jump_indicator(disc, last.p_end);
      row.p_max = last.p_end.size() ? last.p_end.cwiseAbs().maxCoeff() : 0.0;
    } catch (const SolverError& e) {
      row.error = e.what();
    }
    rows.push_back(row);
  }
  return rows;
}

void run_study(const ScenarioConfig& cfg, const std::filesystem::path& out) {
  if (cfg.study.kind == StudyKind::none) throw ConfigError("study.kind is none; nothing to run");
  ensure_directory(out);
  json manifest;
  manifest["command"] = "study";
  manifest["config"] = cfg.to_json();
  manifest["resolved"] = {{"L", cfg.resolved_L()}, {"delta0", cfg.resolved_delta0()}};
  json artifacts = json::array();
  std::string failure;

  switch (cfg.study.kind) {
    case StudyKind::l_sweep: {
      const auto sweep = l_sweep(cfg);
      std::vector<std::vector<std::string>> rows;
      for (const auto& r : sweep) {
        std::vector<std::string> row{format_number(r.L)};
        const auto rest = iteration_row(r.slab, r.it, std::nullopt, r.last ? to_string(r.stop) : "");
        row.insert(row.end(), rest.begin(), rest.end());
        rows.push_back(std::move(row));
        if (r.last && r.stop != StopCause::converged && failure.empty()) {
          failure = "L=" + format_number(r.L) + " slab " + std::to_string(r.slab) +
                    ": split iteration stopped at max_iter";
        }
      }
      std::vector<std::string> header{"L"};
      header.insert(header.end(), kIterationHeader.begin(), kIterationHeader.end());
      write_csv(out / "lsweep.csv", header, rows);
      artifacts.push_back("lsweep.csv");
      break;
    }
    case StudyKind::h_refine:
    case StudyKind::t_refine: {
      const auto rates = cfg.study.kind == StudyKind::h_refine ? h_refinement(cfg) : t_refinement(cfg);
      std::vector<std::vector<std::string>> rows;
      for (const auto& r : rates) {
        rows.push_back({std::to_string(r.level), format_number(r.h), format_number(r.tau),
                        format_number(r.err_p), format_number(r.err_q), format_number(r.err_u),
                        format_number(r.order_p), format_number(r.order_q), format_number(r.order_u)});
      }
      write_csv(out / "rates.csv", kRatesHeader, rows);
      artifacts.push_back("rates.csv");
      manifest["error_reference"] = cfg.study.kind == StudyKind::h_refine ? "manufactured solution"
                                                                          : "run with 4x the finest slab count";
      break;
    }
    case StudyKind::locking: {
      const auto lock = locking_study(cfg);
      std::vector<std::vector<std::string>> rows;
      for (const auto& r : lock) {
        rows.push_back({format_number(r.lambda), r.completed ? "1" : "0", r.converged ? "1" : "0",
                        r.finite ? "1" : "0", std::to_string(r.total_iterations),
                        std::to_string(r.max_iterations), format_number(r.jump_indicator),
                        format_number(r.p_max)});
        if (!r.error.empty() && failure.empty()) failure = "lambda=" + format_number(r.lambda) + ": " + r.error;
      }
      write_csv(out / "locking.csv",
                {"lambda", "completed", "converged", "finite", "total_iter", "max_iter_per_slab",
                 "jump_indicator", "p_max"},
                rows);
      artifacts.push_back("locking.csv");
      break;
    }
    case StudyKind::none: break;
  }
  artifacts.push_back("manifest.json");
  manifest["artifacts"] = artifacts;
  write_json(out / "manifest.json", manifest);
  if (!failure.empty()) throw SolverError(failure);
}

}  // namespace porofix
