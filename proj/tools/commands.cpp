#include "commands.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "config.hpp"
#include "lakeoc/analysis.hpp"
#include "lakeoc/model.hpp"

namespace fs = std::filesystem;

namespace lakeoc::cli {

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

/// Write a file atomically: build the full content first, stream it to a
/// sibling temp file and rename over the destination.
void write_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw NumericalError("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

/// Accumulates one CSV table with a single header row.
struct Csv {
  std::ostringstream body;
  bool header_done = false;

  void header(const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i)
      body << (i ? "," : "") << names[i];
    body << "\n";
    header_done = true;
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i)
      body << (i ? "," : "") << cells[i];
    body << "\n";
  }
};

bool log_enabled() {
  const char* v = std::getenv("LAKEOC_LOG");
  return v && std::string(v) != "" && std::string(v) != "0";
}

struct CommandContext {
  Config cfg;
  fs::path out_dir;
  int jobs = 1;
  std::ostream* log = nullptr;
  std::ostream* diag = nullptr;

  std::vector<std::string> outputs;                  // for the manifest
  std::vector<std::pair<std::string, int>> events;   // (name, step)

  void note(const std::string& msg) const {
    if (log_enabled() && diag) *diag << "lakeoc: " << msg << "\n";
  }
  void emit(const std::string& name, const std::string& content) {
    write_atomic(out_dir / name, content);
    outputs.push_back(name);
  }
};

const char* event_name(RunEventKind k) {
  switch (k) {
    case RunEventKind::TargetHit: return "target-hit";
    case RunEventKind::Stall: return "stall";
    case RunEventKind::AdmissibilityViolation: return "admissibility";
  }
  return "unknown";
}

void collect_events(CommandContext& ctx, const ContinuationRun& run,
                    const std::string& prefix) {
  for (const RunEvent& e : run.events)
    ctx.events.emplace_back(prefix + event_name(e.kind), e.step);
}

void write_manifest(CommandContext& ctx, const std::string& command,
                    int status) {
  std::ostringstream j;
  auto now = std::chrono::system_clock::now().time_since_epoch();
  long secs = std::chrono::duration_cast<std::chrono::seconds>(now).count();
  j << "{\n  \"tool\": \"lakeoc\",\n  \"version\": \"" << kVersion
    << "\",\n  \"command\": \"" << json_escape(command)
    << "\",\n  \"timestamp\": " << secs << ",\n  \"status\": " << status
    << ",\n  \"config\": {";
  bool first_sec = true;
  for (const auto& [section, keys] : ctx.cfg.sections()) {
    j << (first_sec ? "\n" : ",\n") << "    \"" << json_escape(section)
      << "\": {";
    first_sec = false;
    bool first_key = true;
    for (const auto& [key, value] : keys) {
      j << (first_key ? "\n" : ",\n") << "      \"" << json_escape(key)
        << "\": \"" << json_escape(value) << "\"";
      first_key = false;
    }
    j << "\n    }";
  }
  j << "\n  },\n  \"outputs\": [";
  for (std::size_t i = 0; i < ctx.outputs.size(); ++i)
    j << (i ? ", " : "") << "\"" << json_escape(ctx.outputs[i]) << "\"";
  j << "],\n  \"events\": [";
  for (std::size_t i = 0; i < ctx.events.size(); ++i)
    j << (i ? ", " : "") << "{\"kind\": \"" << json_escape(ctx.events[i].first)
      << "\", \"step\": " << ctx.events[i].second << "}";
  j << "]\n}\n";
  write_atomic(ctx.out_dir / "manifest.json", j.str());
}

// ---------------------------------------------------------------------------
// Config -> domain objects

const std::set<std::string> kModelKeys = {"kind", "rho", "b", "c",
                                          "D",    "L",   "N"};
const std::set<std::string> kContinuationKeys = {
    "max_steps",     "init_step",           "max_step",
    "min_step",      "kappa_target",        "horizon",
    "end_distance_factor", "initial_intervals", "newton_tol"};
const std::set<std::string> kCensusKeys = {
    "parameter",  "branch_depth", "bp_max_step", "bp_max_points",
    "max_points", "max_step",     "param_min",   "param_max"};

std::unique_ptr<CanonicalModel> build_model(const Config& cfg) {
  std::string kind = cfg.get("model", "kind");
  ModelParams p;
  p.rho = cfg.num_or("model", "rho", p.rho);
  p.b = cfg.num_or("model", "b", p.b);
  p.c = cfg.num_or("model", "c", p.c);
  p.D = cfg.num_or("model", "D", p.D);
  p.L = cfg.num_or("model", "L", p.L);
  p.N = cfg.int_or("model", "N", p.N);
  return make_model(kind, p);
}

HomotopyOptions homotopy_options(const Config& cfg) {
  HomotopyOptions o;
  o.max_steps = cfg.int_or("continuation", "max_steps", o.max_steps);
  o.init_step = cfg.num_or("continuation", "init_step", o.init_step);
  o.max_step = cfg.num_or("continuation", "max_step", o.max_step);
  o.min_step = cfg.num_or("continuation", "min_step", o.min_step);
  o.kappa_target = cfg.num_or("continuation", "kappa_target", o.kappa_target);
  o.horizon = cfg.num_or("continuation", "horizon", o.horizon);
  o.end_distance_factor =
      cfg.num_or("continuation", "end_distance_factor", o.end_distance_factor);
  o.initial_intervals =
      cfg.int_or("continuation", "initial_intervals", o.initial_intervals);
  o.bvp.newton_tol =
      cfg.num_or("continuation", "newton_tol", o.bvp.newton_tol);
  return o;
}

std::vector<Equilibrium> compute_census(const CanonicalModel& model,
                                        const Config& cfg,
                                        CommandContext& ctx) {
  if (model.params().N == 0)
    return find_equilibria_0d(dynamic_cast<const Lake0D&>(model));
  CensusOptions o;
  o.branch_depth = cfg.int_or("census", "branch_depth", o.branch_depth);
  o.bp_max_step = cfg.num_or("census", "bp_max_step", o.bp_max_step);
  o.bp_max_points = cfg.int_or("census", "bp_max_points", o.bp_max_points);
  o.continuation.max_points =
      cfg.int_or("census", "max_points", o.continuation.max_points);
  o.continuation.max_step =
      cfg.num_or("census", "max_step", o.continuation.max_step);
  o.continuation.param_min =
      cfg.num_or("census", "param_min", o.continuation.param_min);
  o.continuation.param_max =
      cfg.num_or("census", "param_max", o.continuation.param_max);
  std::string parameter = cfg.get_or("census", "parameter", "b");
  ctx.note("running 1D branch census in " + parameter);
  return run_branch_census(dynamic_cast<const Lake1D&>(model), parameter, o)
      .equilibria;
}

VectorXd parse_states(const std::string& spec, int n) {
  if (spec.rfind("flat:", 0) == 0) {
    char* end = nullptr;
    double v = std::strtod(spec.c_str() + 5, &end);
    if (*end != '\0')
      throw ConfigError("bad flat state value: '" + spec + "'");
    return VectorXd::Constant(n, v);
  }
  std::vector<double> vals;
  std::istringstream in(spec);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0')
      throw ConfigError("bad state list entry: '" + tok + "'");
    vals.push_back(v);
  }
  if (static_cast<int>(vals.size()) != n)
    throw ConfigError("state list has " + std::to_string(vals.size()) +
                      " entries, model needs " + std::to_string(n));
  return Eigen::Map<VectorXd>(vals.data(), n);
}

const Equilibrium& select_equilibrium(const std::vector<Equilibrium>& eqs,
                                      const std::string& spec, int n) {
  if (eqs.empty()) throw NumericalError("empty equilibrium census");
  if (spec.rfind("index:", 0) == 0) {
    int k = std::atoi(spec.c_str() + 6);
    if (k < 0 || k >= static_cast<int>(eqs.size()))
      throw ConfigError("equilibrium index " + std::to_string(k) +
                        " out of range (census has " +
                        std::to_string(eqs.size()) + ")");
    return eqs[k];
  }
  std::string states_spec =
      spec.rfind("nearest:", 0) == 0 ? spec.substr(8) : spec;
  VectorXd want = parse_states(states_spec, n);
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < eqs.size(); ++i) {
    double d = (eqs[i].states() - want).norm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return eqs[best];
}

std::vector<VectorXd> parse_free_vectors(const std::string& spec, int n) {
  std::vector<VectorXd> out;
  if (spec == "ones") {
    out.push_back(VectorXd::Ones(n));
    return out;
  }
  if (spec.rfind("modes:", 0) == 0) {
    int count = std::atoi(spec.c_str() + 6);
    for (int k = 0; k < count; ++k) {
      VectorXd v(n);
      for (int i = 0; i < n; ++i)
        v(i) = std::cos(M_PI * k * i / (n - 1));
      out.push_back(v);
    }
    return out;
  }
  std::istringstream in(spec);
  std::string tok;
  while (std::getline(in, tok, ';'))
    if (!tok.empty()) out.push_back(parse_states(tok, n));
  return out;
}

// ---------------------------------------------------------------------------
// Shared CSV emitters

std::string path_csv(const CanonicalModel& model, const BvpMesh& mesh,
                     double T) {
  int n = model.num_states();
  Csv csv;
  std::vector<std::string> head{"time"};
  for (int i = 0; i < n; ++i) head.push_back("P" + std::to_string(i));
  for (int i = 0; i < n; ++i) head.push_back("lambda" + std::to_string(i));
  for (int i = 0; i < n; ++i) head.push_back("u" + std::to_string(i));
  csv.header(head);
  for (std::size_t j = 0; j < mesh.t.size(); ++j) {
    VectorXd X = mesh.Y.col(j);
    VectorXd u = model.control(X);
    std::vector<std::string> cells{fmt17(mesh.t[j] * T)};
    for (int i = 0; i < 2 * n; ++i) cells.push_back(fmt17(X(i)));
    for (int i = 0; i < n; ++i) cells.push_back(fmt17(u(i)));
    csv.row(cells);
  }
  return csv.body.str();
}

std::string slice_csv(const CanonicalModel& model, const SliceManifold& sm) {
  int n = model.num_states();
  Csv csv;
  csv.header({"kappa", "state_norm", "costate_norm", "objective",
              "admissible"});
  for (const SliceRecord& r : sm.records)
    csv.row({fmt17(r.kappa), fmt17(model.spatial_norm(r.X0.head(n))),
             fmt17(model.spatial_norm(r.X0.tail(n))), fmt17(r.objective),
             r.admissible ? "1" : "0"});
  return csv.body.str();
}

// ---------------------------------------------------------------------------
// Commands

int cmd_equilibria(const CanonicalModel& model, CommandContext& ctx) {
  std::vector<Equilibrium> eqs;
  try {
    eqs = compute_census(model, ctx.cfg, ctx);
  } catch (const NumericalError&) {
    // leave the census empty; warn below
  }
  if (eqs.empty() && ctx.diag)
    *ctx.diag << "lakeoc: warning: no equilibria found\n";
  int n = model.num_states();
  Csv csv;
  std::vector<std::string> head{"id",     "flat",   "spp",        "defect",
                                "n_s",    "n_u",    "admissible", "symmetric",
                                "residual", "objective"};
  for (int i = 0; i < n; ++i) head.push_back("P" + std::to_string(i));
  for (int i = 0; i < n; ++i) head.push_back("lambda" + std::to_string(i));
  csv.header(head);
  for (std::size_t k = 0; k < eqs.size(); ++k) {
    const Equilibrium& e = eqs[k];
    std::vector<std::string> cells{
        std::to_string(k),
        e.flat ? "1" : "0",
        e.spectral.spp ? "1" : "0",
        std::to_string(e.spectral.defect),
        std::to_string(e.spectral.n_s),
        std::to_string(e.spectral.n_u),
        e.admissible ? "1" : "0",
        e.symmetric ? "1" : "0",
        fmt17(e.residual_norm),
        fmt17(model.objective_value(e.X))};
    for (int i = 0; i < 2 * n; ++i) cells.push_back(fmt17(e.X(i)));
    csv.row(cells);
  }
  ctx.emit("equilibria.csv", csv.body.str());
  return kOk;
}

int cmd_cont_eq(const CanonicalModel& model, CommandContext& ctx) {
  const Config& cfg = ctx.cfg;
  std::string parameter = cfg.get("cont-eq", "parameter");
  int n = model.num_states();

  Csv branch_csv;
  branch_csv.header({"step", parameter, "n_s", "spp", "flat", "state_norm",
                     "costate_norm", "first_state"});
  Csv events_csv;
  events_csv.header({"index", "kind", parameter});

  int max_points = cfg.int_or("cont-eq", "max_points", 750);
  if (max_points > 0) {
    std::vector<Equilibrium> eqs = compute_census(model, cfg, ctx);
    const Equilibrium& start =
        select_equilibrium(eqs, cfg.get_or("cont-eq", "start", "index:0"), n);
    EqContinuationOptions o;
    o.max_points = max_points;
    o.max_step = cfg.num_or("cont-eq", "max_step", o.max_step);
    o.init_step = cfg.num_or("cont-eq", "init_step", o.init_step);
    o.min_step = cfg.num_or("cont-eq", "min_step", o.min_step);
    o.param_min = cfg.num_or("cont-eq", "param_min", o.param_min);
    o.param_max = cfg.num_or("cont-eq", "param_max", o.param_max);
    o.backward = cfg.bool_or("cont-eq", "backward", false);
    Branch br = continue_equilibria(model, start, parameter, o);
    for (std::size_t k = 0; k < br.points.size(); ++k) {
      Equilibrium e = classify_equilibrium(
          *model.with_params(
              set_param(model.params(), parameter, br.param_values[k])),
          br.points[k]);
      branch_csv.row({std::to_string(k), fmt17(br.param_values[k]),
                      std::to_string(e.spectral.n_s),
                      e.spectral.spp ? "1" : "0", e.flat ? "1" : "0",
                      fmt17(model.spatial_norm(e.states())),
                      fmt17(model.spatial_norm(e.costates())),
                      fmt17(e.X(0))});
    }
    for (const BranchEvent& ev : br.events) {
      events_csv.row({std::to_string(ev.index),
                      ev.kind == EventKind::Fold ? "fold" : "branch-point",
                      fmt17(ev.param)});
      ctx.events.emplace_back(
          ev.kind == EventKind::Fold ? "fold" : "branch-point", ev.index);
    }
  }
  ctx.emit("branch.csv", branch_csv.body.str());
  ctx.emit("branch_events.csv", events_csv.body.str());
  return kOk;
}

int cmd_stable_path(const CanonicalModel& model, CommandContext& ctx) {
  const Config& cfg = ctx.cfg;
  int n = model.num_states();
  std::vector<Equilibrium> eqs = compute_census(model, cfg, ctx);
  const Equilibrium& target =
      select_equilibrium(eqs, cfg.get("stable-path", "target"), n);
  VectorXd x0 = parse_states(cfg.get("stable-path", "x0"), n);
  HomotopyOptions opts = homotopy_options(cfg);
  std::string variant = cfg.get_or("stable-path", "variant", "spp");

  ContinuationRun run;
  if (variant == "spp") {
    run = stable_path_homotopy(model, target, x0, opts);
  } else if (variant == "nonspp") {
    VectorXd x1 = parse_states(cfg.get("stable-path", "x1"), n);
    std::vector<VectorXd> vecs =
        parse_free_vectors(cfg.get_or("stable-path", "free_vectors", ""), n);
    run = stable_path_homotopy_nonspp(model, target, x0, x1, vecs, opts);
  } else {
    throw ConfigError("unknown stable-path variant '" + variant + "'");
  }
  collect_events(ctx, run, "");
  std::string slice = slice_csv(model, run.slice);
  const ContinuationRun* last_run = &run;
  ContinuationRun mh;
  if (!run.target_reached &&
      cfg.bool_or("stable-path", "moving_horizon", false)) {
    ctx.note("stalled; continuing with a free horizon");
    mh = enable_moving_horizon(run, model, target, opts);
    collect_events(ctx, mh, "moving-horizon-");
    // Append the free-horizon slice rows below the fixed-horizon ones
    // (dropping the second header).
    std::string mh_csv = slice_csv(model, mh.slice);
    slice += mh_csv.substr(mh_csv.find('\n') + 1);
    last_run = &mh;
  }
  const HomotopyStep& last = last_run->steps.back();
  ctx.emit("path.csv", path_csv(model, last.mesh, last.T));
  ctx.emit("slice.csv", slice);
  if (ctx.log)
    *ctx.log << (last_run->target_reached ? "target value hit"
                                          : "continuation stalled")
             << " at kappa = " << fmt17(last.kappas(0)) << "\n";
  return kOk;
}

int cmd_skiba(const CanonicalModel& model, CommandContext& ctx,
              CrossingResult* found) {
  const Config& cfg = ctx.cfg;
  int n = model.num_states();
  std::string section = cfg.has_section("skiba-cont") ? "skiba-cont" : "skiba";
  std::vector<Equilibrium> eqs = compute_census(model, cfg, ctx);
  const Equilibrium& t1 =
      select_equilibrium(eqs, cfg.get(section, "target1"), n);
  const Equilibrium& t2 =
      select_equilibrium(eqs, cfg.get(section, "target2"), n);
  HomotopyOptions opts = homotopy_options(cfg);

  ctx.note("continuing stable paths between the two targets");
  ContinuationRun run1 = stable_path_homotopy(model, t1, t2.states(), opts);
  ContinuationRun run2 = stable_path_homotopy(model, t2, t1.states(), opts);
  collect_events(ctx, run1, "run1-");
  collect_events(ctx, run2, "run2-");

  CrossingResult cr;
  try {
    cr = find_indifference_point(model, run1, t1, run2, t2, opts);
  } catch (const SpecificationError& e) {
    if (ctx.diag) *ctx.diag << "lakeoc: " << e.what() << "\n";
    ctx.events.emplace_back("no-overlap", -1);
    return kInconclusive;
  }
  if (cr.status != CrossingStatus::Found) {
    ctx.events.emplace_back("no-crossing", -1);
    if (ctx.diag)
      *ctx.diag << "lakeoc: objective curves do not cross on this line\n";
    return kInconclusive;
  }
  if (found) *found = std::move(cr);
  return kOk;
}

int cmd_skiba_full(const CanonicalModel& model, CommandContext& ctx) {
  CrossingResult cr;
  int rc = cmd_skiba(model, ctx, &cr);
  if (rc != kOk) {
    // Still record what was examined.
    Csv csv;
    csv.header({"found"});
    csv.row({"0"});
    ctx.emit("skiba.csv", csv.body.str());
    return rc;
  }
  const IndifferencePoint& pt = cr.point;
  int n = model.num_states();
  Csv csv;
  std::vector<std::string> head{"alpha", "objective", "heterogeneous"};
  for (int i = 0; i < n; ++i) head.push_back("P" + std::to_string(i));
  csv.header(head);
  std::vector<std::string> cells{fmt17(pt.alpha), fmt17(pt.objective),
                                 pt.heterogeneous ? "1" : "0"};
  for (int i = 0; i < n; ++i) cells.push_back(fmt17(pt.xI(i)));
  csv.row(cells);
  ctx.emit("skiba.csv", csv.body.str());
  ctx.emit("skiba_path1.csv",
           path_csv(model, pt.path1.mesh, pt.path1.T));
  ctx.emit("skiba_path2.csv",
           path_csv(model, pt.path2.mesh, pt.path2.T));
  return kOk;
}

int cmd_skiba_cont(const CanonicalModel& model, CommandContext& ctx) {
  const Config& cfg = ctx.cfg;
  int n = model.num_states();
  CrossingResult cr;
  int rc = cmd_skiba(model, ctx, &cr);
  if (rc != kOk) return rc;
  const IndifferencePoint& pt = cr.point;

  VectorXd to = parse_states(cfg.get("skiba-cont", "to"), n);
  VectorXd V = cfg.has("skiba-cont", "V")
                   ? parse_free_vectors(cfg.get("skiba-cont", "V"), n).at(0)
                   : VectorXd::Ones(n);
  HomotopyOptions opts = homotopy_options(cfg);
  ctx.note("continuing the indifference point");
  IndifferenceRun run = continue_indifference_point(model, pt.path1, pt.path2,
                                                    pt.xI, to, V, opts);
  for (const RunEvent& e : run.events)
    ctx.events.emplace_back(event_name(e.kind), e.step);

  Csv csv;
  std::vector<std::string> head{"step",        "kappa1", "kappa2",
                                "objective",   "ham_residual",
                                "newton_iters"};
  for (int i = 0; i < n; ++i) head.push_back("P" + std::to_string(i));
  csv.header(head);
  for (std::size_t k = 0; k < run.steps.size(); ++k) {
    const IndifferenceStep& s = run.steps[k];
    std::vector<std::string> cells{
        std::to_string(k),      fmt17(s.kappa1),
        fmt17(s.kappa2),        fmt17(s.objective),
        fmt17(s.hamiltonian_gap), std::to_string(s.newton_iters)};
    for (int i = 0; i < n; ++i) cells.push_back(fmt17(s.xI(i)));
    csv.row(cells);
  }
  ctx.emit("skiba_cont.csv", csv.body.str());
  return run.target_reached ? kOk : kNumericalError;
}

// ---------------------------------------------------------------------------

std::map<std::string, std::set<std::string>> schema_for(
    const std::string& command) {
  std::map<std::string, std::set<std::string>> s;
  s["model"] = kModelKeys;
  s["continuation"] = kContinuationKeys;
  s["census"] = kCensusKeys;
  if (command == "equilibria") s["equilibria"] = {};
  if (command == "cont-eq")
    s["cont-eq"] = {"parameter", "start",    "max_points", "max_step",
                    "init_step", "min_step", "param_min",  "param_max",
                    "backward"};
  if (command == "stable-path")
    s["stable-path"] = {"target", "x0",           "variant",
                        "x1",     "free_vectors", "moving_horizon"};
  if (command == "skiba") s["skiba"] = {"target1", "target2"};
  if (command == "skiba-cont")
    s["skiba-cont"] = {"target1", "target2", "to", "V"};
  return s;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  const std::string usage =
      "usage: lakeoc <equilibria|cont-eq|stable-path|skiba|skiba-cont> "
      "--config <file> --out <dir> [--jobs <k>]\n";
  if (args.empty() || args[0] == "--help" || args[0] == "-h") {
    out << usage;
    return args.empty() ? kUsageError : kOk;
  }
  std::string command = args[0];
  std::string config_path, out_path;
  int jobs = 1;
  for (std::size_t i = 1; i < args.size(); ++i) {
    auto need_value = [&](const char* flag) -> std::string {
      if (i + 1 >= args.size())
        throw ConfigError(std::string(flag) + " needs a value");
      return args[++i];
    };
    try {
      if (args[i] == "--config") config_path = need_value("--config");
      else if (args[i] == "--out") out_path = need_value("--out");
      else if (args[i] == "--jobs") jobs = std::atoi(need_value("--jobs").c_str());
      else {
        err << "unknown option: " << args[i] << "\n" << usage;
        return kUsageError;
      }
    } catch (const ConfigError& e) {
      err << e.what() << "\n" << usage;
      return kUsageError;
    }
  }
  if (config_path.empty() || out_path.empty() || jobs < 1) {
    err << usage;
    return kUsageError;
  }

  static const std::set<std::string> known = {
      "equilibria", "cont-eq", "stable-path", "skiba", "skiba-cont"};
  if (!known.count(command)) {
    err << "unknown command: " << command << "\n" << usage;
    return kUsageError;
  }

  CommandContext ctx;
  ctx.out_dir = out_path;
  ctx.jobs = jobs;
  ctx.log = &out;
  ctx.diag = &err;

  int status;
  try {
    ctx.cfg = parse_config_file(config_path);
    ctx.cfg.validate(schema_for(command));
    std::unique_ptr<CanonicalModel> model = build_model(ctx.cfg);
    fs::create_directories(ctx.out_dir);
    if (command == "equilibria") status = cmd_equilibria(*model, ctx);
    else if (command == "cont-eq") status = cmd_cont_eq(*model, ctx);
    else if (command == "stable-path") status = cmd_stable_path(*model, ctx);
    else if (command == "skiba") status = cmd_skiba_full(*model, ctx);
    else status = cmd_skiba_cont(*model, ctx);
  } catch (const SpecificationError& e) {
    err << "lakeoc: " << e.what() << "\n";
    return kUsageError;
  } catch (const NumericalError& e) {
    err << "lakeoc: " << e.what() << "\n";
    return kNumericalError;
  }
  write_manifest(ctx, command, status);
  return status;
}

}  // namespace lakeoc::cli
