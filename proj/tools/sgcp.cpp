// Command-line front end: gasket export, assumption checks, critical-point
// solves, the grid oracle, parameter sweeps and sweep collation.
//
// Exit codes: 0 success, 1 invalid input, 2 solver did not converge.

#include "sgcp/assumptions.hpp"
#include "sgcp/config.hpp"
#include "sgcp/errors.hpp"
#include "sgcp/io.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sgcp;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kNotConverged = 2;

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool verbose = false;
};

void add_common(CLI::App* app, Common& c, bool with_out = true) {
  app->add_option("--config", c.config, "JSON run configuration");
  if (with_out) app->add_option("--out", c.out, "output directory");
  app->add_option("--seed", c.seed, "overrides the configured seed");
  app->add_flag("--verbose", c.verbose, "progress on stderr");
}

RunConfig load(const Common& c) {
  if (c.config.empty()) throw ConfigError({"--config is required"});
  std::ifstream in(c.config);
  if (!in) throw ConfigError({"cannot read configuration file " + c.config});
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError({c.config + ": " + e.what()});
  }
  if (c.seed) doc["seed"] = *c.seed;
  return parse_config_json(doc);
}

void log(const Common& c, const std::string& msg) {
  if (c.verbose) std::cerr << msg << '\n';
}

/// Effective config and graph summary, the first files of every run directory.
void start_run_dir(const fs::path& dir, const RunConfig& cfg, const ProblemInstance& problem) {
  fs::create_directories(dir);
  write_json(dir / "effective_config.json", cfg.effective);
  json summary = graph_summary(problem.form());
  summary["config_hash"] = cfg.hash;
  write_json(dir / "graph_summary.json", summary);
}

json geometry_json(const GeometryReport& g) {
  return json{{"r", g.r},
              {"n_directions", g.n_directions},
              {"sphere_inf", g.sphere_inf},
              {"ball_inf", g.ball_inf},
              {"x_star_found", g.x_star.has_value()},
              {"x_star_value", g.x_star_value},
              {"x_star_norm", g.x_star_norm},
              {"pmpt2", g.pmpt2},
              {"pmpt3", g.pmpt3},
              {"dcpt2", g.dcpt2},
              {"small_ray",
               {{"tau", g.small_ray.tau},
                {"alpha", g.small_ray.alpha},
                {"s", g.small_ray.s},
                {"predicted_bound", g.small_ray.predicted_bound},
                {"actual_value", g.small_ray.actual_value},
                {"negative_dip", g.small_ray.negative_dip}}}};
}

void print_result(const std::string& label, const CriticalPointResult& r) {
  std::cout << label << ": status=" << to_string(r.status) << " J=" << r.value << " |J'|=" << r.dual_grad_norm
            << " iterations=" << r.iterations << '\n';
  for (const auto& w : r.warnings) std::cout << "  warning: " << w << '\n';
}

int cmd_gasket(int n, int level, const std::string& out, const std::string& dump) {
  const GraphPtr graph = make_graph(n, level);
  const auto form = make_form(graph);
  json doc = graph_export(*graph);
  doc["boundary"] = graph->boundary();
  if (!out.empty()) write_json(out, doc);
  if (!dump.empty()) {
    std::ofstream s(dump);
    if (!s) throw std::runtime_error("cannot write " + dump);
    write_stiffness_triplets(*form, s);
  }
  std::cout << graph_summary(*form).dump(2) << '\n';
  return kOk;
}

int cmd_check(const Common& c, int grid, double v_max) {
  if (c.config.empty()) throw ConfigError({"--config is required"});
  // Schema only: a configuration that breaks a hypothesis is what this
  // command is for, so it must still be checkable.
  const RunConfig cfg = parse_config_schema(read_json(c.config));
  const ProblemInstance problem = build_problem(cfg);
  const AssumptionReport rep = check_assumptions(problem, SamplingGrid{grid, v_max});
  json entries = json::array();
  for (const auto& e : rep.entries) {
    json w = json::array();
    for (const auto& x : e.witnesses)
      w.push_back({{"location", x.location}, {"input", x.input}, {"lhs", x.lhs}, {"rhs", x.rhs},
                   {"relation", x.relation}});
    entries.push_back({{"name", e.name},
                       {"status", to_string(e.status)},
                       {"violation_count", e.violation_count},
                       {"witnesses", std::move(w)},
                       {"sampling", e.sampling}});
  }
  const json doc{{"format_version", kResultFormatVersion},
                 {"config_hash", cfg.hash},
                 {"all_pass", rep.all_pass()},
                 {"assumptions", std::move(entries)}};
  std::cout << doc.dump(2) << '\n';
  if (!c.out.empty()) write_json(fs::path(c.out) / "assumptions.json", doc);
  return kOk;
}

int cmd_solve(const Common& c, const std::string& kind, double r_opt, const std::string& xstar,
              const std::string& start) {
  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig cfg = load(c);
  const ProblemInstance problem = build_problem(cfg);
  SolverOptions opts = cfg.solver;
  opts.seed = cfg.seed;
  const double r = r_opt > 0.0 ? r_opt : (cfg.geometry.r > 0.0 ? cfg.geometry.r : default_radius(problem));
  const fs::path dir = c.out.empty() ? fs::path("run") : fs::path(c.out);
  start_run_dir(dir, cfg, problem);
  const RunMeta meta{cfg.hash, cfg.seed, "solve " + kind};

  std::vector<SolutionRecord> sols;
  std::optional<GeometryReport> geo;
  if (kind == "min") {
    VertexField x0 = VertexField::zeros(problem.graph_ptr());
    if (!start.empty()) {
      x0 = load_field(start, problem.graph_ptr());
    } else {
      const GeometryReport g = geometry_probe(problem, r, cfg.geometry.n_directions, {}, cfg.seed);
      if (g.ball_inf < 0.0) x0 = g.ball_witness;
    }
    log(c, "minimizing");
    sols.push_back({"min", minimize(problem, opts, x0)});
  } else if (kind == "ball") {
    log(c, "minimizing in the ball");
    sols.push_back({"ball", minimize_in_ball(problem, r, opts)});
  } else if (kind == "mpa") {
    std::optional<VertexField> end;
    if (xstar.empty() || xstar == "auto") {
      end = make_x_star(cfg, problem.graph_ptr());
      if (!end) {
        geo = geometry_probe(problem, r, cfg.geometry.n_directions, default_s_grid(), cfg.seed);
        end = geo->x_star;
      }
      if (!end) throw PreconditionError("no x_star with J(x_star) < 0 found; pass --xstar <file>");
    } else {
      end = load_field(xstar, problem.graph_ptr());
    }
    log(c, "mountain pass");
    sols.push_back({"mpa", mountain_pass(problem, *end, opts)});
  } else {
    log(c, "double critical points");
    const DoubleCriticalResult d = double_critical_points(problem, r, make_x_star(cfg, problem.graph_ptr()), opts,
                                                          cfg.geometry.n_directions);
    geo = d.geometry;
    sols.push_back({"min", d.minimizer});
    sols.push_back({"mpa", d.saddle});
    json extra{{"distance", d.distance}, {"distinct", d.distinct}, {"nontrivial", d.nontrivial}};
    write_json(dir / "double.json", extra);
  }

  persist_result(problem, sols, meta, dir);
  bool converged = true;
  for (const auto& s : sols) {
    write_trace_csv(dir / (sols.size() == 1 ? std::string("trace.csv") : "trace_" + s.label + ".csv"), s.result.trace);
    print_result(s.label, s.result);
    converged = converged && s.result.converged();
  }
  if (geo) write_json(dir / "geometry.json", geometry_json(*geo));
  write_run_info(dir, meta.command, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return converged ? kOk : kNotConverged;
}

int cmd_oracle(const Common& c, const std::vector<double>& box, int res) {
  const RunConfig cfg = load(c);
  const ProblemInstance problem = build_problem(cfg);
  if (box.size() != 2) throw ConfigError({"--box takes exactly two numbers: lo hi"});
  const auto found = brute_force_critical_points(problem, OracleBox::uniform(problem.dofs(), box[0], box[1]), res);
  json list = json::array();
  for (const auto& p : found) {
    list.push_back({{"kind", to_string(p.kind)},
                    {"action", p.value},
                    {"dual_grad_norm", p.dual_grad_norm},
                    {"interior", problem.form().restrict_interior(p.point)}});
  }
  const json doc{{"format_version", kResultFormatVersion},
                 {"config_hash", cfg.hash},
                 {"box", box},
                 {"resolution", res},
                 {"critical_points", std::move(list)}};
  std::cout << doc.dump(2) << '\n';
  if (!c.out.empty()) {
    start_run_dir(c.out, cfg, problem);
    write_json(fs::path(c.out) / "oracle.json", doc);
  }
  return kOk;
}

int cmd_sweep(const Common& c, std::optional<std::string> schedule, std::optional<double> delta,
              std::optional<int> nmax, std::optional<std::string> solver, bool plot) {
  const auto t0 = std::chrono::steady_clock::now();
  // Command-line values override the harness block and are echoed into the
  // effective config like any other setting.
  json doc = read_json(c.config.empty() ? throw ConfigError({"--config is required"}) : c.config);
  if (c.seed) doc["seed"] = *c.seed;
  if (schedule) doc["harness"]["schedule"] = *schedule;
  if (delta) doc["harness"]["delta"] = *delta;
  if (nmax) doc["harness"]["n_max"] = *nmax;
  if (solver) doc["harness"]["solver"] = *solver;
  const RunConfig cfg = parse_config_json(doc);
  const ProblemInstance base = build_problem(cfg);

  Schedule sched;
  sched.kind = schedule_from_string(cfg.harness.schedule);
  sched.delta = cfg.harness.delta;
  if (cfg.harness.drift) sched.drift = make_field(*cfg.harness.drift, base.graph_ptr());
  const ProblemSequence seq = build_sequence(base, sched, cfg.harness.n_max);
  ExperimentOptions opts = experiment_options(cfg);
  opts.x_star = make_x_star(cfg, base.graph_ptr());

  const fs::path dir = c.out.empty() ? fs::path("sweep") : fs::path(c.out);
  start_run_dir(dir, cfg, base);
  log(c, "running " + cfg.harness.solver + " sweep");
  const auto tables = run_convergence_experiment(seq, solver_from_string(cfg.harness.solver), opts);
  json summary{{"format_version", kResultFormatVersion}, {"config_hash", cfg.hash}, {"seed", cfg.seed},
               {"tables", json::array()}};
  bool converged = !tables.empty();
  for (const auto& t : tables) {
    const std::string suffix = tables.size() == 1 ? "" : "_" + t.branch;
    write_table_csv(dir / ("table" + suffix + ".csv"), t);
    if (plot) write_plot_data(dir / ("plot_data" + suffix + ".csv"), t);
    summary["tables"].push_back(table_summary(t));
    for (const auto& row : t.rows) converged = converged && row.status == "converged";
    std::cout << t.branch << ": final distance " << t.rows.back().distance << ", value gap "
              << t.rows.back().value_gap << ", C/n fit " << t.estimate.rate_constant
              << (t.estimate.rate_within_factor_two ? " (within 2x)" : " (outside 2x)") << '\n';
    for (const auto& w : t.warnings) std::cout << "  warning: " << w << '\n';
  }
  write_json(dir / "summary.json", summary);
  write_run_info(dir, "sweep", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return converged ? kOk : kNotConverged;
}

int cmd_report(const std::string& dir, const std::string& out) {
  const fs::path target = out.empty() ? fs::path(dir) / "report.csv" : fs::path(out);
  const std::size_t rows = collate_tables(dir, target);
  std::cout << "collated " << rows << " rows into " << target.string() << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semilinear Dirichlet problems on Sierpinski gasket prefractals"};
  app.require_subcommand(1);

  Common common;

  auto* gasket = app.add_subcommand("gasket", "prefractal graph export");
  auto* build = gasket->add_subcommand("build", "write the level-m graph as JSON");
  int n = 3, level = 2;
  std::string graph_out, dump;
  build->add_option("--n", n, "number of simplex vertices N")->capture_default_str();
  build->add_option("--level", level, "prefractal level m")->capture_default_str();
  build->add_option("--out", graph_out, "graph JSON path");
  build->add_option("--dump-stiffness", dump, "stiffness triplets (row col value)");
  build->add_flag("--verbose", common.verbose);
  gasket->require_subcommand(1);

  auto* check = app.add_subcommand("check-assumptions", "sampled check of A1-A5, printed as JSON");
  int grid = 201;
  double v_max = 10.0;
  add_common(check, common);
  check->add_option("--grid", grid, "points per sampling grid")->capture_default_str();
  check->add_option("--v-max", v_max, "half-width of the A3 grid")->capture_default_str();

  auto* solve = app.add_subcommand("solve", "find critical points");
  solve->require_subcommand(1);
  double r = 0.0;
  std::string xstar = "auto", start;
  std::string solve_kind;
  for (const char* name : {"min", "ball", "mpa", "double"}) {
    auto* sub = solve->add_subcommand(name);
    add_common(sub, common);
    if (std::string(name) == "ball" || std::string(name) == "double")
      sub->add_option("--r", r, "ball radius (default M1/(2N+3))");
    if (std::string(name) == "mpa") {
      sub->add_option("--xstar", xstar, "endpoint field file or auto")->capture_default_str();
      sub->add_option("--r", r, "sphere radius for the x_star probe");
    }
    if (std::string(name) == "min") sub->add_option("--start", start, "start field file (default: probed)");
    sub->callback([&solve_kind, name] { solve_kind = name; });
  }

  auto* oracle = app.add_subcommand("oracle", "grid search for all critical points (<= 4 interior DOFs)");
  std::vector<double> box;
  int res = 41;
  add_common(oracle, common);
  oracle->add_option("--box", box, "lo hi")->expected(2)->required();
  oracle->add_option("--res", res, "grid points per DOF")->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "parametric convergence experiment");
  std::optional<std::string> schedule, solver;
  std::optional<double> delta;
  std::optional<int> nmax;
  bool plot = false;
  add_common(sweep, common);
  sweep->add_option("--schedule", schedule, "g_scale, u_drift or combined");
  sweep->add_option("--delta", delta, "perturbation size");
  sweep->add_option("--nmax", nmax, "last sequence index");
  sweep->add_option("--solver", solver, "min, ball, mpa or double");
  sweep->add_flag("--plot-data", plot, "also write n, distance, value_gap columns");

  auto* report = app.add_subcommand("report", "collate sweep tables into one CSV");
  std::string report_dir, report_out;
  report->add_option("--dir", report_dir, "sweep directory")->required();
  report->add_option("--out", report_out, "output CSV (default <dir>/report.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*build) return cmd_gasket(n, level, graph_out, dump);
    if (*check) return cmd_check(common, grid, v_max);
    if (*solve) return cmd_solve(common, solve_kind, r, xstar, start);
    if (*oracle) return cmd_oracle(common, box, res);
    if (*sweep) return cmd_sweep(common, schedule, delta, nmax, solver, plot);
    if (*report) return cmd_report(report_dir, report_out);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  }
  return kInvalid;
}
