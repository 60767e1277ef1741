// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "sgcp/config.hpp"
#include "sgcp/io.hpp"

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

using namespace sgcp;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

fs::path config(const std::string& name) { return fs::path(SGCP_CONFIG_DIR) / name; }

VertexField random_field(const GraphPtr& g, std::mt19937_64& rng, bool dirichlet) {
  std::normal_distribution<double> d;
  Eigen::VectorXd v(static_cast<Eigen::Index>(g->vertex_count()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = d(rng);
  VertexField u(g, v);
  if (dirichlet)
    for (std::size_t b : g->boundary()) u[b] = 0.0;
  return u;
}

double energy_distance(const ProblemInstance& p, const VertexField& a, const VertexField& b) {
  return std::sqrt(p.form().energy(a - b));
}

// Vertex set of the level-m gasket by listing the images of V_0 under all IFS
// words, in integer barycentric numerators.
std::size_t word_vertex_count(int n, int m) {
  std::set<std::vector<std::int64_t>> verts;
  std::vector<int> word(static_cast<std::size_t>(m), 0);
  while (true) {
    for (int j = 0; j < n; ++j) {
      std::vector<std::int64_t> a(static_cast<std::size_t>(n), 0);
      for (int k = 0; k < m; ++k) a[static_cast<std::size_t>(word[static_cast<std::size_t>(k)])] += std::int64_t{1} << (m - 1 - k);
      a[static_cast<std::size_t>(j)] += 1;
      verts.insert(a);
    }
    int k = m - 1;
    while (k >= 0 && ++word[static_cast<std::size_t>(k)] == n) word[static_cast<std::size_t>(k--)] = 0;
    if (k < 0) break;
  }
  return verts.size();
}

Outcome geometry_counts() {
  double build_time = 0.0;
  bool ok = true;
  std::ostringstream d;
  for (int m = 0; m <= 6; ++m) {
    const auto t0 = Clock::now();
    const auto g = PrefractalGraph::build(3, m);
    build_time += seconds_since(t0);
    std::int64_t p = 1;
    for (int i = 0; i < m; ++i) p *= 3;
    const auto expected = static_cast<std::size_t>(3 * (p + 1) / 2);
    ok = ok && g.vertex_count() == expected && g.vertex_count() == word_vertex_count(3, m) &&
         g.cells().size() == static_cast<std::size_t>(p);
    d << (m ? "," : "") << g.vertex_count();
  }
  ok = ok && build_time < 1.0;
  return {ok, "|V_m| m=0..6: " + d.str() + "; build " + fmt("%.3f s", build_time) + " (< 1 s)"};
}

Outcome harmonic_invariance() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int m = 0; m <= 4; ++m) {
    auto coarse = make_graph(3, m);
    auto fine = make_graph(3, m + 1);
    DiscreteForm fc(coarse), ff(fine);
    for (int k = 0; k < 100; ++k) {
      const VertexField u = random_field(coarse, rng, false);
      const double e = fc.energy(u);
      worst = std::max(worst, std::abs(ff.energy(harmonic_extension(coarse, fine, u)) - e) / e);
    }
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-9 && t < 5.0, "max relative error " + fmt("%.2e", worst) + " (<= 1e-9), " + fmt("%.2f s", t) + " (< 5 s)"};
}

Outcome measure_normalization() {
  double worst = 0.0;
  for (int n : {3, 4})
    for (int m = 0; m <= 4; ++m) worst = std::max(worst, std::abs(measure_weights(make_graph(n, m)).values().sum() - 1.0));
  return {worst <= 1e-12, "max |sum - 1| = " + fmt("%.2e", worst) + " (<= 1e-12)"};
}

Outcome laplacian_pairing() {
  std::mt19937_64 rng(102);
  double worst = 0.0;
  int pairs = 0;
  for (int m = 1; m <= 4; ++m) {
    auto g = make_graph(3, m);
    DiscreteForm f(g);
    const auto lap = dirichlet_laplacian(f);
    for (int k = 0; k < 25; ++k, ++pairs) {
      const VertexField u = random_field(g, rng, false);
      const VertexField v = random_field(g, rng, true);
      const double scale = std::max(1.0, std::sqrt(f.energy(u) * f.energy(v)));
      worst = std::max(worst, std::abs(lap->pairing(f, u, v) + f.bilinear(u, v)) / scale);
    }
  }
  return {worst <= 1e-10 && pairs == 100,
          std::to_string(pairs) + " pairs, max |<Lu,v> + W(u,v)| / max(1, |u||v|) = " + fmt("%.2e", worst) + " (<= 1e-10)"};
}

Outcome embedding_bound() {
  std::mt19937_64 rng(103);
  int violations = 0, total = 0;
  double worst = 0.0;
  for (int m = 1; m <= 4; ++m) {
    auto g = make_graph(3, m);
    DiscreteForm f(g);
    for (int k = 0; k < 250; ++k, ++total) {
      const Norms nm = f.norms(random_field(g, rng, true));
      if (!(nm.sup_norm <= 9.0 * nm.energy_norm)) ++violations;
      worst = std::max(worst, nm.sup_norm / nm.energy_norm);
    }
  }
  return {violations == 0 && total == 1000, std::to_string(total) + " fields, " + std::to_string(violations) +
                                                " violations, max sup/energy = " + fmt("%.3f", worst) + " (<= 9)"};
}

Outcome gradient_consistency() {
  const ProblemInstance p = build_problem(parse_config(config("mountain_pass.json")));
  std::mt19937_64 rng(104);
  const double t = 1e-6;
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const VertexField x = random_field(p.graph_ptr(), rng, true);
    const VertexField w = random_field(p.graph_ptr(), rng, true);
    const double fd = (p.action(x + t * w) - p.action(x - t * w)) / (2.0 * t);
    const double exact = p.directional_derivative(x, w);
    worst = std::max(worst, std::abs(fd - exact) / std::abs(exact));
  }
  return {worst <= 1e-5 && p.graph().level() == 3,
          "m = 3, 20 points, max relative error " + fmt("%.2e", worst) + " (<= 1e-5)"};
}

Outcome oracle_equivalence() {
  const auto t0 = Clock::now();
  const RunConfig cfg = parse_config(config("oracle_cubic.json"));
  const ProblemInstance p = build_problem(cfg);
  SolverOptions opts = cfg.solver;
  opts.seed = cfg.seed;

  std::mt19937_64 rng(cfg.seed);
  const CriticalPointResult mn = minimize(p, opts, random_field(p.graph_ptr(), rng, true));
  const double r = default_radius(p);
  const CriticalPointResult ball = minimize_in_ball(p, r, opts);
  const GeometryReport geo = geometry_probe(p, r, cfg.geometry.n_directions, default_s_grid(), cfg.seed);
  if (!geo.x_star) return {false, "no x_star found"};
  const CriticalPointResult mpa = mountain_pass(p, *geo.x_star, opts);

  const OracleBox box = OracleBox::uniform(p.dofs(), -5.0, 5.0);
  const auto coarse = brute_force_critical_points(p, box, 101);
  const auto fine = brute_force_critical_points(p, box, 201);

  auto nearest = [&](const VertexField& x, const std::vector<CriticalPointResult>& list) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : list) best = std::min(best, energy_distance(p, x, c.point));
    return best;
  };
  const double d_min = nearest(mn.point, fine), d_ball = nearest(ball.point, fine), d_mpa = nearest(mpa.point, fine);
  double drift = 0.0;
  for (const auto& c : coarse) drift = std::max(drift, nearest(c.point, fine));
  const bool stable = coarse.size() == fine.size() && drift <= 1e-6;
  const double t = seconds_since(t0);
  const bool ok = mn.converged() && ball.converged() && mpa.converged() && d_min <= 1e-4 && d_ball <= 1e-4 &&
                  d_mpa <= 1e-4 && stable && t < 60.0;
  return {ok, "distances to oracle: min " + fmt("%.1e", d_min) + ", ball " + fmt("%.1e", d_ball) + ", mpa " +
                  fmt("%.1e", d_mpa) + " (<= 1e-4); " + std::to_string(fine.size()) + " oracle points, halving drift " +
                  fmt("%.1e", drift) + "; mpa J = " + fmt("%.4f", mpa.value) + "; " + fmt("%.1f s", t) + " (< 60 s)"};
}

Outcome mountain_pass_conclusion() {
  const auto t0 = Clock::now();
  const RunConfig cfg = parse_config(config("mountain_pass.json"));
  const ProblemInstance p = build_problem(cfg);
  SolverOptions opts = cfg.solver;
  opts.seed = cfg.seed;
  const double r = cfg.geometry.r > 0.0 ? cfg.geometry.r : default_radius(p);
  const GeometryReport geo = geometry_probe(p, r, cfg.geometry.n_directions, default_s_grid(), cfg.seed);
  if (!geo.x_star) return {false, "no x_star found"};
  const CriticalPointResult res = mountain_pass(p, *geo.x_star, opts);
  const double j0 = p.action(VertexField::zeros(p.graph_ptr()));
  const double js = p.action(*geo.x_star);
  const double grad = p.gradient(res.point).dual_norm;
  const double norm = std::sqrt(p.form().energy(res.point));
  const double t = seconds_since(t0);
  const bool ok = p.graph().level() == 3 && grad <= 1e-7 && res.value > 0.0 && 0.0 >= std::max(j0, js) &&
                  norm > 1e-6 && t < 120.0;
  return {ok, "m = 3: |J'| = " + fmt("%.1e", grad) + " (<= 1e-7), J = " + fmt("%.4f", res.value) +
                  ", max(J(0), J(x*)) = " + fmt("%.3g", std::max(j0, js)) + ", |x| = " + fmt("%.3f", norm) + "; " +
                  fmt("%.1f s", t) + " (< 120 s)"};
}

Outcome double_critical_conclusion() {
  const RunConfig cfg = parse_config(config("double_critical.json"));
  const ProblemInstance p = build_problem(cfg);
  SolverOptions opts = cfg.solver;
  opts.seed = cfg.seed;
  const double r = cfg.geometry.r > 0.0 ? cfg.geometry.r : default_radius(p);
  const GeometryReport geo = geometry_probe(p, r, cfg.geometry.n_directions, default_s_grid(), cfg.seed);
  if (!geo.x_star) return {false, "no x_star found"};

  Schedule sched;
  sched.kind = schedule_from_string(cfg.harness.schedule);
  sched.delta = cfg.harness.delta;
  const ProblemSequence seq = build_sequence(p, sched, cfg.harness.n_max);
  HypothesisSampling hs;
  hs.n_directions = cfg.geometry.n_directions;
  hs.seed = cfg.seed;
  const HypothesisReport rep = hypothesis_check(seq, r, *geo.x_star, hs);
  const bool hyp = rep.at("DCPT1").pass && rep.at("DCPT2").pass && rep.at("DCPT3").pass;

  const DoubleCriticalResult d = double_critical_points(p, r, geo.x_star, opts, cfg.geometry.n_directions);
  const bool ok = p.graph().level() == 2 && hyp && d.minimizer.converged() && d.saddle.converged() &&
                  d.minimizer.value < 0.0 && d.saddle.value > 0.0 && d.distance >= 1e-3;
  return {ok, std::string("DCPT1-3 ") + (hyp ? "pass" : "fail") + " for n = 0.." + std::to_string(cfg.harness.n_max) +
                  "; J1 = " + fmt("%.4g", d.minimizer.value) + " < 0 < J2 = " + fmt("%.4g", d.saddle.value) +
                  ", distance " + fmt("%.3g", d.distance) + " (>= 1e-3)"};
}

std::vector<ConvergenceTable> sweep(double delta) {
  const RunConfig cfg = parse_config(config("sweep.json"));
  const ProblemInstance p = build_problem(cfg);
  Schedule sched;
  sched.kind = schedule_from_string(cfg.harness.schedule);
  sched.delta = delta;
  if (cfg.harness.drift) sched.drift = make_field(*cfg.harness.drift, p.graph_ptr());
  const ProblemSequence seq = build_sequence(p, sched, cfg.harness.n_max);
  return run_convergence_experiment(seq, solver_from_string(cfg.harness.solver), experiment_options(cfg));
}

Outcome parametric_convergence() {
  const auto t0 = Clock::now();
  const auto tables = sweep(1.0);
  const ConvergenceTable& t = tables.front();
  const ConvergenceRow& last = t.rows.back();
  bool converged = true;
  for (const auto& row : t.rows) converged = converged && row.status == "converged";
  const double secs = seconds_since(t0);
  const bool ok = tables.size() == 1 && last.n == 32 && converged && t.distance_decreasing &&
                  last.distance <= 1e-4 && last.value_gap <= 1e-6 && t.estimate.rate_within_factor_two &&
                  secs < 600.0;
  return {ok, "n = 1..32: distance decreasing after 4: " + std::string(t.distance_decreasing ? "yes" : "no") +
                  ", final distance " + fmt("%.2e", last.distance) + " (<= 1e-4), value gap " +
                  fmt("%.2e", last.value_gap) + " (<= 1e-6), C/n fit C = " + fmt("%.3g", t.estimate.rate_constant) +
                  (t.estimate.rate_within_factor_two ? " within" : " not within") + " factor 2; " +
                  fmt("%.1f s", secs) + " (< 600 s)"};
}

Outcome zero_perturbation() {
  const auto tables = sweep(0.0);
  const ConvergenceTable& t = tables.front();
  const double tol = parse_config(config("sweep.json")).solver.grad_tol;
  double worst = 0.0;
  bool zero = t.estimate.rate_constant == 0.0 && t.estimate.derivative_rate_constant == 0.0;
  for (const auto& row : t.rows) {
    worst = std::max(worst, row.distance);
    zero = zero && row.value_sup == 0.0 && row.derivative_sup == 0.0;
  }
  for (double v : t.estimate.value_sup) zero = zero && v == 0.0;
  for (double v : t.estimate.derivative_sup) zero = zero && v == 0.0;
  return {worst <= tol && zero, "max distance to x_0 " + fmt("%.1e", worst) + " (<= " + fmt("%.0e", tol) +
                                    "), estimates " + (zero ? "identically 0" : "nonzero")};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SGCP_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "sgcp_acceptance_determinism";
  fs::remove_all(root);
  const std::vector<std::pair<std::string, std::string>> runs = {
      {"double", "solve double --config " + config("double_critical.json").string()},
      {"mpa", "solve mpa --config " + config("mountain_pass.json").string()},
      {"sweep", "sweep --config " + config("sweep.json").string() + " --nmax 8"},
  };
  int files = 0;
  std::vector<std::string> differing;
  for (const auto& [name, cmd] : runs) {
    for (const char* copy : {"a", "b"}) {
      const int code = run_cli(cmd + " --out " + (root / name / copy).string());
      if (code != 0) return {false, name + " run exited with " + std::to_string(code)};
    }
    for (const auto& entry : fs::directory_iterator(root / name / "a")) {
      const std::string file = entry.path().filename().string();
      if (file == "run_info.json") continue;
      ++files;
      if (slurp(entry.path()) != slurp(root / name / "b" / file)) differing.push_back(name + "/" + file);
    }
  }
  fs::remove_all(root);
  std::string detail = std::to_string(files) + " result files compared across 3 run pairs";
  for (const auto& d : differing) detail += "; differs: " + d;
  return {differing.empty() && files > 0, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"geometry counts", geometry_counts},
      {"harmonic-extension energy invariance", harmonic_invariance},
      {"measure normalization", measure_normalization},
      {"Laplacian pairing identity", laplacian_pairing},
      {"discrete embedding bound", embedding_bound},
      {"gradient consistency", gradient_consistency},
      {"oracle equivalence", oracle_equivalence},
      {"mountain-pass conclusion", mountain_pass_conclusion},
      {"double-critical-point conclusion", double_critical_conclusion},
      {"parametric convergence", parametric_convergence},
      {"zero-perturbation control", zero_perturbation},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << (i + 1 < 10 ? " " : "") << i + 1 << ". " << criteria[i].first
              << ": " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
