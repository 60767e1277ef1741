#include "sgcp/harness.hpp"

#include "sgcp/errors.hpp"
#include "solver_common.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace sgcp {

const char* to_string(ScheduleKind k) {
  switch (k) {
    case ScheduleKind::g_scale: return "g_scale";
    case ScheduleKind::u_drift: return "u_drift";
    case ScheduleKind::combined: return "combined";
  }
  return "unknown";
}

ScheduleKind schedule_from_string(const std::string& name) {
  if (name == "g_scale") return ScheduleKind::g_scale;
  if (name == "u_drift") return ScheduleKind::u_drift;
  if (name == "combined") return ScheduleKind::combined;
  throw ConfigError({"unknown schedule '" + name + "' (expected g_scale, u_drift or combined)"});
}

const char* to_string(SolverKind k) {
  switch (k) {
    case SolverKind::min: return "min";
    case SolverKind::ball: return "ball";
    case SolverKind::mpa: return "mpa";
    case SolverKind::dual: return "double";
  }
  return "unknown";
}

SolverKind solver_from_string(const std::string& name) {
  if (name == "min") return SolverKind::min;
  if (name == "ball") return SolverKind::ball;
  if (name == "mpa") return SolverKind::mpa;
  if (name == "double") return SolverKind::dual;
  throw ConfigError({"unknown solver '" + name + "' (expected min, ball, mpa or double)"});
}

// ---------------------------------------------------------------------------
// ProblemSequence

ProblemSequence::ProblemSequence(ProblemInstance base, Schedule schedule, int n_max)
    : base_(std::move(base)), schedule_(std::move(schedule)), n_max_(n_max) {
  if (n_max_ < 1) throw PreconditionError("sequence needs n_max >= 1");
  if (!std::isfinite(schedule_.delta)) throw PreconditionError("schedule delta must be finite");
  if (!schedule_.drift.empty()) require_same_graph(base_.graph(), schedule_.drift.graph(), "drift field");
}

VertexField ProblemSequence::g(int n) const {
  if (n == 0 || schedule_.kind == ScheduleKind::u_drift) return base_.g();
  return (1.0 + schedule_.delta / n) * base_.g();
}

VertexField ProblemSequence::u(int n) const {
  if (n == 0 || schedule_.kind == ScheduleKind::g_scale || schedule_.drift.empty()) return base_.u();
  return base_.u() + (schedule_.delta / n) * schedule_.drift;
}

ProblemInstance ProblemSequence::instance(int n) const {
  if (n < 0 || n > n_max_) throw PreconditionError("sequence index out of range");
  if (n == 0) return base_;
  return base_.with_data(g(n), u(n));
}

ProblemSequence build_sequence(const ProblemInstance& base, const Schedule& schedule, int n_max) {
  ProblemSequence seq(base, schedule, n_max);
  const double M = base.bounds().M;
  for (int n = 1; n <= n_max; ++n) {
    const VertexField g = seq.g(n);
    const VertexField u = seq.u(n);
    if (!(g.values().minCoeff() > 0.0)) {
      std::ostringstream msg;
      msg << "schedule gives g_n <= 0 at n = " << n << " (min " << g.values().minCoeff() << ")";
      throw DomainError(msg.str());
    }
    if (u.values().cwiseAbs().maxCoeff() > M) {
      std::ostringstream msg;
      msg << "schedule gives |u_n| > M = " << M << " at n = " << n;
      throw DomainError(msg.str());
    }
  }
  return seq;
}

// ---------------------------------------------------------------------------
// Uniform convergence

std::vector<VertexField> ball_sample(const ProblemInstance& problem, double radius, int count, std::uint64_t seed) {
  std::vector<VertexField> out;
  const std::size_t dofs = problem.dofs();
  if (dofs == 0) return out;
  for (int i = 0; i < count; ++i) {
    auto rng = detail::stream(seed, static_cast<std::uint64_t>(i), 0x5A);
    Eigen::VectorXd d = detail::gaussian_vector(dofs, rng);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    d *= radius * (1.0 - unit(rng)) / problem.energy_norm_interior(d);
    out.push_back(problem.form().extend_dirichlet(d));
  }
  return out;
}

namespace {

bool nonincreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[i - 1]) return false;
  return true;
}

/// C minimizing sum (e_n - C/n)^2.
double fit_rate(const std::vector<double>& e) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double n = static_cast<double>(i + 1);
    num += e[i] / n;
    den += 1.0 / (n * n);
  }
  return num / den;
}

}  // namespace

ConvergenceEstimate uniform_convergence_estimate(const ProblemSequence& seq, const std::vector<VertexField>& sample,
                                                 const std::string& description) {
  if (sample.empty()) throw PreconditionError("uniform_convergence_estimate: empty sample");
  const ProblemInstance& base = seq.base();
  std::vector<Eigen::VectorXd> xs;
  xs.reserve(sample.size());
  for (const auto& x : sample) {
    require_same_graph(base.graph(), x.graph(), "sample field");
    if (!x.is_dirichlet()) throw PreconditionError("sample fields must vanish on V_0");
    xs.push_back(base.form().restrict_interior(x));
  }
  std::vector<double> base_values(xs.size());
  std::vector<Eigen::VectorXd> base_residuals(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    base_values[i] = base.action_interior(xs[i]);
    base_residuals[i] = base.residual_interior(xs[i]);
  }

  ConvergenceEstimate est;
  est.sample_size = sample.size();
  est.sample_description = description;
  for (int n = 1; n <= seq.n_max(); ++n) {
    const ProblemInstance pn = seq.instance(n);
    double vs = 0.0, ds = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      vs = std::max(vs, std::abs(pn.action_interior(xs[i]) - base_values[i]));
      const Eigen::VectorXd diff = pn.residual_interior(xs[i]) - base_residuals[i];
      if (diff.size() > 0) ds = std::max(ds, std::sqrt(std::max(0.0, diff.dot(base.riesz_interior(diff)))));
    }
    est.value_sup.push_back(vs);
    est.derivative_sup.push_back(ds);
  }
  est.value_monotone = nonincreasing(est.value_sup);
  est.derivative_monotone = nonincreasing(est.derivative_sup);
  est.rate_constant = fit_rate(est.value_sup);
  est.derivative_rate_constant = fit_rate(est.derivative_sup);
  est.rate_within_factor_two = true;
  for (std::size_t i = 0; i < est.value_sup.size(); ++i) {
    const double scaled = static_cast<double>(i + 1) * est.value_sup[i];
    if (scaled < 0.5 * est.rate_constant || scaled > 2.0 * est.rate_constant) est.rate_within_factor_two = false;
  }
  return est;
}

// ---------------------------------------------------------------------------
// Hypothesis check

const HypothesisEntry& HypothesisReport::at(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return e;
  throw PreconditionError("no hypothesis entry named " + name);
}

HypothesisReport hypothesis_check(const ProblemSequence& seq, double r, const VertexField& x_star,
                                  const HypothesisSampling& sampling) {
  const ProblemInstance& base = seq.base();
  if (!(r > 0.0)) throw PreconditionError("hypothesis_check: r must be positive");
  require_same_graph(base.graph(), x_star.graph(), "x_star");
  if (!x_star.is_dirichlet()) throw PreconditionError("hypothesis_check: x_star must vanish on V_0");
  const double star_norm = std::sqrt(base.form().energy(x_star));
  if (!(star_norm > r)) throw PreconditionError("hypothesis_check: need ||x_star|| > r");
  const double bb_radius = sampling.bb_radius > 0.0 ? sampling.bb_radius : 10.0 * star_norm;

  std::ostringstream desc;
  desc << "n = 0.." << seq.n_max() << ", " << sampling.n_directions << " seeded directions (seed " << sampling.seed
       << "), sphere radius r = " << r << ", ball radii r 2^-j (j <= 20) plus 4 uniform draws per direction";
  const std::string sample = desc.str();

  double zero_max = 0.0;
  double sphere_inf = std::numeric_limits<double>::infinity();
  double ball_inf_min = std::numeric_limits<double>::infinity();
  double ball_inf_max = -std::numeric_limits<double>::infinity();
  double margin = std::numeric_limits<double>::infinity();
  double star_sup = -std::numeric_limits<double>::infinity();
  std::vector<std::string> sphere_w, ball_w, star_w, margin_w;
  double bb_inner = std::numeric_limits<double>::infinity(), bb_outer = bb_inner;

  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(base.dofs()));
  const Eigen::VectorXd star = base.form().restrict_interior(x_star);
  for (int n = 0; n <= seq.n_max(); ++n) {
    const ProblemInstance pn = seq.instance(n);
    zero_max = std::max(zero_max, std::abs(pn.action_interior(zero)));
    const GeometryReport geo = geometry_probe(pn, r, sampling.n_directions, {}, sampling.seed);
    if (geo.sphere_inf < sphere_inf) sphere_inf = geo.sphere_inf;
    if (!(geo.sphere_inf > 0.0)) sphere_w.push_back("n = " + std::to_string(n));
    ball_inf_min = std::min(ball_inf_min, geo.ball_inf);
    ball_inf_max = std::max(ball_inf_max, geo.ball_inf);
    if (!(geo.ball_inf < 0.0) || !(geo.ball_inf > -sampling.lower_bound)) ball_w.push_back("n = " + std::to_string(n));
    const double m = geo.sphere_inf - geo.ball_inf;
    margin = std::min(margin, m);
    if (!(m > 0.0)) margin_w.push_back("n = " + std::to_string(n));
    const double js = pn.action_interior(star);
    star_sup = std::max(star_sup, js);
    if (!(js < 0.0)) star_w.push_back("n = " + std::to_string(n));

    // Bounded below: the lowest sample must not keep dropping when the
    // sampled radius doubles (same directions, nested radii).
    for (int i = 0; i < sampling.n_directions; ++i) {
      auto rng = detail::stream(sampling.seed, static_cast<std::uint64_t>(i), 0xBB);
      Eigen::VectorXd d = detail::gaussian_vector(pn.dofs(), rng);
      if (i == 0) d.setOnes();
      if (i == 1) d = -Eigen::VectorXd::Ones(d.size());
      d /= pn.energy_norm_interior(d);
      for (int j = 1; j <= 32; ++j) {
        const double rho = bb_radius * j / 32.0;
        bb_inner = std::min(bb_inner, pn.action_interior(rho * d));
        bb_outer = std::min(bb_outer, pn.action_interior(2.0 * rho * d));
      }
    }
  }
  bb_outer = std::min(bb_outer, bb_inner);

  HypothesisReport rep;
  auto add = [&](std::string name, std::string quantity, double value, double bound, bool pass,
                 std::vector<std::string> witnesses, std::string where) {
    rep.entries.push_back({std::move(name), std::move(quantity), value, bound, pass, std::move(witnesses),
                           std::move(where)});
  };
  std::ostringstream bb_desc;
  bb_desc << "n = 0.." << seq.n_max() << ", " << sampling.n_directions << " directions, radii k R/32 and 2k R/32 with R = "
          << bb_radius;
  add("BB", "sampled inf over the doubled ball (value) vs the ball of radius R (bound)", bb_outer, bb_inner,
      std::isfinite(bb_outer) && bb_outer >= bb_inner, {}, bb_desc.str());
  const bool infu = margin > 0.0 && ball_inf_min > -sampling.lower_bound;
  add("InfU", "min over n of (sphere inf - ball inf), U = ball of radius r", margin, 0.0, infu, margin_w, sample);
  add("PMPT1", "max over n of |Phi_n(0)|", zero_max, 0.0, zero_max == 0.0, {}, sample);
  add("PMPT2", "inf over n and the sampled sphere of Phi_n", sphere_inf, 0.0, sphere_inf > 0.0, sphere_w, sample);
  add("PMPT3", "sup over n of Phi_n(x_star)", star_sup, 0.0, star_sup < 0.0 && star_norm > r, star_w, sample);
  add("DCPT1", "max over n of |Phi_n(0)|", zero_max, 0.0, zero_max == 0.0, {}, sample);
  add("DCPT2", "sampled ball inf in (-R, 0) and sphere inf > 0 for all n; value = max ball inf", ball_inf_max,
      -sampling.lower_bound, ball_w.empty() && sphere_inf > 0.0, ball_w, sample);
  add("DCPT3", "sup over n of Phi_n(x_star)", star_sup, 0.0, star_sup < 0.0 && star_norm > r, star_w, sample);
  return rep;
}

// ---------------------------------------------------------------------------
// Convergence experiment

namespace {

void thin_iterates(const CriticalPointResult& res, int keep, const ProblemInstance& p, std::vector<VertexField>& out) {
  const auto& its = res.iterates;
  if (its.empty()) return;
  const std::size_t step = std::max<std::size_t>(1, its.size() / static_cast<std::size_t>(std::max(1, keep)));
  for (std::size_t i = 0; i < its.size(); i += step) out.push_back(p.form().extend_dirichlet(its[i]));
  out.push_back(p.form().extend_dirichlet(its.back()));
}

ConvergenceTable assemble(const ProblemSequence& seq, const std::vector<CriticalPointResult>& results,
                          const ExperimentOptions& opts, const std::string& solver, const std::string& branch,
                          std::vector<VertexField> sample, double sample_radius) {
  const ProblemInstance& base = seq.base();
  ConvergenceTable table;
  table.solver = solver;
  table.branch = branch;
  const VertexField& x0 = results[0].point;
  const double v0 = base.action(x0);

  double max_norm = 0.0;
  for (const auto& r : results) max_norm = std::max(max_norm, std::sqrt(base.form().energy(r.point)));
  auto random = ball_sample(base, std::max(sample_radius, 2.0 * max_norm), opts.random_samples, opts.solver.seed);
  sample.insert(sample.end(), random.begin(), random.end());
  for (const auto& r : results) sample.push_back(r.point);
  std::ostringstream desc;
  desc << "solver iterates (thinned to " << opts.max_trace_samples << " per solve) + solutions + "
       << opts.random_samples << " random fields in the ball of radius " << std::max(sample_radius, 2.0 * max_norm);
  table.estimate = uniform_convergence_estimate(seq, sample, desc.str());

  for (std::size_t n = 0; n < results.size(); ++n) {
    const auto& r = results[n];
    ConvergenceRow row;
    row.n = static_cast<int>(n);
    row.limit_value = base.action(r.point);
    row.value_gap = std::abs(row.limit_value - v0);
    row.distance = std::sqrt(base.form().energy(r.point - x0));
    row.limit_grad_norm = base.gradient(r.point).dual_norm;
    row.own_grad_norm = r.dual_grad_norm;
    if (n > 0) {
      row.value_sup = table.estimate.value_sup[n - 1];
      row.derivative_sup = table.estimate.derivative_sup[n - 1];
    }
    row.status = to_string(r.status);
    row.iterations = r.iterations;
    table.rows.push_back(row);
    table.points.push_back(r.point);
  }
  // One line per distinct warning, listing the indices that raised it.
  std::vector<std::pair<std::string, std::string>> grouped;
  for (std::size_t n = 0; n < results.size(); ++n) {
    for (const auto& w : results[n].warnings) {
      auto it = std::find_if(grouped.begin(), grouped.end(), [&](const auto& g) { return g.first == w; });
      if (it == grouped.end()) grouped.emplace_back(w, std::to_string(n));
      else it->second += "," + std::to_string(n);
    }
  }
  for (const auto& [w, idx] : grouped) table.warnings.push_back(w + " (n = " + idx + ")");
  table.limit_verified = base.gradient(x0).dual_norm <= opts.solver.grad_tol;
  table.distance_decreasing = true;
  for (std::size_t n = 5; n < table.rows.size(); ++n)
    if (!(table.rows[n].distance < table.rows[n - 1].distance)) table.distance_decreasing = false;
  table.final_within_tol = table.rows.back().distance <= opts.final_tol;
  return table;
}

}  // namespace

std::vector<ConvergenceTable> run_convergence_experiment(const ProblemSequence& seq, SolverKind kind,
                                                         const ExperimentOptions& opts) {
  const auto started = std::chrono::steady_clock::now();
  const ProblemInstance& base = seq.base();
  SolverOptions so = opts.solver;
  so.validate();
  so.keep_iterates = true;
  const double r = opts.r > 0.0 ? opts.r : default_radius(base);
  const bool nonlinear = base.interior_forcing().cwiseAbs().maxCoeff() > 0.0;

  std::vector<std::string> warnings;
  GeometryReport geo = geometry_probe(base, r, opts.n_directions, default_s_grid(), so.seed);
  std::optional<VertexField> x_star = opts.x_star ? opts.x_star : geo.x_star;

  auto min_start = [&](const ProblemInstance& p) {
    const GeometryReport g = geometry_probe(p, r, opts.n_directions, {}, so.seed);
    return g.ball_inf < 0.0 ? g.ball_witness : VertexField::zeros(p.graph_ptr());
  };

  std::vector<ConvergenceTable> tables;
  auto run_branch = [&](SolverKind branch) {
    std::vector<CriticalPointResult> results;
    std::vector<VertexField> sample;
    if (branch == SolverKind::mpa && !x_star) {
      warnings.push_back("no x_star found by the geometry probe; mountain-pass branch skipped");
      return;
    }
    for (int n = 0; n <= seq.n_max(); ++n) {
      const ProblemInstance pn = seq.instance(n);
      CriticalPointResult res;
      switch (branch) {
        case SolverKind::min:
          // n = 0 and n = 1 start cold; later indices continue from x_{n-1}.
          res = minimize(pn, so, n <= 1 ? min_start(pn) : results.back().point);
          break;
        case SolverKind::ball:
          res = minimize_in_ball(pn, r, so);
          break;
        case SolverKind::mpa:
          res = mountain_pass(pn, *x_star, so, n <= 1 ? nullptr : &results.back().path);
          break;
        case SolverKind::dual:
          break;
      }
      thin_iterates(res, opts.max_trace_samples, pn, sample);
      res.iterates.clear();
      results.push_back(std::move(res));
    }
    const std::string name = branch == SolverKind::mpa ? "mpa" : (branch == SolverKind::ball ? "ball" : "min");
    ConvergenceTable t = assemble(seq, results, opts, to_string(kind), name, std::move(sample), r);
    t.local_only = branch == SolverKind::min && nonlinear;
    tables.push_back(std::move(t));
  };

  switch (kind) {
    case SolverKind::min: run_branch(SolverKind::min); break;
    case SolverKind::ball: run_branch(SolverKind::ball); break;
    case SolverKind::mpa: run_branch(SolverKind::mpa); break;
    case SolverKind::dual:
      if (!(geo.ball_inf < 0.0 && geo.sphere_inf > 0.0))
        warnings.push_back("double critical point geometry not observed on the limit problem");
      run_branch(SolverKind::ball);
      if (!tables.empty()) tables.back().branch = "min";
      run_branch(SolverKind::mpa);
      break;
  }

  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  for (auto& t : tables) {
    t.elapsed_seconds = elapsed;
    t.warnings.insert(t.warnings.begin(), warnings.begin(), warnings.end());
  }
  return tables;
}

}  // namespace sgcp
