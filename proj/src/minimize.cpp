#include "sgcp/errors.hpp"
#include "sgcp/solvers.hpp"
#include "solver_common.hpp"

#include <cmath>
#include <string>

namespace sgcp {

using detail::evaluate;
using detail::PointEval;

void SolverOptions::validate() const {
  std::vector<std::string> bad;
  auto finite_pos = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!finite_pos(grad_tol)) bad.push_back("grad_tol must be positive");
  if (max_iters < 1) bad.push_back("max_iters must be >= 1");
  if (!finite_pos(initial_step)) bad.push_back("initial_step must be positive");
  if (!finite_pos(max_step) || max_step < initial_step) bad.push_back("max_step must be >= initial_step");
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) bad.push_back("backtrack_factor must lie in (0, 1)");
  if (!(sufficient_decrease > 0.0 && sufficient_decrease < 1.0))
    bad.push_back("sufficient_decrease must lie in (0, 1)");
  if (path_points < 3) bad.push_back("path_points must be >= 3");
  if (!finite_pos(climb_step)) bad.push_back("climb_step must be positive");
  if (!(newton_switch >= 0.0) || !std::isfinite(newton_switch)) bad.push_back("newton_switch must be >= 0");
  if (!std::isfinite(unbounded_floor)) bad.push_back("unbounded_floor must be finite");
  if (!bad.empty()) throw ConfigError(bad);
}

const char* to_string(PointKind k) {
  return k == PointKind::minimizer ? "minimizer" : "mountain_pass";
}

const char* to_string(SolverStatus s) {
  switch (s) {
    case SolverStatus::converged: return "converged";
    case SolverStatus::max_iterations: return "max_iterations";
    case SolverStatus::unbounded_below: return "unbounded_below";
    case SolverStatus::boundary_minimizer: return "boundary_minimizer";
    case SolverStatus::path_collapse: return "path_collapse";
    case SolverStatus::line_search_failed: return "line_search_failed";
  }
  return "unknown";
}

bool coercivity_suspect(const ProblemInstance& problem, std::uint64_t seed) {
  const std::size_t n = problem.dofs();
  if (n == 0) return false;
  constexpr int kRays = 8;
  for (int k = 0; k < kRays; ++k) {
    Eigen::VectorXd d;
    if (k == 0) {
      d = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
    } else {
      auto rng = detail::stream(seed, static_cast<std::uint64_t>(k), 0xC0);
      d = detail::gaussian_vector(n, rng);
    }
    d /= problem.energy_norm_interior(d);
    for (double s : {1e1, 1e2, 1e3}) {
      const double v = problem.action_interior(s * d);
      if (!std::isfinite(v) || v < 0.0) return true;
    }
  }
  return false;
}

CriticalPointResult minimize(const ProblemInstance& problem, const SolverOptions& opts, const VertexField& start) {
  opts.validate();
  require_same_graph(problem.graph(), start.graph(), "minimize start");
  if (!start.is_dirichlet()) throw PreconditionError("minimize: start field must vanish on V_0");

  std::vector<std::string> warnings;
  if (coercivity_suspect(problem, opts.seed))
    warnings.push_back("action looks unbounded below along sampled rays; result is at best a local minimizer");

  Eigen::VectorXd x = problem.form().restrict_interior(start);
  if (x.size() == 0) {
    auto r = detail::finish(problem, x, PointKind::minimizer, SolverStatus::converged, 0, {}, opts);
    r.warnings = warnings;
    return r;
  }

  PointEval e = evaluate(problem, x);
  double value = e.value;
  double t = opts.initial_step;
  std::vector<TraceRow> trace;
  std::vector<Eigen::VectorXd> iterates;
  SolverStatus status = SolverStatus::max_iterations;
  int it = 0;
  for (; it < opts.max_iters; ++it) {
    trace.push_back({it, value, e.grad_norm});
    if (opts.keep_iterates) iterates.push_back(x);
    if (e.grad_norm <= opts.grad_tol) {
      status = SolverStatus::converged;
      break;
    }
    if (value < opts.unbounded_floor || !std::isfinite(value)) {
      status = SolverStatus::unbounded_below;
      break;
    }
    const double slope = e.grad_norm * e.grad_norm;
    bool accepted = false;
    Eigen::VectorXd step;
    double change = 0.0;
    while (t >= 1e-16) {
      step = -t * e.riesz;
      change = problem.action_change(x, step);
      if (std::isfinite(change) && change <= -opts.sufficient_decrease * t * slope) {
        accepted = true;
        break;
      }
      t *= opts.backtrack_factor;
    }
    if (!accepted) {
      status = SolverStatus::line_search_failed;
      break;
    }
    x += step;
    value += change;
    e = evaluate(problem, x);
    t = std::min(t / opts.backtrack_factor, opts.max_step);
  }

  auto result = detail::finish(problem, x, PointKind::minimizer, status, it, std::move(trace), opts);
  result.iterates = std::move(iterates);
  if (status == SolverStatus::unbounded_below)
    warnings.push_back("action fell below the floor; the functional is not bounded from below");
  result.warnings.insert(result.warnings.begin(), warnings.begin(), warnings.end());
  return result;
}

CriticalPointResult minimize_in_ball(const ProblemInstance& problem, double r, const SolverOptions& opts) {
  opts.validate();
  if (!(r > 0.0)) throw PreconditionError("minimize_in_ball: radius must be positive");
  const std::size_t n = problem.dofs();
  if (n == 0) return detail::finish(problem, Eigen::VectorXd(), PointKind::minimizer, SolverStatus::converged, 0, {}, opts);

  // Start from the lowest sampled point of the ball (or 0).
  const GeometryReport probe = geometry_probe(problem, r, 64, {}, opts.seed);
  Eigen::VectorXd x = probe.ball_inf < 0.0 ? problem.form().restrict_interior(probe.ball_witness)
                                           : Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));

  auto project = [&](Eigen::VectorXd y) {
    const double norm = problem.energy_norm_interior(y);
    if (norm > r) y *= (r / norm) * (1.0 - 1e-15);
    return y;
  };

  PointEval e = evaluate(problem, x);
  double value = e.value;
  double t = opts.initial_step;
  std::vector<TraceRow> trace;
  std::vector<Eigen::VectorXd> iterates;
  SolverStatus status = SolverStatus::max_iterations;
  int on_sphere = 0;
  int it = 0;
  for (; it < opts.max_iters; ++it) {
    trace.push_back({it, value, e.grad_norm});
    if (opts.keep_iterates) iterates.push_back(x);
    if (e.grad_norm <= opts.grad_tol) {
      status = SolverStatus::converged;
      break;
    }
    bool accepted = false;
    Eigen::VectorXd next, step;
    double change = 0.0;
    while (t >= 1e-16) {
      next = project(x - t * e.riesz);
      step = next - x;
      change = problem.action_change(x, step);
      const double moved = problem.form().interior_energy(step);
      if (std::isfinite(change) && change <= -opts.sufficient_decrease / t * moved) {
        accepted = true;
        break;
      }
      t *= opts.backtrack_factor;
    }
    if (!accepted) {
      status = SolverStatus::line_search_failed;
      break;
    }
    const double projected_gradient = problem.energy_norm_interior(step) / t;
    x = next;
    value += change;
    e = evaluate(problem, x);
    on_sphere = problem.energy_norm_interior(x) >= r * (1.0 - 1e-9) ? on_sphere + 1 : 0;
    if (on_sphere >= 10 && projected_gradient <= opts.grad_tol) {
      ++it;
      break;
    }
    t = std::min(t / opts.backtrack_factor, opts.max_step);
  }

  auto result = detail::finish(problem, x, PointKind::minimizer, status, it, std::move(trace), opts);
  result.iterates = std::move(iterates);
  if (on_sphere >= 10) {
    result.status = SolverStatus::boundary_minimizer;
    result.warnings.push_back("boundary minimizer: iterates stuck to the sphere, CPT-on-U hypothesis violated");
  }
  return result;
}

}  // namespace sgcp
