#include "sgcp/errors.hpp"
#include "sgcp/solvers.hpp"
#include "solver_common.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>

namespace sgcp {

namespace {

using detail::evaluate;
using detail::PointEval;

/// Damped Newton on the residual; the damping is driven by the dual norm.
/// Returns the polished point, or nullopt if no progress could be made.
std::optional<Eigen::VectorXd> newton_polish(const ProblemInstance& problem, Eigen::VectorXd x,
                                             const SolverOptions& opts, int max_iters = 50) {
  PointEval e = evaluate(problem, x);
  for (int it = 0; it < max_iters; ++it) {
    if (e.grad_norm <= opts.grad_tol) return x;
    Eigen::SparseLU<SparseMatrix> lu;
    lu.compute(problem.hessian_interior(x));
    if (lu.info() != Eigen::Success) return std::nullopt;
    const Eigen::VectorXd d = lu.solve(-e.residual);
    if (lu.info() != Eigen::Success || !d.allFinite()) return std::nullopt;
    double lambda = 1.0;
    bool accepted = false;
    while (lambda >= 1.0 / 1024) {
      const Eigen::VectorXd y = x + lambda * d;
      PointEval ey = evaluate(problem, y);
      if (ey.grad_norm < (1.0 - 1e-4 * lambda) * e.grad_norm) {
        x = y;
        e = std::move(ey);
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) return e.grad_norm <= opts.grad_tol ? std::optional<Eigen::VectorXd>(x) : std::nullopt;
  }
  return e.grad_norm <= opts.grad_tol ? std::optional<Eigen::VectorXd>(x) : std::nullopt;
}

/// Point at arc length s along the polyline with cumulative lengths acc.
Eigen::VectorXd point_at(const std::vector<Eigen::VectorXd>& path, const std::vector<double>& acc, double s) {
  if (s <= 0.0) return path.front();
  if (s >= acc.back()) return path.back();
  const auto it = std::upper_bound(acc.begin(), acc.end(), s);
  const std::size_t j = static_cast<std::size_t>(it - acc.begin());  // acc[j-1] <= s < acc[j]
  const double seg = acc[j] - acc[j - 1];
  const double t = seg > 0.0 ? (s - acc[j - 1]) / seg : 0.0;
  return (1.0 - t) * path[j - 1] + t * path[j];
}

/// Re-spaces the nodes evenly in energy norm with node k kept in place.
void redistribute(const ProblemInstance& problem, std::vector<Eigen::VectorXd>& path, std::size_t k) {
  const std::size_t P = path.size();
  std::vector<double> acc(P, 0.0);
  for (std::size_t j = 1; j < P; ++j) acc[j] = acc[j - 1] + problem.energy_norm_interior(path[j] - path[j - 1]);
  const double L = acc.back();
  if (!(L > 0.0)) return;
  const double sk = acc[k];
  auto target = static_cast<std::size_t>(std::lround(sk / L * static_cast<double>(P - 1)));
  target = std::clamp<std::size_t>(target, 1, P - 2);

  std::vector<Eigen::VectorXd> next(P);
  next.front() = path.front();
  next.back() = path.back();
  next[target] = path[k];
  for (std::size_t j = 1; j < target; ++j)
    next[j] = point_at(path, acc, sk * static_cast<double>(j) / static_cast<double>(target));
  for (std::size_t j = target + 1; j + 1 < P; ++j)
    next[j] = point_at(path, acc,
                       sk + (L - sk) * static_cast<double>(j - target) / static_cast<double>(P - 1 - target));
  path = std::move(next);
}

}  // namespace

CriticalPointResult mountain_pass(const ProblemInstance& problem, const VertexField& x_star, const SolverOptions& opts,
                                  const std::vector<Eigen::VectorXd>* initial_path) {
  opts.validate();
  require_same_graph(problem.graph(), x_star.graph(), "mountain_pass endpoint");
  if (!x_star.is_dirichlet()) throw PreconditionError("mountain_pass: x_star must vanish on V_0");
  const std::size_t n = problem.dofs();
  const auto P = static_cast<std::size_t>(opts.path_points);
  const Eigen::VectorXd end = problem.form().restrict_interior(x_star);
  if (n == 0)
    return detail::finish(problem, end, PointKind::mountain_pass, SolverStatus::path_collapse, 0, {}, opts);

  std::vector<std::string> warnings;
  const double end_value = problem.action_interior(end);
  if (!(end_value < 0.0)) warnings.push_back("J(x_star) is not below J(0); the pass geometry may be missing");

  std::vector<Eigen::VectorXd> path;
  const bool warm = initial_path && initial_path->size() >= 3 &&
                    std::all_of(initial_path->begin(), initial_path->end(),
                                [n](const Eigen::VectorXd& v) { return static_cast<std::size_t>(v.size()) == n; });
  if (warm) {
    path = *initial_path;
    path.front().setZero();
    path.back() = end;
    if (path.size() != P) {
      // Resample the supplied path to P nodes.
      std::vector<double> acc(path.size(), 0.0);
      for (std::size_t j = 1; j < path.size(); ++j)
        acc[j] = acc[j - 1] + problem.energy_norm_interior(path[j] - path[j - 1]);
      std::vector<Eigen::VectorXd> resampled(P);
      for (std::size_t j = 0; j < P; ++j)
        resampled[j] = point_at(path, acc, acc.back() * static_cast<double>(j) / static_cast<double>(P - 1));
      path = std::move(resampled);
    }
  } else {
    path.resize(P);
    for (std::size_t j = 0; j < P; ++j) path[j] = (static_cast<double>(j) / static_cast<double>(P - 1)) * end;
  }

  std::vector<TraceRow> trace;
  std::vector<Eigen::VectorXd> iterates;
  SolverStatus status = SolverStatus::max_iterations;
  Eigen::VectorXd best = path[P / 2];
  const double t = opts.climb_step;
  int newton_cooldown = 0;
  int it = 0;
  std::vector<double> values(P);
  for (; it < opts.max_iters; ++it) {
    for (std::size_t j = 0; j < P; ++j) values[j] = problem.action_interior(path[j]);
    const auto k = static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
    if (k == 0 || k == P - 1) {
      status = SolverStatus::path_collapse;
      best = path[k];
      warnings.push_back("path maximum moved to an endpoint; no mountain pass between 0 and x_star");
      break;
    }
    best = path[k];
    const PointEval e = evaluate(problem, path[k]);
    trace.push_back({it, e.value, e.grad_norm});
    if (opts.keep_iterates) iterates.push_back(path[k]);
    if (e.grad_norm <= opts.grad_tol) {
      status = SolverStatus::converged;
      break;
    }

    if (e.grad_norm <= opts.newton_switch && newton_cooldown == 0) {
      auto polished = newton_polish(problem, path[k], opts);
      // The polish must stay at the pass level, not fall back to 0 or x_star.
      if (polished && problem.action_interior(*polished) > std::max(0.0, end_value) &&
          problem.energy_norm_interior(*polished - path[k]) <= 0.5 * problem.energy_norm_interior(path[k])) {
        best = *polished;
        path[k] = *polished;
        ++it;
        trace.push_back({it, problem.action_interior(best), evaluate(problem, best).grad_norm});
        status = SolverStatus::converged;
        break;
      }
      newton_cooldown = 50;
    }
    if (newton_cooldown > 0) --newton_cooldown;

    // The highest node descends across the path with the fixed step t and
    // climbs along the tangent by a 1-D Newton step on J, clamped to the node
    // spacing. W(p, tau) = r . tau for the Riesz representative p of r.
    Eigen::VectorXd tangent = path[k + 1] - path[k - 1];
    const double tn = problem.energy_norm_interior(tangent);
    if (tn > 0.0) {
      tangent /= tn;
      const double slope = e.residual.dot(tangent);
      const double spacing = 0.5 * tn;
      const double curv = tangent.dot(problem.hessian_interior(path[k]) * tangent);
      const double s = std::clamp(curv < 0.0 ? -slope / curv : std::copysign(spacing, slope), -spacing, spacing);
      path[k] += s * tangent - t * (e.riesz - slope * tangent);
    } else {
      path[k] -= t * e.riesz;
    }
    redistribute(problem, path, k);
  }

  auto result = detail::finish(problem, best, PointKind::mountain_pass, status, it, std::move(trace), opts);
  result.iterates = std::move(iterates);
  result.path = std::move(path);
  result.warnings.insert(result.warnings.begin(), warnings.begin(), warnings.end());
  return result;
}

}  // namespace sgcp
