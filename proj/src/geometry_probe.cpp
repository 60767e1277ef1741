#include "sgcp/errors.hpp"
#include "sgcp/solvers.hpp"
#include "solver_common.hpp"

#include <cmath>
#include <sstream>

namespace sgcp {

namespace {

/// Direction i: all ones, minus all ones, then seeded Gaussian fields.
Eigen::VectorXd probe_direction(std::size_t dofs, int i, std::uint64_t seed) {
  const auto n = static_cast<Eigen::Index>(dofs);
  if (i == 0) return Eigen::VectorXd::Ones(n);
  if (i == 1) return -Eigen::VectorXd::Ones(n);
  auto rng = detail::stream(seed, static_cast<std::uint64_t>(i), 0x6E);
  return detail::gaussian_vector(dofs, rng);
}

RayPrediction small_ray(const ProblemInstance& problem) {
  RayPrediction p;
  const auto n = static_cast<Eigen::Index>(problem.dofs());
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  p.tau = problem.form().interior_energy(ones) - problem.interior_mass_a().sum();
  p.alpha = problem.bounds().eta * problem.interior_forcing().cwiseAbs().sum();
  if (p.tau > 0.0) {
    p.s = p.alpha / p.tau;
    p.predicted_bound = -p.alpha * p.alpha / (2.0 * p.tau);
    p.actual_value = problem.action_interior(p.s * ones);
    p.negative_dip = p.predicted_bound < 0.0 && p.actual_value < 0.0;
  }
  return p;
}

}  // namespace

std::vector<double> default_s_grid() {
  std::vector<double> s;
  for (double v = 1e-2; v <= 1e6 * (1.0 + 1e-12); v *= 1.1) s.push_back(v);
  return s;
}

double default_radius(const ProblemInstance& problem) {
  return problem.bounds().M1 / problem.form().embedding_constant();
}

GeometryReport geometry_probe(const ProblemInstance& problem, double r, int n_directions,
                              const std::vector<double>& s_grid, std::uint64_t seed) {
  if (!(r > 0.0)) throw PreconditionError("geometry_probe: radius must be positive");
  if (n_directions < 16) throw PreconditionError("geometry_probe: need at least 16 directions");
  const std::size_t dofs = problem.dofs();
  if (dofs == 0) throw PreconditionError("geometry_probe: the level has no interior vertices");

  GeometryReport rep;
  rep.r = r;
  rep.n_directions = n_directions;
  rep.sphere_inf = std::numeric_limits<double>::infinity();
  rep.ball_inf = 0.0;  // x = 0 belongs to the ball
  Eigen::VectorXd sphere_best, ball_best = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dofs));

  std::vector<Eigen::VectorXd> dirs;
  dirs.reserve(static_cast<std::size_t>(n_directions));
  for (int i = 0; i < n_directions; ++i) {
    Eigen::VectorXd d = probe_direction(dofs, i, seed);
    d /= problem.energy_norm_interior(d);
    dirs.push_back(d);

    const Eigen::VectorXd on_sphere = r * d;
    const double js = problem.action_interior(on_sphere);
    if (js < rep.sphere_inf) {
      rep.sphere_inf = js;
      sphere_best = on_sphere;
    }
    auto consider = [&](double radius) {
      const Eigen::VectorXd y = radius * d;
      const double v = problem.action_interior(y);
      if (v < rep.ball_inf) {
        rep.ball_inf = v;
        ball_best = y;
      }
    };
    for (int j = 0; j <= 20; ++j) consider(std::ldexp(r, -j));
    auto rng = detail::stream(seed, static_cast<std::uint64_t>(i), 0xBA);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int j = 0; j < 4; ++j) consider(r * (1.0 - unit(rng)));  // (0, 1]
  }
  rep.sphere_witness = problem.form().extend_dirichlet(sphere_best);
  rep.ball_witness = problem.form().extend_dirichlet(ball_best);

  for (const auto& d : dirs) {
    for (double s : s_grid) {
      if (s <= r) continue;
      const Eigen::VectorXd y = s * d;
      const double v = problem.action_interior(y);
      if (std::isfinite(v) && v < 0.0) {
        rep.x_star = problem.form().extend_dirichlet(y);
        rep.x_star_value = v;
        rep.x_star_norm = s;
        break;
      }
    }
    if (rep.x_star) break;
  }

  rep.pmpt3 = rep.x_star.has_value();
  rep.pmpt2 = rep.sphere_inf > std::max(0.0, rep.x_star ? rep.x_star_value : 0.0);
  rep.dcpt2 = rep.ball_inf < 0.0 && 0.0 < rep.sphere_inf;
  rep.small_ray = small_ray(problem);
  return rep;
}

DoubleCriticalResult double_critical_points(const ProblemInstance& problem, double r,
                                            const std::optional<VertexField>& x_star, const SolverOptions& opts,
                                            int n_directions) {
  opts.validate();
  DoubleCriticalResult out;
  out.geometry = geometry_probe(problem, r, n_directions, default_s_grid(), opts.seed);
  const GeometryReport& geo = out.geometry;

  std::optional<VertexField> end = x_star ? x_star : geo.x_star;
  std::vector<std::string> missing;
  if (!(geo.ball_inf < 0.0)) missing.push_back("sampled inf of J over the ball is not negative");
  if (!(geo.sphere_inf > 0.0)) missing.push_back("sampled inf of J over the sphere is not positive");
  if (!end) {
    missing.push_back("no x_star with ||x_star|| > r and J(x_star) < 0 found");
  } else {
    const double norm = std::sqrt(problem.form().energy(*end));
    if (!(norm > r)) missing.push_back("x_star lies inside the ball");
    if (!(problem.action(*end) <= 0.0)) missing.push_back("J(x_star) is positive");
  }
  if (!missing.empty()) {
    std::ostringstream msg;
    msg << "double critical point geometry not satisfied at r = " << r << ":";
    for (const auto& m : missing) msg << " " << m << ";";
    throw PreconditionError(msg.str());
  }

  out.minimizer = minimize_in_ball(problem, r, opts);
  out.saddle = mountain_pass(problem, *end, opts);
  out.distance = std::sqrt(problem.form().energy(out.minimizer.point - out.saddle.point));
  out.distinct = out.distance > 1e-3;
  out.nontrivial = std::sqrt(problem.form().energy(out.minimizer.point)) > 1e-6 &&
                   std::sqrt(problem.form().energy(out.saddle.point)) > 1e-6;
  return out;
}

}  // namespace sgcp
