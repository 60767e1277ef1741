#include "sgcp/errors.hpp"
#include "sgcp/solvers.hpp"
#include "solver_common.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace sgcp {

OracleBox OracleBox::uniform(std::size_t dofs, double lo, double hi) {
  return OracleBox{std::vector<double>(dofs, lo), std::vector<double>(dofs, hi)};
}

namespace {

double dual_norm(const Eigen::MatrixXd& k_inv, const Eigen::VectorXd& r) {
  return std::sqrt(std::max(0.0, r.dot(k_inv * r)));
}

/// Damped Newton with a central-difference Jacobian of the residual.
bool polish(const ProblemInstance& problem, const Eigen::MatrixXd& k_inv, Eigen::VectorXd& x,
            const OracleOptions& opts) {
  const Eigen::Index d = x.size();
  Eigen::VectorXd r = problem.residual_interior(x);
  double g = dual_norm(k_inv, r);
  for (int it = 0; it < opts.polish_iters && g > opts.polish_tol; ++it) {
    Eigen::MatrixXd jac(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
      const double h = 1e-7 * std::max(1.0, std::abs(x[j]));
      Eigen::VectorXd xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      jac.col(j) = (problem.residual_interior(xp) - problem.residual_interior(xm)) / (2.0 * h);
    }
    const Eigen::VectorXd step = jac.fullPivLu().solve(-r);
    if (!step.allFinite()) return false;
    double lambda = 1.0;
    bool accepted = false;
    while (lambda >= 1.0 / 1024) {
      const Eigen::VectorXd y = x + lambda * step;
      const Eigen::VectorXd ry = problem.residual_interior(y);
      const double gy = dual_norm(k_inv, ry);
      if (gy < g) {
        x = y;
        r = ry;
        g = gy;
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) break;
  }
  return g <= opts.polish_tol;
}

}  // namespace

std::vector<CriticalPointResult> brute_force_critical_points(const ProblemInstance& problem, const OracleBox& box,
                                                             int resolution, const OracleOptions& opts) {
  const std::size_t d = problem.dofs();
  if (d == 0) throw PreconditionError("oracle: the level has no interior vertices");
  if (d > 4) throw ResourceLimitError("oracle: at most 4 interior DOFs are supported, got " + std::to_string(d));
  if (box.lo.size() != d || box.hi.size() != d) throw PreconditionError("oracle: box dimension mismatch");
  for (std::size_t i = 0; i < d; ++i)
    if (!(box.lo[i] < box.hi[i])) throw PreconditionError("oracle: box needs lo < hi in every coordinate");
  if (resolution < 2) throw PreconditionError("oracle: resolution must be >= 2");
  const double total_d = std::pow(static_cast<double>(resolution), static_cast<double>(d));
  if (total_d > 1e8) throw ResourceLimitError("oracle: grid exceeds 1e8 points");
  const auto total = static_cast<std::size_t>(total_d);

  const Eigen::MatrixXd k_inv = Eigen::MatrixXd(problem.form().interior_stiffness()).inverse();
  std::vector<double> step(d);
  for (std::size_t i = 0; i < d; ++i) step[i] = (box.hi[i] - box.lo[i]) / (resolution - 1);

  auto decode = [&](std::size_t flat, std::vector<int>& idx) {
    for (std::size_t i = 0; i < d; ++i) {
      idx[i] = static_cast<int>(flat % static_cast<std::size_t>(resolution));
      flat /= static_cast<std::size_t>(resolution);
    }
  };
  auto point = [&](const std::vector<int>& idx) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) x[static_cast<Eigen::Index>(i)] = box.lo[i] + step[i] * idx[i];
    return x;
  };

  std::vector<float> norms(total);
  std::vector<int> idx(d);
  for (std::size_t f = 0; f < total; ++f) {
    decode(f, idx);
    norms[f] = static_cast<float>(dual_norm(k_inv, problem.residual_interior(point(idx))));
  }

  // Local minima of the grid norm over the 3^d − 1 neighbours.
  std::size_t n_neighbours = 1;
  for (std::size_t i = 0; i < d; ++i) n_neighbours *= 3;
  std::vector<Eigen::VectorXd> seeds;
  std::vector<int> nb(d);
  for (std::size_t f = 0; f < total; ++f) {
    if (!(norms[f] <= opts.threshold)) continue;
    decode(f, idx);
    bool is_min = true;
    for (std::size_t c = 0; c < n_neighbours && is_min; ++c) {
      std::size_t code = c, flat = 0, mul = 1;
      bool inside = true, self = true;
      for (std::size_t i = 0; i < d; ++i) {
        const int off = static_cast<int>(code % 3) - 1;
        code /= 3;
        if (off != 0) self = false;
        nb[i] = idx[i] + off;
        if (nb[i] < 0 || nb[i] >= resolution) inside = false;
        flat += static_cast<std::size_t>(nb[i]) * mul;
        mul *= static_cast<std::size_t>(resolution);
      }
      if (self || !inside) continue;
      if (norms[flat] < norms[f]) is_min = false;
    }
    if (is_min) seeds.push_back(point(idx));
  }

  SolverOptions fin;
  fin.grad_tol = opts.polish_tol;
  std::vector<CriticalPointResult> found;
  std::vector<Eigen::VectorXd> kept;
  for (Eigen::VectorXd x : seeds) {
    if (!polish(problem, k_inv, x, opts)) continue;
    bool in_box = true;
    for (std::size_t i = 0; i < d; ++i) {
      const double v = x[static_cast<Eigen::Index>(i)];
      if (v < box.lo[i] - step[i] || v > box.hi[i] + step[i]) in_box = false;
    }
    if (!in_box) continue;
    bool duplicate = false;
    for (const auto& y : kept)
      if (problem.energy_norm_interior(x - y) <= opts.dedup_distance) duplicate = true;
    if (duplicate) continue;
    kept.push_back(x);

    const Eigen::MatrixXd hess(problem.hessian_interior(x));
    const double lowest = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(hess).eigenvalues().minCoeff();
    const PointKind kind = lowest > 0.0 ? PointKind::minimizer : PointKind::mountain_pass;
    found.push_back(detail::finish(problem, x, kind, SolverStatus::converged, 0, {}, fin));
  }
  std::sort(found.begin(), found.end(),
            [](const CriticalPointResult& a, const CriticalPointResult& b) { return a.value < b.value; });
  return found;
}

}  // namespace sgcp
