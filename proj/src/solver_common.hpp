#pragma once

#include "sgcp/solvers.hpp"

#include <cstdint>
#include <random>

namespace sgcp::detail {

struct PointEval {
  double value = 0.0;
  Eigen::VectorXd residual;
  Eigen::VectorXd riesz;
  double grad_norm = 0.0;
};

inline PointEval evaluate(const ProblemInstance& problem, const Eigen::VectorXd& x) {
  PointEval e;
  e.value = problem.action_interior(x);
  e.residual = problem.residual_interior(x);
  e.riesz = problem.riesz_interior(e.residual);
  e.grad_norm = std::sqrt(std::max(0.0, e.residual.dot(e.riesz)));
  return e;
}

inline std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index, std::uint64_t salt = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    static_cast<std::uint32_t>(salt)};
  return std::mt19937_64(seq);
}

/// Standard normal interior vector drawn from the given stream.
inline Eigen::VectorXd gaussian_vector(std::size_t dofs, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(static_cast<Eigen::Index>(dofs));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal(rng);
  return v;
}

/// Packs an interior solution into a result with value and gradient
/// recomputed through the public field API. A converged status whose
/// recomputed norm misses the tolerance is downgraded.
inline CriticalPointResult finish(const ProblemInstance& problem, const Eigen::VectorXd& x, PointKind kind,
                                  SolverStatus status, int iterations, std::vector<TraceRow> trace,
                                  const SolverOptions& opts) {
  CriticalPointResult out;
  out.point = problem.form().extend_dirichlet(x);
  out.value = problem.action(out.point);
  out.dual_grad_norm = problem.gradient(out.point).dual_norm;
  out.kind = kind;
  out.status = status;
  out.iterations = iterations;
  out.trace = std::move(trace);
  if (status == SolverStatus::converged && !(out.dual_grad_norm <= opts.grad_tol)) {
    out.status = SolverStatus::max_iterations;
    out.warnings.push_back("recomputed gradient norm exceeds grad_tol");
  }
  return out;
}

}  // namespace sgcp::detail
