#pragma once

// Sequences of problems with converging data (g_n -> g_0, u_n -> u_0), sampled
// estimates of how fast their actions converge, numerical checks of the
// mountain-pass / double-critical-point hypotheses along the sequence, and the
// experiment that follows critical points x_n as n grows.
//
// Index n is the sequence index; the gasket level is fixed per sequence.
// Everything here is a finite-sample estimate, not a certificate.

#include "sgcp/solvers.hpp"

#include <string>
#include <vector>

namespace sgcp {

enum class ScheduleKind {
  g_scale,   ///< g_n = g_0 (1 + delta/n), u_n = u_0
  u_drift,   ///< g_n = g_0, u_n = u_0 + (delta/n) w
  combined,  ///< both of the above
};

const char* to_string(ScheduleKind k);
/// Throws ConfigError on an unknown name.
ScheduleKind schedule_from_string(const std::string& name);

struct Schedule {
  ScheduleKind kind = ScheduleKind::combined;
  double delta = 1.0;
  VertexField drift;  ///< w; empty means zero drift
};

class ProblemSequence {
 public:
  ProblemSequence(ProblemInstance base, Schedule schedule, int n_max);

  const ProblemInstance& base() const noexcept { return base_; }
  const Schedule& schedule() const noexcept { return schedule_; }
  int n_max() const noexcept { return n_max_; }

  VertexField g(int n) const;
  VertexField u(int n) const;
  /// Instance n, built on demand; n = 0 is the base problem.
  ProblemInstance instance(int n) const;

 private:
  ProblemInstance base_;
  Schedule schedule_;
  int n_max_;
};

/// Validates every index up front: throws DomainError naming the first n
/// with |u_n| > M or g_n <= 0 somewhere.
ProblemSequence build_sequence(const ProblemInstance& base, const Schedule& schedule, int n_max);

struct ConvergenceEstimate {
  std::vector<double> value_sup;       ///< index n-1: sup over the sample of |Phi_n - Phi_0|
  std::vector<double> derivative_sup;  ///< index n-1: sup of the dual norm of Phi_n' - Phi_0'
  bool value_monotone = false;         ///< nonincreasing in n
  bool derivative_monotone = false;
  double rate_constant = 0.0;          ///< least-squares C in value_sup ~ C/n
  bool rate_within_factor_two = false; ///< C/2 <= n value_sup[n] <= 2C for all n
  double derivative_rate_constant = 0.0;
  std::size_t sample_size = 0;
  std::string sample_description;
};

ConvergenceEstimate uniform_convergence_estimate(const ProblemSequence& seq, const std::vector<VertexField>& sample,
                                                 const std::string& description = "");

/// count Dirichlet fields with energy norm uniform in (0, radius], seeded
/// Gaussian directions.
std::vector<VertexField> ball_sample(const ProblemInstance& problem, double radius, int count, std::uint64_t seed);

struct HypothesisEntry {
  std::string name;
  std::string quantity;  ///< what was sampled
  double value = 0.0;
  double bound = 0.0;
  bool pass = false;
  std::vector<std::string> witnesses;
  std::string sample;
};

struct HypothesisReport {
  std::vector<HypothesisEntry> entries;
  const HypothesisEntry& at(const std::string& name) const;
};

struct HypothesisSampling {
  int n_directions = 64;
  double lower_bound = 1e6;   ///< R in -R < inf over the ball
  double bb_radius = 0.0;     ///< radius for the bounded-below test; 0 means 10 ||x_star||
  std::uint64_t seed = 0;
};

/// Entries BB, InfU, PMPT1, PMPT2, PMPT3, DCPT1, DCPT2, DCPT3 evaluated for
/// n = 0..n_max. Requires r > 0 and ||x_star|| > r.
HypothesisReport hypothesis_check(const ProblemSequence& seq, double r, const VertexField& x_star,
                                  const HypothesisSampling& sampling = {});

enum class SolverKind { min, ball, mpa, dual };

const char* to_string(SolverKind k);
/// Accepts min, ball, mpa, double. Throws ConfigError otherwise.
SolverKind solver_from_string(const std::string& name);

struct ExperimentOptions {
  SolverOptions solver;
  double r = 0.0;                    ///< ball radius; 0 means default_radius
  std::optional<VertexField> x_star; ///< pass endpoint; probed when absent
  double final_tol = 1e-4;           ///< bound on the last row's distance to the limit point
  int n_directions = 64;
  int random_samples = 32;           ///< ball fields added to the estimate sample
  int max_trace_samples = 200;       ///< iterates kept per solve for the sample
};

struct ConvergenceRow {
  int n = 0;                    ///< 0 is the limit row
  double limit_value = 0.0;     ///< Phi_0(x_n)
  double value_gap = 0.0;       ///< |Phi_0(x_n) - Phi_0(x_0)|
  double distance = 0.0;        ///< ||x_n - x_0||
  double limit_grad_norm = 0.0; ///< dual norm of Phi_0'(x_n)
  double own_grad_norm = 0.0;   ///< dual norm of Phi_n'(x_n)
  double value_sup = 0.0;
  double derivative_sup = 0.0;
  std::string status;
  int iterations = 0;
};

struct ConvergenceTable {
  std::string solver;
  std::string branch;  ///< min or mpa for the double solver, else the solver name
  std::vector<ConvergenceRow> rows;
  std::vector<VertexField> points;  ///< x_0, x_1, ..., x_nmax
  ConvergenceEstimate estimate;
  bool limit_verified = false;           ///< limit residual <= grad_tol, recomputed here
  bool distance_decreasing = false;      ///< strictly decreasing for n > 4
  bool final_within_tol = false;
  bool local_only = false;               ///< nonconvex: minimizers are local, not global
  double elapsed_seconds = 0.0;
  std::vector<std::string> warnings;
};

/// Warm-start chain over n = 1..n_max plus an independent cold solve of the
/// limit problem. The double solver yields two tables (min and mpa branch).
/// Per-index failures land in the rows; the experiment keeps going.
std::vector<ConvergenceTable> run_convergence_experiment(const ProblemSequence& seq, SolverKind kind,
                                                         const ExperimentOptions& opts);

}  // namespace sgcp
