#pragma once

// Critical-point finders for the discrete action functional: descent to a
// minimizer (globally or in a ball), mountain-pass saddle search by path
// deformation, probes of the mountain-pass / double-critical-point geometry,
// a Palais–Smale diagnostic and an exhaustive grid oracle for tiny problems.

#include "sgcp/problem.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace sgcp {

struct SolverOptions {
  double grad_tol = 1e-8;          ///< stop when the dual gradient norm drops below this
  int max_iters = 20000;
  double initial_step = 1.0;       ///< first trial step along the Riesz direction
  double max_step = 4.0;
  double backtrack_factor = 0.5;
  double sufficient_decrease = 1e-4;
  int path_points = 41;            ///< mountain-pass path nodes, endpoints included
  double climb_step = 0.5;         ///< step of the climbing node on the path
  double newton_switch = 1e-3;     ///< dual norm below which saddle nodes get a Newton polish
  double unbounded_floor = -1e12;  ///< action below this is reported as unbounded
  std::uint64_t seed = 0;
  bool keep_iterates = false;      ///< store interior iterates (for diagnostics / sampling)

  /// Throws ConfigError listing every invalid value.
  void validate() const;
};

enum class PointKind { minimizer, mountain_pass };
enum class SolverStatus {
  converged,
  max_iterations,
  unbounded_below,
  boundary_minimizer,
  path_collapse,
  line_search_failed,
};

const char* to_string(PointKind k);
const char* to_string(SolverStatus s);

struct TraceRow {
  int iter = 0;
  double value = 0.0;
  double grad_norm = 0.0;
};

struct CriticalPointResult {
  VertexField point;
  double value = 0.0;            ///< action(point), recomputed after the solve
  double dual_grad_norm = 0.0;   ///< recomputed after the solve
  int iterations = 0;
  PointKind kind = PointKind::minimizer;
  SolverStatus status = SolverStatus::max_iterations;
  std::vector<TraceRow> trace;
  std::vector<Eigen::VectorXd> iterates;  ///< interior vectors, when requested
  std::vector<Eigen::VectorXd> path;      ///< final mountain-pass path (interior vectors)
  std::vector<std::string> warnings;

  bool converged() const noexcept { return status == SolverStatus::converged; }
};

/// Descent with backtracking along the energy-preconditioned gradient.
CriticalPointResult minimize(const ProblemInstance& problem, const SolverOptions& opts, const VertexField& start);

/// Projected descent onto the energy ball ||x|| <= r, started from the best
/// point of a seeded sample of the ball. A minimizer that stays on the sphere
/// is flagged SolverStatus::boundary_minimizer.
CriticalPointResult minimize_in_ball(const ProblemInstance& problem, double r, const SolverOptions& opts);

/// Saddle search over paths from 0 to x_star. Each iteration moves every inner
/// node down across the path, lets the highest node also climb along it, and
/// re-spaces the nodes evenly in energy norm with the highest one pinned.
/// A Newton polish finishes once the dual norm is below opts.newton_switch.
CriticalPointResult mountain_pass(const ProblemInstance& problem, const VertexField& x_star,
                                  const SolverOptions& opts,
                                  const std::vector<Eigen::VectorXd>* initial_path = nullptr);

struct RayPrediction {
  double tau = 0.0;              ///< ||x||² − ∫ a x² dμ for the all-ones interior field x
  double alpha = 0.0;            ///< eta ∫ |x| g h(u) dμ
  double s = 0.0;                ///< alpha / tau, minimizer of ½ s² tau − alpha s
  double predicted_bound = 0.0;  ///< ½ s² tau − alpha s = −alpha² / (2 tau)
  double actual_value = 0.0;     ///< J(s x)
  bool negative_dip = false;     ///< predicted_bound < 0 and actual_value < 0
};

struct GeometryReport {
  double r = 0.0;
  int n_directions = 0;
  double sphere_inf = 0.0;
  VertexField sphere_witness;
  double ball_inf = 0.0;
  VertexField ball_witness;
  std::optional<VertexField> x_star;
  double x_star_value = 0.0;
  double x_star_norm = 0.0;
  bool pmpt2 = false;  ///< sphere_inf > max(J(0), J(x_star))
  bool pmpt3 = false;  ///< x_star found with ||x_star|| > r and J(x_star) < 0
  bool dcpt2 = false;  ///< ball_inf < 0 < sphere_inf
  RayPrediction small_ray;
};

/// Default radial scan for x_star: geometric from 1e-2 to 1e6, ratio 1.1.
std::vector<double> default_s_grid();

/// Default ball radius M1 / (2N+3): inside it |x| <= M1 by the embedding bound.
double default_radius(const ProblemInstance& problem);

/// Samples the sphere and ball of radius r and scans rays s x for x_star.
/// Directions are generated per index from the seed, so the first n
/// directions are identical for any larger n_directions.
GeometryReport geometry_probe(const ProblemInstance& problem, double r, int n_directions,
                              const std::vector<double>& s_grid, std::uint64_t seed = 0);

struct DoubleCriticalResult {
  CriticalPointResult minimizer;
  CriticalPointResult saddle;
  GeometryReport geometry;
  double distance = 0.0;  ///< energy-norm distance between the two points
  bool distinct = false;  ///< distance > 1e-3
  bool nontrivial = false;  ///< both norms > 1e-6
};

/// Ball minimizer plus mountain-pass point. Throws PreconditionError when the
/// probed geometry does not satisfy ball_inf < 0 < sphere_inf with an x_star
/// outside the ball.
DoubleCriticalResult double_critical_points(const ProblemInstance& problem, double r,
                                            const std::optional<VertexField>& x_star,
                                            const SolverOptions& opts, int n_directions = 64);

struct PalaisSmaleReport {
  double sup_abs_value = 0.0;
  std::vector<double> grad_norms;
  std::vector<double> norms;
  bool grad_norms_decreasing_tail = false;  ///< nonincreasing over the last quarter
  double radius_bound = 0.0;  ///< largest ||x|| with c||x||² − ||x||/(2+eps) <= sup|J|
  bool within_radius = false;
  double tail_diameter = 0.0;  ///< max pairwise distance over the last quarter
  bool clustered = false;      ///< tail_diameter <= cluster_tol
};

/// The radius bound follows from A3 for points with dual gradient norm <= 1.
PalaisSmaleReport palais_smale_diagnostic(const ProblemInstance& problem, const std::vector<VertexField>& sequence,
                                          double cluster_tol = 1e-6);

struct OracleBox {
  std::vector<double> lo;  ///< per interior DOF
  std::vector<double> hi;
  static OracleBox uniform(std::size_t dofs, double lo, double hi);
};

struct OracleOptions {
  double threshold = std::numeric_limits<double>::infinity();  ///< max grid dual norm kept for polishing
  double polish_tol = 1e-11;
  int polish_iters = 100;
  double dedup_distance = 1e-6;
};

/// Exhaustive grid scan of the dual gradient norm over the box (resolution
/// points per DOF), local minima polished by damped Newton with
/// finite-difference Jacobians, deduplicated. Results are sorted by value.
/// Requires at most 4 interior DOFs and at most 1e8 grid points.
std::vector<CriticalPointResult> brute_force_critical_points(const ProblemInstance& problem, const OracleBox& box,
                                                             int resolution, const OracleOptions& opts = {});

/// Random-ray test for unboundedness from below; true when suspect.
bool coercivity_suspect(const ProblemInstance& problem, std::uint64_t seed);

}  // namespace sgcp
