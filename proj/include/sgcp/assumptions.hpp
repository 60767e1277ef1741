#pragma once

// Sampling-based checks of the standing hypotheses on the problem data.
// A "pass" means no violation on the sampled grid; it is not a proof.

#include "sgcp/problem.hpp"

#include <string>
#include <vector>

namespace sgcp {

enum class CheckStatus { pass, fail, unknown };

const char* to_string(CheckStatus s);

/// One violated inequality: where it was evaluated and both sides.
struct Witness {
  std::string location;  ///< e.g. "vertex 4" or "v"
  double input = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  std::string relation;  ///< the inequality that failed, e.g. "theta*F(v) <= v*f(v)"
};

struct AssumptionEntry {
  std::string name;  ///< "A1" .. "A5"
  CheckStatus status = CheckStatus::unknown;
  std::size_t violation_count = 0;
  std::vector<Witness> witnesses;  ///< first kMaxWitnesses violations
  std::string sampling;
};

struct AssumptionReport {
  std::vector<AssumptionEntry> entries;
  const AssumptionEntry& at(const std::string& name) const;
  bool all_pass() const;
};

/// Uniform grids: `points` nodes on [−v_max, v_max] for A3, on [−M, M] for h,
/// on [−M1, M1] for A4 and on [−1, 1] for A5.
struct SamplingGrid {
  int points = 201;
  double v_max = 10.0;
};

inline constexpr std::size_t kMaxWitnesses = 64;

AssumptionReport check_assumptions(const ProblemInstance& problem, const SamplingGrid& grid);

/// Constants with F(v) >= b1 |v|^θ − b2 on the sampled range.
struct GrowthFit {
  double b1 = 0.0;
  double b2 = 0.0;
};

/// Fits (b1, b2) from `points` uniform samples of [−v_max, v_max].
/// Requires v_max >= 1 and points >= 3.
GrowthFit growth_estimate(const Nonlinearity& nl, double v_max, int points = 2001);

/// Violations of the checks that make a configuration unusable: sign of a,
/// positivity and bounds of g and h, θ > 2 + ε, ½ − 1/θ >= c, positivity of
/// the constants. Empty when the problem is admissible.
std::vector<std::string> hypothesis_violations(const ProblemInstance& problem);

}  // namespace sgcp
