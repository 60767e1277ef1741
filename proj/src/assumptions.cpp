#include "sgcp/assumptions.hpp"

#include "sgcp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sgcp {

namespace {

std::vector<double> uniform_grid(double lo, double hi, int points) {
  std::vector<double> v(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
  // symmetric grids hit 0 exactly at the midpoint
  if (points % 2 == 1 && lo == -hi) v[static_cast<std::size_t>(points / 2)] = 0.0;
  return v;
}

std::string describe(const char* what, double lo, double hi, int points) {
  std::ostringstream s;
  s << what << ": " << points << " uniform points on [" << lo << ", " << hi << "]";
  return s.str();
}

void record(AssumptionEntry& e, Witness w) {
  ++e.violation_count;
  if (e.witnesses.size() < kMaxWitnesses) e.witnesses.push_back(std::move(w));
}

void finish(AssumptionEntry& e) { e.status = e.violation_count == 0 ? CheckStatus::pass : CheckStatus::fail; }

// a <= b up to rounding in the last few bits.
bool leq_rounded(double a, double b) { return a <= b + 1e-12 * std::max(std::abs(a), std::abs(b)); }

}  // namespace

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::unknown: return "unknown";
  }
  return "unknown";
}

const AssumptionEntry& AssumptionReport::at(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return e;
  throw PreconditionError("no assumption entry named " + name);
}

bool AssumptionReport::all_pass() const {
  return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.status == CheckStatus::pass; });
}

AssumptionReport check_assumptions(const ProblemInstance& problem, const SamplingGrid& grid) {
  if (grid.points < 3) throw PreconditionError("sampling grid needs at least 3 points");
  const auto& b = problem.bounds();
  const auto& nl = problem.nonlinearity();
  const auto& g = problem.g();
  AssumptionReport report;

  AssumptionEntry a1;
  a1.name = "A1";
  a1.sampling = "every vertex";
  for (std::size_t v = 0; v < problem.a().size(); ++v)
    if (!(problem.a()[v] <= 0.0))
      record(a1, {"vertex " + std::to_string(v), static_cast<double>(v), problem.a()[v], 0.0, "a(y) <= 0"});
  finish(a1);
  report.entries.push_back(std::move(a1));

  AssumptionEntry a2;
  a2.name = "A2";
  a2.sampling = "every vertex for g; " + describe("h", -b.M, b.M, grid.points);
  if (!(b.g_lo > 0.0)) record(a2, {"g1", b.g_lo, b.g_lo, 0.0, "g1 > 0"});
  if (!(b.h_lo > 0.0)) record(a2, {"h1", b.h_lo, b.h_lo, 0.0, "h1 > 0"});
  for (std::size_t v = 0; v < g.size(); ++v) {
    if (g[v] < b.g_lo) record(a2, {"vertex " + std::to_string(v), static_cast<double>(v), b.g_lo, g[v], "g1 <= g(y)"});
    if (g[v] > b.g_hi) record(a2, {"vertex " + std::to_string(v), static_cast<double>(v), g[v], b.g_hi, "g(y) <= g2"});
  }
  for (double u : uniform_grid(-b.M, b.M, grid.points)) {
    const double hu = problem.h()(u);
    if (hu < b.h_lo) record(a2, {"u", u, b.h_lo, hu, "h1 <= h(u)"});
    if (hu > b.h_hi) record(a2, {"u", u, hu, b.h_hi, "h(u) <= h2"});
  }
  finish(a2);
  report.entries.push_back(std::move(a2));

  AssumptionEntry a3;
  a3.name = "A3";
  a3.sampling = describe("v (v = 0 excluded)", -grid.v_max, grid.v_max, grid.points);
  const double theta = nl.theta();
  if (!(b.epsilon > 0.0)) record(a3, {"epsilon", b.epsilon, b.epsilon, 0.0, "epsilon > 0"});
  if (!(theta > 2.0 + b.epsilon)) record(a3, {"theta", theta, theta, 2.0 + b.epsilon, "theta > 2 + epsilon"});
  if (!(b.c > 0.0)) record(a3, {"c", b.c, b.c, 0.0, "c > 0"});
  if (!(0.5 - 1.0 / theta >= b.c)) record(a3, {"c", b.c, 0.5 - 1.0 / theta, b.c, "1/2 - 1/theta >= c"});
  for (double v : uniform_grid(-grid.v_max, grid.v_max, grid.points)) {
    if (v == 0.0) continue;
    const double lhs = theta * nl.F(v);
    const double rhs = v * nl.f(v);
    if (!(lhs > 0.0)) record(a3, {"v", v, 0.0, lhs, "0 < theta*F(v)"});
    if (!leq_rounded(lhs, rhs)) record(a3, {"v", v, lhs, rhs, "theta*F(v) <= v*f(v)"});
  }
  finish(a3);
  report.entries.push_back(std::move(a3));

  AssumptionEntry a4;
  a4.name = "A4";
  a4.sampling = describe("v", -b.M1, b.M1, grid.points) + "; " + describe("u", -b.M, b.M, grid.points) +
                "; every vertex for g";
  {
    const double n = problem.graph().n();
    const double bound = b.M1 / (2.0 * (b.beta + 1.0) * (2.0 * n + 3.0) * (2.0 * n + 3.0));
    double max_f = 0.0, arg_f = 0.0;
    for (double v : uniform_grid(-b.M1, b.M1, grid.points)) {
      if (std::abs(nl.f(v)) > max_f) {
        max_f = std::abs(nl.f(v));
        arg_f = v;
      }
    }
    double max_h = 0.0;
    for (double u : uniform_grid(-b.M, b.M, grid.points)) max_h = std::max(max_h, std::abs(problem.h()(u)));
    const double max_g = g.values().cwiseAbs().maxCoeff();
    const double lhs = max_g * max_f * max_h;
    if (!(b.M1 > 0.0)) record(a4, {"M1", b.M1, b.M1, 0.0, "M1 > 0"});
    if (!(lhs <= bound)) record(a4, {"v", arg_f, lhs, bound, "max |g f(v) h(u)| <= M1 / (2 (beta+1) (2N+3)^2)"});
  }
  finish(a4);
  report.entries.push_back(std::move(a4));

  AssumptionEntry a5;
  a5.name = "A5";
  a5.sampling = describe("v", -1.0, 1.0, grid.points);
  if (!(b.eta > 0.0)) record(a5, {"eta", b.eta, b.eta, 0.0, "eta > 0"});
  for (double v : uniform_grid(-1.0, 1.0, grid.points)) {
    const double lhs = nl.F(v);
    const double rhs = b.eta * std::abs(v);
    if (!(lhs >= rhs)) record(a5, {"v", v, lhs, rhs, "F(v) >= eta*|v|"});
  }
  finish(a5);
  report.entries.push_back(std::move(a5));

  return report;
}

GrowthFit growth_estimate(const Nonlinearity& nl, double v_max, int points) {
  if (!(v_max >= 1.0) || points < 3)
    throw PreconditionError("growth estimate needs a range [-v_max, v_max] with v_max >= 1 and >= 3 points");
  const auto grid = uniform_grid(-v_max, v_max, points);
  const double theta = nl.theta();
  double b1 = std::numeric_limits<double>::infinity();
  for (double v : grid)
    if (std::abs(v) >= 1.0) b1 = std::min(b1, nl.F(v) / std::pow(std::abs(v), theta));
  if (!std::isfinite(b1)) throw PreconditionError("growth estimate found no samples with |v| >= 1");
  b1 = std::max(b1, 0.0);
  double b2 = 0.0;
  for (double v : grid)
    if (std::abs(v) <= 1.0) b2 = std::max(b2, b1 * std::pow(std::abs(v), theta) - nl.F(v));
  return GrowthFit{b1, b2};
}

std::vector<std::string> hypothesis_violations(const ProblemInstance& problem) {
  std::vector<std::string> out;
  const auto& b = problem.bounds();
  const double theta = problem.nonlinearity().theta();
  auto push = [&](const std::string& msg) { out.push_back(msg); };

  for (std::size_t v = 0; v < problem.a().size(); ++v) {
    if (problem.a()[v] > 0.0) {
      std::ostringstream m;
      m << "A1: a must be <= 0 everywhere, found a = " << problem.a()[v] << " at vertex " << v;
      push(m.str());
      break;
    }
  }
  if (!(b.g_lo > 0.0)) push("A2: lower bound g1 must be positive");
  if (problem.g().values().minCoeff() < b.g_lo || problem.g().values().maxCoeff() > b.g_hi)
    push("A2: g must satisfy g1 <= g <= g2 at every vertex");
  if (!(b.h_lo > 0.0)) push("A2: lower bound h1 of h on [-M, M] must be positive");
  if (!(b.epsilon > 0.0)) push("A3: epsilon must be positive");
  if (!(theta > 2.0 + b.epsilon)) {
    std::ostringstream m;
    m << "A3: theta must satisfy theta > 2 + epsilon (theta = " << theta << ", epsilon = " << b.epsilon << ")";
    push(m.str());
  }
  if (!(b.c > 0.0) || !(0.5 - 1.0 / theta >= b.c)) {
    std::ostringstream m;
    m << "A3: c must satisfy 0 < c <= 1/2 - 1/theta (c = " << b.c << ")";
    push(m.str());
  }
  if (!(b.M1 > 0.0)) push("A4: M1 must be positive");
  if (!(b.beta >= 0.0)) push("A4: beta must be non-negative");
  if (!(b.eta >= 0.0)) push("A5: eta must be non-negative");
  return out;
}

}  // namespace sgcp
