#include "sgcp/errors.hpp"
#include "sgcp/solvers.hpp"

#include <algorithm>
#include <cmath>

namespace sgcp {

PalaisSmaleReport palais_smale_diagnostic(const ProblemInstance& problem, const std::vector<VertexField>& sequence,
                                          double cluster_tol) {
  if (sequence.empty()) throw PreconditionError("palais_smale_diagnostic: empty sequence");
  PalaisSmaleReport rep;
  for (const auto& x : sequence) {
    rep.sup_abs_value = std::max(rep.sup_abs_value, std::abs(problem.action(x)));
    rep.grad_norms.push_back(problem.gradient(x).dual_norm);
    rep.norms.push_back(std::sqrt(problem.form().energy(x)));
  }

  const std::size_t n = sequence.size();
  const std::size_t tail = n - std::max<std::size_t>(1, n / 4);
  rep.grad_norms_decreasing_tail = true;
  for (std::size_t k = tail + 1; k < n; ++k)
    if (rep.grad_norms[k] > rep.grad_norms[k - 1] * (1.0 + 1e-12)) rep.grad_norms_decreasing_tail = false;

  // c||x||² <= |J(x)| + ||J'(x)|| ||x|| / (2+eps); only usable where ||J'|| <= 1.
  const double k1 = 1.0 / (2.0 + problem.bounds().epsilon);
  const double c = problem.bounds().c;
  rep.radius_bound = c > 0.0 ? (k1 + std::sqrt(k1 * k1 + 4.0 * c * rep.sup_abs_value)) / (2.0 * c)
                             : std::numeric_limits<double>::infinity();
  rep.within_radius = true;
  for (std::size_t k = 0; k < n; ++k)
    if (rep.grad_norms[k] <= 1.0 && rep.norms[k] > rep.radius_bound * (1.0 + 1e-9)) rep.within_radius = false;

  for (std::size_t i = tail; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      rep.tail_diameter = std::max(rep.tail_diameter, std::sqrt(problem.form().energy(sequence[i] - sequence[j])));
  rep.clustered = rep.tail_diameter <= cluster_tol;
  return rep;
}

}  // namespace sgcp
