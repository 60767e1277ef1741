#pragma once

// Renormalized Dirichlet energy on a prefractal graph, the self-similar
// measure quadrature, and the operators built from them.
//
// Conventions:
//   * edges are counted once (unordered), so
//       W_m(u) = ((N+2)/N)^m * sum_{edges {x,y}} (u(x) - u(y))^2;
//   * a cell of level m carries mass N^-m, split evenly among its vertices;
//   * Dirichlet data is imposed by eliminating the N boundary vertices.

#include "sgcp/geometry.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <memory>
#include <optional>

namespace sgcp {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Real values attached to every vertex of one graph.
class VertexField {
 public:
  /// Empty field attached to no graph; only assignable.
  VertexField() = default;
  VertexField(GraphPtr graph, Eigen::VectorXd values);
  static VertexField zeros(GraphPtr graph);
  static VertexField constant(GraphPtr graph, double value);

  const PrefractalGraph& graph() const noexcept { return *graph_; }
  const GraphPtr& graph_ptr() const noexcept { return graph_; }
  const Eigen::VectorXd& values() const noexcept { return values_; }
  Eigen::VectorXd& values() noexcept { return values_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }
  bool empty() const noexcept { return graph_ == nullptr; }
  double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }
  double& operator[](std::size_t i) { return values_[static_cast<Eigen::Index>(i)]; }

  /// True when every boundary value is exactly zero.
  bool is_dirichlet() const;

  VertexField& operator+=(const VertexField& o);
  VertexField& operator-=(const VertexField& o);
  VertexField& operator*=(double s);
  friend VertexField operator+(VertexField a, const VertexField& b) { return a += b; }
  friend VertexField operator-(VertexField a, const VertexField& b) { return a -= b; }
  friend VertexField operator*(double s, VertexField a) { return a *= s; }
  friend VertexField operator-(VertexField a) { return a *= -1.0; }

 private:
  GraphPtr graph_;
  Eigen::VectorXd values_;
};

/// Throws PreconditionError unless both fields live on graphs of the same (N, m).
void require_same_graph(const PrefractalGraph& a, const PrefractalGraph& b, const char* what);

/// Self-similar measure restricted to V_m: (#cells at v) * N^-(m+1).
VertexField measure_weights(const GraphPtr& graph);
/// Quadrature of u against the measure weights.
double integrate(const PrefractalGraph& graph, const VertexField& u);

struct Norms {
  double energy_norm = 0.0;
  double sup_norm = 0.0;
  double l2_mu_norm = 0.0;
  /// sup_norm <= (2N+3) energy_norm; only meaningful for Dirichlet fields.
  std::optional<bool> embedding_holds;
};

/// Assembled energy form of one graph. Immutable; share through FormPtr.
class DiscreteForm {
 public:
  explicit DiscreteForm(GraphPtr graph);
  DiscreteForm(const DiscreteForm&) = delete;
  DiscreteForm& operator=(const DiscreteForm&) = delete;

  const PrefractalGraph& graph() const noexcept { return *graph_; }
  const GraphPtr& graph_ptr() const noexcept { return graph_; }
  const SparseMatrix& stiffness() const noexcept { return stiffness_; }
  double renormalization() const noexcept { return rho_; }
  const VertexField& weights() const noexcept { return weights_; }
  double embedding_constant() const noexcept { return 2.0 * graph_->n() + 3.0; }

  double energy(const VertexField& u) const;
  double bilinear(const VertexField& u, const VertexField& v) const;
  Norms norms(const VertexField& u) const;

  // Interior-DOF view (boundary eliminated). Interior vectors follow the
  // order of graph().interior().
  std::size_t interior_size() const noexcept { return graph_->interior().size(); }
  const SparseMatrix& interior_stiffness() const noexcept { return k_ii_; }
  Eigen::VectorXd interior_weights() const;
  Eigen::VectorXd restrict_interior(const VertexField& u) const;
  VertexField extend_dirichlet(const Eigen::VectorXd& interior) const;
  /// Solves K_II p = rhs. Throws std::logic_error if the interior is empty.
  Eigen::VectorXd solve_interior(const Eigen::VectorXd& rhs) const;
  double interior_energy(const Eigen::VectorXd& x) const;
  double interior_bilinear(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;

  /// Minimizer of W_m with the given boundary values on V_0 (other entries ignored).
  VertexField harmonic_from_boundary(const VertexField& boundary_values) const;

 private:
  GraphPtr graph_;
  double rho_ = 1.0;
  SparseMatrix stiffness_;
  SparseMatrix k_ii_;
  SparseMatrix k_ib_;
  VertexField weights_;
  Eigen::SimplicialLDLT<SparseMatrix> k_ii_factor_;
};

using FormPtr = std::shared_ptr<const DiscreteForm>;

inline FormPtr make_form(const GraphPtr& graph) { return std::make_shared<const DiscreteForm>(graph); }

/// Values on V_{m+1} minimizing W_{m+1} among fields agreeing with u on V_m.
VertexField harmonic_extension(const GraphPtr& coarse, const GraphPtr& fine, const VertexField& u);

/// Restriction of a fine-level field to the vertices of a coarser level.
VertexField restrict_to(const GraphPtr& coarse, const VertexField& fine_field);

/// Dirichlet Laplacian L = -D^-1 K restricted to interior rows, acting on full
/// vertex fields. Satisfies <Lu, v>_mu = -W_m(u, v) for v vanishing on V_0.
struct DirichletLaplacian {
  SparseMatrix op;  ///< interior_size x vertex_count
  std::vector<std::size_t> rows;  ///< vertex index of each row

  /// Lu on interior vertices.
  Eigen::VectorXd apply(const VertexField& u) const;
  /// sum over interior rows of weight * (Lu) * v.
  double pairing(const DiscreteForm& form, const VertexField& u, const VertexField& v) const;
};

/// std::nullopt when the graph has no interior vertices (level 0).
std::optional<DirichletLaplacian> dirichlet_laplacian(const DiscreteForm& form);

/// Coordinate triplets "row col value" of the full stiffness matrix, one per line.
void write_stiffness_triplets(const DiscreteForm& form, std::ostream& out);

}  // namespace sgcp
