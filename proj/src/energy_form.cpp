#include "sgcp/energy_form.hpp"

#include "sgcp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

namespace sgcp {

namespace {

using Triplet = Eigen::Triplet<double>;

SparseMatrix graph_laplacian(const PrefractalGraph& g, double scale) {
  const auto nv = static_cast<Eigen::Index>(g.vertex_count());
  std::vector<Triplet> t;
  t.reserve(g.edges().size() * 4);
  for (const auto& [x, y] : g.edges()) {
    const auto i = static_cast<Eigen::Index>(x);
    const auto j = static_cast<Eigen::Index>(y);
    t.emplace_back(i, i, scale);
    t.emplace_back(j, j, scale);
    t.emplace_back(i, j, -scale);
    t.emplace_back(j, i, -scale);
  }
  SparseMatrix k(nv, nv);
  k.setFromTriplets(t.begin(), t.end());
  return k;
}

// Rows/cols of `m` selected by index lists.
SparseMatrix submatrix(const SparseMatrix& m, const std::vector<std::size_t>& rows,
                       const std::vector<std::size_t>& cols) {
  std::vector<Eigen::Index> row_pos(static_cast<std::size_t>(m.rows()), -1);
  std::vector<Eigen::Index> col_pos(static_cast<std::size_t>(m.cols()), -1);
  for (std::size_t i = 0; i < rows.size(); ++i) row_pos[rows[i]] = static_cast<Eigen::Index>(i);
  for (std::size_t j = 0; j < cols.size(); ++j) col_pos[cols[j]] = static_cast<Eigen::Index>(j);
  std::vector<Triplet> t;
  for (Eigen::Index c = 0; c < m.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(m, c); it; ++it) {
      const auto r = row_pos[static_cast<std::size_t>(it.row())];
      const auto cc = col_pos[static_cast<std::size_t>(it.col())];
      if (r >= 0 && cc >= 0) t.emplace_back(r, cc, it.value());
    }
  }
  SparseMatrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// VertexField

VertexField::VertexField(GraphPtr graph, Eigen::VectorXd values)
    : graph_(std::move(graph)), values_(std::move(values)) {
  if (!graph_) throw PreconditionError("vertex field needs a graph");
  if (static_cast<std::size_t>(values_.size()) != graph_->vertex_count())
    throw PreconditionError("vertex field has " + std::to_string(values_.size()) + " values for " +
                            std::to_string(graph_->vertex_count()) + " vertices");
  if (!values_.allFinite()) throw PreconditionError("vertex field has non-finite entries");
}

VertexField VertexField::zeros(GraphPtr graph) {
  const auto n = static_cast<Eigen::Index>(graph->vertex_count());
  return VertexField(std::move(graph), Eigen::VectorXd::Zero(n));
}

VertexField VertexField::constant(GraphPtr graph, double value) {
  const auto n = static_cast<Eigen::Index>(graph->vertex_count());
  return VertexField(std::move(graph), Eigen::VectorXd::Constant(n, value));
}

bool VertexField::is_dirichlet() const {
  return std::all_of(graph_->boundary().begin(), graph_->boundary().end(),
                     [&](std::size_t b) { return (*this)[b] == 0.0; });
}

VertexField& VertexField::operator+=(const VertexField& o) {
  require_same_graph(*graph_, *o.graph_, "field addition");
  values_ += o.values_;
  return *this;
}

VertexField& VertexField::operator-=(const VertexField& o) {
  require_same_graph(*graph_, *o.graph_, "field subtraction");
  values_ -= o.values_;
  return *this;
}

VertexField& VertexField::operator*=(double s) {
  values_ *= s;
  return *this;
}

void require_same_graph(const PrefractalGraph& a, const PrefractalGraph& b, const char* what) {
  if (!a.same_shape(b))
    throw PreconditionError(std::string(what) + ": graph mismatch (N=" + std::to_string(a.n()) +
                            ", m=" + std::to_string(a.level()) + " vs N=" + std::to_string(b.n()) +
                            ", m=" + std::to_string(b.level()) + ")");
}

// ---------------------------------------------------------------------------
// Measure

VertexField measure_weights(const GraphPtr& graph) {
  const auto incidence = graph->cell_incidence();
  const double unit = std::pow(static_cast<double>(graph->n()), -(graph->level() + 1));
  Eigen::VectorXd w(static_cast<Eigen::Index>(incidence.size()));
  for (std::size_t i = 0; i < incidence.size(); ++i) w[static_cast<Eigen::Index>(i)] = incidence[i] * unit;
  return VertexField(graph, std::move(w));
}

double integrate(const PrefractalGraph& graph, const VertexField& u) {
  require_same_graph(graph, u.graph(), "integrate");
  const auto incidence = graph.cell_incidence();
  const double unit = std::pow(static_cast<double>(graph.n()), -(graph.level() + 1));
  double s = 0.0;
  for (std::size_t i = 0; i < incidence.size(); ++i) s += incidence[i] * unit * u[i];
  return s;
}

// ---------------------------------------------------------------------------
// DiscreteForm

DiscreteForm::DiscreteForm(GraphPtr graph)
    : graph_(std::move(graph)),
      rho_(std::pow((graph_->n() + 2.0) / graph_->n(), graph_->level())),
      stiffness_(graph_laplacian(*graph_, rho_)),
      k_ii_(submatrix(stiffness_, graph_->interior(), graph_->interior())),
      k_ib_(submatrix(stiffness_, graph_->interior(), graph_->boundary())),
      weights_(measure_weights(graph_)) {
  if (k_ii_.rows() > 0) {
    k_ii_factor_.compute(k_ii_);
    if (k_ii_factor_.info() != Eigen::Success)
      throw std::logic_error("interior stiffness factorization failed");
  }
}

double DiscreteForm::energy(const VertexField& u) const {
  require_same_graph(*graph_, u.graph(), "energy");
  double s = 0.0;
  for (const auto& [x, y] : graph_->edges()) {
    const double d = u[x] - u[y];
    s += d * d;
  }
  return rho_ * s;
}

double DiscreteForm::bilinear(const VertexField& u, const VertexField& v) const {
  require_same_graph(*graph_, u.graph(), "bilinear");
  require_same_graph(*graph_, v.graph(), "bilinear");
  double s = 0.0;
  for (const auto& [x, y] : graph_->edges()) s += (u[x] - u[y]) * (v[x] - v[y]);
  return rho_ * s;
}

Norms DiscreteForm::norms(const VertexField& u) const {
  Norms n;
  n.energy_norm = std::sqrt(energy(u));
  n.sup_norm = u.values().size() ? u.values().cwiseAbs().maxCoeff() : 0.0;
  n.l2_mu_norm = std::sqrt(weights_.values().dot(u.values().cwiseAbs2()));
  if (u.is_dirichlet()) n.embedding_holds = n.sup_norm <= embedding_constant() * n.energy_norm;
  return n;
}

Eigen::VectorXd DiscreteForm::interior_weights() const {
  const auto& idx = graph_->interior();
  Eigen::VectorXd w(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) w[static_cast<Eigen::Index>(i)] = weights_[idx[i]];
  return w;
}

Eigen::VectorXd DiscreteForm::restrict_interior(const VertexField& u) const {
  require_same_graph(*graph_, u.graph(), "restrict_interior");
  const auto& idx = graph_->interior();
  Eigen::VectorXd x(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) x[static_cast<Eigen::Index>(i)] = u[idx[i]];
  return x;
}

VertexField DiscreteForm::extend_dirichlet(const Eigen::VectorXd& interior) const {
  const auto& idx = graph_->interior();
  if (static_cast<std::size_t>(interior.size()) != idx.size())
    throw PreconditionError("interior vector has wrong length");
  VertexField u = VertexField::zeros(graph_);
  for (std::size_t i = 0; i < idx.size(); ++i) u[idx[i]] = interior[static_cast<Eigen::Index>(i)];
  return u;
}

Eigen::VectorXd DiscreteForm::solve_interior(const Eigen::VectorXd& rhs) const {
  if (k_ii_.rows() == 0) throw std::logic_error("no interior degrees of freedom");
  return k_ii_factor_.solve(rhs);
}

double DiscreteForm::interior_energy(const Eigen::VectorXd& x) const { return x.dot(k_ii_ * x); }

double DiscreteForm::interior_bilinear(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  return x.dot(k_ii_ * y);
}

VertexField DiscreteForm::harmonic_from_boundary(const VertexField& boundary_values) const {
  require_same_graph(*graph_, boundary_values.graph(), "harmonic_from_boundary");
  const auto& bnd = graph_->boundary();
  Eigen::VectorXd ub(static_cast<Eigen::Index>(bnd.size()));
  for (std::size_t i = 0; i < bnd.size(); ++i) ub[static_cast<Eigen::Index>(i)] = boundary_values[bnd[i]];
  VertexField out = VertexField::zeros(graph_);
  for (std::size_t i = 0; i < bnd.size(); ++i) out[bnd[i]] = ub[static_cast<Eigen::Index>(i)];
  if (interior_size() == 0) return out;
  const Eigen::VectorXd ui = solve_interior(-(k_ib_ * ub));
  const auto& idx = graph_->interior();
  for (std::size_t i = 0; i < idx.size(); ++i) out[idx[i]] = ui[static_cast<Eigen::Index>(i)];
  return out;
}

// ---------------------------------------------------------------------------
// Level transfer

namespace {

// fine index of each coarse vertex
std::vector<std::size_t> coarse_in_fine(const PrefractalGraph& coarse, const PrefractalGraph& fine) {
  if (coarse.n() != fine.n() || fine.level() < coarse.level())
    throw PreconditionError("level transfer needs the same N and a finer target level");
  std::vector<std::size_t> map;
  map.reserve(coarse.vertex_count());
  for (const auto& v : coarse.vertices()) {
    const std::size_t id = fine.find(v);
    if (id == PrefractalGraph::npos) throw std::logic_error("coarse vertex missing from finer level");
    map.push_back(id);
  }
  return map;
}

}  // namespace

VertexField harmonic_extension(const GraphPtr& coarse, const GraphPtr& fine, const VertexField& u) {
  require_same_graph(*coarse, u.graph(), "harmonic_extension");
  if (fine->level() != coarse->level() + 1 || fine->n() != coarse->n())
    throw PreconditionError("harmonic_extension maps level m to level m+1 of the same gasket");
  const auto map = coarse_in_fine(*coarse, *fine);

  std::vector<bool> known(fine->vertex_count(), false);
  for (std::size_t id : map) known[id] = true;
  std::vector<std::size_t> fixed, unknown;
  for (std::size_t v = 0; v < fine->vertex_count(); ++v) (known[v] ? fixed : unknown).push_back(v);

  VertexField out = VertexField::zeros(fine);
  for (std::size_t i = 0; i < map.size(); ++i) out[map[i]] = u[i];
  if (unknown.empty()) return out;

  const SparseMatrix lap = graph_laplacian(*fine, 1.0);
  const SparseMatrix kuu = submatrix(lap, unknown, unknown);
  const SparseMatrix kuf = submatrix(lap, unknown, fixed);
  Eigen::VectorXd uf(static_cast<Eigen::Index>(fixed.size()));
  for (std::size_t i = 0; i < fixed.size(); ++i) uf[static_cast<Eigen::Index>(i)] = out[fixed[i]];

  Eigen::SimplicialLDLT<SparseMatrix> solver(kuu);
  if (solver.info() != Eigen::Success) throw std::logic_error("harmonic extension system is singular");
  const Eigen::VectorXd uu = solver.solve(-(kuf * uf));
  for (std::size_t i = 0; i < unknown.size(); ++i) out[unknown[i]] = uu[static_cast<Eigen::Index>(i)];
  return out;
}

VertexField restrict_to(const GraphPtr& coarse, const VertexField& fine_field) {
  const auto map = coarse_in_fine(*coarse, fine_field.graph());
  VertexField out = VertexField::zeros(coarse);
  for (std::size_t i = 0; i < map.size(); ++i) out[i] = fine_field[map[i]];
  return out;
}

// ---------------------------------------------------------------------------
// Laplacian

std::optional<DirichletLaplacian> dirichlet_laplacian(const DiscreteForm& form) {
  const auto& g = form.graph();
  if (g.interior().empty()) return std::nullopt;
  DirichletLaplacian lap;
  lap.rows = g.interior();
  std::vector<Triplet> t;
  const SparseMatrix& k = form.stiffness();
  std::vector<Eigen::Index> row_of(g.vertex_count(), -1);
  for (std::size_t i = 0; i < lap.rows.size(); ++i) row_of[lap.rows[i]] = static_cast<Eigen::Index>(i);
  for (Eigen::Index c = 0; c < k.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(k, c); it; ++it) {
      const auto r = row_of[static_cast<std::size_t>(it.row())];
      if (r < 0) continue;
      t.emplace_back(r, it.col(), -it.value() / form.weights()[static_cast<std::size_t>(it.row())]);
    }
  }
  lap.op.resize(static_cast<Eigen::Index>(lap.rows.size()), static_cast<Eigen::Index>(g.vertex_count()));
  lap.op.setFromTriplets(t.begin(), t.end());
  return lap;
}

Eigen::VectorXd DirichletLaplacian::apply(const VertexField& u) const { return op * u.values(); }

double DirichletLaplacian::pairing(const DiscreteForm& form, const VertexField& u, const VertexField& v) const {
  require_same_graph(form.graph(), u.graph(), "laplacian pairing");
  require_same_graph(form.graph(), v.graph(), "laplacian pairing");
  const Eigen::VectorXd lu = apply(u);
  double s = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i)
    s += form.weights()[rows[i]] * lu[static_cast<Eigen::Index>(i)] * v[rows[i]];
  return s;
}

void write_stiffness_triplets(const DiscreteForm& form, std::ostream& out) {
  const SparseMatrix& k = form.stiffness();
  const auto old = out.precision(17);
  for (Eigen::Index c = 0; c < k.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(k, c); it; ++it)
      out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
  out.precision(old);
}

}  // namespace sgcp
