#include "sgcp/geometry.hpp"

#include "sgcp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

namespace sgcp {

namespace {

constexpr std::int64_t kInt64Max = std::numeric_limits<std::int64_t>::max();

// N^m, or -1 on overflow.
std::int64_t checked_pow(std::int64_t base, int exp) {
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) {
    if (r > kInt64Max / base) return -1;
    r *= base;
  }
  return r;
}

}  // namespace

SimplexSpec SimplexSpec::regular(int n) {
  if (n < 2) throw PreconditionError("simplex needs N >= 2 vertices, got " + std::to_string(n));
  SimplexSpec s;
  s.n = n;
  const int dim = n - 1;
  s.points.assign(static_cast<std::size_t>(n), Eigen::VectorXd::Zero(dim));
  for (int k = 1; k < n; ++k) {
    // Centroid of p_0..p_{k-1} lives in the first k-1 coordinates.
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
    for (int j = 0; j < k; ++j) centroid += s.points[j];
    centroid /= k;
    const double d2 = (centroid - s.points[0]).squaredNorm();
    Eigen::VectorXd p = centroid;
    p[k - 1] = std::sqrt(std::max(0.0, 1.0 - d2));
    s.points[k] = p;
  }
  return s;
}

BaryVertex BaryVertex::lifted(int to_level) const {
  if (to_level < level) throw PreconditionError("cannot lift a vertex to a coarser level");
  BaryVertex out{to_level, coords};
  const std::int64_t scale = std::int64_t{1} << (to_level - level);
  for (auto& c : out.coords) c *= scale;
  return out;
}

BaryVertex BaryVertex::canonical() const {
  BaryVertex out = *this;
  while (out.level > 0 &&
         std::all_of(out.coords.begin(), out.coords.end(), [](std::int64_t c) { return c % 2 == 0; })) {
    for (auto& c : out.coords) c /= 2;
    --out.level;
  }
  return out;
}

bool operator==(const BaryVertex& a, const BaryVertex& b) {
  const BaryVertex ca = a.canonical();
  const BaryVertex cb = b.canonical();
  return ca.level == cb.level && ca.coords == cb.coords;
}

std::int64_t expected_vertex_count(int n, int level) {
  const std::int64_t p = checked_pow(n, level);
  if (p < 0 || p == kInt64Max) return -1;
  const std::int64_t s = p + 1;
  if (s > kInt64Max / n) return -1;
  return n * s / 2;
}

PrefractalGraph PrefractalGraph::build(int n, int level, std::size_t max_vertices) {
  if (n < 2) throw PreconditionError("gasket needs N >= 2, got " + std::to_string(n));
  if (level < 0) throw PreconditionError("level must be >= 0, got " + std::to_string(level));
  const std::int64_t nv = expected_vertex_count(n, level);
  if (level > 61 || nv < 0 || static_cast<std::uint64_t>(nv) > max_vertices) {
    throw ResourceLimitError("level " + std::to_string(level) + " with N=" + std::to_string(n) +
                             " exceeds the vertex limit of " + std::to_string(max_vertices));
  }

  const auto un = static_cast<std::size_t>(n);
  using Coords = std::vector<std::int64_t>;

  // Cells as lists of vertex numerators; level-(k+1) cells are S_i applied to
  // every level-k cell, which enumerates IFS words lexicographically.
  std::vector<std::vector<Coords>> cells(1);
  for (std::size_t j = 0; j < un; ++j) {
    Coords c(un, 0);
    c[j] = 1;
    cells[0].push_back(c);
  }
  for (int k = 0; k < level; ++k) {
    const std::int64_t shift = std::int64_t{1} << k;
    std::vector<std::vector<Coords>> next;
    next.reserve(cells.size() * un);
    for (std::size_t i = 0; i < un; ++i) {
      for (const auto& cell : cells) {
        std::vector<Coords> image = cell;
        for (auto& c : image) c[i] += shift;
        next.push_back(std::move(image));
      }
    }
    cells = std::move(next);
  }

  std::map<Coords, std::size_t> index;
  for (const auto& cell : cells)
    for (const auto& c : cell) index.emplace(c, 0);
  std::size_t next_id = 0;
  for (auto& [c, id] : index) id = next_id++;

  PrefractalGraph g;
  g.spec_ = SimplexSpec::regular(n);
  g.level_ = level;
  g.vertices_.reserve(index.size());
  for (const auto& [c, id] : index) g.vertices_.push_back(BaryVertex{level, c});

  g.cells_.reserve(cells.size());
  for (const auto& cell : cells) {
    std::vector<std::size_t> ids;
    ids.reserve(un);
    for (const auto& c : cell) ids.push_back(index.at(c));
    for (std::size_t a = 0; a < ids.size(); ++a)
      for (std::size_t b = a + 1; b < ids.size(); ++b)
        g.edges_.emplace_back(std::min(ids[a], ids[b]), std::max(ids[a], ids[b]));
    g.cells_.push_back(std::move(ids));
  }
  std::sort(g.edges_.begin(), g.edges_.end());
  g.edges_.erase(std::unique(g.edges_.begin(), g.edges_.end()), g.edges_.end());

  g.is_boundary_.assign(g.vertices_.size(), false);
  const std::int64_t denom = g.denominator();
  for (std::size_t i = 0; i < un; ++i) {
    Coords c(un, 0);
    c[i] = denom;
    const std::size_t id = index.at(c);
    g.boundary_.push_back(id);
    g.is_boundary_[id] = true;
  }
  for (std::size_t v = 0; v < g.vertices_.size(); ++v)
    if (!g.is_boundary_[v]) g.interior_.push_back(v);
  return g;
}

std::vector<int> PrefractalGraph::cell_incidence() const {
  std::vector<int> count(vertices_.size(), 0);
  for (const auto& cell : cells_)
    for (std::size_t v : cell) ++count[v];
  return count;
}

std::size_t PrefractalGraph::find(const BaryVertex& v) const {
  if (v.coords.size() != static_cast<std::size_t>(n())) return npos;
  BaryVertex probe = v.canonical();
  if (probe.level > level_) return npos;
  probe = probe.lifted(level_);
  auto it = std::lower_bound(vertices_.begin(), vertices_.end(), probe,
                             [](const BaryVertex& a, const BaryVertex& b) { return a.coords < b.coords; });
  if (it == vertices_.end() || it->coords != probe.coords) return npos;
  return static_cast<std::size_t>(it - vertices_.begin());
}

std::vector<Eigen::VectorXd> embed_coordinates(const PrefractalGraph& graph) {
  const auto& p = graph.spec().points;
  const double denom = static_cast<double>(graph.denominator());
  std::vector<Eigen::VectorXd> out;
  out.reserve(graph.vertex_count());
  for (const auto& v : graph.vertices()) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(graph.n() - 1);
    for (std::size_t i = 0; i < v.coords.size(); ++i)
      x += (static_cast<double>(v.coords[i]) / denom) * p[i];
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace sgcp
