#pragma once

// Level-m prefractal approximations of the N-vertex Sierpinski gasket.
//
// Vertices are stored as exact barycentric numerators over the denominator
// 2^m, so coincidences between images of the IFS maps S_i(x) = (x + p_i)/2
// are detected by integer comparison. Cartesian coordinates are derived from
// a regular unit simplex and are only used for output.

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

namespace sgcp {

/// Regular unit simplex p_1..p_N in R^{N-1}.
struct SimplexSpec {
  int n = 3;
  std::vector<Eigen::VectorXd> points;

  /// Builds p_i by recursive orthogonal extension: p_1 = 0, each next vertex
  /// sits above the centroid of the previous ones at unit distance.
  static SimplexSpec regular(int n);
};

/// Vertex of V_m in barycentric numerators: coords sum to 2^level.
struct BaryVertex {
  int level = 0;
  std::vector<std::int64_t> coords;

  /// Same point expressed at a finer level (numerators scaled by 2^(to - level)).
  BaryVertex lifted(int to_level) const;
  /// Denominator-reduced form; equal points have equal canonical forms.
  BaryVertex canonical() const;

  friend bool operator==(const BaryVertex& a, const BaryVertex& b);
};

using Edge = std::pair<std::size_t, std::size_t>;

inline constexpr std::size_t kDefaultMaxVertices = 5'000'000;

/// Exact level-m gasket graph.
///
/// Vertices are ordered lexicographically by barycentric numerators. Edges
/// connect distinct vertices sharing a cell (first < second); for the gasket
/// this is the same relation as |x - y| = 2^-m. Cells are listed in the
/// lexicographic order of their IFS words.
class PrefractalGraph {
 public:
  static PrefractalGraph build(int n, int level,
                               std::size_t max_vertices = kDefaultMaxVertices);

  int n() const noexcept { return spec_.n; }
  int level() const noexcept { return level_; }
  std::int64_t denominator() const noexcept { return std::int64_t{1} << level_; }
  const SimplexSpec& spec() const noexcept { return spec_; }

  std::size_t vertex_count() const noexcept { return vertices_.size(); }
  const std::vector<BaryVertex>& vertices() const noexcept { return vertices_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::vector<std::vector<std::size_t>>& cells() const noexcept { return cells_; }
  /// Indices of V_0, ordered so boundary()[i] is the image of p_{i+1}.
  const std::vector<std::size_t>& boundary() const noexcept { return boundary_; }
  const std::vector<std::size_t>& interior() const noexcept { return interior_; }
  bool is_boundary(std::size_t v) const { return is_boundary_[v]; }

  /// Number of cells containing each vertex.
  std::vector<int> cell_incidence() const;
  /// Vertex index for an address at this level, or npos when absent.
  std::size_t find(const BaryVertex& v) const;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  bool same_shape(const PrefractalGraph& other) const noexcept {
    return n() == other.n() && level() == other.level();
  }

 private:
  PrefractalGraph() = default;

  SimplexSpec spec_;
  int level_ = 0;
  std::vector<BaryVertex> vertices_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> cells_;
  std::vector<std::size_t> boundary_;
  std::vector<std::size_t> interior_;
  std::vector<bool> is_boundary_;
};

using GraphPtr = std::shared_ptr<const PrefractalGraph>;

inline GraphPtr make_graph(int n, int level,
                           std::size_t max_vertices = kDefaultMaxVertices) {
  return std::make_shared<const PrefractalGraph>(PrefractalGraph::build(n, level, max_vertices));
}

/// Cartesian point of each vertex: sum_i (c_i / 2^m) p_i.
std::vector<Eigen::VectorXd> embed_coordinates(const PrefractalGraph& graph);

/// Closed-form vertex count N (N^m + 1) / 2 of the N-vertex gasket at level m.
std::int64_t expected_vertex_count(int n, int level);

}  // namespace sgcp
