#pragma once

#include "sgcp/config.hpp"

#include <cmath>
#include <filesystem>
#include <random>
#include <string>

namespace testing {

inline std::filesystem::path config_path(const std::string& name) {
  return std::filesystem::path(SGCP_CONFIG_DIR) / name;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("sgcp_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline sgcp::VertexField random_field(const sgcp::GraphPtr& g, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  Eigen::VectorXd v(static_cast<Eigen::Index>(g->vertex_count()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = d(rng);
  return sgcp::VertexField(g, v);
}

inline sgcp::VertexField random_dirichlet(const sgcp::GraphPtr& g, std::mt19937_64& rng, double scale = 1.0) {
  sgcp::VertexField u = random_field(g, rng, scale);
  for (std::size_t b : g->boundary()) u[b] = 0.0;
  return u;
}

// Plain sum over the edge list, independent of the assembled matrix.
inline double edge_energy(const sgcp::PrefractalGraph& g, const sgcp::VertexField& u) {
  double s = 0.0;
  for (const auto& [x, y] : g.edges()) s += (u[x] - u[y]) * (u[x] - u[y]);
  return std::pow((g.n() + 2.0) / g.n(), g.level()) * s;
}

// a, g, h constant, power nonlinearity scale * |v|^(theta-2) v.
inline sgcp::ProblemInstance power_problem(int n, int level, double a, double scale, double theta = 4.0,
                                           double g = 1.0) {
  auto graph = sgcp::make_graph(n, level);
  auto form = sgcp::make_form(graph);
  sgcp::ProblemBounds b;
  b.M = 1.0;
  b.M1 = 1.0;
  b.epsilon = 1.0;
  b.c = 0.25;
  auto gf = sgcp::VertexField::constant(graph, g);
  const auto h = sgcp::Expression::constant(1.0);
  b = sgcp::ProblemInstance::fill_data_bounds(b, gf, h);
  return sgcp::ProblemInstance(form, sgcp::VertexField::constant(graph, a), gf, sgcp::VertexField::zeros(graph), h,
                               sgcp::Nonlinearity::power(scale, theta), b);
}

inline sgcp::ProblemInstance load_problem(const std::string& config) {
  return sgcp::build_problem(sgcp::parse_config(config_path(config)));
}

}  // namespace testing
