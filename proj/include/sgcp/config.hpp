#pragma once

// JSON run configuration: schema validation that reports every violation,
// defaults echoed into an "effective" document, and a content hash.
//
// Coefficient fields accept a number (constant), an array (one value per
// vertex, in graph order) or {"expression": {...}, "var": "x0"} where var
// picks a Cartesian coordinate x0, x1, ... or a barycentric one b0, b1, ...

#include "sgcp/harness.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>

namespace sgcp {

inline constexpr int kConfigFormatVersion = 1;

struct FieldSpec {
  enum class Kind { constant, values, expression };
  Kind kind = Kind::constant;
  double value = 0.0;
  std::vector<double> values;
  Expression expression;
  std::string var = "x0";
};

struct NonlinearitySpec {
  std::string kind = "power";  ///< power, polynomial, sign_power
  double scale = 1.0;
  double theta = 4.0;
  double eta = 0.0;    ///< sign_power
  double width = 1e-3; ///< sign_power
  std::vector<double> coeffs;  ///< polynomial
};

struct HarnessConfig {
  std::string schedule = "combined";
  double delta = 1.0;
  int n_max = 32;
  std::string solver = "min";
  std::optional<FieldSpec> drift;
  double final_tol = 1e-4;
};

struct GeometryConfig {
  double r = 0.0;  ///< 0 means M1 / (2N+3)
  int n_directions = 64;
  std::optional<FieldSpec> x_star;  ///< boundary values are forced to 0
};

struct RunConfig {
  int n = 3;
  int level = 2;
  FieldSpec a, g, u;
  Expression h = Expression::constant(1.0);
  NonlinearitySpec nonlinearity;
  ProblemBounds bounds;  ///< data bounds g1, g2, h1, h2 are filled when the problem is built
  SolverOptions solver;
  HarnessConfig harness;
  GeometryConfig geometry;
  std::uint64_t seed = 0;

  nlohmann::json effective;  ///< input with every default filled in
  std::string hash;          ///< SHA-256 of effective.dump()
};

/// Reads and validates; throws ConfigError listing every violation, including
/// hypothesis violations of the resulting problem (A1, A2, theta > 2 + eps, ...).
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_json(const nlohmann::json& doc);

/// Same checks without the hypothesis validation; used for deliberately
/// non-compliant instances that should still reach check-assumptions.
RunConfig parse_config_schema(const nlohmann::json& doc);

VertexField make_field(const FieldSpec& spec, const GraphPtr& graph);
Nonlinearity make_nonlinearity(const NonlinearitySpec& spec);
ProblemInstance build_problem(const RunConfig& cfg);
ProblemInstance build_problem(const RunConfig& cfg, FormPtr form);
std::optional<VertexField> make_x_star(const RunConfig& cfg, const GraphPtr& graph);
ExperimentOptions experiment_options(const RunConfig& cfg);

std::string sha256_hex(const std::string& data);

}  // namespace sgcp
