#include "sgcp/config.hpp"

#include "sgcp/assumptions.hpp"
#include "sgcp/errors.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace sgcp {

using nlohmann::json;

namespace {

/// Walks one JSON object, echoing every value (given or defaulted) into `out`
/// and collecting violations with their dotted path.
class Reader {
 public:
  Reader(const json& in, json& out, std::string path, std::vector<std::string>& errs)
      : in_(in), out_(out), path_(std::move(path)), errs_(errs) {
    if (!in_.is_object() && !in_.is_null()) fail("", "must be an object");
    if (!out_.is_object()) out_ = json::object();
  }

  bool has(const char* key) const { return in_.is_object() && in_.contains(key); }

  void fail(const std::string& key, const std::string& msg) {
    std::string where = path_;
    if (!key.empty()) where += (where.empty() ? "" : ".") + key;
    errs_.push_back(where + ": " + msg);
  }

  const json* raw(const char* key) {
    seen_.insert(key);
    if (!has(key)) return nullptr;
    return &in_.at(key);
  }

  double number(const char* key, std::optional<double> def) {
    const json* v = raw(key);
    double out = def.value_or(0.0);
    if (!v) {
      if (!def) fail(key, "required field missing");
    } else if (!v->is_number()) {
      fail(key, "must be a number");
    } else {
      out = v->get<double>();
      if (!std::isfinite(out)) fail(key, "must be finite");
    }
    out_[key] = out;
    return out;
  }

  int integer(const char* key, std::optional<int> def) {
    const json* v = raw(key);
    int out = def.value_or(0);
    if (!v) {
      if (!def) fail(key, "required field missing");
    } else if (!v->is_number_integer()) {
      fail(key, "must be an integer");
    } else {
      out = v->get<int>();
    }
    out_[key] = out;
    return out;
  }

  std::uint64_t unsigned_integer(const char* key, std::uint64_t def) {
    const json* v = raw(key);
    std::uint64_t out = def;
    if (v) {
      if (v->is_number_unsigned() || (v->is_number_integer() && v->get<std::int64_t>() >= 0))
        out = v->get<std::uint64_t>();
      else
        fail(key, "must be a non-negative integer");
    }
    out_[key] = out;
    return out;
  }

  bool boolean(const char* key, bool def) {
    const json* v = raw(key);
    bool out = def;
    if (v) {
      if (v->is_boolean()) out = v->get<bool>();
      else fail(key, "must be true or false");
    }
    out_[key] = out;
    return out;
  }

  std::string string(const char* key, std::optional<std::string> def) {
    const json* v = raw(key);
    std::string out = def.value_or("");
    if (!v) {
      if (!def) fail(key, "required field missing");
    } else if (!v->is_string()) {
      fail(key, "must be a string");
    } else {
      out = v->get<std::string>();
    }
    out_[key] = out;
    return out;
  }

  std::vector<double> numbers(const char* key, std::optional<std::vector<double>> def) {
    const json* v = raw(key);
    std::vector<double> out = def.value_or(std::vector<double>{});
    if (!v) {
      if (!def) fail(key, "required field missing");
    } else if (!v->is_array() || !std::all_of(v->begin(), v->end(), [](const json& e) { return e.is_number(); })) {
      fail(key, "must be an array of numbers");
    } else {
      out = v->get<std::vector<double>>();
    }
    out_[key] = out;
    return out;
  }

  Reader child(const char* key) {
    const json* v = raw(key);
    out_[key] = json::object();
    return Reader(v ? *v : null_, out_[key], path_.empty() ? key : path_ + "." + key, errs_);
  }

  std::string child_path(const char* key) const { return path_.empty() ? key : path_ + "." + key; }
  json& out() { return out_; }

  /// Reports keys that were never read.
  void reject_unknown() {
    if (!in_.is_object()) return;
    for (const auto& [k, v] : in_.items())
      if (!seen_.count(k)) fail(k, "unknown field");
  }

 private:
  static inline const json null_ = json();
  const json& in_;
  json& out_;
  std::string path_;
  std::vector<std::string>& errs_;
  std::set<std::string> seen_;
};

Expression parse_expression(Reader r) {
  const std::string kind = r.string("kind", std::nullopt);
  Expression e;
  if (kind == "constant") {
    e = Expression::constant(r.number("value", std::nullopt));
  } else if (kind == "polynomial") {
    e = Expression::polynomial(r.numbers("coeffs", std::nullopt));
  } else if (kind == "scaled_power") {
    const double scale = r.number("scale", 1.0);
    const double exponent = r.number("exponent", std::nullopt);
    e = Expression::scaled_power(scale, exponent);
  } else if (kind == "clamped_affine") {
    const double offset = r.number("offset", 0.0);
    const double slope = r.number("slope", 0.0);
    const double lo = r.number("lo", std::nullopt);
    const double hi = r.number("hi", std::nullopt);
    if (lo > hi) r.fail("hi", "must be >= lo");
    else e = Expression::clamped_affine(offset, slope, lo, hi);
  } else if (!kind.empty()) {
    r.fail("kind", "unknown expression '" + kind + "' (expected constant, polynomial, scaled_power, clamped_affine)");
  }
  r.reject_unknown();
  return e;
}

FieldSpec parse_field(const json* in, json& out, const std::string& path, double def, std::size_t expected_size,
                      int n, std::vector<std::string>& errs) {
  FieldSpec spec;
  if (!in) {
    spec.value = def;
    out = def;
    return spec;
  }
  if (in->is_number()) {
    spec.value = in->get<double>();
    out = spec.value;
    if (!std::isfinite(spec.value)) errs.push_back(path + ": must be finite");
    return spec;
  }
  if (in->is_array()) {
    spec.kind = FieldSpec::Kind::values;
    if (!std::all_of(in->begin(), in->end(), [](const json& e) { return e.is_number(); })) {
      errs.push_back(path + ": per-vertex values must be numbers");
    } else {
      spec.values = in->get<std::vector<double>>();
      if (expected_size > 0 && spec.values.size() != expected_size) {
        std::ostringstream m;
        m << path << ": expected " << expected_size << " per-vertex values, got " << spec.values.size();
        errs.push_back(m.str());
      }
    }
    out = spec.values;
    return spec;
  }
  if (in->is_object()) {
    spec.kind = FieldSpec::Kind::expression;
    out = json::object();
    Reader r(*in, out, path, errs);
    spec.expression = parse_expression(r.child("expression"));
    spec.var = r.string("var", std::string("x0"));
    const bool cart = spec.var.size() >= 2 && spec.var[0] == 'x';
    const bool bary = spec.var.size() >= 2 && spec.var[0] == 'b';
    int idx = -1;
    if (cart || bary) {
      try {
        std::size_t used = 0;
        idx = std::stoi(spec.var.substr(1), &used);
        if (used != spec.var.size() - 1) idx = -1;
      } catch (const std::exception&) {
        idx = -1;
      }
    }
    const int limit = cart ? n - 1 : n;
    if (idx < 0 || idx >= limit) {
      std::ostringstream m;
      m << "var must be x0..x" << (n - 2) << " (Cartesian) or b0..b" << (n - 1) << " (barycentric)";
      r.fail("var", m.str());
    }
    r.reject_unknown();
    return spec;
  }
  errs.push_back(path + ": must be a number, an array or an expression object");
  return spec;
}

NonlinearitySpec parse_nonlinearity(Reader r) {
  NonlinearitySpec s;
  s.kind = r.string("kind", std::string("power"));
  s.theta = r.number("theta", std::nullopt);
  if (s.kind == "power") {
    s.scale = r.number("scale", 1.0);
  } else if (s.kind == "polynomial") {
    s.coeffs = r.numbers("coeffs", std::nullopt);
  } else if (s.kind == "sign_power") {
    s.eta = r.number("eta", std::nullopt);
    s.width = r.number("width", 1e-3);
    s.scale = r.number("scale", 1.0);
    if (!(s.width > 0.0)) r.fail("width", "must be > 0");
  } else {
    r.fail("kind", "unknown nonlinearity '" + s.kind + "' (expected power, polynomial, sign_power)");
  }
  r.reject_unknown();
  return s;
}

std::string theta_message(double theta, double epsilon) {
  std::ostringstream m;
  m << "A3: theta must satisfy theta > 2 + epsilon (theta = " << theta << ", epsilon = " << epsilon << ")";
  return m.str();
}

RunConfig parse_impl(const json& doc, bool hypotheses) {
  std::vector<std::string> errs;
  RunConfig cfg;
  json eff = json::object();
  if (!doc.is_object()) throw ConfigError({"configuration must be a JSON object"});
  Reader root(doc, eff, "", errs);

  const int version = root.integer("format_version", kConfigFormatVersion);
  if (version != kConfigFormatVersion) root.fail("format_version", "unsupported version " + std::to_string(version));

  {
    Reader g = root.child("gasket");
    if (!root.has("gasket")) root.fail("gasket", "required field missing");
    cfg.n = g.integer("N", std::nullopt);
    cfg.level = g.integer("level", std::nullopt);
    if (cfg.n < 2) g.fail("N", "must be >= 2");
    if (cfg.level < 0) g.fail("level", "must be >= 0");
    g.reject_unknown();
  }
  const bool gasket_ok = cfg.n >= 2 && cfg.level >= 0;
  std::size_t vertex_count = 0;
  if (gasket_ok) {
    const std::int64_t count = expected_vertex_count(cfg.n, cfg.level);
    if (count < 0 || static_cast<std::size_t>(count) > kDefaultMaxVertices)
      errs.push_back("gasket: level too large for the vertex limit");
    else
      vertex_count = static_cast<std::size_t>(count);
  }

  {
    Reader p = root.child("problem");
    if (!root.has("problem")) root.fail("problem", "required field missing");
    const int n = std::max(cfg.n, 2);
    cfg.a = parse_field(p.raw("a"), p.out()["a"], p.child_path("a"), 0.0, vertex_count, n, errs);
    cfg.g = parse_field(p.raw("g"), p.out()["g"], p.child_path("g"), 1.0, vertex_count, n, errs);
    cfg.u = parse_field(p.raw("u"), p.out()["u"], p.child_path("u"), 0.0, vertex_count, n, errs);
    if (p.has("h")) {
      cfg.h = parse_expression(p.child("h"));
    } else {
      p.raw("h");
      p.out()["h"] = json{{"kind", "constant"}, {"value", 1.0}};
    }
    if (!p.has("nonlinearity")) p.fail("nonlinearity", "required field missing");
    cfg.nonlinearity = parse_nonlinearity(p.child("nonlinearity"));

    Reader b = p.child("bounds");
    const double theta = cfg.nonlinearity.theta;
    cfg.bounds.M = b.number("M", 1.0);
    cfg.bounds.M1 = b.number("M1", 1.0);
    cfg.bounds.beta = b.number("beta", 0.0);
    cfg.bounds.eta = b.number("eta", cfg.nonlinearity.kind == "sign_power" ? cfg.nonlinearity.eta : 0.0);
    cfg.bounds.epsilon = b.number("epsilon", theta > 2.0 ? 0.5 * (theta - 2.0) : 1.0);
    cfg.bounds.c = b.number("c", theta > 2.0 ? 0.5 - 1.0 / theta : 0.0);
    if (!(cfg.bounds.M > 0.0)) b.fail("M", "must be > 0");
    if (!(cfg.bounds.M1 > 0.0)) b.fail("M1", "A4: must be > 0");
    if (!(cfg.bounds.beta >= 0.0)) b.fail("beta", "A4: must be >= 0");
    if (!(cfg.bounds.eta >= 0.0)) b.fail("eta", "A5: must be >= 0");
    if (!(cfg.bounds.epsilon > 0.0)) b.fail("epsilon", "A3: must be > 0");
    if (!(theta > 2.0 + cfg.bounds.epsilon)) errs.push_back(theta_message(theta, cfg.bounds.epsilon));
    b.reject_unknown();
    p.reject_unknown();
  }

  {
    Reader s = root.child("solver");
    SolverOptions& o = cfg.solver;
    o.grad_tol = s.number("grad_tol", o.grad_tol);
    o.max_iters = s.integer("max_iters", o.max_iters);
    o.initial_step = s.number("initial_step", o.initial_step);
    o.max_step = s.number("max_step", o.max_step);
    o.backtrack_factor = s.number("backtrack_factor", o.backtrack_factor);
    o.sufficient_decrease = s.number("sufficient_decrease", o.sufficient_decrease);
    o.path_points = s.integer("path_points", o.path_points);
    o.climb_step = s.number("climb_step", o.climb_step);
    o.newton_switch = s.number("newton_switch", o.newton_switch);
    o.unbounded_floor = s.number("unbounded_floor", o.unbounded_floor);
    s.reject_unknown();
    try {
      o.validate();
    } catch (const ConfigError& e) {
      for (const auto& v : e.violations()) errs.push_back("solver: " + v);
    }
  }

  {
    Reader h = root.child("harness");
    HarnessConfig& c = cfg.harness;
    c.schedule = h.string("schedule", c.schedule);
    c.delta = h.number("delta", c.delta);
    c.n_max = h.integer("n_max", c.n_max);
    c.solver = h.string("solver", c.solver);
    c.final_tol = h.number("final_tol", c.final_tol);
    if (h.has("drift"))
      c.drift = parse_field(h.raw("drift"), h.out()["drift"], h.child_path("drift"), 0.0, vertex_count,
                            std::max(cfg.n, 2), errs);
    if (c.n_max < 1) h.fail("n_max", "must be >= 1");
    if (!(c.final_tol > 0.0)) h.fail("final_tol", "must be > 0");
    try {
      schedule_from_string(c.schedule);
    } catch (const ConfigError& e) {
      h.fail("schedule", e.violations().front());
    }
    try {
      solver_from_string(c.solver);
    } catch (const ConfigError& e) {
      h.fail("solver", e.violations().front());
    }
    h.reject_unknown();
  }

  {
    Reader g = root.child("geometry");
    cfg.geometry.r = g.number("r", 0.0);
    cfg.geometry.n_directions = g.integer("n_directions", 64);
    if (g.has("x_star"))
      cfg.geometry.x_star = parse_field(g.raw("x_star"), g.out()["x_star"], g.child_path("x_star"), 0.0,
                                        vertex_count, std::max(cfg.n, 2), errs);
    if (cfg.geometry.r < 0.0) g.fail("r", "must be >= 0 (0 selects M1 / (2N+3))");
    if (cfg.geometry.n_directions < 16) g.fail("n_directions", "must be >= 16");
    g.reject_unknown();
  }

  cfg.seed = root.unsigned_integer("seed", 0);
  root.reject_unknown();

  if (hypotheses && errs.empty()) {
    try {
      for (auto& v : hypothesis_violations(build_problem(cfg))) errs.push_back(std::move(v));
    } catch (const std::exception& e) {
      errs.push_back(e.what());
    }
  }
  // Keep the first occurrence of each message.
  std::vector<std::string> unique;
  for (auto& e : errs)
    if (std::find(unique.begin(), unique.end(), e) == unique.end()) unique.push_back(std::move(e));
  if (!unique.empty()) throw ConfigError(unique);

  cfg.effective = std::move(eff);
  cfg.hash = sha256_hex(cfg.effective.dump());
  return cfg;
}

}  // namespace

RunConfig parse_config_json(const json& doc) { return parse_impl(doc, true); }

RunConfig parse_config_schema(const json& doc) { return parse_impl(doc, false); }

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot read configuration file " + path.string()});
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError({path.string() + ": " + e.what()});
  }
  return parse_config_json(doc);
}

VertexField make_field(const FieldSpec& spec, const GraphPtr& graph) {
  switch (spec.kind) {
    case FieldSpec::Kind::constant:
      return VertexField::constant(graph, spec.value);
    case FieldSpec::Kind::values:
      if (spec.values.size() != graph->vertex_count())
        throw PreconditionError("per-vertex field has the wrong length");
      return VertexField(graph, Eigen::Map<const Eigen::VectorXd>(spec.values.data(),
                                                                  static_cast<Eigen::Index>(spec.values.size())));
    case FieldSpec::Kind::expression: {
      const int idx = std::stoi(spec.var.substr(1));
      Eigen::VectorXd v(static_cast<Eigen::Index>(graph->vertex_count()));
      if (spec.var[0] == 'x') {
        const auto coords = embed_coordinates(*graph);
        for (std::size_t i = 0; i < coords.size(); ++i) v[static_cast<Eigen::Index>(i)] = spec.expression(coords[i][idx]);
      } else {
        for (std::size_t i = 0; i < graph->vertex_count(); ++i) {
          const auto& b = graph->vertices()[i];
          const double t = static_cast<double>(b.coords[static_cast<std::size_t>(idx)]) /
                           static_cast<double>(std::int64_t{1} << b.level);
          v[static_cast<Eigen::Index>(i)] = spec.expression(t);
        }
      }
      return VertexField(graph, std::move(v));
    }
  }
  throw PreconditionError("unknown field kind");
}

Nonlinearity make_nonlinearity(const NonlinearitySpec& s) {
  if (s.kind == "power") return Nonlinearity::power(s.scale, s.theta);
  if (s.kind == "polynomial") return Nonlinearity::polynomial(s.coeffs, s.theta);
  if (s.kind == "sign_power") return Nonlinearity::sign_power(s.eta, s.width, s.scale, s.theta);
  throw PreconditionError("unknown nonlinearity " + s.kind);
}

ProblemInstance build_problem(const RunConfig& cfg) { return build_problem(cfg, make_form(make_graph(cfg.n, cfg.level))); }

ProblemInstance build_problem(const RunConfig& cfg, FormPtr form) {
  const GraphPtr& graph = form->graph_ptr();
  VertexField a = make_field(cfg.a, graph);
  VertexField g = make_field(cfg.g, graph);
  VertexField u = make_field(cfg.u, graph);
  const ProblemBounds bounds = ProblemInstance::fill_data_bounds(cfg.bounds, g, cfg.h);
  return ProblemInstance(std::move(form), std::move(a), std::move(g), std::move(u), cfg.h,
                         make_nonlinearity(cfg.nonlinearity), bounds);
}

std::optional<VertexField> make_x_star(const RunConfig& cfg, const GraphPtr& graph) {
  if (!cfg.geometry.x_star) return std::nullopt;
  VertexField x = make_field(*cfg.geometry.x_star, graph);
  for (std::size_t v : graph->boundary()) x[v] = 0.0;
  return x;
}

ExperimentOptions experiment_options(const RunConfig& cfg) {
  ExperimentOptions o;
  o.solver = cfg.solver;
  o.solver.seed = cfg.seed;
  o.r = cfg.geometry.r;
  o.n_directions = cfg.geometry.n_directions;
  o.final_tol = cfg.harness.final_tol;
  return o;
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 digest failed");
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return hex.str();
}

}  // namespace sgcp
