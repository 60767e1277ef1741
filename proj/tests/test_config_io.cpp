#include "support.hpp"

#include "sgcp/errors.hpp"
#include "sgcp/io.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace sgcp;
using nlohmann::json;

namespace {

json minimal() {
  return json{{"gasket", {{"N", 3}, {"level", 2}}},
              {"problem", {{"nonlinearity", {{"kind", "power"}, {"theta", 4.0}}}}}};
}

std::vector<std::string> violations_of(const json& doc) {
  try {
    parse_config_json(doc);
  } catch (const ConfigError& e) {
    return e.violations();
  }
  return {};
}

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
  for (const auto& s : v)
    if (s.find(needle) != std::string::npos) return true;
  return false;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("minimal config fills and echoes defaults") {
  const RunConfig cfg = parse_config(testing::config_path("minimal.json"));
  CHECK(cfg.n == 3);
  CHECK(cfg.level == 2);
  CHECK(cfg.nonlinearity.theta == 4.0);
  CHECK(cfg.solver.grad_tol == 1e-8);
  CHECK(cfg.solver.path_points == 41);
  const json& e = cfg.effective;
  CHECK(e.at("solver").at("grad_tol") == 1e-8);
  CHECK(e.at("problem").at("bounds").at("epsilon") == 1.0);
  CHECK(e.at("problem").at("bounds").at("c") == 0.25);
  CHECK(e.at("problem").contains("a"));
  CHECK(e.at("harness").at("n_max") == 32);
  CHECK(e.contains("seed"));
  CHECK(e.at("format_version") == kConfigFormatVersion);

  // The effective config is a fixed point: parsing it again gives the same hash.
  CHECK(parse_config_json(cfg.effective).hash == cfg.hash);
  CHECK(cfg.hash == sha256_hex(cfg.effective.dump()));
}

TEST_CASE("sha256 of known strings") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("theta below 2 + epsilon names the A3 constraint") {
  json doc = minimal();
  doc["problem"]["nonlinearity"]["theta"] = 1.5;
  const auto v = violations_of(doc);
  REQUIRE_FALSE(v.empty());
  CHECK(mentions(v, "A3"));
  CHECK(mentions(v, "theta > 2 + epsilon"));
}

TEST_CASE("positive a names A1") {
  json doc = minimal();
  doc["problem"]["a"] = 1.0;
  const auto v = violations_of(doc);
  REQUIRE_FALSE(v.empty());
  CHECK(mentions(v, "A1"));
}

TEST_CASE("every violation is reported, not just the first") {
  json doc = minimal();
  doc["problem"]["a"] = 1.0;
  doc["problem"]["nonlinearity"]["theta"] = 1.5;
  doc["problem"]["bounds"]["M"] = -1.0;
  doc["gasket"]["N"] = 1;
  doc["solver"]["grad_tol"] = -1.0;
  doc["mystery"] = 3;
  const auto v = violations_of(doc);
  CHECK(v.size() >= 4);
  CHECK(mentions(v, "mystery"));
  CHECK(mentions(v, "grad_tol"));
  CHECK(mentions(v, "N"));
  CHECK(mentions(v, "M"));
}

TEST_CASE("missing gasket block is an error") {
  json doc = minimal();
  doc.erase("gasket");
  CHECK_FALSE(violations_of(doc).empty());
}

TEST_CASE("schema parse keeps non-compliant problems checkable") {
  json doc = minimal();
  doc["problem"]["a"] = 1.0;
  CHECK_NOTHROW(parse_config_schema(doc));
}

TEST_CASE("field specs") {
  auto g = make_graph(3, 2);
  FieldSpec c;
  c.value = -0.5;
  CHECK(make_field(c, g).values().maxCoeff() == -0.5);

  FieldSpec e;
  e.kind = FieldSpec::Kind::expression;
  e.expression = Expression::polynomial({1.0, 2.0});
  e.var = "b1";
  const VertexField f = make_field(e, g);
  for (std::size_t v = 0; v < g->vertex_count(); ++v)
    CHECK(f[v] == doctest::Approx(1.0 + 2.0 * g->vertices()[v].coords[1] / 4.0));

  FieldSpec arr;
  arr.kind = FieldSpec::Kind::values;
  arr.values = std::vector<double>(g->vertex_count(), 2.0);
  CHECK(make_field(arr, g).values().minCoeff() == 2.0);
  arr.values.pop_back();
  CHECK_THROWS(make_field(arr, g));
}

TEST_CASE("persist and load round-trip exactly") {
  const ProblemInstance p = testing::power_problem(3, 2, -0.5, 1.0);
  std::mt19937_64 rng(41);
  CriticalPointResult r;
  r.point = testing::random_dirichlet(p.graph_ptr(), rng);
  r.point[p.graph().interior()[0]] = 1.0 / 3.0;
  r.value = p.action(r.point);
  r.dual_grad_norm = p.gradient(r.point).dual_norm;
  r.status = SolverStatus::converged;
  const auto dir = testing::scratch_dir("roundtrip");
  const auto path = persist_result(p, {{"x", r}}, RunMeta{"hash", 9, "test"}, dir);

  const VertexField back = load_field(path, p.graph_ptr());
  CHECK(back.values() == r.point.values());
  CHECK(std::abs(stored_action(path) - p.action(back)) <= 1e-12);

  const json doc = read_json(path);
  CHECK(doc.at("format_version") == kResultFormatVersion);
  CHECK(doc.at("config_hash") == "hash");
  CHECK(doc.at("seed") == 9);

  CHECK_THROWS_AS(load_field(path, make_graph(3, 3)), AddressMismatchError);
  CHECK_THROWS_AS(load_field(path, make_graph(4, 2)), AddressMismatchError);

  const auto again = persist_result(p, {{"x", r}}, RunMeta{"hash", 9, "test"}, dir, "again.json");
  CHECK(slurp(path) == slurp(again));
}

TEST_CASE("tampered addresses are detected") {
  const ProblemInstance p = testing::power_problem(3, 1, 0.0, 1.0);
  CriticalPointResult r;
  r.point = VertexField::zeros(p.graph_ptr());
  const auto dir = testing::scratch_dir("tamper");
  const auto path = persist_result(p, {{"x", r}}, RunMeta{}, dir);
  json doc = read_json(path);
  doc["solutions"][0]["vertices"][2]["address"] = {2, 0, 0};
  write_json(path, doc);
  CHECK_THROWS_AS(load_field(path, p.graph_ptr()), AddressMismatchError);
}

TEST_CASE("csv outputs have headers and full precision") {
  const auto dir = testing::scratch_dir("csv");
  write_trace_csv(dir / "trace.csv", {{0, 1.0 / 3.0, 0.5}, {1, 0.25, 0.125}});
  std::ifstream in(dir / "trace.csv");
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  CHECK(header == "iter,value,grad_norm");
  CHECK(std::stod(first.substr(2, first.find(',', 2) - 2)) == 1.0 / 3.0);
}

TEST_CASE("report collates table files") {
  const auto dir = testing::scratch_dir("collate");
  ConvergenceTable t;
  t.rows.resize(3);
  for (int i = 0; i < 3; ++i) t.rows[static_cast<std::size_t>(i)].n = i;
  write_table_csv(dir / "a" / "table.csv", t);
  write_table_csv(dir / "b" / "table_mpa.csv", t);
  CHECK(collate_tables(dir, dir / "report.csv") == 6);
  std::ifstream in(dir / "report.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header.rfind("source,n,", 0) == 0);
}
