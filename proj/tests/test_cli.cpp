#include "support.hpp"

#include "sgcp/io.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(SGCP_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string cfg(const std::string& name) { return testing::config_path(name).string(); }

}  // namespace

TEST_CASE("gasket build writes the graph") {
  const auto dir = testing::scratch_dir("cli_gasket");
  REQUIRE(run("gasket build --n 3 --level 2 --out " + (dir / "g.json").string() + " --dump-stiffness " +
              (dir / "k.txt").string()) == 0);
  const json g = sgcp::read_json(dir / "g.json");
  CHECK(g.at("vertices").size() == 15);
  CHECK(g.at("edges").size() == 27);
  CHECK(g.at("cells").size() == 9);
  CHECK(fs::file_size(dir / "k.txt") > 0);
}

TEST_CASE("invalid configuration exits with 1") {
  const auto dir = testing::scratch_dir("cli_invalid");
  json doc = sgcp::read_json(testing::config_path("minimal.json"));
  doc["problem"]["nonlinearity"]["theta"] = 1.5;
  sgcp::write_json(dir / "bad.json", doc);
  CHECK(run("solve min --config " + (dir / "bad.json").string() + " --out " + (dir / "run").string()) == 1);
  CHECK(run("solve min") == 1);
  CHECK(run("frobnicate") == 1);
}

TEST_CASE("check-assumptions reports and exits 0") {
  const auto dir = testing::scratch_dir("cli_check");
  REQUIRE(run("check-assumptions --config " + cfg("double_critical.json") + " --grid 101 --out " + dir.string()) == 0);
  const json rep = sgcp::read_json(dir / "assumptions.json");
  CHECK(rep.at("assumptions").size() == 5);
  CHECK(rep.at("assumptions")[0].at("name") == "A1");
  CHECK(rep.at("assumptions")[0].at("status") == "pass");
}

TEST_CASE("solve writes a complete, reproducible run directory") {
  const auto dir = testing::scratch_dir("cli_solve");
  REQUIRE(run("solve mpa --config " + cfg("oracle_cubic.json") + " --out " + (dir / "a").string()) == 0);
  for (const char* f : {"effective_config.json", "graph_summary.json", "result.json", "trace.csv", "run_info.json"})
    CHECK(fs::exists(dir / "a" / f));
  const json res = sgcp::read_json(dir / "a" / "result.json");
  CHECK(res.at("solutions")[0].at("converged") == true);
  CHECK(res.at("solutions")[0].at("action").get<double>() > 0.0);

  // Rerunning from the effective config reproduces the results bit for bit.
  REQUIRE(run("solve mpa --config " + (dir / "a" / "effective_config.json").string() + " --out " +
              (dir / "b").string()) == 0);
  CHECK(slurp(dir / "a" / "result.json") == slurp(dir / "b" / "result.json"));
  CHECK(slurp(dir / "a" / "trace.csv") == slurp(dir / "b" / "trace.csv"));

  // The mountain-pass point seeds a minimization that stays put.
  REQUIRE(run("solve min --config " + cfg("oracle_cubic.json") + " --start " + (dir / "a" / "result.json").string() +
              " --out " + (dir / "c").string()) == 0);
  const json c = sgcp::read_json(dir / "c" / "result.json");
  CHECK(c.at("solutions")[0].at("action").get<double>() ==
        doctest::Approx(res.at("solutions")[0].at("action").get<double>()).epsilon(1e-10));
}

TEST_CASE("non-convergence exits with 2") {
  const auto dir = testing::scratch_dir("cli_maxit");
  json doc = sgcp::read_json(testing::config_path("oracle_cubic.json"));
  doc["solver"]["max_iters"] = 1;
  sgcp::write_json(dir / "short.json", doc);
  CHECK(run("solve mpa --config " + (dir / "short.json").string() + " --out " + (dir / "run").string()) == 2);
}

TEST_CASE("oracle, sweep and report") {
  const auto dir = testing::scratch_dir("cli_sweep");
  REQUIRE(run("oracle --config " + cfg("oracle_cubic.json") + " --box -5 5 --res 31 --out " +
              (dir / "oracle").string()) == 0);
  CHECK(sgcp::read_json(dir / "oracle" / "oracle.json").at("critical_points").size() >= 2);

  REQUIRE(run("sweep --config " + cfg("sweep.json") + " --nmax 4 --delta 0 --plot-data --out " +
              (dir / "s1").string()) == 0);
  REQUIRE(run("sweep --config " + cfg("sweep.json") + " --nmax 4 --schedule g_scale --out " +
              (dir / "s2").string()) == 0);
  CHECK(fs::exists(dir / "s1" / "table.csv"));
  CHECK(fs::exists(dir / "s1" / "plot_data.csv"));
  REQUIRE(run("report --dir " + dir.string() + " --out " + (dir / "all.csv").string()) == 0);
  std::ifstream in(dir / "all.csv");
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 1 + 2 * 5);
}
