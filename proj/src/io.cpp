#include "sgcp/io.hpp"

#include "sgcp/errors.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace sgcp {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << std::setprecision(17);
  return out;
}

std::string utc_stamp(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

}  // namespace

json graph_summary(const DiscreteForm& form) {
  const PrefractalGraph& g = form.graph();
  return json{{"format_version", kResultFormatVersion},
              {"N", g.n()},
              {"level", g.level()},
              {"vertex_count", g.vertex_count()},
              {"expected_vertex_count", expected_vertex_count(g.n(), g.level())},
              {"edge_count", g.edges().size()},
              {"cell_count", g.cells().size()},
              {"boundary_count", g.boundary().size()},
              {"interior_count", g.interior().size()},
              {"renormalization", form.renormalization()},
              {"embedding_constant", form.embedding_constant()},
              {"weight_sum", form.weights().values().sum()}};
}

json graph_export(const PrefractalGraph& graph) {
  const auto coords = embed_coordinates(graph);
  json vertices = json::array();
  for (std::size_t i = 0; i < graph.vertex_count(); ++i) {
    const auto& v = graph.vertices()[i];
    vertices.push_back({{"index", i},
                        {"address", v.coords},
                        {"denominator", std::int64_t{1} << v.level},
                        {"coords", std::vector<double>(coords[i].data(), coords[i].data() + coords[i].size())},
                        {"boundary", graph.is_boundary(i)}});
  }
  json edges = json::array();
  for (const auto& e : graph.edges()) edges.push_back({e.first, e.second});
  return json{{"format_version", kResultFormatVersion},
              {"N", graph.n()},
              {"level", graph.level()},
              {"vertices", std::move(vertices)},
              {"edges", std::move(edges)},
              {"cells", graph.cells()}};
}

json field_records(const VertexField& x) {
  const PrefractalGraph& graph = x.graph();
  const auto coords = embed_coordinates(graph);
  json out = json::array();
  for (std::size_t i = 0; i < graph.vertex_count(); ++i) {
    const auto& v = graph.vertices()[i];
    out.push_back({{"address", v.coords},
                   {"denominator", std::int64_t{1} << v.level},
                   {"coords", std::vector<double>(coords[i].data(), coords[i].data() + coords[i].size())},
                   {"value", x[i]}});
  }
  return out;
}

void write_json(const fs::path& path, const json& doc) {
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return json::parse(in);
}

fs::path persist_result(const ProblemInstance& problem, const std::vector<SolutionRecord>& solutions,
                        const RunMeta& meta, const fs::path& dir, const std::string& file_name) {
  json sols = json::array();
  for (const auto& s : solutions) {
    const CriticalPointResult& r = s.result;
    const Norms norms = problem.form().norms(r.point);
    sols.push_back({{"label", s.label},
                    {"kind", to_string(r.kind)},
                    {"status", to_string(r.status)},
                    {"converged", r.converged()},
                    {"action", r.value},
                    {"dual_grad_norm", r.dual_grad_norm},
                    {"iterations", r.iterations},
                    {"norms",
                     {{"energy", norms.energy_norm}, {"sup", norms.sup_norm}, {"l2_mu", norms.l2_mu_norm}}},
                    {"warnings", r.warnings},
                    {"vertices", field_records(r.point)}});
  }
  const json doc{{"format_version", kResultFormatVersion},
                 {"library", kLibraryVersion},
                 {"config_hash", meta.config_hash},
                 {"seed", meta.seed},
                 {"command", meta.command},
                 {"graph", {{"N", problem.graph().n()}, {"level", problem.graph().level()},
                            {"vertex_count", problem.graph().vertex_count()}}},
                 {"solutions", std::move(sols)}};
  const fs::path path = dir / file_name;
  write_json(path, doc);
  return path;
}

VertexField load_field(const fs::path& path, const GraphPtr& graph, std::size_t index) {
  const json doc = read_json(path);
  const json* g = doc.contains("graph") ? &doc.at("graph") : &doc;
  const int n = g->value("N", -1);
  const int level = g->value("level", -1);
  if (n != graph->n() || level != graph->level()) {
    std::ostringstream m;
    m << path.string() << " holds a field on N = " << n << ", level " << level << "; the graph has N = " << graph->n()
      << ", level " << graph->level();
    throw AddressMismatchError(m.str());
  }
  const json* verts = nullptr;
  if (doc.contains("solutions")) {
    if (index >= doc.at("solutions").size()) throw PreconditionError("solution index out of range");
    verts = &doc.at("solutions").at(index).at("vertices");
  } else {
    verts = &doc.at("vertices");
  }
  if (verts->size() != graph->vertex_count())
    throw AddressMismatchError(path.string() + ": vertex count differs from the graph");
  Eigen::VectorXd values(static_cast<Eigen::Index>(graph->vertex_count()));
  for (std::size_t i = 0; i < graph->vertex_count(); ++i) {
    const json& rec = verts->at(i);
    const auto address = rec.at("address").get<std::vector<std::int64_t>>();
    const auto& v = graph->vertices()[i];
    if (address != v.coords || rec.at("denominator").get<std::int64_t>() != (std::int64_t{1} << v.level))
      throw AddressMismatchError(path.string() + ": address of vertex " + std::to_string(i) + " differs from the graph");
    values[static_cast<Eigen::Index>(i)] = rec.at("value").get<double>();
  }
  return VertexField(graph, std::move(values));
}

double stored_action(const fs::path& path, std::size_t index) {
  return read_json(path).at("solutions").at(index).at("action").get<double>();
}

void write_trace_csv(const fs::path& path, const std::vector<TraceRow>& trace) {
  auto out = open_out(path);
  out << "iter,value,grad_norm\n";
  for (const auto& r : trace) out << r.iter << ',' << r.value << ',' << r.grad_norm << '\n';
}

void write_table_csv(const fs::path& path, const ConvergenceTable& table) {
  auto out = open_out(path);
  out << "n,limit_value,value_gap,distance,limit_grad_norm,own_grad_norm,value_sup,derivative_sup,status,iterations\n";
  for (const auto& r : table.rows)
    out << r.n << ',' << r.limit_value << ',' << r.value_gap << ',' << r.distance << ',' << r.limit_grad_norm << ','
        << r.own_grad_norm << ',' << r.value_sup << ',' << r.derivative_sup << ',' << r.status << ','
        << r.iterations << '\n';
}

void write_plot_data(const fs::path& path, const ConvergenceTable& table) {
  auto out = open_out(path);
  out << "n,distance,value_gap\n";
  for (const auto& r : table.rows)
    if (r.n > 0) out << r.n << ',' << r.distance << ',' << r.value_gap << '\n';
}

json table_summary(const ConvergenceTable& t) {
  const auto& e = t.estimate;
  return json{{"format_version", kResultFormatVersion},
              {"solver", t.solver},
              {"branch", t.branch},
              {"rows", t.rows.size()},
              {"limit_value", t.rows.front().limit_value},
              {"final_distance", t.rows.back().distance},
              {"final_value_gap", t.rows.back().value_gap},
              {"limit_verified", t.limit_verified},
              {"distance_decreasing_after_4", t.distance_decreasing},
              {"final_within_tol", t.final_within_tol},
              {"local_minimizers_only", t.local_only},
              {"estimate",
               {{"sample_size", e.sample_size},
                {"sample", e.sample_description},
                {"value_sup", e.value_sup},
                {"derivative_sup", e.derivative_sup},
                {"value_monotone", e.value_monotone},
                {"derivative_monotone", e.derivative_monotone},
                {"rate_constant", e.rate_constant},
                {"derivative_rate_constant", e.derivative_rate_constant},
                {"rate_within_factor_two", e.rate_within_factor_two}}},
              {"warnings", t.warnings}};
}

void write_run_info(const fs::path& dir, const std::string& command, double elapsed_seconds) {
  const auto now = std::chrono::system_clock::now();
  const auto start = now - std::chrono::duration_cast<std::chrono::system_clock::duration>(
                               std::chrono::duration<double>(elapsed_seconds));
  write_json(dir / "run_info.json", json{{"library", kLibraryVersion},
                                         {"command", command},
                                         {"started_utc", utc_stamp(start)},
                                         {"finished_utc", utc_stamp(now)},
                                         {"elapsed_seconds", elapsed_seconds}});
}

std::size_t collate_tables(const fs::path& dir, const fs::path& out_path) {
  if (!fs::is_directory(dir)) throw PreconditionError(dir.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.rfind("table", 0) == 0 && entry.path().extension() == ".csv")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  auto out = open_out(out_path);
  std::string header;
  std::size_t rows = 0;
  for (const auto& f : files) {
    if (fs::equivalent(f, out_path)) continue;
    std::ifstream in(f);
    std::string line;
    if (!std::getline(in, line)) continue;
    if (header.empty()) {
      header = line;
      out << "source," << header << '\n';
    } else if (line != header) {
      continue;
    }
    const std::string source = fs::relative(f, dir).generic_string();
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      out << source << ',' << line << '\n';
      ++rows;
    }
  }
  return rows;
}

}  // namespace sgcp
