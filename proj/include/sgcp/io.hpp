#pragma once

// Run-directory files. JSON doubles are written in shortest round-trip form,
// so reloading a field gives back the exact same bits. Timestamps go to
// run_info.json only; everything else is a pure function of config + seed.

#include "sgcp/config.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace sgcp {

inline constexpr int kResultFormatVersion = 1;
inline constexpr const char* kLibraryVersion = "sgcp 1.0.0";

/// Counts and constants of the graph and its form.
nlohmann::json graph_summary(const DiscreteForm& form);

/// Vertices (address numerators, denominator, coordinates) and edges.
nlohmann::json graph_export(const PrefractalGraph& graph);

/// One vertex record per vertex: address, denominator, coords, value.
nlohmann::json field_records(const VertexField& x);

struct SolutionRecord {
  std::string label;  ///< e.g. "min", "mpa"
  CriticalPointResult result;
};

struct RunMeta {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string command;
};

/// Writes <dir>/<file_name>; returns its path.
std::filesystem::path persist_result(const ProblemInstance& problem, const std::vector<SolutionRecord>& solutions,
                                     const RunMeta& meta, const std::filesystem::path& dir,
                                     const std::string& file_name = "result.json");

/// Field stored under solutions[index] of a result file (or the top-level
/// "vertices" of a field file). Throws AddressMismatchError when N, the
/// level or any vertex address differs from the graph.
VertexField load_field(const std::filesystem::path& path, const GraphPtr& graph, std::size_t index = 0);

/// Action value stored for solutions[index].
double stored_action(const std::filesystem::path& path, std::size_t index = 0);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);
nlohmann::json read_json(const std::filesystem::path& path);

void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& trace);
void write_table_csv(const std::filesystem::path& path, const ConvergenceTable& table);
/// Columns n, distance, value_gap.
void write_plot_data(const std::filesystem::path& path, const ConvergenceTable& table);
nlohmann::json table_summary(const ConvergenceTable& table);

/// Start/end wall-clock stamps and elapsed time; kept apart from results.
void write_run_info(const std::filesystem::path& dir, const std::string& command, double elapsed_seconds);

/// Collates every table CSV under dir (recursively) into one CSV with a
/// leading source column. Returns the number of rows written.
std::size_t collate_tables(const std::filesystem::path& dir, const std::filesystem::path& out);

}  // namespace sgcp
