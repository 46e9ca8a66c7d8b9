#pragma once

// Scenario files, graph literals and the CSV/JSON artifacts a run produces.
// Everything here is plain data conversion; nothing runs a simulation.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "consensus/geometry.hpp"
#include "consensus/graph.hpp"
#include "consensus/simulator.hpp"
#include "consensus/verification.hpp"

namespace consensus {

using Json = nlohmann::json;

/// Malformed or inconsistent input file. Maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// {"n": int, "edges": [[p, q], ...]}. Missing self-loops are added and
/// noted in `warnings`.
CommGraph graph_from_json(const Json& j, std::vector<std::string>* warnings = nullptr);
Json graph_to_json(const CommGraph& g);

/// Vertex list, one array of d coordinates per vertex.
Json polytope_to_json(const Polytoped& poly);
PointSet points_from_json(const Json& j);

struct AuditToggles {
  bool safeness = false;
  bool matrices = false;
  bool moreau = false;
  std::uint64_t moreau_window = 0;  // 0: the pattern period

  bool operator==(const AuditToggles&) const = default;
};

struct OutputPaths {
  std::string trace;
  std::string deltas;
  std::string summary;
  std::string report;
  std::string sweep;

  bool operator==(const OutputPaths&) const = default;
};

struct SweepAxes {
  std::vector<std::size_t> n;
  std::vector<int> d;
  std::vector<std::string> algorithm;
  std::vector<std::uint64_t> seed;

  bool empty() const { return n.empty() && d.empty() && algorithm.empty() && seed.empty(); }
  bool operator==(const SweepAxes&) const = default;
};

struct ScenarioConfig {
  RunSpec spec;
  AuditToggles audit;
  OutputPaths output;
  SweepAxes sweep;
  std::vector<std::string> warnings;  // not part of equality
};

bool same_spec(const RunSpec& a, const RunSpec& b);
bool operator==(const ScenarioConfig& a, const ScenarioConfig& b);

/// Schema-checked: unknown keys, wrong types and out-of-range values throw
/// ConfigError. Semantic checks (validate_spec) are left to the caller.
ScenarioConfig config_from_json(const Json& j);
Json config_to_json(const ScenarioConfig& config);
ScenarioConfig load_config(const std::filesystem::path& path);

/// round,agent,comp_0,...,comp_{d-1}; doubles printed with 17 significant
/// digits so the file reads back bit-exact.
void write_trace_csv(std::ostream& os, const RunTrace& trace);
/// round,k,delta_k
void write_deltas_csv(std::ostream& os, const RunTrace& trace);
/// Rebuilds n, d, rounds, configurations and deltas from a trace CSV.
RunTrace read_trace_csv(std::istream& is);

Json metrics_to_json(const RunSpec& spec, const RunTrace& trace);
Json safeness_report_to_json(const SafenessReport& report);
Json moreau_report_to_json(const MoreauReport& report);

std::string format_double(double x);

}  // namespace consensus
