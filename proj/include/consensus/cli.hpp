#pragma once

// Front end of the consensus_dyn tool. cli_main is the whole program; the
// subcommands are exposed so tests can call them in-process.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "consensus/io.hpp"

namespace consensus {

// Stable exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInvalid = 2;  // bad config, bad trace, IO failure
inline constexpr int kExitAudit = 3;    // an enabled audit found a violation

struct CliContext {
  std::filesystem::path out_dir;             // empty: current directory
  std::optional<std::uint64_t> seed;         // --seed override
  std::size_t threads = 1;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
};

/// --threads, else CONSENSUS_DYN_THREADS, else the hardware concurrency.
std::size_t resolve_threads(std::optional<std::size_t> flag);

struct SweepRow {
  std::size_t scenario_id = 0;
  std::size_t n = 0;
  int d = 0;
  std::string algorithm;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> t_eps;
  std::optional<std::uint64_t> bound_t;
  double worst_alpha = std::numeric_limits<double>::quiet_NaN();
  double empirical_rate = 0;
  bool converged = false;
};

/// Scenarios of the cartesian product of the sweep axes, in lexicographic
/// order (n, then d, then algorithm, then seed). An empty axis keeps the
/// base value.
std::vector<RunSpec> expand_sweep(const ScenarioConfig& config);
std::vector<SweepRow> run_sweep(const std::vector<RunSpec>& specs, std::size_t threads);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

int cmd_run(const ScenarioConfig& config, const CliContext& ctx);
int cmd_sweep(const ScenarioConfig& config, const CliContext& ctx);
int cmd_counterexample(const CliContext& ctx, std::uint64_t seed, std::size_t samples);
int cmd_plotdata(const std::filesystem::path& trace_path, const ScenarioConfig* config, const CliContext& ctx);
int cmd_verify(const ScenarioConfig& config, const std::filesystem::path& trace_path, const CliContext& ctx);

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace consensus
