#pragma once

// Round engine: runs an algorithm over a communication pattern from an
// initial configuration and records per-component diameters, safeness
// margins and the convergence time.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "consensus/algorithms.hpp"
#include "consensus/geometry.hpp"
#include "consensus/pattern.hpp"

namespace consensus {

/// Positions after `round` rounds, one agent per column (d x n).
struct Configuration {
  PointSet positions;
  std::uint64_t round = 0;

  std::size_t agents() const { return static_cast<std::size_t>(positions.cols()); }
  int dimension() const { return static_cast<int>(positions.rows()); }
};

/// delta(x^k) = max_p x_{p,k} - min_p x_{p,k}, for every component k.
Eigen::VectorXd component_diameters(const PointSet& positions);

/// Largest Euclidean distance between two agents.
double max_pairwise_distance(const PointSet& positions);

/// Below this, a diameter counts as zero (ratios and safeness margins are
/// then undefined and skipped).
inline constexpr double kDiameterFloor = 1e-30;

/// Absolute rounding error tolerated on a quantity computed from coordinates
/// of magnitude `magnitude`: 4 ulps.
inline double rounding_allowance(double magnitude) {
  return 4 * std::numeric_limits<double>::epsilon() * std::abs(magnitude);
}

/// Safeness margin of x against the range [lo, hi]:
/// min(x - lo, hi - x) / (hi - lo), with both distances credited the rounding
/// allowance of the coordinates and the result capped at 1/2. NaN when
/// hi - lo <= kDiameterFloor.
inline double safe_margin(double lo, double hi, double x) {
  if (hi - lo <= kDiameterFloor) return std::numeric_limits<double>::quiet_NaN();
  const double u = rounding_allowance(std::max({std::abs(lo), std::abs(hi), std::abs(x)}));
  return std::min(0.5, (std::min(x - lo, hi - x) + u) / (hi - lo));
}

struct PatternSpec {
  // fixed | periodic | random-rooted | random-nonsplit | rotating-star |
  // bidirectional-intermittent
  std::string family = "random-rooted";
  std::optional<std::uint64_t> seed;  // defaults to the run seed
  std::uint64_t period = 5;           // bidirectional-intermittent only
  std::vector<CommGraph> graphs;      // fixed (one graph) or periodic

  bool operator==(const PatternSpec&) const = default;
};

CommPattern make_pattern(const PatternSpec& spec, std::size_t n, std::uint64_t run_seed);

struct InitialSpec {
  enum class Kind { Explicit, RandomUnitBox };
  Kind kind = Kind::RandomUnitBox;
  PointSet positions;                 // Explicit: d x n
  std::optional<std::uint64_t> seed;  // RandomUnitBox: defaults to the run seed

  bool operator==(const InitialSpec& other) const;
};

/// Uniform positions in [0,1]^d; deterministic in the seed.
PointSet random_unit_box(std::size_t n, int d, std::uint64_t seed);

struct RunSpec {
  std::size_t n = 3;
  int d = 1;
  AlgorithmKind algorithm;
  AlgorithmOptions options;
  PatternSpec pattern;
  InitialSpec initial;
  double epsilon = 1e-3;
  std::uint64_t max_rounds = 100000;
  std::uint64_t seed = 0;
  bool record_configurations = true;
  bool record_margins = true;
};

/// Throws std::invalid_argument on an inconsistent spec.
void validate_spec(const RunSpec& spec);

struct Metrics {
  std::optional<std::uint64_t> t_eps;  // empty: not reached within max_rounds
  double empirical_rate = 0;           // finite-horizon geometric mean ratio
  std::optional<std::uint64_t> bound_t;
  std::string theorem;  // which bound applies, empty if none
  bool converged = false;
};

struct RunTrace {
  std::size_t n = 0;
  int d = 0;
  std::size_t period = 1;
  std::uint64_t rounds = 0;  // rounds executed
  Configuration initial;
  Configuration final_configuration;
  std::vector<Configuration> configurations;  // rounds 0..rounds when recorded
  std::vector<Eigen::VectorXd> deltas;        // rounds 0..rounds
  // Realized safeness per round and agent (min over components), NaN on
  // rounds without an averaging step or when every range is vacuous.
  std::vector<Eigen::VectorXd> margins;
  Metrics metrics;
};

/// One synchronous round: agent p receives the messages of In_p(g), all
/// built from the pre-round states.
std::pair<Configuration, std::vector<AgentState>> step(const Configuration& config,
                                                       const CommGraph& g,
                                                       const std::vector<AgentState>& states,
                                                       const AlgorithmKind& kind,
                                                       std::uint64_t round,
                                                       const AlgorithmOptions& options = {});

/// Same round with agents evaluated in the given order. The result does not
/// depend on the order; exposed so tests can check that.
std::pair<Configuration, std::vector<AgentState>> step_in_order(
    const Configuration& config, const CommGraph& g, const std::vector<AgentState>& states,
    const AlgorithmKind& kind, std::uint64_t round, const AlgorithmOptions& options,
    const std::vector<AgentId>& order);

RunTrace run(const RunSpec& spec);

/// Initial configuration a spec resolves to.
Configuration initial_configuration(const RunSpec& spec);

/// Ratios delta_k(sL) / delta_k((s-1)L) for each macro-round s (rows of the
/// result) and component k. A denominator below kDiameterFloor gives 0.
std::vector<Eigen::VectorXd> measure_contraction(const RunTrace& trace, std::size_t macro_period);

/// Convergence-time bound of the theorem matching the scenario, with the
/// relative criterion (delta(0)/epsilon read as 1/epsilon). Throws
/// UnsupportedScenario when no theorem applies.
std::uint64_t theorem_bound(const RunSpec& spec, const Eigen::VectorXd& delta0);

/// Name of the theorem theorem_bound would use ("nonsplit", "amortized-rooted").
std::string bound_family(const RunSpec& spec);

/// Smallest integer k with base^k >= ratio (base > 1, ratio >= 1); a
/// logarithm within 1e-9 of an integer is taken as that integer.
std::uint64_t ceil_log(double ratio, double base);

}  // namespace consensus
