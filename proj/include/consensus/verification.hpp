#pragma once

// Independent checkers over recorded runs: per-transition safeness audits,
// reconstruction of the per-component stochastic matrices that an alpha-safe
// run realizes, the four Moreau assumptions on such matrices, and a naive
// 1-D reference simulator for cross-checking the round engine.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "consensus/algorithms.hpp"
#include "consensus/graph.hpp"
#include "consensus/pattern.hpp"
#include "consensus/simulator.hpp"

namespace consensus {

struct SafenessViolationRecord {
  std::uint64_t round = 0;  // round at which the averaging step happened
  AgentId agent = 0;
  Eigen::Index component = 0;
  double margin = 0;
};

struct SafenessReport {
  double claimed_alpha = 0;
  double worst_alpha = 1.0;  // stays 1 when every constraint was vacuous
  std::vector<std::uint64_t> rounds;   // end round of each audited transition
  std::vector<Eigen::MatrixXd> margins;  // d x n per transition, NaN when vacuous
  std::vector<SafenessViolationRecord> violations;

  bool passed() const { return violations.empty(); }
};

/// Tolerance below the claimed alpha before a margin counts as a violation.
inline constexpr double kSafenessSlack = 1e-9;

/// min over components of min(x - m, M - x) / (M - m), where m and M are the
/// per-component range of `inputs`. NaN when every range is below
/// kDiameterFloor.
double realized_safeness(const PointSet& inputs, const Point& x);

/// Re-derives every transition's in-neighbour ranges from the pattern and
/// checks both sides of the safeness inequality. With macro_period L > 1 a
/// transition spans L rounds and uses the product of their graphs.
/// macro_period 0 takes the trace's own period.
SafenessReport audit_safeness(const RunTrace& trace, const CommPattern& pattern,
                              double claimed_alpha, std::size_t macro_period = 0);

/// Weights a_i in [alpha/n, 1] with sum 1 and sum a_i v_i = x, for sorted
/// values v and x in the alpha-safe interval of v. Built as
/// alpha/n + (1 - alpha) * b with b supported on the two end values.
std::vector<double> decompose_safe_value(std::span<const double> values, double x, double alpha);

struct StochasticMatrixSeq {
  double alpha = 0;
  std::vector<std::uint64_t> rounds;                     // end round of each transition
  std::vector<CommGraph> graphs;                         // communication graph per transition
  std::vector<std::vector<Eigen::MatrixXd>> matrices;    // [transition][component], n x n

  std::size_t size() const { return matrices.size(); }
};

/// Edge p -> q iff A(p, q) > 0.
CommGraph associated_graph(const Eigen::MatrixXd& a);

/// Row p of A_k(t) decomposes agent p's new k-th coordinate over its
/// in-neighbours' previous ones. Throws SafenessViolation when a value lies
/// outside its alpha-safe interval.
StochasticMatrixSeq reconstruct_matrices(const RunTrace& trace, const CommPattern& pattern,
                                         double alpha, std::size_t macro_period = 0);

struct MoreauReport {
  double a = 0;
  std::uint64_t window = 0;
  bool positive_diagonal = true;      // A1
  bool bounded_below = true;          // A2
  bool bidirectional = true;          // A3
  bool strongly_connected = true;     // A4, on the windowed proxy of G^infinity
  std::vector<std::string> witnesses;

  bool all() const { return positive_diagonal && bounded_below && bidirectional && strongly_connected; }
};

/// A1-A4 for every matrix of every component; `a` is the A2 lower bound and
/// `window` the block length of the infinitely-often proxy.
MoreauReport check_moreau_assumptions(const StochasticMatrixSeq& seq, double a, std::uint64_t window);

/// Naive reference for n <= 5 agents in one dimension over at most 20
/// explicit rounds. Supports equal-neighbor, midpoint and
/// midpoint+amortized[:L]. Returns one row of positions per round, the
/// initial values first.
std::vector<std::vector<double>> brute_force_consensus_1d(const std::vector<double>& values,
                                                          const std::vector<CommGraph>& prefix,
                                                          const AlgorithmKind& algorithm);

}  // namespace consensus
