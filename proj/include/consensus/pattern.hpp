#pragma once

// Communication patterns: infinite graph sequences evaluated lazily.
//
// Every generator is a pure function of (seed, round), so a pattern can be
// replayed from any round without storing the prefix. Rounds are numbered
// from 1, matching the convention that x(t) is the configuration after the
// t-th communication round.

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "consensus/graph.hpp"

namespace consensus {

enum class NetworkModelKind { Nonsplit, Rooted, BidirectionalIntermittent, FixedGraph, Custom };

std::string to_string(NetworkModelKind kind);

class CommPattern {
 public:
  using Generator = std::function<CommGraph(std::uint64_t round)>;

  CommPattern(std::size_t n, NetworkModelKind kind, std::string description, Generator gen);

  std::size_t size() const { return n_; }
  NetworkModelKind kind() const { return kind_; }
  const std::string& description() const { return description_; }

  /// Graph used in round t (t >= 1).
  CommGraph graph(std::uint64_t round) const;

  /// The first `rounds` graphs, rounds 1..rounds.
  std::vector<CommGraph> prefix(std::uint64_t rounds) const;

 private:
  std::size_t n_;
  NetworkModelKind kind_;
  std::string description_;
  Generator gen_;
};

/// The same graph every round.
CommPattern fixed_pattern(const CommGraph& g);

/// Cycles through the given graphs: round t uses graphs[(t-1) mod size].
CommPattern periodic_pattern(const std::vector<CommGraph>& graphs);

/// Rooted graphs: a random spanning out-tree plus sparse random extra edges.
CommPattern random_rooted(std::size_t n, std::uint64_t seed);

/// Nonsplit graphs: a random sparse graph, repaired pair by pair until every
/// two agents share an in-neighbour.
CommPattern random_nonsplit(std::size_t n, std::uint64_t seed);

/// Round t uses the out-star centred at agent (t mod n).
CommPattern adversarial_rotating_star(std::size_t n);

/// Bidirectional graphs whose edges are drawn from a fixed connected base
/// graph. Every base edge shows up at least once in any `period` consecutive
/// rounds, so the union over such a window is connected.
CommPattern bidirectional_intermittent(std::size_t n, std::uint64_t period, std::uint64_t seed);

/// The connected base graph used by bidirectional_intermittent(n, period, seed).
CommGraph intermittent_base_graph(std::size_t n, std::uint64_t seed);

/// Finite stand-in for the graph of edges that occur infinitely often: the
/// edges present at least once in every block of `window` consecutive
/// rounds among rounds 1..horizon. Trailing partial blocks are ignored.
/// horizon = 0 selects 10 * window.
CommGraph infinitely_often_union(const CommPattern& pattern, std::uint64_t window,
                                 std::uint64_t horizon = 0);

/// Same proxy over an explicit finite graph sequence.
CommGraph infinitely_often_union(const std::vector<CommGraph>& graphs, std::uint64_t window);

// Deterministic mixing used by all generators; exposed for tests.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t round, std::uint64_t stream = 0);

}  // namespace consensus
