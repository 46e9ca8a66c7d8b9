#pragma once

// Directed communication graphs with mandatory self-loops.
//
// Agents are 0-indexed. An edge (p, q) means p sends to q in that round, so
// q hears p. Adjacency is kept as dense bit rows in both directions; the
// systems simulated here are small enough that an n x n bit matrix is the
// cheapest representation for products and neighbourhood intersections.

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace consensus {

using AgentId = std::size_t;

class CommGraph {
 public:
  CommGraph() = default;

  /// Graph on n agents with self-loops only.
  explicit CommGraph(std::size_t n);

  /// Graph on n agents with the given edges. Self-loops are always added.
  CommGraph(std::size_t n, const std::vector<std::pair<AgentId, AgentId>>& edges);

  static CommGraph self_loops(std::size_t n) { return CommGraph(n); }
  static CommGraph complete(std::size_t n);
  /// Star whose center sends to every other agent.
  static CommGraph out_star(std::size_t n, AgentId center);
  /// Directed cycle 0 -> 1 -> ... -> n-1 -> 0.
  static CommGraph cycle(std::size_t n);

  std::size_t size() const { return n_; }

  void add_edge(AgentId from, AgentId to);
  bool has_edge(AgentId from, AgentId to) const;

  /// In-neighbours in increasing index order; always contains p.
  std::vector<AgentId> in_neighbors(AgentId p) const;
  std::vector<AgentId> out_neighbors(AgentId p) const;
  std::size_t in_degree(AgentId p) const;

  /// All edges in (from, to) lexicographic order, self-loops included.
  std::vector<std::pair<AgentId, AgentId>> edges() const;

  /// Same graph with every edge reversed.
  CommGraph reversed() const;

  /// Edge set union; sizes must agree.
  CommGraph united(const CommGraph& other) const;
  /// Edge set intersection; sizes must agree. Self-loops survive.
  CommGraph intersected(const CommGraph& other) const;

  bool operator==(const CommGraph& other) const;
  bool operator!=(const CommGraph& other) const { return !(*this == other); }

  // Raw bit rows; used by the predicates.
  const std::vector<std::uint64_t>& out_row(AgentId p) const { return out_[p]; }
  const std::vector<std::uint64_t>& in_row(AgentId p) const { return in_[p]; }

 private:
  void check_agent(AgentId p) const;

  std::size_t n_ = 0;
  std::size_t words_ = 0;
  std::vector<std::vector<std::uint64_t>> out_;
  std::vector<std::vector<std::uint64_t>> in_;
};

/// G o H: edge p -> q iff some r has p -> r in g and r -> q in h.
CommGraph graph_product(const CommGraph& g, const CommGraph& h);

/// Product of a non-empty sequence, left to right.
CommGraph graph_product(const std::vector<CommGraph>& graphs);

std::vector<AgentId> in_neighbors(const CommGraph& g, AgentId p);

/// Some node reaches every node (a rooted spanning tree exists).
bool is_rooted(const CommGraph& g);

/// Every two nodes share a common in-neighbour.
bool is_nonsplit(const CommGraph& g);

/// (p, q) present implies (q, p) present.
bool is_bidirectional(const CommGraph& g);

bool is_strongly_connected(const CommGraph& g);

/// Nodes reachable from `source` along directed edges (source included).
std::vector<bool> reachable_from(const CommGraph& g, AgentId source);

/// Pair of agents without a common in-neighbour, if any. Used as a witness
/// when a nonsplit check fails.
std::pair<bool, std::pair<AgentId, AgentId>> split_witness(const CommGraph& g);

std::string to_string(const CommGraph& g);

}  // namespace consensus
