#include "consensus/graph.hpp"

#include <algorithm>
#include <bit>
#include <sstream>
#include <stdexcept>

namespace consensus {

namespace {

constexpr std::size_t kWordBits = 64;

inline bool test_bit(const std::vector<std::uint64_t>& row, std::size_t i) {
  return (row[i / kWordBits] >> (i % kWordBits)) & 1U;
}

inline void set_bit(std::vector<std::uint64_t>& row, std::size_t i) {
  row[i / kWordBits] |= std::uint64_t{1} << (i % kWordBits);
}

std::vector<AgentId> bits_to_ids(const std::vector<std::uint64_t>& row) {
  std::vector<AgentId> ids;
  for (std::size_t w = 0; w < row.size(); ++w) {
    std::uint64_t word = row[w];
    while (word != 0) {
      const int bit = std::countr_zero(word);
      ids.push_back(w * kWordBits + static_cast<std::size_t>(bit));
      word &= word - 1;
    }
  }
  return ids;
}

void require_same_size(const CommGraph& g, const CommGraph& h, const char* what) {
  if (g.size() != h.size()) {
    throw std::invalid_argument(std::string(what) + ": graph sizes differ (" +
                                std::to_string(g.size()) + " vs " + std::to_string(h.size()) +
                                ")");
  }
}

}  // namespace

CommGraph::CommGraph(std::size_t n)
    : n_(n),
      words_((n + kWordBits - 1) / kWordBits),
      out_(n, std::vector<std::uint64_t>(words_, 0)),
      in_(n, std::vector<std::uint64_t>(words_, 0)) {
  for (AgentId p = 0; p < n_; ++p) {
    set_bit(out_[p], p);
    set_bit(in_[p], p);
  }
}

CommGraph::CommGraph(std::size_t n, const std::vector<std::pair<AgentId, AgentId>>& edges)
    : CommGraph(n) {
  for (const auto& [from, to] : edges) add_edge(from, to);
}

CommGraph CommGraph::complete(std::size_t n) {
  CommGraph g(n);
  for (AgentId p = 0; p < n; ++p)
    for (AgentId q = 0; q < n; ++q) g.add_edge(p, q);
  return g;
}

CommGraph CommGraph::out_star(std::size_t n, AgentId center) {
  CommGraph g(n);
  for (AgentId q = 0; q < n; ++q) g.add_edge(center, q);
  return g;
}

CommGraph CommGraph::cycle(std::size_t n) {
  CommGraph g(n);
  for (AgentId p = 0; p < n; ++p) g.add_edge(p, (p + 1) % n);
  return g;
}

void CommGraph::check_agent(AgentId p) const {
  if (p >= n_) {
    throw std::out_of_range("agent " + std::to_string(p) + " outside [0, " + std::to_string(n_) +
                            ")");
  }
}

void CommGraph::add_edge(AgentId from, AgentId to) {
  check_agent(from);
  check_agent(to);
  set_bit(out_[from], to);
  set_bit(in_[to], from);
}

bool CommGraph::has_edge(AgentId from, AgentId to) const {
  check_agent(from);
  check_agent(to);
  return test_bit(out_[from], to);
}

std::vector<AgentId> CommGraph::in_neighbors(AgentId p) const {
  check_agent(p);
  return bits_to_ids(in_[p]);
}

std::vector<AgentId> CommGraph::out_neighbors(AgentId p) const {
  check_agent(p);
  return bits_to_ids(out_[p]);
}

std::size_t CommGraph::in_degree(AgentId p) const {
  check_agent(p);
  std::size_t count = 0;
  for (auto word : in_[p]) count += static_cast<std::size_t>(std::popcount(word));
  return count;
}

std::vector<std::pair<AgentId, AgentId>> CommGraph::edges() const {
  std::vector<std::pair<AgentId, AgentId>> result;
  for (AgentId p = 0; p < n_; ++p)
    for (AgentId q : bits_to_ids(out_[p])) result.emplace_back(p, q);
  return result;
}

CommGraph CommGraph::reversed() const {
  CommGraph r(n_);
  r.out_ = in_;
  r.in_ = out_;
  return r;
}

CommGraph CommGraph::united(const CommGraph& other) const {
  require_same_size(*this, other, "united");
  CommGraph r = *this;
  for (AgentId p = 0; p < n_; ++p) {
    for (std::size_t w = 0; w < words_; ++w) {
      r.out_[p][w] |= other.out_[p][w];
      r.in_[p][w] |= other.in_[p][w];
    }
  }
  return r;
}

CommGraph CommGraph::intersected(const CommGraph& other) const {
  require_same_size(*this, other, "intersected");
  CommGraph r = *this;
  for (AgentId p = 0; p < n_; ++p) {
    for (std::size_t w = 0; w < words_; ++w) {
      r.out_[p][w] &= other.out_[p][w];
      r.in_[p][w] &= other.in_[p][w];
    }
  }
  return r;
}

bool CommGraph::operator==(const CommGraph& other) const {
  return n_ == other.n_ && out_ == other.out_;
}

CommGraph graph_product(const CommGraph& g, const CommGraph& h) {
  require_same_size(g, h, "graph_product");
  const std::size_t n = g.size();
  CommGraph result(n);
  for (AgentId p = 0; p < n; ++p) {
    for (AgentId r : g.out_neighbors(p)) {
      for (AgentId q : h.out_neighbors(r)) result.add_edge(p, q);
    }
  }
  return result;
}

CommGraph graph_product(const std::vector<CommGraph>& graphs) {
  if (graphs.empty()) throw std::invalid_argument("graph_product: empty sequence");
  CommGraph acc = graphs.front();
  for (std::size_t i = 1; i < graphs.size(); ++i) acc = graph_product(acc, graphs[i]);
  return acc;
}

std::vector<AgentId> in_neighbors(const CommGraph& g, AgentId p) { return g.in_neighbors(p); }

std::vector<bool> reachable_from(const CommGraph& g, AgentId source) {
  std::vector<bool> seen(g.size(), false);
  std::vector<AgentId> stack{source};
  seen[source] = true;
  while (!stack.empty()) {
    const AgentId p = stack.back();
    stack.pop_back();
    for (AgentId q : g.out_neighbors(p)) {
      if (!seen[q]) {
        seen[q] = true;
        stack.push_back(q);
      }
    }
  }
  return seen;
}

bool is_rooted(const CommGraph& g) {
  if (g.size() == 0) return false;
  for (AgentId root = 0; root < g.size(); ++root) {
    const auto seen = reachable_from(g, root);
    if (std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) return true;
  }
  return false;
}

std::pair<bool, std::pair<AgentId, AgentId>> split_witness(const CommGraph& g) {
  const std::size_t n = g.size();
  for (AgentId p = 0; p < n; ++p) {
    for (AgentId q = p + 1; q < n; ++q) {
      const auto& a = g.in_row(p);
      const auto& b = g.in_row(q);
      bool shared = false;
      for (std::size_t w = 0; w < a.size() && !shared; ++w) shared = (a[w] & b[w]) != 0;
      if (!shared) return {true, {p, q}};
    }
  }
  return {false, {0, 0}};
}

bool is_nonsplit(const CommGraph& g) { return !split_witness(g).first; }

bool is_bidirectional(const CommGraph& g) {
  for (AgentId p = 0; p < g.size(); ++p)
    if (g.out_row(p) != g.in_row(p)) return false;
  return true;
}

bool is_strongly_connected(const CommGraph& g) {
  if (g.size() == 0) return false;
  const auto forward = reachable_from(g, 0);
  const auto backward = reachable_from(g.reversed(), 0);
  for (AgentId p = 0; p < g.size(); ++p)
    if (!forward[p] || !backward[p]) return false;
  return true;
}

std::string to_string(const CommGraph& g) {
  std::ostringstream os;
  os << "n=" << g.size() << " {";
  bool first = true;
  for (const auto& [p, q] : g.edges()) {
    if (p == q) continue;
    os << (first ? "" : ", ") << p << "->" << q;
    first = false;
  }
  os << "}";
  return os.str();
}

}  // namespace consensus
