#include "consensus/pattern.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>
#include <utility>

namespace consensus {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Portable draws on top of mt19937_64; std distributions differ between
// standard libraries and would break replay across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::size_t below(std::size_t bound) { return static_cast<std::size_t>(engine_() % bound); }

  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool chance(double p) { return unit() < p; }

  std::vector<std::size_t> permutation(std::size_t n) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[below(i)]);
    return perm;
  }

 private:
  std::mt19937_64 engine_;
};

void require_agents(std::size_t n, const char* what) {
  if (n < 1) throw std::invalid_argument(std::string(what) + ": n must be >= 1");
}

CommGraph rooted_graph(std::size_t n, Rng& rng) {
  CommGraph g(n);
  const auto order = rng.permutation(n);
  for (std::size_t i = 1; i < n; ++i) g.add_edge(order[rng.below(i)], order[i]);
  const double extra = 0.3 * rng.unit() / static_cast<double>(n);
  for (AgentId p = 0; p < n; ++p)
    for (AgentId q = 0; q < n; ++q)
      if (p != q && rng.chance(extra)) g.add_edge(p, q);
  return g;
}

CommGraph nonsplit_graph(std::size_t n, Rng& rng) {
  CommGraph g(n);
  const double density = 0.4 * rng.unit();
  for (AgentId p = 0; p < n; ++p)
    for (AgentId q = 0; q < n; ++q)
      if (p != q && rng.chance(density)) g.add_edge(p, q);
  // Pair order is shuffled so the repair does not always favour low ids.
  std::vector<std::pair<AgentId, AgentId>> pairs;
  for (AgentId p = 0; p < n; ++p)
    for (AgentId q = p + 1; q < n; ++q) pairs.emplace_back(p, q);
  const auto perm = rng.permutation(pairs.size());
  for (std::size_t idx : perm) {
    const auto [p, q] = pairs[idx];
    const auto& a = g.in_row(p);
    const auto& b = g.in_row(q);
    bool shared = false;
    for (std::size_t w = 0; w < a.size() && !shared; ++w) shared = (a[w] & b[w]) != 0;
    if (!shared) {
      if (rng.chance(0.5))
        g.add_edge(p, q);
      else
        g.add_edge(q, p);
    }
  }
  return g;
}

std::vector<std::pair<AgentId, AgentId>> base_edges(std::size_t n, std::uint64_t seed) {
  Rng rng(mix_seed(seed, 0, 0xBA5E));
  std::vector<std::pair<AgentId, AgentId>> edges;
  const auto order = rng.permutation(n);
  for (std::size_t i = 1; i < n; ++i) {
    AgentId a = order[rng.below(i)];
    AgentId b = order[i];
    edges.emplace_back(std::min(a, b), std::max(a, b));
  }
  for (AgentId p = 0; p < n; ++p) {
    for (AgentId q = p + 1; q < n; ++q) {
      if (rng.chance(0.15) &&
          std::find(edges.begin(), edges.end(), std::make_pair(p, q)) == edges.end()) {
        edges.emplace_back(p, q);
      }
    }
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t round, std::uint64_t stream) {
  return splitmix64(splitmix64(seed ^ 0xC0FFEEULL) ^ splitmix64(round + 0x51ED) ^
                    splitmix64(stream * 0x2545F4914F6CDD1DULL));
}

std::string to_string(NetworkModelKind kind) {
  switch (kind) {
    case NetworkModelKind::Nonsplit: return "nonsplit";
    case NetworkModelKind::Rooted: return "rooted";
    case NetworkModelKind::BidirectionalIntermittent: return "bidirectional-intermittent";
    case NetworkModelKind::FixedGraph: return "fixed";
    case NetworkModelKind::Custom: return "custom";
  }
  return "unknown";
}

CommPattern::CommPattern(std::size_t n, NetworkModelKind kind, std::string description,
                         Generator gen)
    : n_(n), kind_(kind), description_(std::move(description)), gen_(std::move(gen)) {
  if (!gen_) throw std::invalid_argument("CommPattern: empty generator");
}

CommGraph CommPattern::graph(std::uint64_t round) const {
  if (round < 1) throw std::invalid_argument("CommPattern::graph: rounds start at 1");
  CommGraph g = gen_(round);
  if (g.size() != n_) throw std::logic_error("CommPattern: generator produced wrong size");
  return g;
}

std::vector<CommGraph> CommPattern::prefix(std::uint64_t rounds) const {
  std::vector<CommGraph> graphs;
  graphs.reserve(rounds);
  for (std::uint64_t t = 1; t <= rounds; ++t) graphs.push_back(graph(t));
  return graphs;
}

CommPattern fixed_pattern(const CommGraph& g) {
  require_agents(g.size(), "fixed_pattern");
  return CommPattern(g.size(), NetworkModelKind::FixedGraph, "fixed " + to_string(g),
                     [g](std::uint64_t) { return g; });
}

CommPattern periodic_pattern(const std::vector<CommGraph>& graphs) {
  if (graphs.empty()) throw std::invalid_argument("periodic_pattern: no graphs");
  const std::size_t n = graphs.front().size();
  require_agents(n, "periodic_pattern");
  for (const auto& g : graphs)
    if (g.size() != n) throw std::invalid_argument("periodic_pattern: graph sizes differ");
  return CommPattern(n, NetworkModelKind::Custom,
                     "periodic(" + std::to_string(graphs.size()) + ")",
                     [graphs](std::uint64_t t) { return graphs[(t - 1) % graphs.size()]; });
}

CommPattern random_rooted(std::size_t n, std::uint64_t seed) {
  require_agents(n, "random_rooted");
  return CommPattern(n, NetworkModelKind::Rooted,
                     "random-rooted(n=" + std::to_string(n) + ",seed=" + std::to_string(seed) + ")",
                     [n, seed](std::uint64_t t) {
                       Rng rng(mix_seed(seed, t, 1));
                       return rooted_graph(n, rng);
                     });
}

CommPattern random_nonsplit(std::size_t n, std::uint64_t seed) {
  require_agents(n, "random_nonsplit");
  return CommPattern(
      n, NetworkModelKind::Nonsplit,
      "random-nonsplit(n=" + std::to_string(n) + ",seed=" + std::to_string(seed) + ")",
      [n, seed](std::uint64_t t) {
        Rng rng(mix_seed(seed, t, 2));
        return nonsplit_graph(n, rng);
      });
}

CommPattern adversarial_rotating_star(std::size_t n) {
  require_agents(n, "adversarial_rotating_star");
  return CommPattern(n, NetworkModelKind::Rooted,
                     "rotating-star(n=" + std::to_string(n) + ")",
                     [n](std::uint64_t t) { return CommGraph::out_star(n, t % n); });
}

CommGraph intermittent_base_graph(std::size_t n, std::uint64_t seed) {
  require_agents(n, "intermittent_base_graph");
  CommGraph g(n);
  for (const auto& [p, q] : base_edges(n, seed)) {
    g.add_edge(p, q);
    g.add_edge(q, p);
  }
  return g;
}

CommPattern bidirectional_intermittent(std::size_t n, std::uint64_t period, std::uint64_t seed) {
  require_agents(n, "bidirectional_intermittent");
  if (period < 1) throw std::invalid_argument("bidirectional_intermittent: period must be >= 1");
  const auto edges = base_edges(n, seed);
  // Each base edge gets a phase; it is forced on whenever t hits that phase
  // modulo the period and otherwise appears at random.
  std::vector<std::uint64_t> phase(edges.size());
  Rng phase_rng(mix_seed(seed, 0, 0xF00D));
  for (auto& ph : phase) ph = phase_rng.below(period);
  const double background = 0.2;
  return CommPattern(
      n, NetworkModelKind::BidirectionalIntermittent,
      "bidirectional-intermittent(n=" + std::to_string(n) + ",period=" + std::to_string(period) +
          ",seed=" + std::to_string(seed) + ")",
      [n, period, seed, edges, phase, background](std::uint64_t t) {
        Rng rng(mix_seed(seed, t, 3));
        CommGraph g(n);
        for (std::size_t e = 0; e < edges.size(); ++e) {
          const bool on = (t % period) == phase[e] || rng.chance(background);
          if (on) {
            g.add_edge(edges[e].first, edges[e].second);
            g.add_edge(edges[e].second, edges[e].first);
          }
        }
        return g;
      });
}

CommGraph infinitely_often_union(const std::vector<CommGraph>& graphs, std::uint64_t window) {
  if (window < 1) throw std::invalid_argument("infinitely_often_union: window must be >= 1");
  if (graphs.empty()) throw std::invalid_argument("infinitely_often_union: no graphs");
  const std::size_t n = graphs.front().size();
  const std::uint64_t blocks = graphs.size() / window;
  if (blocks == 0) {
    throw std::invalid_argument("infinitely_often_union: horizon shorter than one window");
  }
  CommGraph result = CommGraph::complete(n);
  for (std::uint64_t b = 0; b < blocks; ++b) {
    CommGraph block(n);
    for (std::uint64_t i = 0; i < window; ++i) block = block.united(graphs[b * window + i]);
    result = result.intersected(block);
  }
  return result;
}

CommGraph infinitely_often_union(const CommPattern& pattern, std::uint64_t window,
                                 std::uint64_t horizon) {
  if (window < 1) throw std::invalid_argument("infinitely_often_union: window must be >= 1");
  if (horizon == 0) horizon = 10 * window;
  return infinitely_often_union(pattern.prefix(horizon), window);
}

}  // namespace consensus
