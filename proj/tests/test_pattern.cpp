#include <doctest.h>

#include "consensus/pattern.hpp"
#include "oracles.hpp"

using namespace consensus;

TEST_CASE("generators respect their network model") {
  const auto rooted = random_rooted(4, 7);
  for (std::uint64_t t = 1; t <= 1000; ++t) CHECK(oracle::rooted(oracle::adjacency(rooted.graph(t))));
  const auto nonsplit = random_nonsplit(5, 1);
  for (std::uint64_t t = 1; t <= 1000; ++t) CHECK(oracle::nonsplit(oracle::adjacency(nonsplit.graph(t))));
  for (std::size_t n = 1; n <= 12; ++n)
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      CHECK(is_rooted(random_rooted(n, seed).graph(1 + seed)));
      CHECK(is_nonsplit(random_nonsplit(n, seed).graph(1 + seed)));
    }
}

TEST_CASE("patterns are deterministic in the seed and round") {
  const auto a = random_rooted(6, 42);
  const auto b = random_rooted(6, 42);
  for (std::uint64_t t : {1u, 2u, 17u, 1000u}) CHECK(a.graph(t) == b.graph(t));
  // Rounds are independent draws; out-of-order access changes nothing.
  CHECK(a.graph(5) == random_rooted(6, 42).prefix(5).back());
  bool differs = false;
  for (std::uint64_t t = 1; t <= 20; ++t) differs |= !(a.graph(t) == random_rooted(6, 43).graph(t));
  CHECK(differs);
  CHECK_THROWS_AS((void)a.graph(0), std::invalid_argument);
}

TEST_CASE("rotating star") {
  const auto p = adversarial_rotating_star(4);
  CHECK(p.graph(1) == CommGraph::out_star(4, 1));
  CHECK(p.graph(4) == CommGraph::out_star(4, 0));
  for (std::uint64_t t = 1; t <= 8; ++t) CHECK(is_rooted(p.graph(t)));
}

TEST_CASE("bidirectional intermittent") {
  const auto p = bidirectional_intermittent(3, 5, 2);
  const auto base = intermittent_base_graph(3, 2);
  for (std::uint64_t t = 1; t <= 200; ++t) {
    const auto g = p.graph(t);
    CHECK(is_bidirectional(g));
    for (const auto& [u, v] : g.edges()) CHECK(base.has_edge(u, v));
  }
  for (std::uint64_t start = 1; start <= 100; ++start) {
    CommGraph u(3);
    for (std::uint64_t t = start; t < start + 5; ++t) u = u.united(p.graph(t));
    CHECK(is_strongly_connected(u));
  }
  for (std::size_t n = 2; n <= 8; ++n)
    for (std::uint64_t period = 1; period <= 10; ++period) {
      const auto q = bidirectional_intermittent(n, period, 100 * n + period);
      CHECK(is_strongly_connected(infinitely_often_union(q, period)));
    }
}

TEST_CASE("infinitely-often union") {
  const CommGraph g(3, {{0, 1}, {1, 2}});
  CHECK(infinitely_often_union(fixed_pattern(g), 1) == g);
  CHECK(infinitely_often_union(fixed_pattern(g), 7) == g);

  const CommGraph a(3, {{0, 1}, {1, 0}});
  const CommGraph b(3, {{1, 2}, {2, 1}});
  CHECK(infinitely_often_union(periodic_pattern({a, b}), 2) == a.united(b));

  std::vector<CommGraph> once{CommGraph(3, {{0, 1}}), CommGraph(3), CommGraph(3), CommGraph(3)};
  CHECK_FALSE(infinitely_often_union(once, 2).has_edge(0, 1));
  CHECK_FALSE(infinitely_often_union(periodic_pattern(once), 2, 8).has_edge(0, 1));

  CHECK_THROWS_AS(infinitely_often_union(once, 0), std::invalid_argument);
  CHECK_THROWS_AS(infinitely_often_union(once, 5), std::invalid_argument);
}

TEST_CASE("periodic pattern") {
  const CommGraph a = CommGraph::complete(3);
  const CommGraph b(3);
  const auto p = periodic_pattern({a, b});
  CHECK(p.graph(1) == a);
  CHECK(p.graph(2) == b);
  CHECK(p.graph(3) == a);
  CHECK_THROWS(periodic_pattern({}));
  CHECK_THROWS(periodic_pattern({CommGraph(2), CommGraph(3)}));
}
