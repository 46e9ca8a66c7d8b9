#include <doctest.h>

#include <random>

#include "consensus/algorithms.hpp"
#include "consensus/errors.hpp"
#include "consensus/simulator.hpp"
#include "consensus/verification.hpp"

using namespace consensus;

namespace {

Point pt(std::initializer_list<double> v) {
  Point x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double c : v) x(k++) = c;
  return x;
}

std::vector<Point> random_points(std::mt19937_64& rng, int d, std::size_t m) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Point> out;
  for (std::size_t i = 0; i < m; ++i) {
    Point p(d);
    for (int k = 0; k < d; ++k) p(k) = u(rng);
    out.push_back(p);
  }
  return out;
}

// Brute-force reading of the ExtremePoint rule: for every coordinate pick
// the first point attaining the minimum and the first attaining the maximum,
// then average the 2d picks.
Point extreme_point_reference(const std::vector<Point>& pts, int d) {
  Point sum = Point::Zero(d);
  for (int k = 0; k < d; ++k) {
    double mn = pts[0](k), mx = pts[0](k);
    for (const auto& q : pts) {
      mn = std::min(mn, q(k));
      mx = std::max(mx, q(k));
    }
    std::size_t lo = 0, hi = 0;
    while (pts[lo](k) != mn) ++lo;
    while (pts[hi](k) != mx) ++hi;
    sum += pts[lo] + pts[hi];
  }
  return sum / (2.0 * d);
}

std::vector<Message> messages_of(const AlgorithmKind& kind, const std::vector<AgentState>& states) {
  std::vector<Message> out;
  for (const auto& s : states) out.push_back(make_message(kind, s));
  return out;
}

}  // namespace

TEST_CASE("algorithm names round-trip") {
  for (const char* text : {"equal-neighbor", "midpoint", "component-midpoint", "extreme-point", "centroid",
                           "midpoint+amortized", "centroid+amortized:3", "extreme-point+amortized"}) {
    CHECK(to_string(parse_algorithm(text)) == text);
  }
  const auto k = parse_algorithm("centroid+amortized:3");
  CHECK(k.tag == AlgorithmTag::Centroid);
  CHECK(k.amortized);
  CHECK(k.period_for(10) == 3);
  CHECK(parse_algorithm("midpoint+amortized").period_for(7) == 6);
  CHECK(parse_algorithm("midpoint").period_for(7) == 1);
  CHECK_THROWS_AS(parse_algorithm("median"), std::invalid_argument);
  CHECK_THROWS_AS(parse_algorithm("midpoint+amortized:0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_algorithm("midpoint+amortized:x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_algorithm("midpoint+fast"), std::invalid_argument);
}

TEST_CASE("validation") {
  CHECK_THROWS_AS(validate_algorithm(parse_algorithm("midpoint"), 2, 3), std::invalid_argument);
  CHECK_NOTHROW(validate_algorithm(parse_algorithm("component-midpoint"), 2, 3));
  CHECK_THROWS_WITH_AS(validate_algorithm(parse_algorithm("component-midpoint"), 3, 3),
                       doctest::Contains("(1/2,1/2,1/2)"), std::invalid_argument);
  AlgorithmOptions unsafe;
  unsafe.allow_unsafe_component_midpoint = true;
  CHECK_NOTHROW(validate_algorithm(parse_algorithm("component-midpoint"), 3, 3, unsafe));
  CHECK_THROWS_AS(validate_algorithm(parse_algorithm("equal-neighbor+amortized"), 1, 3), std::invalid_argument);
  CHECK_THROWS_AS(validate_algorithm(parse_algorithm("centroid"), 0, 3), std::invalid_argument);
  CHECK_THROWS_AS(validate_algorithm(parse_algorithm("centroid"), 2, 0), std::invalid_argument);
}

TEST_CASE("safeness constants") {
  CHECK(safeness_constant(AlgorithmTag::EqualNeighbor, 1, 4) == doctest::Approx(0.25));
  CHECK(safeness_constant(AlgorithmTag::MidPoint1D, 1, 4) == 0.5);
  CHECK(safeness_constant(AlgorithmTag::ComponentMidPoint, 2, 4) == 0.5);
  CHECK(safeness_constant(AlgorithmTag::ExtremePoint, 3, 4) == doctest::Approx(1.0 / 6));
  CHECK(safeness_constant(AlgorithmTag::Centroid, 3, 4) == doctest::Approx(0.25));
}

TEST_CASE("equal neighbour") {
  CHECK(equal_neighbor_update({pt({0}), pt({1})})(0) == 0.5);
  CHECK(equal_neighbor_update({pt({0, 0}), pt({1, 0}), pt({0, 1}), pt({1, 1})}).isApprox(pt({0.5, 0.5})));
  // Four in-neighbours, each weighted 1/4; duplicates count.
  CHECK(equal_neighbor_update({pt({0}), pt({0}), pt({0}), pt({4})})(0) == 1.0);
  CHECK_THROWS_AS(equal_neighbor_update({}), std::invalid_argument);
}

TEST_CASE("midpoint") {
  CHECK(midpoint_update_1d(0, 1) == 0.5);
  CHECK(midpoint_update_1d(2.5, 2.5) == 2.5);
  CHECK(midpoint_update_1d(-3, 5) == 1);
  CHECK_THROWS_AS(midpoint_update_1d(1, 0), std::invalid_argument);
}

TEST_CASE("component-wise midpoint") {
  CHECK(component_midpoint_update({pt({0, 0}), pt({1, 1})}).isApprox(pt({0.5, 0.5})));
  CHECK(component_midpoint_update({pt({1, 0, 0}), pt({0, 1, 0}), pt({0, 0, 1})}) == pt({0.5, 0.5, 0.5}));
  CHECK(component_midpoint_update({pt({0, 2}), pt({1, 0}), pt({3, 1})}).isApprox(pt({1.5, 1.0})));
}

TEST_CASE("extreme point") {
  const Point p = pt({0.3, -0.2});
  CHECK(extreme_point_update({p}, 2) == p);
  CHECK(extreme_point_update({pt({0}), pt({1})}, 1)(0) == 0.5);
  // m^(2) ties between (0,0) and (2,0); the first wins.
  CHECK(extreme_point_update({pt({0, 0}), pt({2, 0}), pt({1, 3})}, 2).isApprox(pt({0.75, 0.75})));
  // Ties on coordinates are common on grids; compare to the reference rule.
  std::mt19937_64 rng(37);
  for (int i = 0; i < 500; ++i) {
    const int d = 1 + static_cast<int>(rng() % 4);
    std::vector<Point> pts;
    for (std::size_t j = 0, m = 1 + rng() % 8; j < m; ++j) {
      Point q(d);
      for (int k = 0; k < d; ++k) q(k) = static_cast<double>(rng() % 3);
      pts.push_back(q);
    }
    CHECK(extreme_point_update(pts, d).isApprox(extreme_point_reference(pts, d)));
  }
}

TEST_CASE("centroid update") {
  std::mt19937_64 rng(41);
  for (int d = 1; d <= 4; ++d) {
    const auto s = random_points(rng, d, static_cast<std::size_t>(d + 1));
    Point mean = Point::Zero(d);
    for (const auto& q : s) mean += q / (d + 1.0);
    CHECK((centroid_update(s) - mean).norm() < 1e-12);
  }
  CHECK((centroid_update({pt({0, 0}), pt({1, 0}), pt({0, 1}), pt({0, 0})}) - pt({1.0 / 3, 1.0 / 3})).norm() < 1e-12);
  // An interior point does not move the centroid.
  const std::vector<Point> square{pt({0, 0}), pt({2, 0}), pt({2, 2}), pt({0, 2})};
  auto with_inner = square;
  with_inner.push_back(pt({0.3, 1.7}));
  CHECK((centroid_update(with_inner) - centroid_update(square)).norm() < 1e-12);
}

TEST_CASE("every update is alpha-safe") {
  std::mt19937_64 rng(43);
  for (int i = 0; i < 400; ++i) {
    const int d = 1 + static_cast<int>(rng() % 4);
    const auto pts = random_points(rng, d, 1 + rng() % 9);
    const PointSet set = to_point_set(pts);
    const auto check = [&](AlgorithmTag tag, const Point& x) {
      const double a = realized_safeness(set, x);
      if (!std::isnan(a)) CHECK(a >= safeness_constant(tag, d, pts.size()) - 1e-9);
    };
    check(AlgorithmTag::EqualNeighbor, equal_neighbor_update(pts));
    check(AlgorithmTag::ComponentMidPoint, component_midpoint_update(pts));
    check(AlgorithmTag::ExtremePoint, extreme_point_update(pts, d));
    check(AlgorithmTag::Centroid, centroid_update(pts));
  }
}

TEST_CASE("amortized with period 1 is the plain algorithm") {
  std::mt19937_64 rng(47);
  for (const char* name : {"midpoint", "extreme-point", "centroid", "component-midpoint"}) {
    const int d = std::string(name) == "midpoint" ? 1 : 2;
    const auto plain = parse_algorithm(name);
    const auto amortized = parse_algorithm(std::string(name) + "+amortized:1");
    for (int i = 0; i < 20; ++i) {
      const auto pts = random_points(rng, d, 2 + rng() % 5);
      std::vector<AgentState> a, b;
      for (std::size_t p = 0; p < pts.size(); ++p) {
        a.push_back(initial_state(plain, p, pts[p]));
        b.push_back(initial_state(amortized, p, pts[p]));
      }
      const auto x = amortize(plain, a[0], messages_of(plain, a), 1, pts.size()).x;
      const auto y = amortize(amortized, b[0], messages_of(amortized, b), 1, pts.size()).x;
      CHECK(x == y);
    }
  }
}

TEST_CASE("amortized midpoint gathers intervals") {
  const auto kind = parse_algorithm("midpoint+amortized");
  std::vector<AgentState> s;
  for (std::size_t p = 0; p < 3; ++p) s.push_back(initial_state(kind, p, pt({double(p)})));
  // Round 1 (not an averaging round for n = 3): agent 1 hears 0 and 1.
  auto next = amortize(kind, s[1], {make_message(kind, s[0]), make_message(kind, s[1])}, 1, 3);
  CHECK(next.x(0) == 1.0);
  const auto& mem = std::get<IntervalMemory>(next.gather);
  CHECK(mem.lo(0) == 0.0);
  CHECK(mem.hi(0) == 1.0);
  // Round 2 averages: hearing agent 2 as well gives [0, 2] -> 1.
  auto s2 = s[2];
  auto done = amortize(kind, next, {make_message(kind, next), make_message(kind, s2)}, 2, 3);
  CHECK(done.x(0) == 1.0);
  CHECK(std::get<IntervalMemory>(done.gather).lo(0) == 1.0);
  CHECK(payload_reals(make_message(kind, done)) == 2);
}

TEST_CASE("amortized midpoint intervals intersect after n-1 rooted rounds") {
  const auto kind = parse_algorithm("midpoint+amortized");
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RunSpec spec;
    spec.n = 3;
    spec.algorithm = kind;
    spec.pattern.family = "random-rooted";
    spec.seed = seed;
    const auto pattern = make_pattern(spec.pattern, 3, seed);
    std::vector<AgentState> states;
    for (std::size_t p = 0; p < 3; ++p) states.push_back(initial_state(kind, p, pt({double(p * p)})));
    // Gather only: use a period long enough that round 2 does not average.
    const auto gather = parse_algorithm("midpoint+amortized:5");
    for (auto& st : states) st = initial_state(gather, st.id, st.x);
    Configuration c;
    c.positions = PointSet(1, 3);
    for (std::size_t p = 0; p < 3; ++p) c.positions(0, static_cast<Eigen::Index>(p)) = states[p].x(0);
    for (std::uint64_t t = 1; t <= 2; ++t) std::tie(c, states) = step(c, pattern.graph(t), states, gather, t);
    double lo = -1e9, hi = 1e9;
    for (const auto& st : states) {
      lo = std::max(lo, std::get<IntervalMemory>(st.gather).lo(0));
      hi = std::min(hi, std::get<IntervalMemory>(st.gather).hi(0));
    }
    CHECK(lo <= hi);
  }
}

TEST_CASE("centroid frame reduction does not change positions") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    RunSpec spec;
    spec.n = 7;
    spec.d = 2;
    spec.algorithm = parse_algorithm("centroid+amortized");
    spec.pattern.family = "random-rooted";
    spec.seed = seed;
    spec.epsilon = 1e-4;
    RunSpec off = spec;
    off.options.frame_reduction = false;
    const auto a = run(spec);
    const auto b = run(off);
    REQUIRE(a.configurations.size() == b.configurations.size());
    for (std::size_t t = 0; t < a.configurations.size(); ++t)
      CHECK((a.configurations[t].positions - b.configurations[t].positions).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("protocol errors") {
  const auto kind = parse_algorithm("midpoint+amortized");
  const auto other = parse_algorithm("centroid+amortized");
  const auto s = initial_state(kind, 0, pt({1.0}));
  CHECK_THROWS_AS(amortize(kind, s, {}, 1, 3), ProtocolError);
  CHECK_THROWS_AS(amortize(kind, s, {make_message(other, initial_state(other, 1, pt({2.0})))}, 1, 3),
                  ProtocolError);
  CHECK_THROWS_AS(amortize(kind, s, {make_message(kind, s)}, 0, 3), std::invalid_argument);
}

TEST_CASE("seeded random tie-break stays within the tied candidates") {
  AlgorithmOptions opt;
  opt.tie_break = TieBreak::SeededRandom;
  opt.tie_seed = 5;
  const auto kind = parse_algorithm("extreme-point");
  std::vector<AgentState> s;
  const std::vector<Point> pts{pt({0, 0}), pt({2, 0}), pt({1, 3})};
  for (std::size_t p = 0; p < 3; ++p) s.push_back(initial_state(kind, p, pts[p]));
  const auto x = amortize(kind, s[0], messages_of(kind, s), 1, 3, opt).x;
  // m^(2) is (0,0) or (2,0): the result is (3/4, 3/4) or (5/4, 3/4).
  CHECK((x.isApprox(pt({0.75, 0.75})) || x.isApprox(pt({1.25, 0.75}))));
  CHECK(amortize(kind, s[0], messages_of(kind, s), 1, 3, opt).x == x);
}
