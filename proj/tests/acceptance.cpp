// Acceptance suite: one PASS/FAIL line per criterion. Tolerances are pinned
// here, next to the checks that use them. Exit status is the number of
// failed criteria (capped at 125).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "consensus/cli.hpp"
#include "consensus/errors.hpp"
#include "consensus/geometry.hpp"
#include "consensus/io.hpp"
#include "consensus/pattern.hpp"
#include "consensus/simulator.hpp"
#include "consensus/verification.hpp"

using namespace consensus;

namespace {

constexpr double kSafeTol = 1e-9;        // criteria 1, 2: realized alpha slack
constexpr double kTightTol = 1e-12;      // criterion 1: hyperpyramid centroid
constexpr double kRatioTol = 1e-12;      // criterion 3: per-round contraction
constexpr double kExponentMax = 1.15;    // criterion 6
constexpr double kSigmaMax = 4.0;        // criterion 9
constexpr double kWeightSumTol = 1e-12;  // criterion 10
constexpr double kValueTol = 1e-9;       // criterion 10, relative to range
constexpr double kAgreeTol = 1e-6;       // criterion 11
constexpr double kOracleTol = 1e-12;     // criterion 12

struct Outcome {
  bool pass = true;
  std::string detail;
};

PointSet random_points(std::mt19937_64& rng, int d, std::size_t m) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PointSet pts(d, static_cast<Eigen::Index>(m));
  for (Eigen::Index c = 0; c < pts.cols(); ++c)
    for (int k = 0; k < d; ++k) pts(k, c) = u(rng);
  return pts;
}

// Smallest k with base^k >= 1/eps, written out independently of the library.
std::uint64_t macro_bound(double eps, double base) {
  std::uint64_t k = 0;
  double acc = 1.0;
  while (acc * eps < 1.0 - 1e-12) {
    acc *= base;
    ++k;
  }
  return k;
}

double worst_margin(const SafenessReport& r) { return r.worst_alpha; }

RunSpec base_spec(std::size_t n, int d, const std::string& alg, const std::string& family, std::uint64_t seed,
                  double eps) {
  RunSpec s;
  s.n = n;
  s.d = d;
  s.algorithm = parse_algorithm(alg);
  s.pattern.family = family;
  s.seed = seed;
  s.epsilon = eps;
  return s;
}

Outcome c1_centroid_safeness() {
  std::mt19937_64 rng(101);
  double worst_gap = 1.0;
  std::size_t sets = 0;
  for (int d = 1; d <= 5; ++d) {
    const double alpha = 1.0 / (d + 1);
    for (int i = 0; i < 1000; ++i) {
      const PointSet pts = random_points(rng, d, 3 + rng() % 10);
      const Point c = centroid(convex_hull(pts)).centroid;
      worst_gap = std::min(worst_gap, realized_safeness(pts, c) - alpha);
      ++sets;
    }
  }
  double tight = 0;
  for (int d = 1; d <= 5; ++d) {
    const Point c = centroid(build_hyperpyramid<double>(d, 1.0, 1.0)).centroid;
    tight = std::max(tight, std::abs(c(0) - static_cast<double>(d) / (d + 1)));
  }
  std::ostringstream os;
  os << sets << " sets, min(alpha_hat - 1/(d+1)) = " << worst_gap << ", pyramid error " << tight;
  return {worst_gap >= -kSafeTol && tight <= kTightTol, os.str()};
}

Outcome c2_extreme_point_safeness() {
  double worst_gap = 1.0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const int d = 1 + static_cast<int>(s % 4);
    const std::size_t n = 2 + s % 9;
    RunSpec spec = base_spec(n, d, "extreme-point", "random-nonsplit", 2000 + s, 1e-9);
    spec.max_rounds = 200;
    const RunTrace trace = run(spec);
    const auto report = audit_safeness(trace, make_pattern(spec.pattern, n, spec.seed), 1.0 / (2 * d));
    worst_gap = std::min(worst_gap, worst_margin(report) - 1.0 / (2 * d));
    if (!report.passed()) return {false, "violation in scenario " + std::to_string(s)};
  }
  return {worst_gap >= -kSafeTol, "200 runs, min(alpha_hat - 1/(2d)) = " + format_double(worst_gap)};
}

Outcome c3_midpoint_contraction() {
  const double eps = std::ldexp(1.0, -20);
  double worst_ratio = 0;
  std::uint64_t worst_t = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const std::size_t n = 2 + s % 9;
    const RunTrace trace = run(base_spec(n, 1, "midpoint", "random-nonsplit", 3000 + s, eps));
    // The diameter is a difference of rounded positions; credit it the
    // rounding allowance of their magnitude before forming the ratio.
    for (std::size_t t = 1; t < trace.deltas.size(); ++t) {
      if (trace.deltas[t - 1](0) <= kDiameterFloor) continue;
      const double u = rounding_allowance(trace.configurations[t].positions.cwiseAbs().maxCoeff());
      worst_ratio = std::max(worst_ratio, (trace.deltas[t](0) - u) / trace.deltas[t - 1](0));
    }
    if (!trace.metrics.t_eps) return {false, "scenario " + std::to_string(s) + " did not converge"};
    worst_t = std::max(worst_t, *trace.metrics.t_eps);
  }
  std::ostringstream os;
  os.precision(15);
  os << "max ratio " << worst_ratio << ", max T " << worst_t << " (bound 20)";
  return {worst_ratio <= 0.5 + kRatioTol && worst_t <= 20, os.str()};
}

// Rooted harness shared by criteria 4-6: every tenth scenario uses the
// rotating star, the rest fresh random rooted patterns.
struct RootedResult {
  std::size_t runs = 0;
  std::size_t over = 0;
  double worst_fraction = 0;  // max T / bound
};

RootedResult rooted_harness(const std::string& alg, int d, const std::vector<std::size_t>& ns, std::size_t per_n,
                            double base, double eps, std::uint64_t seed0,
                            std::vector<std::pair<std::size_t, double>>* times = nullptr) {
  RootedResult r;
  for (std::size_t n : ns) {
    double total = 0;
    for (std::size_t i = 0; i < per_n; ++i) {
      const std::uint64_t seed = seed0 + 1000 * n + i;
      const std::string family = i % 10 == 0 ? "rotating-star" : "random-rooted";
      RunSpec spec = base_spec(n, d, alg, family, seed, eps);
      spec.record_configurations = false;
      spec.record_margins = false;
      const RunTrace trace = run(spec);
      const std::uint64_t bound = (n - 1) * macro_bound(eps, base);
      ++r.runs;
      if (!trace.metrics.t_eps || *trace.metrics.t_eps > bound) {
        ++r.over;
        continue;
      }
      r.worst_fraction = std::max(r.worst_fraction, double(*trace.metrics.t_eps) / double(bound));
      total += double(*trace.metrics.t_eps);
    }
    if (times) times->emplace_back(n, total / double(per_n));
  }
  return r;
}

Outcome c4_amortized_midpoint() {
  std::vector<std::size_t> ns;
  for (std::size_t n = 3; n <= 12; ++n) ns.push_back(n);
  const auto r = rooted_harness("midpoint+amortized", 1, ns, 20, 2.0, 1e-6, 40000);
  std::ostringstream os;
  os << r.runs << " runs, " << r.over << " above bound, max T/bound " << r.worst_fraction;
  return {r.over == 0, os.str()};
}

Outcome c5_amortized_extreme_point() {
  std::size_t runs = 0;
  std::size_t over = 0;
  double worst = 0;
  for (int d = 2; d <= 4; ++d) {
    const double base = 2.0 * d / (2.0 * d - 1);
    std::vector<std::size_t> ns;
    for (std::size_t n = 3; n <= 12; ++n) ns.push_back(n);
    const auto r = rooted_harness("extreme-point+amortized", d, ns, 7, base, 1e-6, 50000 + 100000 * d);
    runs += r.runs;
    over += r.over;
    worst = std::max(worst, r.worst_fraction);
  }
  std::ostringstream os;
  os << runs << " runs, " << over << " above bound, max T/bound " << worst;
  return {over == 0, os.str()};
}

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<std::pair<std::size_t, double>>& pts) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : pts) {
    const double lx = std::log(double(x));
    const double ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double m = double(pts.size());
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

Outcome c6_amortized_centroid() {
  std::size_t runs = 0;
  std::size_t over = 0;
  double worst = 0;
  double max_exponent = 0;
  std::ostringstream os;
  for (int d = 2; d <= 3; ++d) {
    const double base = (d + 1.0) / d;
    std::vector<std::pair<std::size_t, double>> times;
    const auto r = rooted_harness("centroid+amortized", d, {4, 8, 12, 16}, 25, base, 1e-6, 60000 + 100000 * d, &times);
    runs += r.runs;
    over += r.over;
    worst = std::max(worst, r.worst_fraction);
    const double e = loglog_slope(times);
    max_exponent = std::max(max_exponent, e);
    os << "d=" << d << " exponent " << e << "; ";
  }
  os << runs << " runs, " << over << " above bound, max T/bound " << worst;
  return {over == 0 && max_exponent <= kExponentMax, os.str()};
}

Outcome c7_products_nonsplit() {
  std::size_t checked = 0;
  std::size_t bad = 0;
  // n = 3: every self-looped digraph is a subset of the six off-diagonal edges.
  std::vector<CommGraph> rooted3;
  const std::vector<std::pair<AgentId, AgentId>> all{{0, 1}, {0, 2}, {1, 0}, {1, 2}, {2, 0}, {2, 1}};
  for (unsigned mask = 0; mask < 64; ++mask) {
    std::vector<std::pair<AgentId, AgentId>> edges;
    for (unsigned b = 0; b < 6; ++b)
      if (mask >> b & 1u) edges.push_back(all[b]);
    CommGraph g(3, edges);
    if (is_rooted(g)) rooted3.push_back(g);
  }
  for (const auto& g : rooted3)
    for (const auto& h : rooted3) {
      ++checked;
      if (!is_nonsplit(graph_product(g, h))) ++bad;
    }
  // n = 4..8: half the tuples from the random rooted generator, half bare
  // random out-trees (the sparsest rooted graphs).
  std::mt19937_64 rng(707);
  for (std::size_t n = 4; n <= 8; ++n) {
    for (int i = 0; i < 500; ++i) {
      std::vector<CommGraph> tuple;
      if (i % 2 == 0) {
        tuple = random_rooted(n, rng()).prefix(n - 1);
      } else {
        for (std::size_t j = 0; j + 1 < n; ++j) {
          std::vector<AgentId> order(n);
          for (std::size_t p = 0; p < n; ++p) order[p] = p;
          std::shuffle(order.begin(), order.end(), rng);
          std::vector<std::pair<AgentId, AgentId>> edges;
          for (std::size_t p = 1; p < n; ++p) edges.emplace_back(order[rng() % p], order[p]);
          tuple.emplace_back(n, edges);
        }
      }
      ++checked;
      if (!is_nonsplit(graph_product(tuple))) ++bad;
    }
  }
  return {bad == 0, std::to_string(checked) + " products (" + std::to_string(rooted3.size()) +
                        " rooted graphs for n=3), " + std::to_string(bad) + " counterexamples"};
}

Outcome c8_midpoint_dichotomy() {
  const PointSet unit = PointSet::Identity(3, 3);
  const Point mid = component_midpoint_update({unit.col(0), unit.col(1), unit.col(2)});
  const bool exact = (mid.array() == 0.5).all();
  const bool outside = !contains(convex_hull(unit), mid);
  std::mt19937_64 rng(808);
  std::size_t inside = 0;
  for (int i = 0; i < 1000; ++i) {
    const PointSet pts = random_points(rng, 2, 3 + rng() % 10);
    std::vector<Point> list;
    for (Eigen::Index c = 0; c < pts.cols(); ++c) list.push_back(pts.col(c));
    if (contains(convex_hull(pts), component_midpoint_update(list))) ++inside;
  }
  std::ostringstream os;
  os << "R^3 midpoint exact " << exact << ", outside " << outside << "; R^2 inside " << inside << "/1000";
  return {exact && outside && inside == 1000, os.str()};
}

Outcome c9_centroid_vs_monte_carlo() {
  std::mt19937_64 rng(909);
  double worst_sigma = 0;
  std::size_t polys = 0;
  for (int d = 2; d <= 4; ++d) {
    for (int i = 0; i < 50; ++i) {
      PointSet pts;
      do {
        pts = random_points(rng, d, static_cast<std::size_t>(d + 2 + rng() % 8));
      } while (convex_hull(pts).dim_affine < d);
      const Point exact = centroid(convex_hull(pts)).centroid;
      const auto mc = centroid_oracle_mc<double>(pts, 100000, rng());
      for (int k = 0; k < d; ++k)
        worst_sigma = std::max(worst_sigma, std::abs(exact(k) - mc.mean(k)) / mc.standard_error(k));
      ++polys;
    }
  }
  return {worst_sigma <= kSigmaMax,
          std::to_string(polys) + " polytopes, worst deviation " + format_double(worst_sigma) + " standard errors"};
}

Outcome c10_reconstruction() {
  std::mt19937_64 rng(1010);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t bad = 0;
  for (int i = 0; i < 100000; ++i) {
    const std::size_t n = 1 + rng() % 10;
    std::vector<double> v(n);
    for (auto& x : v) x = -5 + 10 * u(rng);
    std::sort(v.begin(), v.end());
    const double alpha = 0.5 * u(rng);
    const double lo = (1 - alpha) * v.front() + alpha * v.back();
    const double hi = alpha * v.front() + (1 - alpha) * v.back();
    const double x = std::clamp(lo + (hi - lo) * u(rng), lo, hi);
    const auto a = decompose_safe_value(v, x, alpha);
    double sum = 0, value = 0;
    bool in_range = true;
    for (std::size_t j = 0; j < n; ++j) {
      sum += a[j];
      value += a[j] * v[j];
      in_range &= a[j] >= alpha / double(n) - 1e-15 && a[j] <= 1 + 1e-15;
    }
    const double range = v.back() - v.front();
    const double allowance = rounding_allowance(std::max(std::abs(v.front()), std::abs(v.back())));
    if (!in_range || std::abs(sum - 1) > kWeightSumTol || std::abs(value - x) > kValueTol * range + allowance)
      ++bad;
  }
  std::size_t moreau_fail = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const std::size_t n = 3 + s % 6;
    const int d = 1 + static_cast<int>(s % 3);
    RunSpec spec = base_spec(n, d, "centroid", "bidirectional-intermittent", 10100 + s, 1e-6);
    spec.pattern.period = 2 + s % 9;
    const RunTrace trace = run(spec);
    const double alpha = 1.0 / (d + 1);
    const auto seq = reconstruct_matrices(trace, make_pattern(spec.pattern, n, spec.seed), alpha);
    const auto report = check_moreau_assumptions(seq, alpha / double(n), spec.pattern.period);
    if (!report.all()) ++moreau_fail;
  }
  std::ostringstream os;
  os << "100000 decompositions, " << bad << " bad; 10 centroid runs, " << moreau_fail << " failing A1-A4";
  return {bad == 0 && moreau_fail == 0, os.str()};
}

Outcome c11_bidirectional_intermittent() {
  std::size_t failures = 0;
  std::uint64_t slowest = 0;
  std::string first;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const std::size_t n = 2 + s % 7;
    const int d = 1 + static_cast<int>(s % 3);
    for (const char* alg : {"extreme-point", "centroid"}) {
      // delta_k <= eps' delta0_k for every k bounds the Euclidean spread by
      // sqrt(d) eps' times the initial diameter.
      RunSpec spec = base_spec(n, d, alg, "bidirectional-intermittent", 11000 + s, kAgreeTol / std::sqrt(double(d)));
      spec.pattern.period = 1 + s % 10;
      spec.max_rounds = 100000;
      spec.record_configurations = false;
      spec.record_margins = false;
      const RunTrace trace = run(spec);
      const double spread0 = max_pairwise_distance(trace.initial.positions);
      const double spread = max_pairwise_distance(trace.final_configuration.positions);
      bool valid = true;
      const auto hull = convex_hull(trace.initial.positions);
      for (Eigen::Index p = 0; p < trace.final_configuration.positions.cols(); ++p)
        valid &= contains(hull, Point(trace.final_configuration.positions.col(p)));
      const bool ok = trace.metrics.converged && spread <= kAgreeTol * spread0 && valid;
      if (!ok) {
        ++failures;
        if (first.empty()) first = std::string(alg) + " seed " + std::to_string(s);
      }
      if (trace.metrics.t_eps) slowest = std::max(slowest, *trace.metrics.t_eps);
    }
  }
  std::string detail = "200 runs, " + std::to_string(failures) + " failing, slowest T " + std::to_string(slowest);
  if (!first.empty()) detail += ", first failure " + first;
  return {failures == 0, detail};
}

Outcome c12_determinism() {
  std::size_t fixtures = 0;
  double worst = 0;
  const std::vector<std::string> algs{"equal-neighbor", "midpoint", "midpoint+amortized", "midpoint+amortized:2"};
  for (std::size_t n = 1; n <= 5; ++n) {
    std::vector<CommPattern> patterns{fixed_pattern(CommGraph::complete(n)), fixed_pattern(CommGraph::cycle(n)),
                                      adversarial_rotating_star(n), random_rooted(n, 12 + n),
                                      random_nonsplit(n, 24 + n)};
    for (const auto& pattern : patterns) {
      for (const auto& alg_text : algs) {
        const AlgorithmKind alg = parse_algorithm(alg_text);
        std::vector<double> x0(n);
        for (std::size_t p = 0; p < n; ++p) x0[p] = std::sin(3.0 * double(p) + double(n)) * 10.0;
        const auto prefix = pattern.prefix(20);
        const auto oracle = brute_force_consensus_1d(x0, prefix, alg);
        Configuration config;
        config.positions = PointSet(1, static_cast<Eigen::Index>(n));
        for (std::size_t p = 0; p < n; ++p) config.positions(0, static_cast<Eigen::Index>(p)) = x0[p];
        std::vector<AgentState> states;
        for (std::size_t p = 0; p < n; ++p)
          states.push_back(initial_state(alg, p, config.positions.col(static_cast<Eigen::Index>(p))));
        for (std::uint64_t t = 1; t <= 20; ++t) {
          auto [next, st] = step(config, prefix[t - 1], states, alg, t);
          config = std::move(next);
          states = std::move(st);
          for (std::size_t p = 0; p < n; ++p)
            worst = std::max(worst, std::abs(config.positions(0, static_cast<Eigen::Index>(p)) - oracle[t][p]));
        }
        ++fixtures;
      }
    }
  }

  // Same config through the CLI twice, then a sweep with 1 and 4 threads.
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("consensus_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  ScenarioConfig cfg;
  cfg.spec = base_spec(6, 2, "centroid+amortized", "random-rooted", 1212, 1e-6);
  cfg.audit.safeness = true;
  cfg.sweep.n = {4, 6};
  cfg.sweep.seed = {1, 2, 3};
  std::ostringstream sink;
  auto read = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  bool identical = true;
  std::vector<std::string> files;
  for (const char* sub : {"a", "b"}) {
    CliContext ctx;
    ctx.out_dir = dir / sub;
    ctx.out = &sink;
    ctx.err = &sink;
    ctx.threads = sub[0] == 'a' ? 1 : 4;
    identical &= cmd_run(cfg, ctx) == kExitOk;
    identical &= cmd_sweep(cfg, ctx) == kExitOk;
  }
  for (const char* f : {"trace.csv", "deltas.csv", "summary.json", "sweep.csv"})
    identical &= read(dir / "a" / f) == read(dir / "b" / f) && !read(dir / "a" / f).empty();
  fs::remove_all(dir);

  std::ostringstream os;
  os << fixtures << " oracle fixtures, max deviation " << worst << "; repeated CSV identical " << identical;
  return {worst <= kOracleTol && identical, os.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1  centroid safeness 1/(d+1) and pyramid tightness", c1_centroid_safeness},
      {"2  extreme-point safeness 1/(2d)", c2_extreme_point_safeness},
      {"3  midpoint contraction 1/2 on nonsplit", c3_midpoint_contraction},
      {"4  amortized midpoint on rooted", c4_amortized_midpoint},
      {"5  amortized extreme-point on rooted", c5_amortized_extreme_point},
      {"6  amortized centroid on rooted, linear in n", c6_amortized_centroid},
      {"7  products of n-1 rooted graphs are nonsplit", c7_products_nonsplit},
      {"8  component-wise midpoint: R^3 fails, R^2 holds", c8_midpoint_dichotomy},
      {"9  exact centroid vs Monte Carlo", c9_centroid_vs_monte_carlo},
      {"10 safe-value decomposition and A1-A4", c10_reconstruction},
      {"11 bidirectional intermittent convergence", c11_bidirectional_intermittent},
      {"12 oracle cross-check and determinism", c12_determinism},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return std::min(failed, 125);
}
