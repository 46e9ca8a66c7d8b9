#include "consensus/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "consensus/errors.hpp"

namespace consensus {

namespace {

enum class Model { Nonsplit, Rooted, Other };

Model classify(const PatternSpec& spec, std::size_t n) {
  auto classify_graphs = [](const std::vector<CommGraph>& graphs) {
    if (std::all_of(graphs.begin(), graphs.end(), [](const auto& g) { return is_nonsplit(g); }))
      return Model::Nonsplit;
    if (std::all_of(graphs.begin(), graphs.end(), [](const auto& g) { return is_rooted(g); }))
      return Model::Rooted;
    return Model::Other;
  };
  if (spec.family == "random-nonsplit") return Model::Nonsplit;
  if (spec.family == "random-rooted") return Model::Rooted;
  if (spec.family == "rotating-star") return classify_graphs(adversarial_rotating_star(n).prefix(n));
  if (spec.family == "fixed" || spec.family == "periodic") return classify_graphs(spec.graphs);
  return Model::Other;
}

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

}  // namespace

bool InitialSpec::operator==(const InitialSpec& other) const {
  if (kind != other.kind || seed != other.seed) return false;
  if (positions.rows() != other.positions.rows() || positions.cols() != other.positions.cols())
    return false;
  return positions == other.positions;
}

Eigen::VectorXd component_diameters(const PointSet& positions) {
  if (positions.cols() == 0) return Eigen::VectorXd::Zero(positions.rows());
  return positions.rowwise().maxCoeff() - positions.rowwise().minCoeff();
}

double max_pairwise_distance(const PointSet& positions) {
  return detail::diameter<double>(positions);
}

PointSet random_unit_box(std::size_t n, int d, std::uint64_t seed) {
  std::mt19937_64 rng(mix_seed(seed, 0, 0x1417));
  PointSet pts(d, static_cast<Eigen::Index>(n));
  for (Eigen::Index j = 0; j < pts.cols(); ++j)
    for (Eigen::Index i = 0; i < pts.rows(); ++i)
      pts(i, j) = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return pts;
}

CommPattern make_pattern(const PatternSpec& spec, std::size_t n, std::uint64_t run_seed) {
  const std::uint64_t seed = spec.seed.value_or(run_seed);
  if (spec.family == "fixed") {
    if (spec.graphs.size() != 1) throw std::invalid_argument("fixed pattern needs exactly one graph");
    if (spec.graphs.front().size() != n) throw std::invalid_argument("fixed graph has wrong size");
    return fixed_pattern(spec.graphs.front());
  }
  if (spec.family == "periodic") {
    for (const auto& g : spec.graphs)
      if (g.size() != n) throw std::invalid_argument("periodic pattern graph has wrong size");
    return periodic_pattern(spec.graphs);
  }
  if (spec.family == "random-rooted") return random_rooted(n, seed);
  if (spec.family == "random-nonsplit") return random_nonsplit(n, seed);
  if (spec.family == "rotating-star") return adversarial_rotating_star(n);
  if (spec.family == "bidirectional-intermittent")
    return bidirectional_intermittent(n, spec.period, seed);
  throw std::invalid_argument("unknown pattern family '" + spec.family + "'");
}

void validate_spec(const RunSpec& spec) {
  if (spec.n < 1) throw std::invalid_argument("n must be >= 1");
  if (spec.d < 1) throw std::invalid_argument("d must be >= 1");
  if (!(spec.epsilon > 0) || !std::isfinite(spec.epsilon))
    throw std::invalid_argument("epsilon must be a positive finite number");
  if (spec.max_rounds < 1) throw std::invalid_argument("max_rounds must be >= 1");
  if (spec.pattern.period < 1) throw std::invalid_argument("pattern period must be >= 1");
  validate_algorithm(spec.algorithm, spec.d, spec.n, spec.options);
  if (spec.initial.kind == InitialSpec::Kind::Explicit) {
    const auto& p = spec.initial.positions;
    if (p.rows() != spec.d || p.cols() != static_cast<Eigen::Index>(spec.n))
      throw std::invalid_argument("explicit initial positions must be d x n");
    if (!p.allFinite()) throw std::invalid_argument("initial positions must be finite");
  }
  (void)make_pattern(spec.pattern, spec.n, spec.seed);
}

Configuration initial_configuration(const RunSpec& spec) {
  Configuration c;
  c.round = 0;
  if (spec.initial.kind == InitialSpec::Kind::Explicit)
    c.positions = spec.initial.positions;
  else
    c.positions = random_unit_box(spec.n, spec.d, spec.initial.seed.value_or(spec.seed));
  return c;
}

std::pair<Configuration, std::vector<AgentState>> step_in_order(
    const Configuration& config, const CommGraph& g, const std::vector<AgentState>& states,
    const AlgorithmKind& kind, std::uint64_t round, const AlgorithmOptions& options,
    const std::vector<AgentId>& order) {
  const std::size_t n = config.agents();
  if (g.size() != n || states.size() != n)
    throw std::invalid_argument("step: graph, configuration and states disagree on n");
  for (const auto& s : states) {
    if (s.x.size() != config.dimension()) throw std::invalid_argument("step: dimension mismatch");
  }
  std::vector<Message> outbox;
  outbox.reserve(n);
  for (const auto& s : states) outbox.push_back(make_message(kind, s));

  std::vector<AgentState> next(states.size());
  for (AgentId p : order) {
    std::vector<Message> inbox;
    for (AgentId q : g.in_neighbors(p)) inbox.push_back(outbox[q]);
    next[p] = amortize(kind, states[p], inbox, round, n, options);
  }
  Configuration out;
  out.round = round;
  out.positions.resize(config.dimension(), static_cast<Eigen::Index>(n));
  for (std::size_t p = 0; p < n; ++p) out.positions.col(static_cast<Eigen::Index>(p)) = next[p].x;
  return {std::move(out), std::move(next)};
}

std::pair<Configuration, std::vector<AgentState>> step(const Configuration& config,
                                                       const CommGraph& g,
                                                       const std::vector<AgentState>& states,
                                                       const AlgorithmKind& kind,
                                                       std::uint64_t round,
                                                       const AlgorithmOptions& options) {
  std::vector<AgentId> order(config.agents());
  std::iota(order.begin(), order.end(), AgentId{0});
  return step_in_order(config, g, states, kind, round, options, order);
}

RunTrace run(const RunSpec& spec) {
  validate_spec(spec);
  const CommPattern pattern = make_pattern(spec.pattern, spec.n, spec.seed);
  const std::size_t n = spec.n;
  const std::size_t period = spec.algorithm.period_for(n);

  RunTrace trace;
  trace.n = n;
  trace.d = spec.d;
  trace.period = period;
  trace.initial = initial_configuration(spec);

  std::vector<AgentState> states;
  for (std::size_t p = 0; p < n; ++p)
    states.push_back(initial_state(spec.algorithm, p, trace.initial.positions.col(static_cast<Eigen::Index>(p))));

  const Eigen::VectorXd delta0 = component_diameters(trace.initial.positions);
  std::vector<Eigen::Index> live;  // components with a nonzero initial diameter
  for (Eigen::Index k = 0; k < delta0.size(); ++k)
    if (delta0(k) > kDiameterFloor) live.push_back(k);

  trace.deltas.push_back(delta0);
  if (spec.record_configurations) trace.configurations.push_back(trace.initial);
  if (spec.record_margins) trace.margins.push_back(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), nan()));

  // A diameter within rounding of the target counts as reached; otherwise
  // exact-halving runs would miss equality cases by an ulp.
  auto reached = [&](const Configuration& c, const Eigen::VectorXd& delta) {
    for (auto k : live)
      if (delta(k) > spec.epsilon * delta0(k) + rounding_allowance(c.positions.row(k).cwiseAbs().maxCoeff()))
        return false;
    return true;
  };

  Configuration current = trace.initial;
  Configuration macro_start = trace.initial;
  CommGraph macro_graph(n);
  std::optional<std::uint64_t> t_eps;
  if (reached(trace.initial, delta0)) t_eps = 0;

  std::uint64_t t = 0;
  while (!t_eps && t < spec.max_rounds) {
    ++t;
    const CommGraph g = pattern.graph(t);
    auto [next, next_states] = step(current, g, states, spec.algorithm, t, spec.options);
    states = std::move(next_states);
    current = std::move(next);

    if (spec.record_margins) {
      macro_graph = graph_product(macro_graph, g);
      Eigen::VectorXd margin = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), nan());
      if (t % period == 0) {
        for (AgentId p = 0; p < n; ++p) {
          const auto heard = macro_graph.in_neighbors(p);
          double worst = nan();
          for (Eigen::Index k = 0; k < spec.d; ++k) {
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            for (AgentId q : heard) {
              lo = std::min(lo, macro_start.positions(k, static_cast<Eigen::Index>(q)));
              hi = std::max(hi, macro_start.positions(k, static_cast<Eigen::Index>(q)));
            }
            const double a = safe_margin(lo, hi, current.positions(k, static_cast<Eigen::Index>(p)));
            if (std::isnan(a)) continue;
            worst = std::isnan(worst) ? a : std::min(worst, a);
          }
          margin(static_cast<Eigen::Index>(p)) = worst;
        }
        macro_graph = CommGraph(n);
        macro_start = current;
      }
      trace.margins.push_back(std::move(margin));
    }

    const Eigen::VectorXd delta = component_diameters(current.positions);
    trace.deltas.push_back(delta);
    if (spec.record_configurations) trace.configurations.push_back(current);
    if (reached(current, delta)) t_eps = t;
  }

  trace.rounds = t;
  trace.final_configuration = current;
  trace.metrics.t_eps = t_eps;
  trace.metrics.converged = t_eps.has_value();

  // Finite-horizon rate: geometric mean per round of the worst relative
  // component diameter.
  if (t > 0 && !live.empty()) {
    double worst = 0;
    for (auto k : live) worst = std::max(worst, trace.deltas.back()(k) / delta0(k));
    trace.metrics.empirical_rate = worst > 0 ? std::pow(worst, 1.0 / static_cast<double>(t)) : 0.0;
  }
  try {
    trace.metrics.bound_t = theorem_bound(spec, delta0);
    trace.metrics.theorem = bound_family(spec);
  } catch (const UnsupportedScenario&) {
    trace.metrics.bound_t.reset();
  }
  return trace;
}

std::vector<Eigen::VectorXd> measure_contraction(const RunTrace& trace, std::size_t macro_period) {
  if (trace.deltas.empty()) throw std::invalid_argument("measure_contraction: empty trace");
  if (macro_period < 1) throw std::invalid_argument("measure_contraction: period must be >= 1");
  std::vector<Eigen::VectorXd> ratios;
  for (std::size_t s = 1; s * macro_period < trace.deltas.size(); ++s) {
    const auto& now = trace.deltas[s * macro_period];
    const auto& before = trace.deltas[(s - 1) * macro_period];
    Eigen::VectorXd r(now.size());
    for (Eigen::Index k = 0; k < now.size(); ++k)
      r(k) = before(k) < kDiameterFloor ? 0.0 : now(k) / before(k);
    ratios.push_back(std::move(r));
  }
  return ratios;
}

std::uint64_t ceil_log(double ratio, double base) {
  if (!(base > 1)) throw std::invalid_argument("ceil_log: base must exceed 1");
  if (!(ratio >= 1)) return 0;
  const double x = std::log(ratio) / std::log(base);
  double k = std::ceil(x);
  if (k - x > 1 - 1e-9) k -= 1;
  return static_cast<std::uint64_t>(std::max(0.0, k));
}

std::string bound_family(const RunSpec& spec) {
  const Model model = classify(spec.pattern, spec.n);
  if (model == Model::Nonsplit) return spec.algorithm.amortized ? "amortized-nonsplit" : "nonsplit";
  if (model == Model::Rooted && spec.algorithm.amortized) return "amortized-rooted";
  throw UnsupportedScenario("no convergence-time theorem covers " + to_string(spec.algorithm) +
                            " on pattern '" + spec.pattern.family + "'");
}

std::uint64_t theorem_bound(const RunSpec& spec, const Eigen::VectorXd& delta0) {
  const std::string family = bound_family(spec);
  if (spec.algorithm.tag == AlgorithmTag::ComponentMidPoint && spec.d >= 3)
    throw UnsupportedScenario("component-midpoint is not a convex combination rule for d >= 3");
  if (spec.n <= 1 || (delta0.size() > 0 && delta0.maxCoeff() <= kDiameterFloor)) return 0;
  const std::size_t period = spec.algorithm.period_for(spec.n);
  if (family == "amortized-rooted" && period + 1 < spec.n) {
    throw UnsupportedScenario("amortization period " + std::to_string(period) +
                              " is shorter than n-1; macro-rounds need not be nonsplit");
  }
  const double alpha = safeness_constant(spec.algorithm.tag, spec.d, spec.n);
  const double base = 1.0 / (1.0 - alpha);
  return static_cast<std::uint64_t>(period) * ceil_log(1.0 / spec.epsilon, base);
}

}  // namespace consensus
