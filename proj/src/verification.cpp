#include "consensus/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "consensus/errors.hpp"

namespace consensus {

namespace {

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

// One audited transition: positions before and after, and the graph whose
// in-neighbourhoods define each agent's inputs.
struct Transition {
  std::uint64_t end_round;
  const PointSet* before;
  const PointSet* after;
  CommGraph graph;
};

std::vector<Transition> transitions(const RunTrace& trace, const CommPattern& pattern,
                                    std::size_t macro_period) {
  if (pattern.size() != trace.n) {
    throw std::invalid_argument("pattern has " + std::to_string(pattern.size()) +
                                " agents but the trace has " + std::to_string(trace.n));
  }
  if (trace.configurations.size() < 2)
    throw std::invalid_argument("trace needs at least two recorded configurations");
  const std::size_t period = macro_period == 0 ? trace.period : macro_period;
  std::vector<Transition> out;
  for (std::size_t end = period; end < trace.configurations.size(); end += period) {
    std::vector<CommGraph> graphs;
    for (std::size_t t = end - period + 1; t <= end; ++t) graphs.push_back(pattern.graph(t));
    out.push_back(Transition{end, &trace.configurations[end - period].positions,
                             &trace.configurations[end].positions, graph_product(graphs)});
  }
  return out;
}

}  // namespace

double realized_safeness(const PointSet& inputs, const Point& x) {
  if (inputs.cols() == 0) throw std::invalid_argument("realized_safeness: no inputs");
  if (inputs.rows() != x.size()) throw std::invalid_argument("realized_safeness: dimension mismatch");
  double worst = nan();
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double lo = inputs.row(k).minCoeff();
    const double hi = inputs.row(k).maxCoeff();
    const double a = safe_margin(lo, hi, x(k));
    if (std::isnan(a)) continue;
    worst = std::isnan(worst) ? a : std::min(worst, a);
  }
  return worst;
}

SafenessReport audit_safeness(const RunTrace& trace, const CommPattern& pattern,
                              double claimed_alpha, std::size_t macro_period) {
  SafenessReport report;
  report.claimed_alpha = claimed_alpha;
  const Eigen::Index d = trace.d;
  for (const auto& tr : transitions(trace, pattern, macro_period)) {
    Eigen::MatrixXd margins = Eigen::MatrixXd::Constant(d, static_cast<Eigen::Index>(trace.n), nan());
    for (AgentId p = 0; p < trace.n; ++p) {
      const auto heard = tr.graph.in_neighbors(p);
      for (Eigen::Index k = 0; k < d; ++k) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (AgentId q : heard) {
          lo = std::min(lo, (*tr.before)(k, static_cast<Eigen::Index>(q)));
          hi = std::max(hi, (*tr.before)(k, static_cast<Eigen::Index>(q)));
        }
        const double a = safe_margin(lo, hi, (*tr.after)(k, static_cast<Eigen::Index>(p)));
        if (std::isnan(a)) continue;
        margins(k, static_cast<Eigen::Index>(p)) = a;
        report.worst_alpha = std::min(report.worst_alpha, a);
        if (a < claimed_alpha - kSafenessSlack)
          report.violations.push_back({tr.end_round, p, k, a});
      }
    }
    report.rounds.push_back(tr.end_round);
    report.margins.push_back(std::move(margins));
  }
  return report;
}

std::vector<double> decompose_safe_value(std::span<const double> values, double x, double alpha) {
  if (!(alpha >= 0 && alpha <= 0.5)) throw std::invalid_argument("decompose_safe_value: alpha outside [0, 1/2]");
  if (values.empty()) throw std::invalid_argument("decompose_safe_value: no values");
  if (!std::is_sorted(values.begin(), values.end()))
    throw std::invalid_argument("decompose_safe_value: values must be sorted ascending");
  const std::size_t n = values.size();
  const double v1 = values.front();
  const double vn = values.back();
  const double range = vn - v1;
  if (range <= kDiameterFloor) {
    if (std::abs(x - v1) > 1e-9 * std::max(1.0, std::abs(v1)))
      throw std::out_of_range("decompose_safe_value: x differs from the common value");
    return std::vector<double>(n, 1.0 / static_cast<double>(n));
  }
  const double lo = (1 - alpha) * v1 + alpha * vn;
  const double hi = alpha * v1 + (1 - alpha) * vn;
  const double slack = 1e-12 * range;
  if (x < lo - slack || x > hi + slack) {
    std::ostringstream os;
    os.precision(17);
    os << "decompose_safe_value: x = " << x << " outside the safe interval [" << lo << ", " << hi << "]";
    throw std::out_of_range(os.str());
  }
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  // The residual (x - alpha * mean) / (1 - alpha) lies in [v1, vn]; split it
  // between the two end values.
  const double y = (x - alpha * mean) / (1 - alpha);
  const double b1 = std::clamp((vn - y) / range, 0.0, 1.0);
  std::vector<double> a(n, alpha / static_cast<double>(n));
  a.front() += (1 - alpha) * b1;
  a.back() += (1 - alpha) * (1 - b1);
  return a;
}

CommGraph associated_graph(const Eigen::MatrixXd& a) {
  CommGraph g(static_cast<std::size_t>(a.rows()));
  for (Eigen::Index p = 0; p < a.rows(); ++p)
    for (Eigen::Index q = 0; q < a.cols(); ++q)
      if (a(p, q) > 0) g.add_edge(static_cast<AgentId>(p), static_cast<AgentId>(q));
  return g;
}

StochasticMatrixSeq reconstruct_matrices(const RunTrace& trace, const CommPattern& pattern,
                                         double alpha, std::size_t macro_period) {
  StochasticMatrixSeq seq;
  seq.alpha = alpha;
  const auto n = static_cast<Eigen::Index>(trace.n);
  for (const auto& tr : transitions(trace, pattern, macro_period)) {
    std::vector<Eigen::MatrixXd> blocks;
    for (Eigen::Index k = 0; k < trace.d; ++k) {
      Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
      for (Eigen::Index p = 0; p < n; ++p) {
        auto heard = tr.graph.in_neighbors(static_cast<AgentId>(p));
        std::stable_sort(heard.begin(), heard.end(), [&](AgentId u, AgentId v) {
          return (*tr.before)(k, static_cast<Eigen::Index>(u)) < (*tr.before)(k, static_cast<Eigen::Index>(v));
        });
        std::vector<double> values;
        for (AgentId q : heard) values.push_back((*tr.before)(k, static_cast<Eigen::Index>(q)));
        double x = (*tr.after)(k, p);
        const double range = values.back() - values.front();
        const double lo = (1 - alpha) * values.front() + alpha * values.back();
        const double hi = alpha * values.front() + (1 - alpha) * values.back();
        if (range > kDiameterFloor) {
          const double slack =
              kSafenessSlack * range +
              rounding_allowance(std::max({std::abs(values.front()), std::abs(values.back()), std::abs(x)}));
          if (x < lo - slack || x > hi + slack) {
            std::ostringstream os;
            os.precision(17);
            os << "agent " << p << " component " << k << " at round " << tr.end_round << ": " << x
               << " outside the " << alpha << "-safe interval [" << lo << ", " << hi << "]";
            throw SafenessViolation(os.str());
          }
          x = std::clamp(x, lo, hi);
        } else {
          x = values.front();
        }
        const auto w = decompose_safe_value(values, x, alpha);
        for (std::size_t i = 0; i < heard.size(); ++i) a(p, static_cast<Eigen::Index>(heard[i])) = w[i];
      }
      blocks.push_back(std::move(a));
    }
    seq.rounds.push_back(tr.end_round);
    seq.graphs.push_back(tr.graph);
    seq.matrices.push_back(std::move(blocks));
  }
  return seq;
}

MoreauReport check_moreau_assumptions(const StochasticMatrixSeq& seq, double a, std::uint64_t window) {
  MoreauReport report;
  report.a = a;
  report.window = window;
  if (seq.matrices.empty()) throw std::invalid_argument("check_moreau_assumptions: empty sequence");
  const std::size_t components = seq.matrices.front().size();
  const double slack = 1e-12;
  for (std::size_t k = 0; k < components; ++k) {
    std::vector<CommGraph> graphs;
    for (std::size_t t = 0; t < seq.size(); ++t) {
      const Eigen::MatrixXd& m = seq.matrices[t][k];
      const std::uint64_t round = seq.rounds.empty() ? t + 1 : seq.rounds[t];
      for (Eigen::Index p = 0; p < m.rows(); ++p) {
        if (!(m(p, p) > 0) && report.positive_diagonal) {
          report.positive_diagonal = false;
          report.witnesses.push_back("A1: zero diagonal at round " + std::to_string(round) +
                                     ", agent " + std::to_string(p) + ", component " + std::to_string(k));
        }
        for (Eigen::Index q = 0; q < m.cols(); ++q) {
          if (m(p, q) > 0 && m(p, q) < a - slack && report.bounded_below) {
            report.bounded_below = false;
            report.witnesses.push_back("A2: entry (" + std::to_string(p) + "," + std::to_string(q) +
                                       ") = " + std::to_string(m(p, q)) + " below a at round " +
                                       std::to_string(round));
          }
        }
      }
      CommGraph g = associated_graph(m);
      if (!is_bidirectional(g) && report.bidirectional) {
        report.bidirectional = false;
        report.witnesses.push_back("A3: graph of round " + std::to_string(round) + " is not bidirectional");
      }
      graphs.push_back(std::move(g));
    }
    if (report.strongly_connected) {
      bool ok = false;
      if (graphs.size() >= window && window >= 1) ok = is_strongly_connected(infinitely_often_union(graphs, window));
      if (!ok) {
        report.strongly_connected = false;
        report.witnesses.push_back("A4: windowed recurring-edge graph of component " + std::to_string(k) +
                                   " is not strongly connected");
      }
    }
  }
  return report;
}

std::vector<std::vector<double>> brute_force_consensus_1d(const std::vector<double>& values,
                                                          const std::vector<CommGraph>& prefix,
                                                          const AlgorithmKind& algorithm) {
  const std::size_t n = values.size();
  if (n < 1 || n > 5) throw std::invalid_argument("brute_force_consensus_1d: need 1 <= n <= 5");
  if (prefix.size() > 20) throw std::invalid_argument("brute_force_consensus_1d: horizon above 20");
  for (const auto& g : prefix)
    if (g.size() != n) throw std::invalid_argument("brute_force_consensus_1d: graph size mismatch");
  const bool midpoint = algorithm.tag == AlgorithmTag::MidPoint1D;
  if (!midpoint && (algorithm.tag != AlgorithmTag::EqualNeighbor || algorithm.amortized))
    throw std::invalid_argument("brute_force_consensus_1d: unsupported algorithm");
  const std::size_t period = algorithm.amortized
                                 ? (algorithm.amortization_period > 0 ? algorithm.amortization_period
                                                                      : (n > 1 ? n - 1 : 1))
                                 : 1;

  std::vector<std::vector<double>> rows{values};
  std::vector<double> x = values;
  std::vector<double> lo = values;
  std::vector<double> hi = values;
  for (std::size_t t = 1; t <= prefix.size(); ++t) {
    const CommGraph& g = prefix[t - 1];
    std::vector<double> next_x = x;
    std::vector<double> next_lo(n);
    std::vector<double> next_hi(n);
    for (std::size_t p = 0; p < n; ++p) {
      if (!midpoint) {
        // Explicit weight row: 1/|In_p| on every in-neighbour.
        std::vector<double> w(n, 0.0);
        double count = 0;
        for (std::size_t q = 0; q < n; ++q)
          if (g.has_edge(q, p)) count += 1;
        for (std::size_t q = 0; q < n; ++q)
          if (g.has_edge(q, p)) w[q] = 1.0 / count;
        double acc = 0;
        for (std::size_t q = 0; q < n; ++q) acc += w[q] * x[q];
        next_x[p] = acc;
        continue;
      }
      double m = std::numeric_limits<double>::infinity();
      double big = -m;
      for (std::size_t q = 0; q < n; ++q) {
        if (!g.has_edge(q, p)) continue;
        m = std::min(m, lo[q]);
        big = std::max(big, hi[q]);
      }
      next_lo[p] = m;
      next_hi[p] = big;
    }
    if (midpoint) {
      lo = next_lo;
      hi = next_hi;
      if (t % period == 0) {
        for (std::size_t p = 0; p < n; ++p) {
          next_x[p] = 0.5 * lo[p] + 0.5 * hi[p];
          lo[p] = hi[p] = next_x[p];
        }
      }
    }
    x = next_x;
    rows.push_back(x);
  }
  return rows;
}

}  // namespace consensus
