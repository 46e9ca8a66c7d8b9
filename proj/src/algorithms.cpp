#include "consensus/algorithms.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

#include "consensus/errors.hpp"
#include "consensus/pattern.hpp"

namespace consensus {

namespace {

struct TagName {
  AlgorithmTag tag;
  std::string_view name;
};

constexpr TagName kTagNames[] = {
    {AlgorithmTag::EqualNeighbor, "equal-neighbor"},
    {AlgorithmTag::MidPoint1D, "midpoint"},
    {AlgorithmTag::ComponentMidPoint, "component-midpoint"},
    {AlgorithmTag::ExtremePoint, "extreme-point"},
    {AlgorithmTag::Centroid, "centroid"},
};

void require_nonempty(const std::vector<Point>& received, const char* what) {
  if (received.empty()) throw std::invalid_argument(std::string(what) + ": nothing received");
  for (const auto& p : received) {
    if (p.size() != received.front().size())
      throw std::invalid_argument(std::string(what) + ": mixed dimensions");
  }
}

bool lex_less(const Point& a, const Point& b) { return detail::lex_less<double>(a, b); }

// Index of the winning candidate for coordinate i among candidates listed in
// sender order. `better(a, b)` is true when a beats b strictly.
template <typename Better>
std::size_t select_extreme(const std::vector<const Point*>& cands, int i, Better better,
                           const AlgorithmOptions& opts, std::uint64_t salt) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < cands.size(); ++k)
    if (better((*cands[k])(i), (*cands[best])(i))) best = k;
  if (opts.tie_break == TieBreak::LowestSender) return best;
  std::vector<std::size_t> tied;
  for (std::size_t k = 0; k < cands.size(); ++k)
    if ((*cands[k])(i) == (*cands[best])(i)) tied.push_back(k);
  std::mt19937_64 rng(mix_seed(opts.tie_seed, salt, static_cast<std::uint64_t>(i)));
  return tied[static_cast<std::size_t>(rng() % tied.size())];
}

Point extreme_average(const ExtremeMemory& mem) {
  const int d = static_cast<int>(mem.lo.size());
  Point sum = Point::Zero(mem.lo.front().size());
  for (int i = 0; i < d; ++i) sum += mem.lo[static_cast<std::size_t>(i)] + mem.hi[static_cast<std::size_t>(i)];
  return sum / (2.0 * d);
}

GatherMemory reset_memory(AlgorithmTag tag, const Point& x) {
  const auto d = static_cast<std::size_t>(x.size());
  switch (tag) {
    case AlgorithmTag::EqualNeighbor: return NoMemory{};
    case AlgorithmTag::MidPoint1D:
    case AlgorithmTag::ComponentMidPoint: return IntervalMemory{x, x};
    case AlgorithmTag::ExtremePoint:
      return ExtremeMemory{std::vector<Point>(d, x), std::vector<Point>(d, x)};
    case AlgorithmTag::Centroid: return PointSetMemory{{x}};
  }
  return NoMemory{};
}

[[noreturn]] void protocol_error(const Message& m, const std::string& why) {
  throw ProtocolError("message from agent " + std::to_string(m.sender) + ": " + why);
}

}  // namespace

std::size_t AlgorithmKind::period_for(std::size_t n) const {
  if (!amortized) return 1;
  if (amortization_period > 0) return amortization_period;
  return n > 1 ? n - 1 : 1;
}

std::string to_string(AlgorithmTag tag) {
  for (const auto& tn : kTagNames)
    if (tn.tag == tag) return std::string(tn.name);
  return "unknown";
}

AlgorithmKind parse_algorithm(std::string_view text) {
  AlgorithmKind kind;
  std::string_view base = text;
  const auto plus = text.find('+');
  if (plus != std::string_view::npos) {
    base = text.substr(0, plus);
    std::string_view suffix = text.substr(plus + 1);
    std::string_view period;
    const auto colon = suffix.find(':');
    if (colon != std::string_view::npos) {
      period = suffix.substr(colon + 1);
      suffix = suffix.substr(0, colon);
    }
    if (suffix != "amortized")
      throw std::invalid_argument("unknown algorithm suffix '" + std::string(suffix) + "'");
    kind.amortized = true;
    if (colon != std::string_view::npos) {
      std::size_t value = 0;
      if (period.empty()) throw std::invalid_argument("empty amortization period");
      for (char c : period) {
        if (c < '0' || c > '9')
          throw std::invalid_argument("bad amortization period '" + std::string(period) + "'");
        value = value * 10 + static_cast<std::size_t>(c - '0');
      }
      if (value < 1) throw std::invalid_argument("amortization period must be >= 1");
      kind.amortization_period = value;
    }
  }
  for (const auto& tn : kTagNames) {
    if (tn.name == base) {
      kind.tag = tn.tag;
      return kind;
    }
  }
  throw std::invalid_argument("unknown algorithm '" + std::string(base) + "'");
}

std::string to_string(const AlgorithmKind& kind) {
  std::string s = to_string(kind.tag);
  if (kind.amortized) {
    s += "+amortized";
    if (kind.amortization_period > 0) s += ":" + std::to_string(kind.amortization_period);
  }
  return s;
}

void validate_algorithm(const AlgorithmKind& kind, int d, std::size_t n,
                        const AlgorithmOptions& options) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  if (n < 1) throw std::invalid_argument("need at least one agent");
  if (kind.tag == AlgorithmTag::MidPoint1D && d != 1)
    throw std::invalid_argument("midpoint requires d == 1; use component-midpoint or extreme-point");
  if (kind.tag == AlgorithmTag::ComponentMidPoint && d >= 3 &&
      !options.allow_unsafe_component_midpoint) {
    throw std::invalid_argument(
        "component-midpoint is not a convex combination rule for d >= 3: the midpoint of the "
        "ranges of (1,0,0), (0,1,0), (0,0,1) is (1/2,1/2,1/2), outside their hull");
  }
  if (kind.tag == AlgorithmTag::EqualNeighbor && kind.amortized)
    throw std::invalid_argument("equal-neighbor weights depend on multiplicities and cannot be amortized");
}

double safeness_constant(AlgorithmTag tag, int d, std::size_t n) {
  switch (tag) {
    case AlgorithmTag::EqualNeighbor: return 1.0 / static_cast<double>(n);
    case AlgorithmTag::MidPoint1D:
    case AlgorithmTag::ComponentMidPoint: return 0.5;
    case AlgorithmTag::ExtremePoint: return 1.0 / (2.0 * d);
    case AlgorithmTag::Centroid: return 1.0 / (d + 1.0);
  }
  return 0.0;
}

Point equal_neighbor_update(const std::vector<Point>& received) {
  require_nonempty(received, "equal_neighbor_update");
  Point sum = Point::Zero(received.front().size());
  for (const auto& p : received) sum += p;
  return sum / static_cast<double>(received.size());
}

double midpoint_update_1d(double lo, double hi) {
  if (lo > hi) throw std::invalid_argument("midpoint_update_1d: lo > hi");
  return (lo + hi) / 2.0;
}

Point component_midpoint_update(const std::vector<Point>& received) {
  require_nonempty(received, "component_midpoint_update");
  const auto [lo, hi] = component_extrema<double>(to_point_set(received));
  return (lo + hi) / 2.0;
}

Point extreme_point_update(const std::vector<Point>& received, int d) {
  require_nonempty(received, "extreme_point_update");
  if (received.front().size() != d) throw std::invalid_argument("extreme_point_update: dimension mismatch");
  ExtremeMemory mem;
  for (int i = 0; i < d; ++i) {
    std::size_t lo = 0;
    std::size_t hi = 0;
    for (std::size_t k = 1; k < received.size(); ++k) {
      const double v = received[k](i);
      const double vlo = received[lo](i);
      const double vhi = received[hi](i);
      if (v < vlo) lo = k;
      if (v > vhi) hi = k;
    }
    mem.lo.push_back(received[lo]);
    mem.hi.push_back(received[hi]);
  }
  return extreme_average(mem);
}

Point centroid_update(const std::vector<Point>& received) {
  require_nonempty(received, "centroid_update");
  return centroid(convex_hull<double>(received)).centroid;
}

AgentState initial_state(const AlgorithmKind& kind, AgentId id, const Point& x) {
  if (!x.allFinite()) throw std::invalid_argument("initial_state: non-finite position");
  return AgentState{id, x, reset_memory(kind.tag, x), 0};
}

Message make_message(const AlgorithmKind& kind, const AgentState& state) {
  Message m;
  m.sender = state.id;
  if (kind.tag == AlgorithmTag::EqualNeighbor) {
    m.x = state.x;
    m.payload = NoMemory{};
  } else {
    m.payload = state.gather;
  }
  return m;
}

std::size_t payload_reals(const Message& message) {
  return std::visit(
      [&](const auto& mem) -> std::size_t {
        using T = std::decay_t<decltype(mem)>;
        if constexpr (std::is_same_v<T, NoMemory>) {
          return static_cast<std::size_t>(message.x.size());
        } else if constexpr (std::is_same_v<T, IntervalMemory>) {
          return static_cast<std::size_t>(mem.lo.size() + mem.hi.size());
        } else if constexpr (std::is_same_v<T, ExtremeMemory>) {
          std::size_t total = 0;
          for (const auto& p : mem.lo) total += static_cast<std::size_t>(p.size());
          for (const auto& p : mem.hi) total += static_cast<std::size_t>(p.size());
          return total;
        } else {
          std::size_t total = 0;
          for (const auto& p : mem.points) total += static_cast<std::size_t>(p.size());
          return total;
        }
      },
      message.payload);
}

AgentState amortize(const AlgorithmKind& kind, const AgentState& state,
                    const std::vector<Message>& received, std::uint64_t round, std::size_t n,
                    const AlgorithmOptions& options) {
  if (received.empty()) throw ProtocolError("amortize: no messages (the self-loop is missing)");
  if (round < 1) throw std::invalid_argument("amortize: rounds start at 1");
  const Eigen::Index d = state.x.size();
  const std::size_t period = kind.period_for(n);

  // Messages in sender order so that tie-breaking is reproducible.
  std::vector<const Message*> msgs;
  for (const auto& m : received) msgs.push_back(&m);
  std::stable_sort(msgs.begin(), msgs.end(),
                   [](const Message* a, const Message* b) { return a->sender < b->sender; });

  AgentState next = state;
  next.round_in_macro = (state.round_in_macro + 1) % period;
  const bool averaging_round = round % period == 0;

  switch (kind.tag) {
    case AlgorithmTag::EqualNeighbor: {
      if (period != 1) throw std::invalid_argument("equal-neighbor cannot be amortized");
      std::vector<Point> xs;
      for (const auto* m : msgs) {
        if (!std::holds_alternative<NoMemory>(m->payload) || m->x.size() != d)
          protocol_error(*m, "expected a bare position of dimension " + std::to_string(d));
        xs.push_back(m->x);
      }
      next.x = equal_neighbor_update(xs);
      next.gather = NoMemory{};
      return next;
    }
    case AlgorithmTag::MidPoint1D:
    case AlgorithmTag::ComponentMidPoint: {
      IntervalMemory merged;
      for (const auto* m : msgs) {
        const auto* mem = std::get_if<IntervalMemory>(&m->payload);
        if (mem == nullptr || mem->lo.size() != d || mem->hi.size() != d)
          protocol_error(*m, "expected an interval of dimension " + std::to_string(d));
        if (merged.lo.size() == 0) {
          merged = *mem;
        } else {
          merged.lo = merged.lo.cwiseMin(mem->lo);
          merged.hi = merged.hi.cwiseMax(mem->hi);
        }
      }
      if (averaging_round) {
        next.x = (merged.lo + merged.hi) / 2.0;
        next.gather = reset_memory(kind.tag, next.x);
      } else {
        next.gather = std::move(merged);
      }
      return next;
    }
    case AlgorithmTag::ExtremePoint: {
      ExtremeMemory merged;
      std::vector<const ExtremeMemory*> mems;
      for (const auto* m : msgs) {
        const auto* mem = std::get_if<ExtremeMemory>(&m->payload);
        if (mem == nullptr || mem->lo.size() != static_cast<std::size_t>(d) ||
            mem->hi.size() != static_cast<std::size_t>(d))
          protocol_error(*m, "expected 2d extreme points");
        for (std::size_t i = 0; i < mem->lo.size(); ++i) {
          if (mem->lo[i].size() != d || mem->hi[i].size() != d)
            protocol_error(*m, "extreme point of wrong dimension");
        }
        mems.push_back(mem);
      }
      for (int i = 0; i < d; ++i) {
        std::vector<const Point*> lows;
        std::vector<const Point*> highs;
        for (const auto* mem : mems) {
          lows.push_back(&mem->lo[static_cast<std::size_t>(i)]);
          highs.push_back(&mem->hi[static_cast<std::size_t>(i)]);
        }
        const std::uint64_t salt = round * 1000003ULL + state.id;
        const auto lo = select_extreme(lows, i, [](double a, double b) { return a < b; }, options, salt);
        const auto hi = select_extreme(highs, i, [](double a, double b) { return a > b; }, options,
                                       salt ^ 0x5A5A5A5AULL);
        merged.lo.push_back(*lows[lo]);
        merged.hi.push_back(*highs[hi]);
      }
      if (averaging_round) {
        next.x = extreme_average(merged);
        next.gather = reset_memory(kind.tag, next.x);
      } else {
        next.gather = std::move(merged);
      }
      return next;
    }
    case AlgorithmTag::Centroid: {
      std::vector<Point> pts;
      for (const auto* m : msgs) {
        const auto* mem = std::get_if<PointSetMemory>(&m->payload);
        if (mem == nullptr || mem->points.empty()) protocol_error(*m, "expected a nonempty point set");
        for (const auto& p : mem->points) {
          if (p.size() != d) protocol_error(*m, "point of wrong dimension");
          pts.push_back(p);
        }
      }
      std::sort(pts.begin(), pts.end(), lex_less);
      pts.erase(std::unique(pts.begin(), pts.end(),
                            [](const Point& a, const Point& b) { return a == b; }),
                pts.end());
      if (averaging_round) {
        next.x = centroid_update(pts);
        next.gather = reset_memory(kind.tag, next.x);
      } else {
        if (options.frame_reduction && pts.size() > 1) {
          const auto frame = convex_hull<double>(pts).vertices;
          pts.clear();
          for (Eigen::Index j = 0; j < frame.cols(); ++j) pts.emplace_back(frame.col(j));
        }
        next.gather = PointSetMemory{std::move(pts)};
      }
      return next;
    }
  }
  return next;
}

}  // namespace consensus
