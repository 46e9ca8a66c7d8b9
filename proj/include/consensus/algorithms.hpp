#pragma once

// Consensus update rules as per-agent state machines.
//
// Every rule is written in its gathering form: an agent keeps a small memory
// (an interval, 2d extreme points, or a point set), merges the memories it
// receives each round and applies the averaging step every `period` rounds.
// The plain algorithms are the special case period == 1.

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "consensus/geometry.hpp"
#include "consensus/graph.hpp"

namespace consensus {

enum class AlgorithmTag { EqualNeighbor, MidPoint1D, ComponentMidPoint, ExtremePoint, Centroid };

struct AlgorithmKind {
  AlgorithmTag tag = AlgorithmTag::MidPoint1D;
  bool amortized = false;
  std::size_t amortization_period = 0;  // 0 means n - 1

  /// Rounds per averaging step for a system of n agents.
  std::size_t period_for(std::size_t n) const;

  bool operator==(const AlgorithmKind&) const = default;
};

/// "equal-neighbor", "midpoint", "component-midpoint", "extreme-point" or
/// "centroid", optionally followed by "+amortized" or "+amortized:<period>".
AlgorithmKind parse_algorithm(std::string_view text);
std::string to_string(const AlgorithmKind& kind);
std::string to_string(AlgorithmTag tag);

enum class TieBreak { LowestSender, SeededRandom };

struct AlgorithmOptions {
  TieBreak tie_break = TieBreak::LowestSender;
  std::uint64_t tie_seed = 0;
  bool frame_reduction = true;
  // Component-wise midpoint in d >= 3 can leave the hull of its inputs; it is
  // only constructible with this flag, for reproducing that failure.
  bool allow_unsafe_component_midpoint = false;
};

/// Rejects combinations that are not meaningful: MidPoint outside d = 1,
/// component-wise midpoint in d >= 3, amortized EqualNeighbor (its weights
/// count multiplicities, which the gathering phase cannot preserve).
void validate_algorithm(const AlgorithmKind& kind, int d, std::size_t n,
                        const AlgorithmOptions& options = {});

/// Safeness constant alpha guaranteed by the single-round rule.
double safeness_constant(AlgorithmTag tag, int d, std::size_t n);

// Single-round update rules over the positions received in one round.
Point equal_neighbor_update(const std::vector<Point>& received);
double midpoint_update_1d(double lo, double hi);
Point component_midpoint_update(const std::vector<Point>& received);
/// `received` is in sender order; a tie on a coordinate goes to the earliest
/// entry, i.e. the lowest sender index.
Point extreme_point_update(const std::vector<Point>& received, int d);
Point centroid_update(const std::vector<Point>& received);

struct NoMemory {
  bool operator==(const NoMemory&) const = default;
};

/// Per-component range [lo, hi]; MidPoint1D uses d = 1.
struct IntervalMemory {
  Point lo;
  Point hi;
};

/// lo[i] has minimal i-th coordinate, hi[i] maximal, among points seen.
struct ExtremeMemory {
  std::vector<Point> lo;
  std::vector<Point> hi;
};

struct PointSetMemory {
  std::vector<Point> points;
};

using GatherMemory = std::variant<NoMemory, IntervalMemory, ExtremeMemory, PointSetMemory>;

struct AgentState {
  AgentId id = 0;
  Point x;
  GatherMemory gather;
  std::size_t round_in_macro = 0;
};

struct Message {
  AgentId sender = 0;
  Point x;  // only meaningful for EqualNeighbor
  GatherMemory payload;
};

AgentState initial_state(const AlgorithmKind& kind, AgentId id, const Point& x);

Message make_message(const AlgorithmKind& kind, const AgentState& state);

/// Number of reals carried by a message.
std::size_t payload_reals(const Message& message);

/// One round for one agent: merge the received memories and, on rounds that
/// are multiples of the period, move and reset the memory to {x}. Rounds are
/// numbered from 1. Throws ProtocolError on payloads of the wrong shape.
AgentState amortize(const AlgorithmKind& kind, const AgentState& state,
                    const std::vector<Message>& received, std::uint64_t round, std::size_t n,
                    const AlgorithmOptions& options = {});

}  // namespace consensus
