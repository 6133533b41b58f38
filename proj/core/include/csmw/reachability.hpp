#pragma once

#include "csmw/csm.hpp"
#include "csmw/error.hpp"

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace csmw {

/// One state index per machine, in system machine order.
struct JointState {
    std::vector<std::size_t> states;

    auto operator<=>(const JointState&) const = default;
    bool operator==(const JointState&) const = default;
};

/// Subset of the system's env alphabet; bit i stands for env_alphabet[i].
using EnvMask = std::uint32_t;

inline constexpr std::size_t kMaxEnvSymbols = 20;
inline constexpr std::size_t kDefaultMaxStates = 1'000'000;

/// Per machine, the index of the transition taken, or nullopt for "stay".
using Moves = std::vector<std::optional<std::size_t>>;

/// A successor of a joint state together with every env subset (restricted
/// to symbols the current guards mention) under which it is taken.
struct JointMove {
    JointState target;
    std::vector<EnvMask> env_inputs; // ascending, unique
    Moves moves;
};

struct ReachEdge {
    std::size_t from = 0;
    std::size_t to = 0;
    std::vector<EnvMask> env_inputs; // ascending, unique
    Moves moves;
};

struct ReachabilityGraph {
    std::vector<JointState> nodes; // BFS discovery order
    std::vector<ReachEdge> edges;
    std::vector<std::vector<std::size_t>> out_edges; // edge indices per node, in edge order
    std::size_t initial = 0;
    std::vector<std::size_t> deadlocks;
    std::vector<std::vector<std::size_t>> livelocks;

    std::map<JointState, std::size_t> node_index;

    std::optional<std::size_t> find(const JointState& state) const;
};

/// Raised when exploration exceeds the node cap; carries what was explored.
class StateLimitExceeded : public Error {
public:
    StateLimitExceeded(std::size_t limit, std::size_t nodes, std::size_t edges, std::size_t frontier);

    std::size_t nodes() const noexcept { return nodes_; }
    std::size_t edges() const noexcept { return edges_; }
    std::size_t frontier() const noexcept { return frontier_; }

private:
    std::size_t nodes_;
    std::size_t edges_;
    std::size_t frontier_;
};

/// Union of the outputs of the joint state's components.
SymbolSet joint_output(const CsmSystem& system, const JointState& joint);

/// joint_output(joint) ∪ env.
SymbolSet audible(const CsmSystem& system, const JointState& joint, const SymbolSet& env);

SymbolSet env_symbols(const CsmSystem& system, EnvMask mask);
EnvMask env_mask(const CsmSystem& system, const SymbolSet& env);

/// Lock-step successors. Every machine observes the same audible set; a
/// machine with no enabled transition stays, one with several enabled
/// transitions branches. Only env symbols occurring in the current guards
/// are enumerated. The all-stay combination is not a successor. Ordered by
/// moves (machine order, stay before transition 0, then transition order).
std::vector<JointMove> joint_successors(const CsmSystem& system, const JointState& joint);

/// True iff no env input can enable any machine at `joint`: the
/// disjunction of all outgoing guards, with internal symbols fixed by the
/// joint output, is unsatisfiable.
bool is_deadlock(const CsmSystem& system, const JointState& joint);

/// Breadth-first closure of joint_successors from the initial joint state,
/// with deadlocks and livelocks filled in. Throws
/// Error("env-alphabet-too-large") beyond kMaxEnvSymbols and
/// StateLimitExceeded beyond `max_states` nodes.
ReachabilityGraph build_reachability(const CsmSystem& system, std::size_t max_states = kDefaultMaxStates);

std::vector<std::size_t> find_deadlocks(const CsmSystem& system, const ReachabilityGraph& graph);

/// Terminal strongly connected components (no edge leaves them) that
/// contain a cycle of edges firable with an empty env input. These are the
/// places where the system can keep moving forever without any
/// environment input and can never get out. Members ascending; components
/// ordered by their smallest member.
std::vector<std::vector<std::size_t>> find_livelocks(const ReachabilityGraph& graph);

struct TraceStep {
    SymbolSet env;
    JointState from;
    JointState to;
    Moves moves;
};

struct Trace {
    JointState start;
    std::vector<TraceStep> steps;
};

/// Minimum-step path from the initial node; each step uses the smallest env
/// mask of its edge. Throws Error("unreachable") for foreign targets.
Trace shortest_trace(const CsmSystem& system, const ReachabilityGraph& graph, std::size_t target);

/// "(s1,s2,...)"
std::string format_joint(const CsmSystem& system, const JointState& joint);

/// Looks a joint state up by state names, e.g. {"2a", "4a"}.
std::optional<JointState> joint_from_names(const CsmSystem& system, const std::vector<std::string>& names);

} // namespace csmw
