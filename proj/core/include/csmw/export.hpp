#pragma once

#include "csmw/csm.hpp"
#include "csmw/reachability.hpp"

#include <string>

namespace csmw {

/// Label attached to livelock findings in every report.
inline constexpr const char* kLivelockDefinition =
    "terminal strongly connected component with a cycle that needs no environment input";

/// "{a,b}" or "{}" for a subset of the env alphabet.
std::string format_env(const CsmSystem& system, EnvMask mask);

/// Reachability graph as JSON: machines, alphabet, numbered nodes with
/// their joint outputs, edges with every env set and per-machine moves,
/// and the deadlock/livelock diagnostics. Pretty-printed, trailing newline.
std::string graph_to_json(const CsmSystem& system, const ReachabilityGraph& graph);

/// Graphviz rendering. Nodes are labelled "(s1,s2,...)", deadlocks get
/// `peripheries=2`, edges carry their smallest env set and the transitions
/// of the machines that move.
std::string graph_to_dot(const CsmSystem& system, const ReachabilityGraph& graph);

} // namespace csmw
