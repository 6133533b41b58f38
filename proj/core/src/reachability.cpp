#include "csmw/reachability.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>
#include <unordered_map>

namespace csmw {

std::optional<std::size_t> ReachabilityGraph::find(const JointState& state) const {
    auto it = node_index.find(state);
    if (it == node_index.end())
        return std::nullopt;
    return it->second;
}

StateLimitExceeded::StateLimitExceeded(std::size_t limit, std::size_t nodes, std::size_t edges, std::size_t frontier)
    : Error("state-limit", "state-limit: exploration exceeded " + std::to_string(limit) + " joint states (explored " +
                               std::to_string(nodes) + " nodes, " + std::to_string(edges) + " edges, " +
                               std::to_string(frontier) + " still queued)"),
      nodes_(nodes), edges_(edges), frontier_(frontier) {}

SymbolSet joint_output(const CsmSystem& system, const JointState& joint) {
    SymbolSet out;
    for (std::size_t i = 0; i < system.machines.size(); ++i) {
        const SymbolSet& o = system.machines[i].states[joint.states[i]].outputs;
        out.insert(o.begin(), o.end());
    }
    return out;
}

SymbolSet audible(const CsmSystem& system, const JointState& joint, const SymbolSet& env) {
    SymbolSet out = joint_output(system, joint);
    out.insert(env.begin(), env.end());
    return out;
}

SymbolSet env_symbols(const CsmSystem& system, EnvMask mask) {
    SymbolSet out;
    for (std::size_t i = 0; i < system.env_alphabet.size(); ++i)
        if ((mask >> i) & 1U)
            out.insert(system.env_alphabet[i]);
    return out;
}

EnvMask env_mask(const CsmSystem& system, const SymbolSet& env) {
    EnvMask mask = 0;
    for (std::size_t i = 0; i < system.env_alphabet.size(); ++i)
        if (env.count(system.env_alphabet[i]) != 0)
            mask |= EnvMask{1} << i;
    return mask;
}

namespace {

std::vector<std::vector<std::size_t>> outgoing_by_state(const CsmMachine& m) {
    std::vector<std::vector<std::size_t>> out(m.states.size());
    for (std::size_t t = 0; t < m.transitions.size(); ++t)
        out[m.transitions[t].source].push_back(t);
    return out;
}

// Per-system lookup tables shared by every successor computation.
class Stepper {
public:
    explicit Stepper(const CsmSystem& system) : system_(system) {
        for (const CsmMachine& m : system.machines)
            outgoing_.push_back(outgoing_by_state(m));
        for (std::size_t i = 0; i < system.env_alphabet.size(); ++i)
            env_bit_.emplace(system.env_alphabet[i], i);
    }

    std::vector<JointMove> successors(const JointState& joint) const {
        const std::size_t n = system_.machines.size();
        const SymbolSet outputs = joint_output(system_, joint);

        // Env symbols the current guards can observe.
        std::vector<std::size_t> relevant;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t t : outgoing_[i][joint.states[i]])
                for (const Symbol& s : symbols_of(system_.machines[i].transitions[t].guard))
                    if (auto it = env_bit_.find(s); it != env_bit_.end())
                        relevant.push_back(it->second);
        std::sort(relevant.begin(), relevant.end());
        relevant.erase(std::unique(relevant.begin(), relevant.end()), relevant.end());

        std::map<Moves, std::vector<EnvMask>> merged;
        std::vector<std::vector<std::size_t>> enabled(n);
        const std::uint64_t subsets = std::uint64_t{1} << relevant.size();
        for (std::uint64_t k = 0; k < subsets; ++k) {
            EnvMask mask = 0;
            for (std::size_t b = 0; b < relevant.size(); ++b)
                if ((k >> b) & 1U)
                    mask |= EnvMask{1} << relevant[b];

            auto value_of = [&](const Symbol& s) {
                if (auto it = env_bit_.find(s); it != env_bit_.end())
                    return ((mask >> it->second) & 1U) != 0;
                return outputs.count(s) != 0;
            };
            bool any = false;
            for (std::size_t i = 0; i < n; ++i) {
                enabled[i].clear();
                for (std::size_t t : outgoing_[i][joint.states[i]])
                    if (evaluate_with(system_.machines[i].transitions[t].guard, value_of))
                        enabled[i].push_back(t);
                any = any || !enabled[i].empty();
            }
            if (!any)
                continue;

            Moves moves(n);
            std::function<void(std::size_t)> choose = [&](std::size_t i) {
                if (i == n) {
                    merged[moves].push_back(mask);
                    return;
                }
                if (enabled[i].empty()) {
                    moves[i] = std::nullopt;
                    choose(i + 1);
                    return;
                }
                for (std::size_t t : enabled[i]) {
                    moves[i] = t;
                    choose(i + 1);
                }
            };
            choose(0);
        }

        std::vector<JointMove> out;
        out.reserve(merged.size());
        for (auto& [moves, masks] : merged) {
            JointMove jm;
            jm.target = joint;
            for (std::size_t i = 0; i < n; ++i)
                if (moves[i])
                    jm.target.states[i] = system_.machines[i].transitions[*moves[i]].target;
            jm.env_inputs = std::move(masks); // generated in ascending order
            jm.moves = moves;
            out.push_back(std::move(jm));
        }
        return out;
    }

    bool dead(const JointState& joint) const {
        const SymbolSet outputs = joint_output(system_, joint);
        Guard any = Guard::never();
        for (std::size_t i = 0; i < system_.machines.size(); ++i)
            for (std::size_t t : outgoing_[i][joint.states[i]])
                any = sum(any, system_.machines[i].transitions[t].guard);
        std::map<Symbol, bool> fixed;
        for (const Symbol& s : symbols_of(any))
            if (env_bit_.count(s) == 0)
                fixed.emplace(s, outputs.count(s) != 0);
        return is_never(restrict(any, fixed));
    }

private:
    const CsmSystem& system_;
    std::vector<std::vector<std::vector<std::size_t>>> outgoing_;
    std::unordered_map<Symbol, std::size_t> env_bit_;
};

void check_env_bound(const CsmSystem& system) {
    if (system.env_alphabet.size() > kMaxEnvSymbols)
        throw Error("env-alphabet-too-large", "env-alphabet-too-large: " + std::to_string(system.env_alphabet.size()) +
                                                  " environment symbols exceed the enumeration bound of " +
                                                  std::to_string(kMaxEnvSymbols));
}

} // namespace

std::vector<JointMove> joint_successors(const CsmSystem& system, const JointState& joint) {
    check_env_bound(system);
    return Stepper(system).successors(joint);
}

bool is_deadlock(const CsmSystem& system, const JointState& joint) { return Stepper(system).dead(joint); }

ReachabilityGraph build_reachability(const CsmSystem& system, std::size_t max_states) {
    check_env_bound(system);
    const Stepper stepper(system);

    ReachabilityGraph g;
    auto intern = [&](const JointState& s) {
        auto [it, fresh] = g.node_index.emplace(s, g.nodes.size());
        if (fresh) {
            g.nodes.push_back(s);
            g.out_edges.emplace_back();
        }
        return it->second;
    };
    g.initial = intern(JointState{system.initial_state()});

    for (std::size_t current = 0; current < g.nodes.size(); ++current) {
        if (g.nodes.size() > max_states)
            throw StateLimitExceeded(max_states, g.nodes.size(), g.edges.size(), g.nodes.size() - current);
        for (JointMove& jm : stepper.successors(g.nodes[current])) {
            const std::size_t to = intern(jm.target);
            g.out_edges[current].push_back(g.edges.size());
            g.edges.push_back(ReachEdge{current, to, std::move(jm.env_inputs), std::move(jm.moves)});
        }
    }
    if (g.nodes.size() > max_states)
        throw StateLimitExceeded(max_states, g.nodes.size(), g.edges.size(), 0);

    g.deadlocks = find_deadlocks(system, g);
    g.livelocks = find_livelocks(g);
    return g;
}

std::vector<std::size_t> find_deadlocks(const CsmSystem& system, const ReachabilityGraph& graph) {
    const Stepper stepper(system);
    std::vector<std::size_t> out;
    for (std::size_t n = 0; n < graph.nodes.size(); ++n)
        if (stepper.dead(graph.nodes[n]))
            out.push_back(n);
    return out;
}

namespace {

// Iterative Tarjan over the nodes in `members` using only edges accepted by
// `use`. Returns component id per node (npos for non-members).
template <class EdgeFilter>
std::vector<std::size_t> strongly_connected(const ReachabilityGraph& g, const std::vector<bool>& members,
                                            EdgeFilter use, std::size_t& count) {
    constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
    const std::size_t n = g.nodes.size();
    std::vector<std::size_t> index(n, npos), low(n, 0), comp(n, npos);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::size_t next_index = 0;
    count = 0;

    struct Frame {
        std::size_t node;
        std::size_t edge_pos;
    };
    for (std::size_t root = 0; root < n; ++root) {
        if (!members[root] || index[root] != npos)
            continue;
        std::vector<Frame> call{{root, 0}};
        index[root] = low[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            Frame& f = call.back();
            const auto& out = g.out_edges[f.node];
            if (f.edge_pos < out.size()) {
                const ReachEdge& e = g.edges[out[f.edge_pos++]];
                if (!members[e.to] || !use(e))
                    continue;
                if (index[e.to] == npos) {
                    index[e.to] = low[e.to] = next_index++;
                    stack.push_back(e.to);
                    on_stack[e.to] = true;
                    call.push_back({e.to, 0});
                } else if (on_stack[e.to]) {
                    low[f.node] = std::min(low[f.node], index[e.to]);
                }
                continue;
            }
            const std::size_t v = f.node;
            call.pop_back();
            if (!call.empty())
                low[call.back().node] = std::min(low[call.back().node], low[v]);
            if (low[v] == index[v]) {
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = count;
                } while (w != v);
                ++count;
            }
        }
    }
    return comp;
}

} // namespace

std::vector<std::vector<std::size_t>> find_livelocks(const ReachabilityGraph& graph) {
    const std::size_t n = graph.nodes.size();
    std::size_t count = 0;
    const std::vector<bool> everyone(n, true);
    const auto comp = strongly_connected(graph, everyone, [](const ReachEdge&) { return true; }, count);

    std::vector<bool> terminal(count, true), has_inner_edge(count, false);
    for (const ReachEdge& e : graph.edges) {
        if (comp[e.from] != comp[e.to])
            terminal[comp[e.from]] = false;
        else
            has_inner_edge[comp[e.from]] = true;
    }

    auto autonomous = [](const ReachEdge& e) { return !e.env_inputs.empty() && e.env_inputs.front() == 0; };

    std::vector<std::vector<std::size_t>> out;
    for (std::size_t c = 0; c < count; ++c) {
        if (!terminal[c] || !has_inner_edge[c])
            continue;
        std::vector<bool> members(n, false);
        std::vector<std::size_t> nodes;
        for (std::size_t v = 0; v < n; ++v)
            if (comp[v] == c) {
                members[v] = true;
                nodes.push_back(v);
            }
        // Does the component contain a cycle made of autonomous edges?
        std::size_t inner_count = 0;
        const auto inner = strongly_connected(graph, members, autonomous, inner_count);
        std::vector<std::size_t> sizes(inner_count, 0);
        for (std::size_t v : nodes)
            ++sizes[inner[v]];
        bool cycle = std::any_of(sizes.begin(), sizes.end(), [](std::size_t s) { return s > 1; });
        for (const ReachEdge& e : graph.edges)
            cycle = cycle || (e.from == e.to && members[e.from] && autonomous(e));
        if (cycle)
            out.push_back(std::move(nodes));
    }
    std::sort(out.begin(), out.end());
    return out;
}

Trace shortest_trace(const CsmSystem& system, const ReachabilityGraph& graph, std::size_t target) {
    if (target >= graph.nodes.size())
        throw Error("unreachable", "unreachable: node " + std::to_string(target) + " is not in the graph");
    constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> parent_edge(graph.nodes.size(), none);
    std::vector<bool> seen(graph.nodes.size(), false);
    std::deque<std::size_t> queue{graph.initial};
    seen[graph.initial] = true;
    while (!queue.empty() && !seen[target]) {
        const std::size_t v = queue.front();
        queue.pop_front();
        for (std::size_t e : graph.out_edges[v]) {
            const std::size_t w = graph.edges[e].to;
            if (seen[w])
                continue;
            seen[w] = true;
            parent_edge[w] = e;
            queue.push_back(w);
        }
    }
    if (!seen[target])
        throw Error("unreachable", "unreachable: node " + std::to_string(target) + " cannot be reached");

    std::vector<std::size_t> path;
    for (std::size_t v = target; v != graph.initial; v = graph.edges[parent_edge[v]].from)
        path.push_back(parent_edge[v]);
    std::reverse(path.begin(), path.end());

    Trace trace;
    trace.start = graph.nodes[graph.initial];
    for (std::size_t e : path) {
        const ReachEdge& edge = graph.edges[e];
        trace.steps.push_back(
            TraceStep{env_symbols(system, edge.env_inputs.front()), graph.nodes[edge.from], graph.nodes[edge.to], edge.moves});
    }
    return trace;
}

std::string format_joint(const CsmSystem& system, const JointState& joint) {
    std::string out = "(";
    for (std::size_t i = 0; i < joint.states.size(); ++i) {
        if (i != 0)
            out += ",";
        out += system.machines[i].states[joint.states[i]].name;
    }
    return out + ")";
}

std::optional<JointState> joint_from_names(const CsmSystem& system, const std::vector<std::string>& names) {
    if (names.size() != system.machines.size())
        return std::nullopt;
    JointState joint;
    for (std::size_t i = 0; i < names.size(); ++i) {
        const int idx = system.machines[i].state_index(names[i]);
        if (idx < 0)
            return std::nullopt;
        joint.states.push_back(static_cast<std::size_t>(idx));
    }
    return joint;
}

} // namespace csmw
