#include "csmw/export.hpp"

#include <nlohmann/json.hpp>

#include <sstream>

namespace csmw {

std::string format_env(const CsmSystem& system, EnvMask mask) {
    std::string out = "{";
    bool first = true;
    for (const Symbol& s : env_symbols(system, mask)) {
        if (!first)
            out += ",";
        out += s;
        first = false;
    }
    return out + "}";
}

namespace {

using nlohmann::ordered_json;

ordered_json moves_json(const CsmSystem& system, const Moves& moves) {
    ordered_json out = ordered_json::array();
    for (std::size_t i = 0; i < moves.size(); ++i) {
        const CsmMachine& m = system.machines[i];
        if (!moves[i]) {
            out.push_back({{"machine", m.name}, {"stay", true}});
            continue;
        }
        const CsmTransition& t = m.transitions[*moves[i]];
        out.push_back({{"machine", m.name},
                       {"transition", *moves[i]},
                       {"source", m.states[t.source].name},
                       {"target", m.states[t.target].name},
                       {"guard", t.guard.str()}});
    }
    return out;
}

std::string quote(const std::string& text) {
    std::string out = "\"";
    for (char c : text) {
        if (c == '"')
            out += '\\';
        out += c;
    }
    return out + "\"";
}

} // namespace

std::string graph_to_json(const CsmSystem& system, const ReachabilityGraph& graph) {
    ordered_json doc;
    doc["system"] = system.name;
    ordered_json machines = ordered_json::array();
    for (const CsmMachine& m : system.machines)
        machines.push_back(m.name);
    doc["machines"] = machines;
    doc["env_alphabet"] = system.env_alphabet;
    doc["initial"] = graph.initial;

    doc["nodes"] = ordered_json::array();
    for (std::size_t n = 0; n < graph.nodes.size(); ++n) {
        ordered_json names = ordered_json::array();
        for (std::size_t i = 0; i < system.machines.size(); ++i)
            names.push_back(system.machines[i].states[graph.nodes[n].states[i]].name);
        doc["nodes"].push_back({{"id", n},
                                {"label", format_joint(system, graph.nodes[n])},
                                {"states", names},
                                {"outputs", joint_output(system, graph.nodes[n])}});
    }

    doc["edges"] = ordered_json::array();
    for (const ReachEdge& e : graph.edges) {
        ordered_json env = ordered_json::array();
        for (EnvMask mask : e.env_inputs)
            env.push_back(env_symbols(system, mask));
        doc["edges"].push_back({{"from", e.from}, {"to", e.to}, {"env_inputs", env}, {"moves", moves_json(system, e.moves)}});
    }

    doc["diagnostics"] = {{"deadlocks", graph.deadlocks},
                          {"livelocks", graph.livelocks},
                          {"livelock_definition", kLivelockDefinition}};
    return doc.dump(2) + "\n";
}

std::string graph_to_dot(const CsmSystem& system, const ReachabilityGraph& graph) {
    std::vector<bool> dead(graph.nodes.size(), false);
    for (std::size_t n : graph.deadlocks)
        dead[n] = true;

    std::ostringstream out;
    out << "digraph " << quote(system.name) << " {\n";
    out << "  rankdir=LR;\n";
    out << "  node [shape=box, style=rounded];\n";
    for (std::size_t n = 0; n < graph.nodes.size(); ++n) {
        out << "  n" << n << " [label=" << quote(format_joint(system, graph.nodes[n]));
        if (n == graph.initial)
            out << ", style=\"rounded,bold\"";
        if (dead[n])
            out << ", peripheries=2";
        out << "];\n";
    }
    for (const ReachEdge& e : graph.edges) {
        std::string label = format_env(system, e.env_inputs.front());
        for (std::size_t i = 0; i < e.moves.size(); ++i) {
            if (!e.moves[i])
                continue;
            const CsmMachine& m = system.machines[i];
            const CsmTransition& t = m.transitions[*e.moves[i]];
            label += "\\n" + m.name + ": " + m.states[t.source].name + "->" + m.states[t.target].name;
        }
        out << "  n" << e.from << " -> n" << e.to << " [label=" << quote(label) << "];\n";
    }
    out << "}\n";
    return out.str();
}

} // namespace csmw
