#include "csmw/export.hpp"
#include "csmw/hierarchy.hpp"
#include "csmw/reachability.hpp"
#include "csmw/synthesis.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

using namespace csmw;

namespace {

CsmSystem pipeline(const std::string& name) {
    return translate(flatten(synthesize(csmw_test::load_model(name)).model).model);
}

JointState joint(const CsmSystem& sys, std::vector<std::string> names) {
    auto j = joint_from_names(sys, names);
    if (!j)
        throw std::runtime_error("no such joint state");
    return *j;
}

std::string label(const CsmSystem& sys, const ReachabilityGraph& g, std::size_t n) {
    return format_joint(sys, g.nodes[n]);
}

CsmMachine machine(std::string name, std::vector<std::pair<std::string, SymbolSet>> states,
                   std::vector<std::tuple<std::size_t, std::size_t, std::string>> transitions) {
    CsmMachine m;
    m.name = std::move(name);
    for (auto& [s, out] : states)
        m.states.push_back({s, out, CsmStateKind::Base, {}, {}});
    for (auto& [from, to, guard] : transitions)
        m.transitions.push_back({from, to, parse_guard(guard)});
    return m;
}

// Two machines handing tokens back and forth with no environment at all.
CsmSystem ping_pong() {
    CsmSystem sys;
    sys.name = "pingpong";
    sys.machines.push_back(machine("A", {{"a0", {"p"}}, {"a1", {}}}, {{0, 1, "q"}, {1, 0, "~q"}}));
    sys.machines.push_back(machine("B", {{"b0", {}}, {"b1", {"q"}}}, {{0, 1, "p"}, {1, 0, "~p"}}));
    sys.internal_alphabet = {"p", "q"};
    return sys;
}

} // namespace

TEST(Audible, Examples) {
    const CsmSystem sys = pipeline("fig3.csmdl");
    EXPECT_TRUE(audible(sys, joint(sys, {"1", "3"}), {}).empty());
    EXPECT_EQ(audible(sys, joint(sys, {"2a", "4a"}), {}), (SymbolSet{"s43", "s21"}));
    EXPECT_EQ(audible(sys, joint(sys, {"1", "3"}), {"z12"}), (SymbolSet{"z12"}));
}

TEST(JointSuccessors, Fig3Initial) {
    const CsmSystem sys = pipeline("fig3.csmdl");
    const auto moves = joint_successors(sys, joint(sys, {"1", "3"}));
    ASSERT_EQ(moves.size(), 1u);
    EXPECT_EQ(format_joint(sys, moves[0].target), "(1a,3)");
    EXPECT_EQ(moves[0].env_inputs, (std::vector<EnvMask>{env_mask(sys, {"z12"})}));
}

TEST(JointSuccessors, Fig3CoincidenceEntersMutualWait) {
    const CsmSystem sys = pipeline("fig3.csmdl");
    const auto moves = joint_successors(sys, joint(sys, {"2", "4"}));
    std::map<std::string, std::vector<EnvMask>> by_target;
    for (const auto& m : moves)
        by_target[format_joint(sys, m.target)] = m.env_inputs;
    EXPECT_EQ(by_target.size(), 3u);
    EXPECT_EQ(by_target["(2a,4a)"], (std::vector<EnvMask>{env_mask(sys, {"z21", "z43"})}));
    EXPECT_EQ(by_target["(2a,4)"], (std::vector<EnvMask>{env_mask(sys, {"z21"})}));
    EXPECT_EQ(by_target["(2,4a)"], (std::vector<EnvMask>{env_mask(sys, {"z43"})}));
}

TEST(JointSuccessors, NothingEnabledMeansNoEdges) {
    CsmSystem quiet;
    quiet.machines.push_back(machine("A", {{"x", {}}, {"y", {}}}, {{0, 1, "z"}}));
    quiet.env_alphabet = {"z"};
    EXPECT_TRUE(joint_successors(quiet, JointState{{1}}).empty());
    EXPECT_EQ(joint_successors(quiet, JointState{{0}}).size(), 1u);
}

TEST(Reachability, TwoStateToggle) {
    CsmSystem sys;
    sys.name = "toggle";
    sys.machines.push_back(machine("A", {{"x", {}}, {"y", {}}}, {{0, 1, "z"}, {1, 0, "z"}}));
    sys.env_alphabet = {"z"};
    const ReachabilityGraph g = build_reachability(sys);
    EXPECT_EQ(g.nodes.size(), 2u);
    EXPECT_EQ(g.edges.size(), 2u);
    EXPECT_TRUE(g.deadlocks.empty());
    EXPECT_TRUE(g.livelocks.empty());
}

TEST(Reachability, Fig3SingleDeadlock) {
    const CsmSystem sys = pipeline("fig3.csmdl");
    const ReachabilityGraph g = build_reachability(sys);
    ASSERT_EQ(g.deadlocks.size(), 1u);
    const JointState& dead = g.nodes[g.deadlocks[0]];
    EXPECT_EQ(sys.machines[0].states[dead.states[0]].kind, CsmStateKind::SenderWait);
    EXPECT_EQ(sys.machines[0].states[dead.states[0]].messages, (std::vector<Symbol>{"s43"}));
    EXPECT_EQ(sys.machines[1].states[dead.states[1]].kind, CsmStateKind::SenderWait);
    EXPECT_EQ(sys.machines[1].states[dead.states[1]].messages, (std::vector<Symbol>{"s21"}));
    EXPECT_TRUE(g.livelocks.empty());
    EXPECT_TRUE(is_deadlock(sys, dead));
}

TEST(Reachability, RemedyRemovesDeadlockButKeepsNode) {
    const CsmSystem sys = apply_remedy(pipeline("fig3.csmdl"));
    const ReachabilityGraph g = build_reachability(sys);
    EXPECT_TRUE(g.deadlocks.empty());
    EXPECT_TRUE(g.find(joint(sys, {"2a", "4a"})).has_value());
    EXPECT_TRUE(g.livelocks.empty());
}

TEST(Reachability, Fig2IsClean) {
    const CsmSystem sys = pipeline("fig2.csmdl");
    const ReachabilityGraph g = build_reachability(sys);
    EXPECT_TRUE(g.deadlocks.empty());
    EXPECT_TRUE(g.livelocks.empty());
    // full joint space check: nothing reachable is dead
    for (const auto& n : g.nodes)
        EXPECT_FALSE(is_deadlock(sys, n));
}

TEST(Reachability, StateCap) {
    const CsmSystem sys = pipeline("fig3.csmdl");
    try {
        build_reachability(sys, 3);
        FAIL();
    } catch (const StateLimitExceeded& e) {
        EXPECT_EQ(e.code(), "state-limit");
        EXPECT_GT(e.nodes(), 3u);
    }
    EXPECT_NO_THROW(build_reachability(sys, 9));
}

TEST(Reachability, EnvAlphabetBound) {
    CsmSystem sys;
    sys.machines.push_back(machine("A", {{"x", {}}}, {}));
    for (int i = 0; i < 21; ++i)
        sys.env_alphabet.push_back("e" + std::to_string(i));
    try {
        build_reachability(sys);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "env-alphabet-too-large");
    }
}

TEST(Livelock, PingPongIsReported) {
    const CsmSystem sys = ping_pong();
    const ReachabilityGraph g = build_reachability(sys);
    EXPECT_EQ(g.nodes.size(), 4u);
    ASSERT_EQ(g.livelocks.size(), 1u);
    EXPECT_EQ(g.livelocks[0], (std::vector<std::size_t>{0, 1, 2, 3}));
    EXPECT_EQ(g.livelocks, csmw_test::closure_livelocks(g));
    EXPECT_TRUE(g.deadlocks.empty());
}

TEST(Livelock, SinglePathHasNone) {
    CsmSystem sys;
    sys.machines.push_back(machine("A", {{"x", {}}, {"y", {}}, {"w", {}}}, {{0, 1, "z"}, {1, 2, "1"}}));
    sys.env_alphabet = {"z"};
    const ReachabilityGraph g = build_reachability(sys);
    EXPECT_TRUE(g.livelocks.empty());
    EXPECT_EQ(g.deadlocks, (std::vector<std::size_t>{2}));
}

TEST(Livelock, EnvDrivenCycleIsNotALivelock) {
    CsmSystem sys;
    sys.machines.push_back(machine("A", {{"x", {}}, {"y", {}}}, {{0, 1, "z"}, {1, 0, "1"}}));
    sys.env_alphabet = {"z"};
    EXPECT_TRUE(build_reachability(sys).livelocks.empty());
}

TEST(Trace, Fig3DeadlockByCoincidence) {
    const CsmSystem sys = pipeline("fig3.csmdl");
    const ReachabilityGraph g = build_reachability(sys);
    const Trace t = shortest_trace(sys, g, g.deadlocks.at(0));
    EXPECT_EQ(format_joint(sys, t.start), "(1,3)");
    ASSERT_EQ(t.steps.size(), 4u);
    EXPECT_EQ(t.steps[0].env, (SymbolSet{"z12"}));
    EXPECT_TRUE(t.steps[1].env.empty());
    EXPECT_TRUE(t.steps[2].env.empty());
    EXPECT_EQ(format_joint(sys, t.steps[3].from), "(2,4)");
    EXPECT_EQ(t.steps[3].env, (SymbolSet{"z21", "z43"}));
    for (std::size_t i = 1; i < t.steps.size(); ++i)
        EXPECT_EQ(t.steps[i].from, t.steps[i - 1].to);
}

TEST(Trace, InitialNodeNeedsNoSteps) {
    const CsmSystem sys = pipeline("fig3.csmdl");
    const ReachabilityGraph g = build_reachability(sys);
    EXPECT_TRUE(shortest_trace(sys, g, g.initial).steps.empty());
    EXPECT_THROW(shortest_trace(sys, g, g.nodes.size()), Error);
}

TEST(Trace, LateSecondSignalAlsoDeadlocks) {
    const CsmSystem sys = pipeline("fig3.csmdl");
    const ReachabilityGraph g = build_reachability(sys);
    const std::size_t both = *g.find(joint(sys, {"2", "4"}));
    const std::size_t after_z43 = *g.find(joint(sys, {"2", "4a"}));
    const std::size_t dead = g.deadlocks.at(0);
    auto edge = [&](std::size_t from, std::size_t to) -> const ReachEdge* {
        for (std::size_t e : g.out_edges[from])
            if (g.edges[e].to == to)
                return &g.edges[e];
        return nullptr;
    };
    const ReachEdge* first = edge(both, after_z43);
    const ReachEdge* second = edge(after_z43, dead);
    ASSERT_NE(first, nullptr);
    ASSERT_NE(second, nullptr);
    EXPECT_EQ(env_symbols(sys, first->env_inputs.front()), (SymbolSet{"z43"}));
    EXPECT_EQ(env_symbols(sys, second->env_inputs.front()), (SymbolSet{"z21"}));
}

TEST(ReachabilityProperty, MatchesBruteForce) {
    std::mt19937 rng(1234);
    for (int i = 0; i < 300; ++i) {
        const csmw_test::OracleSystem o = csmw_test::random_system(rng);
        const CsmSystem sys = csmw_test::to_csm(o);
        const ReachabilityGraph g = build_reachability(sys);
        const csmw_test::OracleGraph expected = csmw_test::brute_force_reachability(o);
        const csmw_test::OracleGraph actual = csmw_test::from_library(sys, g);
        ASSERT_EQ(actual.nodes, expected.nodes) << i;
        ASSERT_EQ(actual.edges, expected.edges) << i;
        ASSERT_EQ(actual.deadlocks, expected.deadlocks) << i;
        ASSERT_EQ(g.livelocks, csmw_test::closure_livelocks(g)) << i;

        // BFS numbering and edge well-formedness
        EXPECT_EQ(g.nodes[g.initial].states, sys.initial_state());
        for (std::size_t e = 1; e < g.edges.size(); ++e)
            EXPECT_LE(g.edges[e - 1].from, g.edges[e].from);
        for (const ReachEdge& e : g.edges) {
            bool moved = false;
            Guard all = Guard::always();
            for (std::size_t k = 0; k < e.moves.size(); ++k)
                if (e.moves[k]) {
                    moved = true;
                    all = product(all, sys.machines[k].transitions[*e.moves[k]].guard);
                }
            EXPECT_TRUE(moved);
            const SymbolSet out = joint_output(sys, g.nodes[e.from]);
            std::map<Symbol, bool> fixed;
            for (const Symbol& s : sys.internal_alphabet)
                fixed[s] = out.count(s) != 0;
            EXPECT_FALSE(is_never(restrict(all, fixed)));
        }
    }
}

TEST(ReachabilityProperty, Deterministic) {
    for (const char* name : {"fig1.csmdl", "fig3.csmdl", "fig4.csmdl", "design_process.csmdl"}) {
        const CsmSystem sys = pipeline(name);
        EXPECT_EQ(graph_to_json(sys, build_reachability(sys)), graph_to_json(sys, build_reachability(sys)));
        EXPECT_EQ(graph_to_dot(sys, build_reachability(sys)), graph_to_dot(sys, build_reachability(sys)));
    }
}

TEST(Export, DotMarksDeadlocks) {
    const CsmSystem fig3 = pipeline("fig3.csmdl");
    const std::string dot3 = graph_to_dot(fig3, build_reachability(fig3));
    EXPECT_NE(dot3.find("[label=\"(2a,4a)\", peripheries=2]"), std::string::npos);
    std::size_t count = 0;
    for (std::size_t p = dot3.find("peripheries=2"); p != std::string::npos; p = dot3.find("peripheries=2", p + 1))
        ++count;
    EXPECT_EQ(count, 1u);

    const CsmSystem fig2 = pipeline("fig2.csmdl");
    EXPECT_EQ(graph_to_dot(fig2, build_reachability(fig2)).find("peripheries"), std::string::npos);
}

TEST(Export, JsonDocument) {
    const CsmSystem sys = pipeline("fig3.csmdl");
    const ReachabilityGraph g = build_reachability(sys);
    const auto doc = nlohmann::json::parse(graph_to_json(sys, g));
    EXPECT_EQ(doc["machines"], nlohmann::json::array({"L", "R"}));
    EXPECT_EQ(doc["nodes"].size(), g.nodes.size());
    EXPECT_EQ(doc["edges"].size(), g.edges.size());
    EXPECT_EQ(doc["nodes"][0]["label"], "(1,3)");
    EXPECT_EQ(doc["edges"][0]["env_inputs"], nlohmann::json::parse(R"([["z12"]])"));
    EXPECT_EQ(doc["edges"][0]["moves"][1]["stay"], true);
    EXPECT_EQ(doc["diagnostics"]["deadlocks"].size(), 1u);
    EXPECT_EQ(doc["diagnostics"]["livelock_definition"], kLivelockDefinition);
}
