// One PASS/FAIL line per acceptance criterion. Every comparison is exact.

#include "csmw/export.hpp"
#include "csmw/hierarchy.hpp"
#include "csmw/reachability.hpp"
#include "csmw/synthesis.hpp"
#include "csmw_cli/cli.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

using namespace csmw;
using csmw_test::load_model;
using csmw_test::slurp;

namespace {

// Collects failed expectations of one criterion.
struct Check {
    std::vector<std::string> failures;

    void expect(bool ok, const std::string& what) {
        if (!ok)
            failures.push_back(what);
    }
};

CsmSystem csm_of(const SystemModel& authored, RemedyMode remedy = RemedyMode::None) {
    CsmSystem sys = translate(flatten(synthesize(authored).model).model);
    return remedy == RemedyMode::RedundantAck ? apply_remedy(sys) : sys;
}

std::string transition_text(const DiagramTransition& t) {
    std::string out = t.source + "->" + t.target + " on " + t.trigger;
    for (const Symbol& e : t.emits)
        out += " emit " + e;
    return out;
}

std::set<std::string> sources_of(const ModuleDiagram& m, const Symbol& trigger) {
    std::set<std::string> out;
    for (const DiagramTransition& t : m.transitions)
        if (t.trigger == trigger)
            out.insert(t.source);
    return out;
}

std::set<std::string> targets_of(const ModuleDiagram& m, const Symbol& trigger) {
    std::set<std::string> out;
    for (const DiagramTransition& t : m.transitions)
        if (t.trigger == trigger)
            out.insert(t.target);
    return out;
}

std::optional<std::size_t> edge_between(const CsmSystem& sys, const ReachabilityGraph& g, const std::string& from,
                                        const std::string& to, const SymbolSet& env) {
    for (const ReachEdge& e : g.edges)
        if (format_joint(sys, g.nodes[e.from]) == from && format_joint(sys, g.nodes[e.to]) == to)
            for (EnvMask m : e.env_inputs)
                if (env_symbols(sys, m) == env)
                    return e.from;
    return std::nullopt;
}

void criterion1(Check& c) {
    const SynthesisResult r = synthesize(load_model("fig2.csmdl"));
    c.expect(to_json(r.report) == slurp(csmw_test::golden_path("fig2.synth.json")), "report differs from golden");
    std::vector<std::string> emitted, added;
    for (const EmissionChange& e : r.report.emitted)
        emitted.push_back(e.module + ":" + std::to_string(e.transition_index) + ":" + e.signal);
    for (const AddedTransition& a : r.report.added)
        added.push_back(a.module + ":" + transition_text(a.transition));
    c.expect(emitted == std::vector<std::string>{"L:0:s34", "L:1:s43"}, "emissions");
    c.expect(added == std::vector<std::string>{"R:3->4 on s34", "R:4->3 on s43"}, "added transitions");
    c.expect(r.report.signals.size() == 2, "signal count");
    for (const DiagramTransition& t : r.model.find_module("R")->transitions)
        c.expect(t.emits.empty(), "R emits " + transition_text(t));
    const ModuleDiagram& l = *r.model.find_module("L");
    c.expect(l.transitions.size() == 2 && transition_text(l.transitions[0]) == "1->2 on z12 emit s34" &&
                 transition_text(l.transitions[1]) == "2->1 on z21 emit s43",
             "L transitions");
}

void criterion2(Check& c) {
    const SystemModel before = load_model("fig3.csmdl");
    const SynthesisResult r = synthesize(before);
    c.expect(to_json(r.report) == slurp(csmw_test::golden_path("fig3.synth.json")), "report differs from golden");
    std::vector<std::string> signals;
    for (const SynthesizedSignal& s : r.report.signals)
        signals.push_back(s.name);
    c.expect(std::set<std::string>(signals.begin(), signals.end()) == std::set<std::string>{"s34", "s43", "s21"},
             "signal set");
    std::vector<std::string> emitted, added;
    for (const EmissionChange& e : r.report.emitted)
        emitted.push_back(e.module + ":" + transition_text(e.transition));
    for (const AddedTransition& a : r.report.added)
        added.push_back(a.module + ":" + transition_text(a.transition));
    c.expect(emitted == std::vector<std::string>{"L:1->2 on z12 emit s34", "L:2->1 on z21 emit s43",
                                                 "R:4->3 on z43 emit s21"},
             "emissions");
    c.expect(added == std::vector<std::string>{"L:2->1 on s21", "R:3->4 on s34", "R:4->3 on s43"}, "added transitions");
    // Nothing else changes: authored transitions keep their place and fields.
    for (const ModuleDiagram& m : before.modules) {
        const ModuleDiagram& after = *r.model.find_module(m.name);
        c.expect(after.states == m.states && after.initial == m.initial, "states of " + m.name);
        for (std::size_t i = 0; i < m.transitions.size(); ++i) {
            DiagramTransition stripped = after.transitions[i];
            stripped.emits.resize(m.transitions[i].emits.size());
            c.expect(stripped == m.transitions[i], "authored transition " + transition_text(m.transitions[i]));
        }
    }
}

void criterion3(Check& c) {
    const CsmSystem sys = csm_of(load_model("fig3.csmdl"));
    const ReachabilityGraph g = build_reachability(sys);
    c.expect(g.deadlocks.size() == 1, "deadlock count " + std::to_string(g.deadlocks.size()));
    if (g.deadlocks.size() != 1)
        return;
    const JointState& d = g.nodes[g.deadlocks[0]];
    const CsmState& l = sys.machines[0].states[d.states[0]];
    const CsmState& r = sys.machines[1].states[d.states[1]];
    c.expect(l.kind == CsmStateKind::SenderWait && l.messages == std::vector<Symbol>{"s43"}, "L component " + l.name);
    c.expect(r.kind == CsmStateKind::SenderWait && r.messages == std::vector<Symbol>{"s21"}, "R component " + r.name);

    const Trace t = shortest_trace(sys, g, g.deadlocks[0]);
    c.expect(!t.steps.empty() && format_joint(sys, t.steps.back().from) == "(2,4)" &&
                 t.steps.back().env == SymbolSet{"z21", "z43"},
             "shortest trace does not end with {z21,z43} from (2,4)");

    const std::string dead = format_joint(sys, d);
    c.expect(edge_between(sys, g, "(2,4)", "(2,4a)", {"z43"}).has_value(), "no z43 edge (2,4)->(2,4a)");
    c.expect(edge_between(sys, g, "(2,4a)", dead, {"z21"}).has_value(), "no z21 edge (2,4a)->" + dead);
}

void criterion4(Check& c) {
    const CsmSystem plain = csm_of(load_model("fig3.csmdl"));
    const CsmSystem fixed = apply_remedy(plain);
    std::vector<std::string> changed;
    for (std::size_t m = 0; m < plain.machines.size(); ++m)
        for (std::size_t s = 0; s < plain.machines[m].states.size(); ++s)
            if (plain.machines[m].states[s].outputs != fixed.machines[m].states[s].outputs) {
                const CsmState& st = fixed.machines[m].states[s];
                changed.push_back(plain.machines[m].name + "." + st.name + ":" + std::string(to_string(st.kind)) + ":" +
                                  st.base_source);
            }
    c.expect(changed == std::vector<std::string>{"L.2a:sender-wait:2", "R.4a:sender-wait:4"},
             "changed states: " + std::to_string(changed.size()));
    const ReachabilityGraph g = build_reachability(fixed);
    c.expect(find_deadlocks(fixed, g).empty(), "deadlocks remain");
}

void criterion5(Check& c) {
    std::mt19937 rng(5);
    const std::vector<Symbol> pool{"a", "b", "c", "d", "e", "f"};
    std::size_t mismatches = 0;
    for (int i = 0; i < 10000; ++i) {
        const std::vector<Symbol> symbols(pool.begin(), pool.begin() + 1 + static_cast<long>(rng() % pool.size()));
        const csmw_test::Expr e = csmw_test::random_expr(rng, symbols, 4);
        const csmw_test::Expr other = csmw_test::random_expr(rng, symbols, 3);
        const Guard f = parse_guard(csmw_test::text(e));
        const Guard p = product(f, parse_guard(csmw_test::text(other)));
        const SymbolSet on = csmw_test::random_subset(rng, symbols);

        std::map<Symbol, bool> fixed;
        for (const Symbol& s : symbols)
            if (rng() % 2 == 0)
                fixed[s] = rng() % 2 == 0;
        SymbolSet forced = on;
        for (const auto& [s, v] : fixed) {
            if (v)
                forced.insert(s);
            else
                forced.erase(s);
        }
        const Guard rest = restrict(f, fixed);

        bool ok = evaluate(f, on) == csmw_test::eval(e, on);
        ok = ok && evaluate(p, on) == (csmw_test::eval(e, on) && csmw_test::eval(other, on));
        ok = ok && evaluate(rest, on) == csmw_test::eval(e, forced);
        for (const Symbol& s : symbols_of(rest))
            ok = ok && fixed.count(s) == 0;
        ok = ok && is_never(f) == !csmw_test::satisfiable(e, symbols);
        if (!ok)
            ++mismatches;
    }
    c.expect(mismatches == 0, std::to_string(mismatches) + " mismatches");
}

void criterion6(Check& c) {
    std::mt19937 rng(6);
    std::size_t mismatches = 0;
    for (int i = 0; i < 200; ++i) {
        const csmw_test::OracleSystem o = csmw_test::random_system(rng);
        const CsmSystem sys = csmw_test::to_csm(o);
        const csmw_test::OracleGraph expected = csmw_test::brute_force_reachability(o);
        const csmw_test::OracleGraph actual = csmw_test::from_library(sys, build_reachability(sys));
        if (actual.nodes != expected.nodes || actual.edges != expected.edges || actual.deadlocks != expected.deadlocks)
            ++mismatches;
    }
    c.expect(mismatches == 0, std::to_string(mismatches) + " mismatches");
}

void criterion7(Check& c) {
    const SystemModel flat = flatten(synthesize(load_model("fig4.csmdl")).model).model;
    const ModuleDiagram& r = *flat.find_module("R");
    c.expect(r.states == std::vector<std::string>{"3", "4_1", "4_2"}, "R states");
    c.expect(sources_of(r, "x43") == std::set<std::string>{"4_2"}, "x43 exits");
    c.expect(sources_of(r, "y43") == std::set<std::string>{"4_1", "4_2"}, "y43 exits");
    c.expect(sources_of(r, "s43") == std::set<std::string>{"4_2"}, "s43 exits");
    c.expect(targets_of(r, "s34") == std::set<std::string>{"4_1"}, "s34 entry");
    c.expect(sources_of(r, "s34") == std::set<std::string>{"3"}, "s34 source");
    c.expect(sources_of(r, "z43").empty(), "abstract z43 still present");
    c.expect(flat.refinements.empty() && flat.hierarchy.empty(), "hierarchy left over");
}

// design_process without refinement, event hierarchy and the outer
// START_DESIGN / END_DESIGN phases, renamed onto the fig3 vocabulary.
SystemModel design_skeleton() {
    SystemModel m = load_model("design_process.csmdl");
    m.refinements.clear();
    m.hierarchy = {};
    const std::map<std::string, std::string> rename{
        {"Manager", "L"}, {"Engine", "R"}, {"DECIDE", "1"}, {"ITERATE", "2"}, {"IDLE", "3"}, {"DO_LOOP", "4"},
        {"run", "z12"},   {"halt", "z21"}, {"err", "z43"},  {"si", "s43"},    {"d_r", "s21"}};
    auto ren = [&](std::string& s) {
        if (auto it = rename.find(s); it != rename.end())
            s = it->second;
    };
    const std::set<std::string> outer{"START_DESIGN", "END_DESIGN"};
    for (ModuleDiagram& mod : m.modules) {
        std::erase_if(mod.states, [&](const std::string& s) { return outer.count(s) != 0; });
        std::erase_if(mod.transitions, [&](const DiagramTransition& t) {
            return outer.count(t.source) != 0 || outer.count(t.target) != 0;
        });
        if (outer.count(mod.initial) != 0)
            mod.initial = "DECIDE";
        ren(mod.name);
        ren(mod.initial);
        for (std::string& s : mod.states)
            ren(s);
        for (DiagramTransition& t : mod.transitions) {
            ren(t.source);
            ren(t.target);
            ren(t.trigger);
            for (Symbol& e : t.emits)
                ren(e);
        }
    }
    for (EnforcementConstraint& k : m.constraints) {
        ren(k.from_module);
        ren(k.to_module);
        ren(k.from_state);
        ren(k.to_state);
    }
    return m;
}

// Node labels plus edges keyed by endpoint labels, env sets and the moved
// (machine, source, target, guard) tuples; transition indices are ignored.
using Shape = std::tuple<std::set<std::string>, std::set<std::string>, std::set<std::string>, std::size_t>;

Shape shape(const CsmSystem& sys, const ReachabilityGraph& g) {
    std::set<std::string> nodes, edges, deadlocks;
    for (const JointState& n : g.nodes)
        nodes.insert(format_joint(sys, n));
    for (const ReachEdge& e : g.edges) {
        std::string key = format_joint(sys, g.nodes[e.from]) + " -> " + format_joint(sys, g.nodes[e.to]) + " on";
        for (EnvMask m : e.env_inputs)
            key += " " + format_env(sys, m);
        for (std::size_t k = 0; k < e.moves.size(); ++k) {
            if (!e.moves[k])
                continue;
            const CsmMachine& mach = sys.machines[k];
            const CsmTransition& t = mach.transitions[*e.moves[k]];
            key += " | " + mach.name + ":" + mach.states[t.source].name + "->" + mach.states[t.target].name + "[" +
                   t.guard.str() + "]";
        }
        edges.insert(key);
    }
    for (std::size_t d : g.deadlocks)
        deadlocks.insert(format_joint(sys, g.nodes[d]));
    return {nodes, edges, deadlocks, g.livelocks.size()};
}

void criterion8(Check& c) {
    std::ostringstream out, err;
    const std::string path = csmw_test::model_path("design_process.csmdl");
    const char* argv[] = {"csmw", "check", path.c_str()};
    const int code = cli::run(3, argv, out, err);
    c.expect(code == cli::kClean || code == cli::kFindings, "check exit " + std::to_string(code) + ": " + err.str());

    const CsmSystem skeleton = csm_of(design_skeleton());
    const CsmSystem fig3 = csm_of(load_model("fig3.csmdl"));
    const ReachabilityGraph gs = build_reachability(skeleton);
    const ReachabilityGraph gf = build_reachability(fig3);
    c.expect(gs.nodes.size() == gf.nodes.size(),
             "node count " + std::to_string(gs.nodes.size()) + " vs " + std::to_string(gf.nodes.size()));
    c.expect(gs.edges.size() == gf.edges.size(),
             "edge count " + std::to_string(gs.edges.size()) + " vs " + std::to_string(gf.edges.size()));
    c.expect(shape(skeleton, gs) == shape(fig3, gf), "graphs differ after renaming");
}

// Every artifact criteria 1-8 produce, in a fixed order.
std::vector<std::string> artifacts() {
    std::vector<std::string> out;
    for (const char* name : {"fig2.csmdl", "fig3.csmdl", "fig4.csmdl", "design_process.csmdl"})
        out.push_back(to_json(synthesize(load_model(name)).report));
    auto graphs = [&](const CsmSystem& sys) {
        const ReachabilityGraph g = build_reachability(sys);
        out.push_back(graph_to_json(sys, g));
        out.push_back(graph_to_dot(sys, g));
    };
    for (const char* name : {"fig2.csmdl", "fig3.csmdl", "fig4.csmdl", "design_process.csmdl"}) {
        graphs(csm_of(load_model(name)));
        graphs(csm_of(load_model(name), RemedyMode::RedundantAck));
    }
    graphs(csm_of(design_skeleton()));
    out.push_back(render_model(flatten(synthesize(load_model("fig4.csmdl")).model).model));
    std::mt19937 rng(6);
    for (int i = 0; i < 20; ++i)
        graphs(csmw_test::to_csm(csmw_test::random_system(rng)));
    return out;
}

void criterion9(Check& c) {
    const std::vector<std::string> first = artifacts();
    const std::vector<std::string> second = artifacts();
    c.expect(first == second, "in-process artifacts differ between runs");

    // The same through the command line, written to files.
    const auto dir = std::filesystem::temp_directory_path() / "csmw_acceptance_determinism";
    std::filesystem::create_directories(dir);
    std::vector<std::string> runs[2];
    for (auto& run : runs) {
        for (const char* name : {"fig3.csmdl", "design_process.csmdl"}) {
            const std::string model = csmw_test::model_path(name);
            const std::string json = (dir / "g.json").string();
            const std::string dot = (dir / "g.dot").string();
            const char* argv[] = {"csmw", "check", model.c_str(), "--json", json.c_str(), "--dot", dot.c_str()};
            std::ostringstream out, err;
            cli::run(7, argv, out, err);
            run.push_back(out.str());
            run.push_back(slurp(json));
            run.push_back(slurp(dot));
        }
    }
    std::filesystem::remove_all(dir);
    c.expect(runs[0] == runs[1], "command line artifacts differ between runs");
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria{
        {"fig2 synthesis matches the golden report", criterion1},
        {"fig3 synthesis adds exactly s21 on top of fig2", criterion2},
        {"fig3 has exactly one mutual sender-wait deadlock", criterion3},
        {"redundant acknowledgements remove the deadlock", criterion4},
        {"guard algebra agrees with truth tables on 10000 formulas", criterion5},
        {"reachability agrees with brute force on 200 systems", criterion6},
        {"fig4 flattening structure", criterion7},
        {"design_process skeleton reproduces the fig3 graph", criterion8},
        {"artifacts are byte-identical across runs", criterion9},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Check c;
        try {
            criteria[i].second(c);
        } catch (const std::exception& e) {
            c.failures.push_back(std::string("exception: ") + e.what());
        }
        std::cout << "criterion " << i + 1 << ": " << (c.failures.empty() ? "PASS" : "FAIL") << "  "
                  << criteria[i].first;
        for (const std::string& f : c.failures)
            std::cout << "\n    " << f;
        std::cout << std::endl;
        failed += c.failures.empty() ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
