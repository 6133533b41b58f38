#include "csmw_cli/cli.hpp"

#include "csmw/export.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace csmw::cli {

namespace {

using nlohmann::ordered_json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("unreadable", "cannot read '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << content) || !out.flush())
        throw Error("unwritable", "cannot write '" + path + "'");
}

std::string derived_path(const std::string& input, const std::string& suffix) {
    std::filesystem::path p(input);
    p.replace_extension();
    return p.string() + suffix;
}

std::string join(const SymbolSet& symbols, const char* separator = ",") {
    std::string out;
    for (const Symbol& s : symbols) {
        if (!out.empty())
            out += separator;
        out += s;
    }
    return out;
}

std::string braces(const SymbolSet& symbols) { return "{" + join(symbols) + "}"; }

std::string_view remedy_name(RemedyMode mode) { return mode == RemedyMode::None ? "none" : "redundant-ack"; }

// Reports any failure on `err` and maps it to an exit code.
template <class Fn>
int guarded(const RunConfig& config, std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const ModelError& e) {
        for (const Diagnostic& d : e.diagnostics())
            err << config.input << ": " << format_diagnostic(d) << "\n";
    } catch (const Error& e) {
        err << config.input << ": " << e.what() << "\n";
    } catch (const std::exception& e) {
        err << config.input << ": error: " << e.what() << "\n";
    }
    return kFailure;
}

void warn(const RunConfig& config, const std::vector<Diagnostic>& diagnostics, std::ostream& err) {
    for (const Diagnostic& d : diagnostics)
        err << config.input << ": warning: " << format_diagnostic(d) << "\n";
}

std::string format_trace(const CsmSystem& system, const Trace& trace) {
    std::string out = format_joint(system, trace.start);
    for (const TraceStep& step : trace.steps)
        out += " -" + braces(step.env) + "-> " + format_joint(system, step.to);
    return out;
}

ordered_json trace_json(const CsmSystem& system, const Trace& trace) {
    ordered_json steps = ordered_json::array();
    for (const TraceStep& step : trace.steps)
        steps.push_back({{"env", step.env},
                         {"from", format_joint(system, step.from)},
                         {"to", format_joint(system, step.to)}});
    return {{"start", format_joint(system, trace.start)}, {"steps", steps}};
}

bool has_findings(const ReachabilityGraph& graph) { return !graph.deadlocks.empty() || !graph.livelocks.empty(); }

// Reachability part of the check/reach reports.
void write_findings(const CsmSystem& system, const ReachabilityGraph& graph, std::ostream& out) {
    out << "reachability: " << graph.nodes.size() << " joint states, " << graph.edges.size() << " edges\n";
    out << "deadlocks: " << graph.deadlocks.size() << "\n";
    for (std::size_t n : graph.deadlocks) {
        out << "  " << format_joint(system, graph.nodes[n]) << "\n";
        out << "    trace: " << format_trace(system, shortest_trace(system, graph, n)) << "\n";
    }
    out << "livelocks (" << kLivelockDefinition << "): " << graph.livelocks.size() << "\n";
    for (const auto& component : graph.livelocks) {
        out << "  ";
        for (std::size_t i = 0; i < component.size(); ++i)
            out << (i == 0 ? "" : " ") << format_joint(system, graph.nodes[component[i]]);
        out << "\n    trace: " << format_trace(system, shortest_trace(system, graph, component.front())) << "\n";
    }
}

ordered_json findings_json(const CsmSystem& system, const ReachabilityGraph& graph) {
    ordered_json deadlocks = ordered_json::array();
    for (std::size_t n : graph.deadlocks)
        deadlocks.push_back({{"node", n},
                             {"state", format_joint(system, graph.nodes[n])},
                             {"trace", trace_json(system, shortest_trace(system, graph, n))}});
    ordered_json livelocks = ordered_json::array();
    for (const auto& component : graph.livelocks) {
        ordered_json members = ordered_json::array();
        for (std::size_t n : component)
            members.push_back(format_joint(system, graph.nodes[n]));
        livelocks.push_back({{"nodes", component},
                             {"states", members},
                             {"trace", trace_json(system, shortest_trace(system, graph, component.front()))}});
    }
    return {{"nodes", graph.nodes.size()},
            {"edges", graph.edges.size()},
            {"deadlocks", deadlocks},
            {"livelocks", {{"definition", kLivelockDefinition}, {"components", livelocks}}}};
}

void write_exports(const RunConfig& config, const CsmSystem& system, const ReachabilityGraph& graph) {
    if (config.json_path)
        write_file(*config.json_path, graph_to_json(system, graph));
    if (config.dot_path)
        write_file(*config.dot_path, graph_to_dot(system, graph));
}

} // namespace

EnvScript parse_env_script(std::string_view text, const CsmSystem& system) {
    const SymbolSet known(system.env_alphabet.begin(), system.env_alphabet.end());
    EnvScript script;
    std::istringstream in{std::string(text)};
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::istringstream words(line);
        std::vector<std::string> tokens;
        for (std::string w; words >> w;)
            tokens.push_back(w);
        if (tokens.empty())
            continue;
        SymbolSet step;
        if (!(tokens.size() == 1 && tokens.front() == "-")) {
            for (const std::string& t : tokens) {
                if (known.count(t) == 0)
                    throw Error("unknown-env-symbol", "unknown-env-symbol: script line " + std::to_string(number) + ": '" + t +
                                                          "' is not an environment symbol of " + system.name);
                step.insert(t);
            }
        }
        script.steps.push_back(std::move(step));
    }
    return script;
}

Pipeline run_pipeline(const std::string& path, RemedyMode remedy) {
    Pipeline p;
    p.parsed = parse_model(read_file(path));
    p.synthesized = synthesize(p.parsed);
    p.flat = flatten(p.synthesized.model);
    p.system = translate(p.flat.model);
    if (remedy == RemedyMode::RedundantAck)
        p.system = apply_remedy(p.system);
    return p;
}

std::size_t max_states_from_env() {
    const char* value = std::getenv("CSMW_MAX_STATES");
    if (value == nullptr || *value == '\0')
        return kDefaultMaxStates;
    char* end = nullptr;
    const unsigned long long n = std::strtoull(value, &end, 10);
    if (*end != '\0' || n == 0 || value[0] == '-')
        throw Error("usage", "CSMW_MAX_STATES must be a positive integer, got '" + std::string(value) + "'");
    return static_cast<std::size_t>(n);
}

int cmd_check(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(config, err, [&] {
        const Pipeline p = run_pipeline(config.input, config.remedy);
        warn(config, p.flat.diagnostics, err);
        const ReachabilityGraph graph = build_reachability(p.system, config.max_states);
        write_exports(config, p.system, graph);
        const SynthesisReport& report = p.synthesized.report;

        if (config.format == ReportFormat::Json) {
            ordered_json signals = ordered_json::array();
            for (const SynthesizedSignal& s : report.signals)
                signals.push_back(s.name);
            ordered_json machines = ordered_json::array();
            for (const CsmMachine& m : p.system.machines)
                machines.push_back({{"name", m.name}, {"states", m.states.size()}, {"transitions", m.transitions.size()}});
            ordered_json doc;
            doc["system"] = p.system.name;
            doc["remedy"] = remedy_name(config.remedy);
            doc["synthesis"] = {{"signals", signals}, {"emitted", report.emitted.size()}, {"added", report.added.size()}};
            doc["machines"] = machines;
            doc["reachability"] = findings_json(p.system, graph);
            doc["result"] = has_findings(graph) ? "findings" : "clean";
            out << doc.dump(2) << "\n";
        } else {
            out << "system " << p.system.name << " (remedy " << remedy_name(config.remedy) << ")\n";
            std::string names;
            for (const SynthesizedSignal& s : report.signals)
                names += " " + s.name;
            out << "synthesis: " << report.signals.size() << " signal(s)" << (names.empty() ? "" : ":") << names << "; "
                << report.emitted.size() << " emission(s), " << report.added.size() << " added transition(s)\n";
            for (const CsmMachine& m : p.system.machines)
                out << "machine " << m.name << ": " << m.states.size() << " states, " << m.transitions.size()
                    << " transitions\n";
            write_findings(p.system, graph, out);
            out << "result: " << (has_findings(graph) ? "FINDINGS" : "clean") << "\n";
        }
        return has_findings(graph) ? kFindings : kClean;
    });
}

int cmd_synth(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(config, err, [&] {
        const SynthesisResult result = synthesize(parse_model(read_file(config.input)));
        write_file(config.output_path.value_or(derived_path(config.input, ".synth.csmdl")), render_model(result.model));
        out << to_json(result.report);
        return kClean;
    });
}

int cmd_flatten(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(config, err, [&] {
        const SynthesisResult synthesized = synthesize(parse_model(read_file(config.input)));
        const FlattenResult flat = flatten(synthesized.model);
        warn(config, flat.diagnostics, err);
        const std::string path = config.output_path.value_or(derived_path(config.input, ".flat.csmdl"));
        write_file(path, render_model(flat.model));
        std::size_t states = 0;
        for (const ModuleDiagram& m : flat.model.modules)
            states += m.states.size();
        out << "wrote " << path << " (" << flat.model.modules.size() << " modules, " << states << " states)\n";
        return kClean;
    });
}

int cmd_translate(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(config, err, [&] {
        const Pipeline p = run_pipeline(config.input, config.remedy);
        warn(config, p.flat.diagnostics, err);
        const std::string doc = to_json(p.system);
        if (config.json_path)
            write_file(*config.json_path, doc);
        else
            out << doc;
        return kClean;
    });
}

int cmd_reach(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(config, err, [&] {
        const Pipeline p = run_pipeline(config.input, config.remedy);
        warn(config, p.flat.diagnostics, err);
        const ReachabilityGraph graph = build_reachability(p.system, config.max_states);
        write_exports(config, p.system, graph);
        if (config.format == ReportFormat::Json)
            out << findings_json(p.system, graph).dump(2) << "\n";
        else
            write_findings(p.system, graph, out);
        return has_findings(graph) ? kFindings : kClean;
    });
}

int cmd_export(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(config, err, [&] {
        const Pipeline p = run_pipeline(config.input, config.remedy);
        warn(config, p.flat.diagnostics, err);
        const ReachabilityGraph graph = build_reachability(p.system, config.max_states);
        if (config.json_path || config.dot_path)
            write_exports(config, p.system, graph);
        else if (config.export_format == ExportFormat::Dot)
            out << graph_to_dot(p.system, graph);
        else
            out << graph_to_json(p.system, graph);
        return kClean;
    });
}

int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(config, err, [&] {
        const Pipeline p = run_pipeline(config.input, config.remedy);
        warn(config, p.flat.diagnostics, err);
        const CsmSystem& system = p.system;
        const EnvScript script =
            config.script_path ? parse_env_script(read_file(*config.script_path), system) : EnvScript{};

        JointState current{system.initial_state()};
        out << "simulate " << system.name << " (remedy " << remedy_name(config.remedy)
            << "); nondeterminism resolved by the first declared transition\n";
        out << "start " << format_joint(system, current) << "\n";
        if (is_deadlock(system, current)) {
            out << "DEADLOCK at " << format_joint(system, current) << "\n";
            return kFindings;
        }
        for (std::size_t k = 0; k < script.steps.size(); ++k) {
            const SymbolSet heard = audible(system, current, script.steps[k]);
            out << "step " << k + 1 << ": env " << braces(script.steps[k]) << " audible " << braces(heard) << "\n";
            JointState next = current;
            for (std::size_t i = 0; i < system.machines.size(); ++i) {
                const CsmMachine& m = system.machines[i];
                out << "  " << m.name << ": ";
                bool moved = false;
                for (const CsmTransition& t : m.transitions) {
                    if (t.source != current.states[i] || !evaluate(t.guard, heard))
                        continue;
                    next.states[i] = t.target;
                    out << m.states[t.source].name << " -> " << m.states[t.target].name << " [" << t.guard.str() << "]\n";
                    moved = true;
                    break;
                }
                if (!moved)
                    out << "stays in " << m.states[current.states[i]].name << "\n";
            }
            current = next;
            out << "  now " << format_joint(system, current) << "\n";
            if (is_deadlock(system, current)) {
                out << "DEADLOCK at " << format_joint(system, current) << " after step " << k + 1 << " of "
                    << script.steps.size() << "\n";
                return kFindings;
            }
        }
        out << "end " << format_joint(system, current) << " after " << script.steps.size() << " step(s)\n";
        return kClean;
    });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Concurrent state machine workbench: synthesis, flattening, translation and reachability"};
    app.require_subcommand(1);

    RunConfig config;
    std::optional<std::size_t> max_states;
    std::string remedy = "none";
    std::string format = "text";
    std::string export_format = "json";

    using Command = int (*)(const RunConfig&, std::ostream&, std::ostream&);
    struct Entry {
        const char* name;
        const char* help;
        Command fn;
    };
    const Entry entries[] = {
        {"check", "run the whole pipeline and report deadlocks and livelocks", cmd_check},
        {"synth", "compile enforcement constraints into signals; prints the report", cmd_synth},
        {"flatten", "synthesize, then flatten refinements into a flat model", cmd_flatten},
        {"translate", "print the CSM system as JSON", cmd_translate},
        {"reach", "build the reachability graph and list findings", cmd_reach},
        {"export", "write the reachability graph as JSON or DOT", cmd_export},
        {"simulate", "replay an env script step by step", cmd_simulate},
    };

    std::map<CLI::App*, Command> dispatch;
    for (const Entry& e : entries) {
        CLI::App* sub = app.add_subcommand(e.name, e.help);
        sub->add_option("file", config.input, "model file (.csmdl)")->required();
        sub->add_option("--remedy", remedy, "none or redundant-ack")
            ->check(CLI::IsMember({"none", "redundant-ack"}));
        sub->add_option("--json", config.json_path, "write JSON here");
        sub->add_option("--dot", config.dot_path, "write DOT here");
        sub->add_option("--max-states", max_states, "joint state cap (default: CSMW_MAX_STATES or 1000000)")
            ->check(CLI::PositiveNumber);
        sub->add_option("-o,--output", config.output_path, "model output path (synth, flatten)");
        sub->add_option("--script", config.script_path, "env script (simulate)");
        if (std::string_view(e.name) == "export")
            sub->add_option("--format", export_format, "json or dot")->check(CLI::IsMember({"json", "dot"}));
        else
            sub->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));
        dispatch.emplace(sub, e.fn);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kClean : kFailure;
    }

    config.remedy = remedy == "redundant-ack" ? RemedyMode::RedundantAck : RemedyMode::None;
    config.format = format == "json" ? ReportFormat::Json : ReportFormat::Text;
    config.export_format = export_format == "dot" ? ExportFormat::Dot : ExportFormat::Json;
    try {
        config.max_states = max_states ? *max_states : max_states_from_env();
    } catch (const Error& e) {
        err << e.what() << "\n";
        return kFailure;
    }

    for (const auto& [sub, fn] : dispatch)
        if (sub->parsed())
            return fn(config, out, err);
    return kFailure;
}

} // namespace csmw::cli
