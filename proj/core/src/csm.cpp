#include "csmw/csm.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <map>
#include <set>

namespace csmw {

std::string_view to_string(CsmStateKind kind) {
    switch (kind) {
    case CsmStateKind::Base:
        return "base";
    case CsmStateKind::SenderWait:
        return "sender-wait";
    case CsmStateKind::ReceiverAck:
        return "receiver-ack";
    }
    return "?";
}

int CsmMachine::state_index(std::string_view state) const {
    for (std::size_t i = 0; i < states.size(); ++i)
        if (states[i].name == state)
            return static_cast<int>(i);
    return -1;
}

std::vector<std::size_t> CsmSystem::initial_state() const {
    std::vector<std::size_t> out;
    out.reserve(machines.size());
    for (const CsmMachine& m : machines)
        out.push_back(m.initial);
    return out;
}

Symbol ack_symbol(std::string_view message) { return std::string(kAckPrefix) + std::string(message); }

namespace {

// a, b, ..., z, aa, ab, ...
std::string letter_suffix(std::size_t n) {
    std::string out;
    ++n;
    while (n > 0) {
        --n;
        out.insert(out.begin(), static_cast<char>('a' + n % 26));
        n /= 26;
    }
    return out;
}

class MachineBuilder {
public:
    MachineBuilder(const ModuleDiagram& module, const SymbolSet& messages) : module_(module), messages_(messages) {
        machine_.name = module.name;
        for (const std::string& s : module.states)
            add_state(CsmState{s, {}, CsmStateKind::Base, {}, {}});
        machine_.initial = static_cast<std::size_t>(machine_.state_index(module.initial));
    }

    CsmMachine build() && {
        for (const DiagramTransition& t : module_.transitions)
            add(t);
        return std::move(machine_);
    }

private:
    std::size_t add_state(CsmState state) {
        if (!names_.insert(state.name).second)
            throw Error("state-name-collision", "state-name-collision: generated state '" + state.name +
                                                    "' in machine " + machine_.name + " clashes with an existing state");
        machine_.states.push_back(std::move(state));
        return machine_.states.size() - 1;
    }

    std::size_t intermediate(const std::string& base, CsmStateKind kind, std::vector<Symbol> messages, SymbolSet outputs) {
        std::size_t& used = letters_[base];
        std::string name = base + letter_suffix(used++);
        return add_state(CsmState{std::move(name), std::move(outputs), kind, base, std::move(messages)});
    }

    void link(std::size_t from, std::size_t to, Guard guard) {
        machine_.transitions.push_back(CsmTransition{from, to, std::move(guard)});
    }

    void add(const DiagramTransition& t) {
        const auto source = static_cast<std::size_t>(machine_.state_index(t.source));
        const auto target = static_cast<std::size_t>(machine_.state_index(t.target));

        std::size_t current = source;
        Guard next_guard = Guard::var(t.trigger);
        if (messages_.count(t.trigger) != 0) {
            const std::size_t ack = intermediate(t.source, CsmStateKind::ReceiverAck, {t.trigger}, {ack_symbol(t.trigger)});
            link(current, ack, next_guard);
            current = ack;
            next_guard = Guard::always();
        }
        if (!t.emits.empty()) {
            SymbolSet out(t.emits.begin(), t.emits.end());
            const std::size_t wait = intermediate(t.source, CsmStateKind::SenderWait, t.emits, out);
            link(current, wait, next_guard);
            current = wait;
            std::vector<Guard> acks;
            for (const Symbol& m : t.emits)
                acks.push_back(Guard::var(ack_symbol(m)));
            next_guard = acks.size() == 1 ? acks.front() : Guard::conj(std::move(acks));
        }
        link(current, target, next_guard);
    }

    const ModuleDiagram& module_;
    const SymbolSet& messages_;
    CsmMachine machine_;
    std::set<std::string> names_;
    std::map<std::string, std::size_t> letters_;
};

} // namespace

CsmSystem translate(const SystemModel& flat_model) {
    if (!flat_model.refinements.empty() || !flat_model.hierarchy.empty())
        throw Error("not-flat", "not-flat: translate needs a flattened model (run flatten first)");
    if (auto diagnostics = validate(flat_model); !diagnostics.empty())
        throw ModelError(std::move(diagnostics));

    CsmSystem system;
    system.name = flat_model.name;

    std::vector<Symbol> messages;
    for (const Event& e : classify_events(flat_model)) {
        if (e.category == EventCategory::InterModule)
            messages.push_back(e.name);
    }
    const SymbolSet message_set(messages.begin(), messages.end());

    for (const ModuleDiagram& m : flat_model.modules)
        system.machines.push_back(MachineBuilder(m, message_set).build());

    system.env_alphabet = env_alphabet(flat_model);
    system.internal_alphabet = messages;
    for (const Symbol& m : messages)
        system.internal_alphabet.push_back(ack_symbol(m));
    return system;
}

CsmSystem apply_remedy(const CsmSystem& system) {
    CsmSystem out = system;
    for (CsmMachine& machine : out.machines) {
        std::map<std::string, SymbolSet> accepted; // base state -> acks it can produce
        for (const CsmState& s : machine.states)
            if (s.kind == CsmStateKind::ReceiverAck)
                for (const Symbol& m : s.messages)
                    accepted[s.base_source].insert(ack_symbol(m));
        for (CsmState& s : machine.states) {
            if (s.kind != CsmStateKind::SenderWait)
                continue;
            auto it = accepted.find(s.base_source);
            if (it != accepted.end())
                s.outputs.insert(it->second.begin(), it->second.end());
        }
    }
    return out;
}

std::vector<Diagnostic> validate(const CsmSystem& system) {
    std::vector<Diagnostic> out;
    auto report = [&](std::string code, std::string message) { out.push_back({std::move(code), std::move(message), 0}); };

    const SymbolSet env(system.env_alphabet.begin(), system.env_alphabet.end());
    const SymbolSet internal(system.internal_alphabet.begin(), system.internal_alphabet.end());
    for (const Symbol& s : env)
        if (internal.count(s) != 0)
            report("alphabet-overlap", "symbol '" + s + "' is both environmental and internal");

    std::map<Symbol, std::string> producer;
    for (const CsmMachine& m : system.machines) {
        if (m.initial >= m.states.size())
            report("unknown-initial", "machine " + m.name + " has no valid initial state");
        std::set<std::string> names;
        for (const CsmState& s : m.states) {
            if (!names.insert(s.name).second)
                report("duplicate-state", "machine " + m.name + " declares state '" + s.name + "' twice");
            for (const Symbol& o : s.outputs) {
                if (internal.count(o) == 0)
                    report("undeclared-output", "state " + m.name + "." + s.name + " produces undeclared '" + o + "'");
                auto [it, fresh] = producer.emplace(o, m.name);
                if (!fresh && it->second != m.name)
                    report("symbol-multiple-producers", "'" + o + "' is produced by both " + it->second + " and " + m.name);
            }
        }
        for (const CsmTransition& t : m.transitions) {
            if (t.source >= m.states.size() || t.target >= m.states.size()) {
                report("transition-unknown-state", "machine " + m.name + " has a transition with an invalid endpoint");
                continue;
            }
            for (const Symbol& s : symbols_of(t.guard))
                if (env.count(s) == 0 && internal.count(s) == 0)
                    report("undeclared-symbol", "guard '" + t.guard.str() + "' in machine " + m.name + " uses undeclared '" + s + "'");
            if (is_never(t.guard))
                report("never-guard", "machine " + m.name + " has a transition labelled by an unsatisfiable guard");
        }
    }
    return out;
}

std::string to_json(const CsmSystem& system) {
    using nlohmann::ordered_json;
    ordered_json doc;
    doc["name"] = system.name;
    doc["env_alphabet"] = system.env_alphabet;
    doc["internal_alphabet"] = system.internal_alphabet;
    ordered_json initial = ordered_json::array();
    for (const CsmMachine& m : system.machines)
        initial.push_back(m.states[m.initial].name);
    doc["initial"] = initial;
    doc["machines"] = ordered_json::array();
    for (const CsmMachine& m : system.machines) {
        ordered_json jm;
        jm["name"] = m.name;
        jm["initial"] = m.states[m.initial].name;
        jm["states"] = ordered_json::array();
        for (const CsmState& s : m.states) {
            ordered_json js{{"name", s.name}, {"kind", to_string(s.kind)}, {"outputs", s.outputs}};
            if (!s.base_source.empty())
                js["base_source"] = s.base_source;
            if (!s.messages.empty())
                js["messages"] = s.messages;
            jm["states"].push_back(std::move(js));
        }
        jm["transitions"] = ordered_json::array();
        for (const CsmTransition& t : m.transitions)
            jm["transitions"].push_back(
                {{"source", m.states[t.source].name}, {"target", m.states[t.target].name}, {"guard", t.guard.str()}});
        doc["machines"].push_back(std::move(jm));
    }
    return doc.dump(2) + "\n";
}

} // namespace csmw
