#include "csmw/model.hpp"

#include <algorithm>
#include <map>

namespace csmw {

bool ModuleDiagram::has_state(std::string_view state) const { return state_index(state) >= 0; }

int ModuleDiagram::state_index(std::string_view state) const {
    auto it = std::find(states.begin(), states.end(), state);
    return it == states.end() ? -1 : static_cast<int>(it - states.begin());
}

bool Refinement::has_substate(std::string_view state) const {
    return std::find(substates.begin(), substates.end(), state) != substates.end();
}

const EventSplit* EventHierarchy::split_of(std::string_view abstract_event) const {
    for (const EventSplit& s : splits)
        if (s.abstract_event == abstract_event)
            return &s;
    return nullptr;
}

const Acceptance* EventHierarchy::acceptance_of(std::string_view event, std::string_view module,
                                                std::string_view super_state) const {
    for (const Acceptance& a : acceptance)
        if (a.event == event && a.module == module && a.super_state == super_state)
            return &a;
    return nullptr;
}

const ModuleDiagram* SystemModel::find_module(std::string_view module) const {
    for (const ModuleDiagram& m : modules)
        if (m.name == module)
            return &m;
    return nullptr;
}

ModuleDiagram* SystemModel::find_module(std::string_view module) {
    for (ModuleDiagram& m : modules)
        if (m.name == module)
            return &m;
    return nullptr;
}

std::string_view to_string(EventCategory category) {
    switch (category) {
    case EventCategory::External:
        return "external";
    case EventCategory::InterModule:
        return "inter-module";
    case EventCategory::Acknowledgement:
        return "acknowledgement";
    }
    return "?";
}

namespace {

// Calls visit(module_name, transition) for every transition, module
// transitions first, then that module's refinements in file order.
template <class Visit>
void for_each_transition(const SystemModel& model, Visit visit) {
    for (const ModuleDiagram& m : model.modules) {
        for (const DiagramTransition& t : m.transitions)
            visit(m.name, t);
        for (const Refinement& r : model.refinements)
            if (r.module == m.name)
                for (const DiagramTransition& t : r.transitions)
                    visit(m.name, t);
    }
}

} // namespace

std::vector<Event> classify_events(const SystemModel& model) {
    std::map<Symbol, std::string> sender;
    for_each_transition(model, [&](const std::string& module, const DiagramTransition& t) {
        for (const Symbol& e : t.emits)
            sender.emplace(e, module);
    });

    std::vector<Event> events;
    std::map<Symbol, std::size_t> index;
    auto note = [&](const Symbol& name, const std::string& consumer) {
        auto it = index.find(name);
        if (it != index.end()) {
            if (!consumer.empty() && events[it->second].to.empty())
                events[it->second].to = consumer;
            return;
        }
        Event ev;
        ev.name = name;
        auto s = sender.find(name);
        if (s != sender.end()) {
            ev.category = EventCategory::InterModule;
            ev.from = s->second;
        } else {
            ev.category = EventCategory::External;
            ev.from = std::string(kEnvironment);
        }
        ev.to = consumer;
        index.emplace(name, events.size());
        events.push_back(std::move(ev));
    };

    for_each_transition(model, [&](const std::string& module, const DiagramTransition& t) {
        note(t.trigger, module);
        if (const EventSplit* split = model.hierarchy.split_of(t.trigger))
            for (const Symbol& c : split->concrete)
                note(c, module);
        for (const Symbol& e : t.emits)
            note(e, {});
    });
    return events;
}

std::vector<Symbol> env_alphabet(const SystemModel& model) {
    std::vector<Symbol> out;
    for (const Event& ev : classify_events(model)) {
        if (ev.category != EventCategory::External || model.hierarchy.split_of(ev.name) != nullptr)
            continue;
        out.push_back(ev.name);
    }
    return out;
}

SymbolSet messages_emitted_by(const SystemModel& model, std::string_view module) {
    SymbolSet out;
    for_each_transition(model, [&](const std::string& m, const DiagramTransition& t) {
        if (m == module)
            out.insert(t.emits.begin(), t.emits.end());
    });
    return out;
}

std::string format_diagnostic(const Diagnostic& d) {
    std::string out;
    if (d.line > 0)
        out += "line " + std::to_string(d.line) + ": ";
    out += d.code + ": " + d.message;
    return out;
}

namespace {

std::string describe(const std::vector<Diagnostic>& diagnostics) {
    std::string out = "model has " + std::to_string(diagnostics.size()) + " error(s)";
    for (const Diagnostic& d : diagnostics)
        out += "\n  " + format_diagnostic(d);
    return out;
}

} // namespace

ModelError::ModelError(std::vector<Diagnostic> diagnostics)
    : Error(diagnostics.empty() ? "model-invalid" : diagnostics.front().code, describe(diagnostics)),
      diagnostics_(std::move(diagnostics)) {}

} // namespace csmw
