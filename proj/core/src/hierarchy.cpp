#include "csmw/hierarchy.hpp"

#include <algorithm>
#include <set>

namespace csmw {

namespace {

std::vector<DiagramTransition> expand_splits(const std::vector<DiagramTransition>& transitions,
                                             const EventHierarchy& hierarchy) {
    std::vector<DiagramTransition> out;
    for (const DiagramTransition& t : transitions) {
        const EventSplit* split = hierarchy.split_of(t.trigger);
        if (split == nullptr) {
            out.push_back(t);
            continue;
        }
        for (const Symbol& concrete : split->concrete) {
            DiagramTransition copy = t;
            copy.trigger = concrete;
            out.push_back(std::move(copy));
        }
    }
    return out;
}

void check_split_not_emitted(const SystemModel& model) {
    auto check = [&](const DiagramTransition& t) {
        for (const Symbol& e : t.emits)
            if (model.hierarchy.split_of(e) != nullptr)
                throw Error("split-emitted", "split-emitted: event '" + e +
                                                 "' is emitted by a module; only received events may be split");
    };
    for (const ModuleDiagram& m : model.modules)
        std::for_each(m.transitions.begin(), m.transitions.end(), check);
    for (const Refinement& r : model.refinements)
        std::for_each(r.transitions.begin(), r.transitions.end(), check);
}

void apply_refinement(ModuleDiagram& module, const Refinement& refinement, const EventHierarchy& hierarchy,
                      std::vector<Diagnostic>& diagnostics) {
    const std::string& super = refinement.super_state;

    auto pos = std::find(module.states.begin(), module.states.end(), super);
    pos = module.states.erase(pos);
    module.states.insert(pos, refinement.substates.begin(), refinement.substates.end());

    std::set<Symbol> exit_events;
    std::vector<DiagramTransition> flat;
    for (const DiagramTransition& t : module.transitions) {
        std::vector<std::string> sources{t.source};
        if (t.source == super) {
            exit_events.insert(t.trigger);
            sources = refinement.substates;
            if (const Acceptance* acc = hierarchy.acceptance_of(t.trigger, module.name, super)) {
                std::erase_if(sources, [&](const std::string& s) {
                    return std::find(acc->substates.begin(), acc->substates.end(), s) == acc->substates.end();
                });
            }
        }
        for (const std::string& source : sources) {
            DiagramTransition copy = t;
            copy.source = source;
            if (copy.target == super)
                copy.target = refinement.sub_initial;
            flat.push_back(std::move(copy));
        }
    }
    flat.insert(flat.end(), refinement.transitions.begin(), refinement.transitions.end());
    module.transitions = std::move(flat);

    if (module.initial == super)
        module.initial = refinement.sub_initial;

    for (const Acceptance& acc : hierarchy.acceptance)
        if (acc.module == module.name && acc.super_state == super && exit_events.count(acc.event) == 0)
            diagnostics.push_back({"acceptance-unused",
                                   "event '" + acc.event + "' never leaves " + module.name + "." + super +
                                       "; its acceptance entry has no effect",
                                   acc.line.value});
}

} // namespace

FlattenResult flatten(const SystemModel& model) {
    if (auto diagnostics = validate(model); !diagnostics.empty())
        throw ModelError(std::move(diagnostics));
    check_split_not_emitted(model);

    FlattenResult result{model, {}};
    SystemModel& out = result.model;

    for (ModuleDiagram& m : out.modules)
        m.transitions = expand_splits(m.transitions, model.hierarchy);
    std::vector<Refinement> pending = out.refinements;
    for (Refinement& r : pending)
        r.transitions = expand_splits(r.transitions, model.hierarchy);

    std::set<std::pair<std::string, std::string>> refined;
    while (!pending.empty()) {
        auto ready = std::find_if(pending.begin(), pending.end(), [&](const Refinement& r) {
            return out.find_module(r.module)->has_state(r.super_state);
        });
        if (ready == pending.end())
            throw Error("refine-unknown-state", "refinement of " + pending.front().module + "." +
                                                    pending.front().super_state + " cannot be resolved");
        apply_refinement(*out.find_module(ready->module), *ready, model.hierarchy, result.diagnostics);
        refined.emplace(ready->module, ready->super_state);
        pending.erase(ready);
    }

    std::erase_if(out.constraints, [&](const EnforcementConstraint& c) {
        return refined.count({c.from_module, c.from_state}) != 0 || refined.count({c.to_module, c.to_state}) != 0;
    });
    out.refinements.clear();
    out.hierarchy = {};
    return result;
}

} // namespace csmw
