#include "csmw/model.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <tuple>

namespace csmw {

namespace {

bool is_identifier(std::string_view text) {
    return !text.empty() && std::all_of(text.begin(), text.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
    });
}

class Validator {
public:
    explicit Validator(const SystemModel& model) : model_(model) {}

    std::vector<Diagnostic> run() {
        check_modules();
        check_events();
        check_constraints();
        check_refinements();
        check_hierarchy();
        return std::move(out_);
    }

private:
    void report(std::string code, std::string message, SourceLine line) {
        out_.push_back(Diagnostic{std::move(code), std::move(message), line.value});
    }

    void check_transition(const std::string& owner, const DiagramTransition& t,
                          const std::vector<std::string>& states, std::string_view what) {
        auto known = [&](const std::string& s) { return std::find(states.begin(), states.end(), s) != states.end(); };
        if (!known(t.source))
            report("transition-unknown-state", std::string(what) + " " + owner + ": unknown source state '" + t.source + "'", t.line);
        if (!known(t.target))
            report("transition-unknown-state", std::string(what) + " " + owner + ": unknown target state '" + t.target + "'", t.line);
        if (!is_valid_symbol(t.trigger))
            report("invalid-symbol", "'" + t.trigger + "' is not a valid event name", t.line);
        for (const Symbol& e : t.emits)
            if (!is_valid_symbol(e))
                report("invalid-symbol", "'" + e + "' is not a valid event name", t.line);
        for (const Symbol* e : all_events(t))
            if (e->starts_with(kAckPrefix))
                report("reserved-ack-name", "event '" + *e + "' uses the reserved acknowledgement prefix", t.line);
    }

    static std::vector<const Symbol*> all_events(const DiagramTransition& t) {
        std::vector<const Symbol*> out{&t.trigger};
        for (const Symbol& e : t.emits)
            out.push_back(&e);
        return out;
    }

    void check_modules() {
        if (!is_identifier(model_.name))
            report("invalid-identifier", "system name '" + model_.name + "' is not an identifier", {});
        std::set<std::string> names;
        for (const ModuleDiagram& m : model_.modules) {
            if (!is_identifier(m.name))
                report("invalid-identifier", "module name '" + m.name + "' is not an identifier", m.line);
            if (!names.insert(m.name).second)
                report("duplicate-module", "module '" + m.name + "' declared twice", m.line);
            if (m.states.empty())
                report("empty-module", "module " + m.name + " declares no states", m.line);
            std::set<std::string> seen;
            for (const std::string& s : m.states) {
                if (!is_identifier(s))
                    report("invalid-identifier", "state name '" + s + "' in module " + m.name + " is not an identifier", m.line);
                if (!seen.insert(s).second)
                    report("duplicate-state", "state '" + s + "' declared twice in module " + m.name, m.line);
            }
            if (m.initial.empty())
                report("missing-initial", "module " + m.name + " has no initial state", m.line);
            else if (!m.has_state(m.initial))
                report("unknown-initial", "initial state '" + m.initial + "' of module " + m.name + " is not declared", m.line);
            for (const DiagramTransition& t : m.transitions)
                check_transition(m.name, t, m.states, "module");
        }
    }

    void check_events() {
        std::map<Symbol, std::string> sender;
        auto visit = [&](const std::string& module, const DiagramTransition& t) {
            for (const Symbol& e : t.emits) {
                auto [it, fresh] = sender.emplace(e, module);
                if (!fresh && it->second != module)
                    report("event-multiple-senders", "event '" + e + "' is emitted by both " + it->second + " and " + module, t.line);
            }
        };
        auto each = [&](auto&& fn) {
            for (const ModuleDiagram& m : model_.modules) {
                for (const DiagramTransition& t : m.transitions)
                    fn(m.name, t);
                for (const Refinement& r : model_.refinements)
                    if (r.module == m.name)
                        for (const DiagramTransition& t : r.transitions)
                            fn(m.name, t);
            }
        };
        each(visit);
        std::map<Symbol, std::string> receiver;
        each([&](const std::string& module, const DiagramTransition& t) {
            auto it = sender.find(t.trigger);
            if (it == sender.end())
                return;
            if (it->second == module)
                report("message-self-addressed", "module " + module + " both emits and receives '" + t.trigger + "'", t.line);
            auto [r, fresh] = receiver.emplace(t.trigger, module);
            if (!fresh && r->second != module)
                report("message-multiple-receivers", "message '" + t.trigger + "' is received by both " + r->second + " and " + module, t.line);
        });
    }

    void check_constraints() {
        for (const EnforcementConstraint& c : model_.constraints) {
            const ModuleDiagram* from = model_.find_module(c.from_module);
            const ModuleDiagram* to = model_.find_module(c.to_module);
            if (from == nullptr)
                report("constraint-unknown-module", "unknown module '" + c.from_module + "'", c.line);
            if (to == nullptr)
                report("constraint-unknown-module", "unknown module '" + c.to_module + "'", c.line);
            if (c.from_module == c.to_module)
                report("constraint-self-module", "constraint relates module " + c.from_module + " to itself", c.line);
            if (from != nullptr && !from->has_state(c.from_state))
                report("constraint-unknown-state", "module " + c.from_module + " has no state '" + c.from_state + "'", c.line);
            if (to != nullptr && !to->has_state(c.to_state))
                report("constraint-unknown-state", "module " + c.to_module + " has no state '" + c.to_state + "'", c.line);
        }
    }

    // A refinement may target a top-level state or a substate introduced by
    // another refinement of the same module (deeper nesting).
    bool refinable(const Refinement& r) const {
        const ModuleDiagram* m = model_.find_module(r.module);
        if (m == nullptr)
            return false;
        if (m->has_state(r.super_state))
            return true;
        for (const Refinement& other : model_.refinements)
            if (&other != &r && other.module == r.module && other.has_substate(r.super_state))
                return true;
        return false;
    }

    void check_refinements() {
        std::set<std::pair<std::string, std::string>> refined;
        std::map<std::string, std::set<std::string>> flat_names;
        for (const ModuleDiagram& m : model_.modules)
            flat_names[m.name].insert(m.states.begin(), m.states.end());

        for (const Refinement& r : model_.refinements) {
            const std::string where = r.module + "." + r.super_state;
            if (model_.find_module(r.module) == nullptr) {
                report("refine-unknown-module", "refinement of unknown module '" + r.module + "'", r.line);
                continue;
            }
            if (!refinable(r))
                report("refine-unknown-state", "refinement of unknown state " + where, r.line);
            if (!refined.emplace(r.module, r.super_state).second)
                report("refine-duplicate", "state " + where + " refined twice", r.line);
            if (r.substates.empty())
                report("refine-empty", "refinement of " + where + " declares no substates", r.line);
            std::set<std::string> seen;
            for (const std::string& s : r.substates) {
                if (!is_identifier(s))
                    report("invalid-identifier", "substate name '" + s + "' is not an identifier", r.line);
                if (!seen.insert(s).second)
                    report("duplicate-state", "substate '" + s + "' declared twice in " + where, r.line);
                else if (!flat_names[r.module].insert(s).second)
                    report("substate-name-clash", "substate '" + s + "' of " + where + " clashes with another state of module " + r.module, r.line);
            }
            if (r.sub_initial.empty())
                report("missing-initial", "refinement of " + where + " has no initial substate", r.line);
            else if (!r.has_substate(r.sub_initial))
                report("refine-unknown-initial", "initial substate '" + r.sub_initial + "' of " + where + " is not declared", r.line);
            for (const DiagramTransition& t : r.transitions)
                check_transition(where, t, r.substates, "refinement");
        }
    }

    void check_hierarchy() {
        std::set<Symbol> triggers;
        for (const ModuleDiagram& m : model_.modules)
            for (const DiagramTransition& t : m.transitions)
                triggers.insert(t.trigger);
        for (const Refinement& r : model_.refinements)
            for (const DiagramTransition& t : r.transitions)
                triggers.insert(t.trigger);

        std::map<Symbol, Symbol> owner;
        std::set<Symbol> abstracts;
        for (const EventSplit& s : model_.hierarchy.splits) {
            if (!abstracts.insert(s.abstract_event).second)
                report("split-duplicate", "event '" + s.abstract_event + "' split twice", s.line);
            if (s.concrete.empty())
                report("split-empty", "split of '" + s.abstract_event + "' names no concrete events", s.line);
            if (triggers.count(s.abstract_event) == 0)
                report("split-unused", "split event '" + s.abstract_event + "' never triggers a transition", s.line);
            for (const Symbol& c : s.concrete) {
                if (!is_valid_symbol(c))
                    report("invalid-symbol", "'" + c + "' is not a valid event name", s.line);
                if (c == s.abstract_event)
                    report("split-self", "event '" + c + "' is split into itself", s.line);
                auto [it, fresh] = owner.emplace(c, s.abstract_event);
                if (!fresh)
                    report("split-overlap", "concrete event '" + c + "' belongs to splits of both '" + it->second + "' and '" + s.abstract_event + "'", s.line);
            }
        }
        for (const EventSplit& s : model_.hierarchy.splits)
            for (const Symbol& c : s.concrete)
                if (abstracts.count(c) != 0)
                    report("split-nested", "concrete event '" + c + "' is itself split", s.line);

        std::set<std::tuple<Symbol, std::string, std::string>> accepted;
        for (const Acceptance& a : model_.hierarchy.acceptance) {
            if (!accepted.emplace(a.event, a.module, a.super_state).second)
                report("acceptance-duplicate", "acceptance of '" + a.event + "' in " + a.module + "." + a.super_state + " given twice", a.line);
            const Refinement* r = nullptr;
            for (const Refinement& candidate : model_.refinements)
                if (candidate.module == a.module && candidate.super_state == a.super_state)
                    r = &candidate;
            if (r == nullptr) {
                report("acceptance-unknown-refinement", "no refinement of " + a.module + "." + a.super_state, a.line);
                continue;
            }
            if (a.substates.empty())
                report("acceptance-empty", "acceptance of '" + a.event + "' names no substates", a.line);
            for (const std::string& s : a.substates)
                if (!r->has_substate(s))
                    report("acceptance-unknown-substate", "'" + s + "' is not a substate of " + a.module + "." + a.super_state, a.line);
            if (abstracts.count(a.event) != 0)
                report("acceptance-abstract-event", "acceptance must name concrete events, '" + a.event + "' is split", a.line);
        }
    }

    const SystemModel& model_;
    std::vector<Diagnostic> out_;
};

} // namespace

std::vector<Diagnostic> validate(const SystemModel& model) { return Validator(model).run(); }

} // namespace csmw
