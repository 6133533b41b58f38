#include "csmw/synthesis.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <set>

namespace csmw {

namespace {

// Constraints sharing (from, to, to_state) are realized by one signal.
struct SignalPlan {
    std::string from;
    std::string to;
    std::string to_state;
    std::set<std::string> from_states;
    std::vector<std::string> sources; // states of `to` other than `to_state`, in state order
    Symbol name;
    bool reused = false;
};

bool has_transition(const ModuleDiagram& m, const std::string& source, const std::string& target, const Symbol& trigger) {
    return std::any_of(m.transitions.begin(), m.transitions.end(), [&](const DiagramTransition& t) {
        return t.source == source && t.target == target && t.trigger == trigger;
    });
}

// `message` moves `receiver` into the plan's target from some other state
// and never anywhere else.
bool realizes(const SignalPlan& plan, const ModuleDiagram& receiver, const Symbol& message) {
    bool moves = false;
    for (const DiagramTransition& t : receiver.transitions) {
        if (t.trigger != message)
            continue;
        if (t.target != plan.to_state)
            return false;
        moves = moves || t.source != plan.to_state;
    }
    return moves;
}

void check_conflicts(const SystemModel& model) {
    const auto& cs = model.constraints;
    for (std::size_t i = 0; i < cs.size(); ++i)
        for (std::size_t j = i + 1; j < cs.size(); ++j)
            if (cs[i].from_module == cs[j].from_module && cs[i].to_module == cs[j].to_module &&
                cs[i].from_state == cs[j].from_state && cs[i].to_state != cs[j].to_state)
                throw Error("constraint-conflict",
                            "constraint-conflict: state " + cs[i].from_module + "." + cs[i].from_state +
                                " forces " + cs[i].to_module + " into both '" + cs[i].to_state + "' and '" +
                                cs[j].to_state + "'");
}

class Synthesizer {
public:
    explicit Synthesizer(const SystemModel& model) : model_(model) {}

    SynthesisResult run() {
        if (auto diagnostics = validate(model_); !diagnostics.empty())
            throw ModelError(std::move(diagnostics));
        check_conflicts(model_);
        plan_signals();
        name_signals();
        settle_active_set();
        return build();
    }

private:
    void plan_signals() {
        for (const EnforcementConstraint& c : model_.constraints) {
            auto it = std::find_if(plans_.begin(), plans_.end(), [&](const SignalPlan& p) {
                return p.from == c.from_module && p.to == c.to_module && p.to_state == c.to_state;
            });
            if (it == plans_.end()) {
                SignalPlan p;
                p.from = c.from_module;
                p.to = c.to_module;
                p.to_state = c.to_state;
                for (const std::string& s : model_.find_module(c.to_module)->states)
                    if (s != c.to_state)
                        p.sources.push_back(s);
                plans_.push_back(std::move(p));
                it = std::prev(plans_.end());
            }
            it->from_states.insert(c.from_state);
        }
        std::erase_if(plans_, [](const SignalPlan& p) { return p.sources.empty(); });
    }

    void name_signals() {
        std::set<Symbol> taken;
        for (const Event& e : classify_events(model_))
            taken.insert(e.name);

        for (SignalPlan& p : plans_) {
            const ModuleDiagram& sender = *model_.find_module(p.from);
            const ModuleDiagram& receiver = *model_.find_module(p.to);
            for (const DiagramTransition& t : sender.transitions) {
                for (const Symbol& m : t.emits)
                    if (p.name.empty() && realizes(p, receiver, m)) {
                        p.name = m;
                        p.reused = true;
                    }
            }
            if (!p.reused) {
                const Symbol base = p.sources.size() == 1 ? "s" + p.sources.front() + p.to_state : "s_" + p.to_state;
                Symbol name = base;
                if (taken.count(name) != 0)
                    name = base + "_" + p.from;
                for (int n = 2; taken.count(name) != 0; ++n)
                    name = base + "_" + p.from + "_" + std::to_string(n);
                p.name = name;
            }
            taken.insert(p.name);
        }
    }

    SymbolSet messages_of(const std::string& module, const std::vector<bool>& active) const {
        SymbolSet out = messages_emitted_by(model_, module);
        for (std::size_t i = 0; i < plans_.size(); ++i)
            if (active[i] && plans_[i].from == module)
                out.insert(plans_[i].name);
        return out;
    }

    // Transitions the receiver gains, in state order then plan order.
    std::vector<DiagramTransition> additions_for(const ModuleDiagram& m, const std::vector<bool>& active) const {
        std::vector<std::pair<std::pair<int, std::size_t>, DiagramTransition>> keyed;
        for (std::size_t i = 0; i < plans_.size(); ++i) {
            const SignalPlan& p = plans_[i];
            if (!active[i] || p.to != m.name)
                continue;
            for (const std::string& x : p.sources) {
                if (has_transition(m, x, p.to_state, p.name))
                    continue;
                DiagramTransition t;
                t.source = x;
                t.target = p.to_state;
                t.trigger = p.name;
                t.origin = Origin::Synthesized;
                keyed.push_back({{m.state_index(x), i}, std::move(t)});
            }
        }
        std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<DiagramTransition> out;
        for (auto& [key, t] : keyed)
            out.push_back(std::move(t));
        return out;
    }

    bool emits_for(const SignalPlan& p, const DiagramTransition& t, const SymbolSet& partner_messages) const {
        return p.from_states.count(t.target) != 0 && partner_messages.count(t.trigger) == 0;
    }

    bool has_emitter(std::size_t plan, const std::vector<bool>& active) const {
        const SignalPlan& p = plans_[plan];
        const ModuleDiagram& sender = *model_.find_module(p.from);
        const SymbolSet partner = messages_of(p.to, active);
        auto candidates = sender.transitions;
        for (DiagramTransition& t : additions_for(sender, active))
            candidates.push_back(std::move(t));
        return std::any_of(candidates.begin(), candidates.end(),
                           [&](const DiagramTransition& t) { return emits_for(p, t, partner); });
    }

    // Greatest fixpoint: start with every signal and drop those no
    // transition would emit until nothing changes.
    void settle_active_set() {
        active_.assign(plans_.size(), true);
        for (bool changed = true; changed;) {
            changed = false;
            std::vector<bool> next = active_;
            for (std::size_t i = 0; i < plans_.size(); ++i)
                if (active_[i] && !has_emitter(i, active_)) {
                    next[i] = false;
                    changed = true;
                }
            active_ = std::move(next);
        }
    }

    SynthesisResult build() const {
        SynthesisResult result{model_, {}};
        SystemModel& out = result.model;
        SynthesisReport& report = result.report;

        for (std::size_t i = 0; i < plans_.size(); ++i)
            if (active_[i])
                report.signals.push_back({plans_[i].name, plans_[i].from, plans_[i].to, plans_[i].to_state, plans_[i].reused});

        for (ModuleDiagram& m : out.modules) {
            for (DiagramTransition& t : additions_for(*model_.find_module(m.name), active_)) {
                report.added.push_back({m.name, m.transitions.size(), t});
                m.transitions.push_back(std::move(t));
            }
        }

        // Messages that already realize each plan in the output model.
        std::vector<SymbolSet> realizing(plans_.size());
        std::vector<SymbolSet> partner(plans_.size());
        for (std::size_t i = 0; i < plans_.size(); ++i) {
            if (!active_[i])
                continue;
            const ModuleDiagram& receiver = *out.find_module(plans_[i].to);
            SymbolSet candidates = messages_emitted_by(model_, plans_[i].from);
            candidates.insert(plans_[i].name);
            for (const Symbol& m : candidates)
                if (realizes(plans_[i], receiver, m))
                    realizing[i].insert(m);
            partner[i] = messages_of(plans_[i].to, active_);
        }

        for (ModuleDiagram& m : out.modules) {
            for (std::size_t ti = 0; ti < m.transitions.size(); ++ti) {
                DiagramTransition& t = m.transitions[ti];
                const std::size_t first_change = report.emitted.size();
                for (std::size_t i = 0; i < plans_.size(); ++i) {
                    const SignalPlan& p = plans_[i];
                    if (!active_[i] || p.from != m.name || !emits_for(p, t, partner[i]))
                        continue;
                    bool already = std::any_of(t.emits.begin(), t.emits.end(),
                                               [&](const Symbol& e) { return realizing[i].count(e) != 0; });
                    if (already)
                        continue;
                    t.emits.push_back(p.name);
                    report.emitted.push_back({m.name, ti, {}, p.name});
                }
                for (std::size_t k = first_change; k < report.emitted.size(); ++k)
                    report.emitted[k].transition = t;
            }
        }
        // Added transitions may have gained emissions afterwards.
        for (AddedTransition& a : report.added)
            a.transition = out.find_module(a.module)->transitions[a.transition_index];
        return result;
    }

    const SystemModel& model_;
    std::vector<SignalPlan> plans_;
    std::vector<bool> active_;
};

std::string transition_text(const DiagramTransition& t) {
    std::string out = t.source + " -> " + t.target + " on " + t.trigger;
    if (!t.emits.empty()) {
        out += " emit";
        for (const Symbol& e : t.emits)
            out += " " + e;
    }
    return out;
}

} // namespace

SynthesisResult synthesize(const SystemModel& model) { return Synthesizer(model).run(); }

std::string to_json(const SynthesisReport& report) {
    using nlohmann::ordered_json;
    ordered_json doc;
    doc["signals"] = ordered_json::array();
    for (const SynthesizedSignal& s : report.signals)
        doc["signals"].push_back(
            {{"name", s.name}, {"from", s.from_module}, {"to", s.to_module}, {"to_state", s.to_state}, {"reused", s.reused}});
    doc["emitted"] = ordered_json::array();
    for (const EmissionChange& e : report.emitted)
        doc["emitted"].push_back({{"module", e.module},
                                  {"index", e.transition_index},
                                  {"transition", transition_text(e.transition)},
                                  {"signal", e.signal}});
    doc["added"] = ordered_json::array();
    for (const AddedTransition& a : report.added)
        doc["added"].push_back(
            {{"module", a.module}, {"index", a.transition_index}, {"transition", transition_text(a.transition)}});
    return doc.dump(2) + "\n";
}

} // namespace csmw
