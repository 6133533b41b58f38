#pragma once

#include "csmw/error.hpp"
#include "csmw/guard.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace csmw {

/// Line in the source `.csmdl` file, 0 when the element was built in code.
/// Location is metadata: it never takes part in model equality.
struct SourceLine {
    int value = 0;
    friend bool operator==(SourceLine, SourceLine) noexcept { return true; }
};

enum class Origin { Authored, Synthesized };

/// `source -> target on trigger [emit ...]`. Endpoints are state names of
/// the owning module (or of the owning refinement).
struct DiagramTransition {
    std::string source;
    std::string target;
    Symbol trigger;
    std::vector<Symbol> emits;
    Origin origin = Origin::Authored;
    SourceLine line;

    bool operator==(const DiagramTransition&) const = default;
};

struct ModuleDiagram {
    std::string name;
    std::vector<std::string> states;
    std::string initial;
    std::vector<DiagramTransition> transitions;
    SourceLine line;

    bool has_state(std::string_view state) const;
    /// Index of `state` in `states`, or -1.
    int state_index(std::string_view state) const;

    bool operator==(const ModuleDiagram&) const = default;
};

/// "If `from_module` changes to `from_state`, `to_module` must become `to_state`."
struct EnforcementConstraint {
    std::string from_module;
    std::string to_module;
    std::string from_state;
    std::string to_state;
    SourceLine line;

    bool operator==(const EnforcementConstraint&) const = default;
};

/// Sub-diagram describing the super-state `module.super_state`.
struct Refinement {
    std::string module;
    std::string super_state;
    std::vector<std::string> substates;
    std::string sub_initial;
    std::vector<DiagramTransition> transitions;
    SourceLine line;

    bool has_substate(std::string_view state) const;

    bool operator==(const Refinement&) const = default;
};

struct EventSplit {
    Symbol abstract_event;
    std::vector<Symbol> concrete;
    SourceLine line;

    bool operator==(const EventSplit&) const = default;
};

/// Substates of `module.super_state` in which `event` is accepted.
struct Acceptance {
    Symbol event;
    std::string module;
    std::string super_state;
    std::vector<std::string> substates;
    SourceLine line;

    bool operator==(const Acceptance&) const = default;
};

struct EventHierarchy {
    std::vector<EventSplit> splits;
    std::vector<Acceptance> acceptance;

    const EventSplit* split_of(std::string_view abstract_event) const;
    const Acceptance* acceptance_of(std::string_view event, std::string_view module,
                                    std::string_view super_state) const;
    bool empty() const noexcept { return splits.empty() && acceptance.empty(); }

    bool operator==(const EventHierarchy&) const = default;
};

struct SystemModel {
    std::string name;
    std::vector<ModuleDiagram> modules;
    std::vector<EnforcementConstraint> constraints;
    std::vector<Refinement> refinements;
    EventHierarchy hierarchy;

    const ModuleDiagram* find_module(std::string_view module) const;
    ModuleDiagram* find_module(std::string_view module);

    bool operator==(const SystemModel&) const = default;
};

enum class EventCategory { External, InterModule, Acknowledgement };

/// Classified event. External events come from "Env"; `to` is the first
/// module that consumes the event (empty if none does).
struct Event {
    Symbol name;
    EventCategory category = EventCategory::External;
    std::string from;
    std::string to;

    bool operator==(const Event&) const = default;
};

inline constexpr std::string_view kEnvironment = "Env";
inline constexpr std::string_view kAckPrefix = "ac_";

std::string_view to_string(EventCategory category);

/// Every event of the model in first-appearance order (module order, then
/// transition order, refinements after their module). Events emitted by some
/// module are inter-module messages; all other triggers are external. Split
/// concrete events are external events of the module consuming the abstract.
std::vector<Event> classify_events(const SystemModel& model);

/// External events with every split abstract event replaced by its concrete
/// events, in first-appearance order.
std::vector<Symbol> env_alphabet(const SystemModel& model);

/// Messages emitted anywhere in `module` (its transitions and refinements).
SymbolSet messages_emitted_by(const SystemModel& model, std::string_view module);

struct Diagnostic {
    std::string code;
    std::string message;
    int line = 0;

    bool operator==(const Diagnostic&) const = default;
};

std::string format_diagnostic(const Diagnostic& diagnostic);

/// One diagnostic per violated model invariant, in a stable order; empty iff
/// the model is well formed.
std::vector<Diagnostic> validate(const SystemModel& model);

/// Raised when a model fails validation; carries every diagnostic.
class ModelError : public Error {
public:
    explicit ModelError(std::vector<Diagnostic> diagnostics);

    const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

private:
    std::vector<Diagnostic> diagnostics_;
};

/// Parses the `.csmdl` text without semantic checks. Throws ModelSyntaxError.
SystemModel parse_model_unchecked(std::string_view text);

/// Parses and validates. Throws ModelSyntaxError or ModelError.
SystemModel parse_model(std::string_view text);

/// Renders the model back to `.csmdl`. Synthesized transitions are written
/// with the `synth` keyword so their origin survives a round trip.
std::string render_model(const SystemModel& model);

} // namespace csmw
