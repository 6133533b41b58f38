#pragma once

#include "csmw/model.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace csmw {

/// Inter-module signal realizing one or more enforcement constraints that
/// share the same (source module, target module, target state).
struct SynthesizedSignal {
    Symbol name;
    std::string from_module;
    std::string to_module;
    std::string to_state;
    /// True when an existing message already realized the constraint.
    bool reused = false;

    bool operator==(const SynthesizedSignal&) const = default;
};

/// An existing transition of `module` that now also emits `signal`.
struct EmissionChange {
    std::string module;
    std::size_t transition_index = 0;
    DiagramTransition transition; // as it appears in the output model
    Symbol signal;

    bool operator==(const EmissionChange&) const = default;
};

/// A transition appended to `module` with origin Synthesized.
struct AddedTransition {
    std::string module;
    std::size_t transition_index = 0;
    DiagramTransition transition;

    bool operator==(const AddedTransition&) const = default;
};

struct SynthesisReport {
    std::vector<SynthesizedSignal> signals;
    std::vector<EmissionChange> emitted;
    std::vector<AddedTransition> added;

    bool changed() const noexcept { return !emitted.empty() || !added.empty(); }

    bool operator==(const SynthesisReport&) const = default;
};

struct SynthesisResult {
    SystemModel model;
    SynthesisReport report;
};

/// Turns every enforcement constraint `A -> B : a b` into explicit
/// synchronization:
///
///  * each transition of A entering `a` emits a signal that moves B to `b`,
///    unless the transition was itself triggered by a message from B (echo
///    suppression);
///  * B gains `x -> b` on that signal for every state `x != b`, appended
///    after its existing transitions in state order.
///
/// Signals are named `s<x><b>` when B has a single state other than `b`,
/// and `s_<b>` otherwise; clashes get a `_<A>` suffix. A message of A that
/// already moves B into `b`, and nowhere else, is reused instead; B then
/// gains the missing `x -> b` transitions on that message.
/// Signals no transition would emit are dropped. The transform is
/// idempotent and only ever appends.
///
/// Throws Error("constraint-conflict") when two constraints force the same
/// state of A onto different states of the same partner.
SynthesisResult synthesize(const SystemModel& model);

/// Pretty-printed JSON (two-space indent, trailing newline).
std::string to_json(const SynthesisReport& report);

} // namespace csmw
