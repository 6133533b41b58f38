#pragma once

#include "csmw/guard.hpp"
#include "csmw/model.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace csmw {

enum class CsmStateKind { Base, SenderWait, ReceiverAck };

std::string_view to_string(CsmStateKind kind);

/// Moore-style state: `outputs` are audible to every machine while the
/// machine sits here.
struct CsmState {
    std::string name;
    SymbolSet outputs;
    CsmStateKind kind = CsmStateKind::Base;
    /// Diagram state an intermediate was split from; empty for base states.
    std::string base_source;
    /// Messages a sender-wait state sends, or the single message a
    /// receiver-ack state acknowledges. Unaffected by the remedy.
    std::vector<Symbol> messages;

    bool operator==(const CsmState&) const = default;
};

struct CsmTransition {
    std::size_t source = 0;
    std::size_t target = 0;
    Guard guard;

    bool operator==(const CsmTransition&) const = default;
};

struct CsmMachine {
    std::string name;
    std::vector<CsmState> states;
    std::size_t initial = 0;
    std::vector<CsmTransition> transitions;

    /// Index of the named state, or -1.
    int state_index(std::string_view state) const;

    bool operator==(const CsmMachine&) const = default;
};

struct CsmSystem {
    std::string name;
    std::vector<CsmMachine> machines;
    std::vector<Symbol> env_alphabet;
    /// Inter-module messages followed by their acknowledgements.
    std::vector<Symbol> internal_alphabet;

    std::vector<std::size_t> initial_state() const;

    bool operator==(const CsmSystem&) const = default;
};

enum class RemedyMode { None, RedundantAck };

/// Acknowledgement symbol for message `m`: `ac_m`.
Symbol ack_symbol(std::string_view message);

/// Translates a flat, synthesized model into CSM machines, one per module.
///
/// For a diagram transition `p -> q on e [emit M]`:
///  * external `e`, no emissions: `p -(e)-> q`;
///  * emissions: a sender-wait state `w` producing M, `p -(e)-> w` and
///    `w -(ac_m1 * ac_m2 ...)-> q`;
///  * inter-module message `e`: a receiver-ack state `r` producing `ac_e`,
///    `p -(e)-> r -(1)-> q`;
///  * a message that also emits gets both intermediates, receiver first.
///
/// Intermediates are named `<p><letter>`, letters a, b, ... counted per
/// source state in transition order. Throws Error("not-flat") if the model
/// still has refinements or an event hierarchy, and
/// Error("state-name-collision") if a generated name is already taken.
CsmSystem translate(const SystemModel& flat_model);

/// Every sender-wait state split from `p` additionally produces `ac_m` for
/// each message `m` that `p` accepts through a receiver-ack state. Adds
/// outputs only; idempotent.
CsmSystem apply_remedy(const CsmSystem& system);

/// Structural invariants of a CSM system (used for hand-built systems).
std::vector<Diagnostic> validate(const CsmSystem& system);

/// JSON document: machines with states and transitions, alphabets, initial
/// joint state. Pretty-printed with a trailing newline.
std::string to_json(const CsmSystem& system);

} // namespace csmw
