#pragma once

#include "csmw/model.hpp"

#include <vector>

namespace csmw {

struct FlattenResult {
    SystemModel model;
    /// Non-fatal findings, e.g. `acceptance-unused`.
    std::vector<Diagnostic> diagnostics;
};

/// Replaces every refined super-state by its substates.
///
/// Split abstract events are first expanded into one transition per
/// concrete event. Then, per refinement: transitions entering the
/// super-state land in its initial substate; transitions leaving it on
/// event `e` are replicated from each substate in which `e` is accepted
/// (all substates when no acceptance entry exists); internal transitions
/// are appended after the module's own. Refinements of substates are
/// resolved by repeated application. The result has no refinements, no
/// splits and no acceptance entries. Constraints that mention a refined
/// super-state are dropped: they were already compiled by synthesis and
/// have no meaning over substates.
///
/// Throws Error("split-emitted") if a split event is emitted by a module.
FlattenResult flatten(const SystemModel& model);

} // namespace csmw
