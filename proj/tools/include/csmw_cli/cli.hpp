#pragma once

#include "csmw/csm.hpp"
#include "csmw/hierarchy.hpp"
#include "csmw/reachability.hpp"
#include "csmw/synthesis.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace csmw::cli {

/// Process exit codes shared by every command.
enum ExitCode : int { kClean = 0, kFailure = 1, kFindings = 2 };

enum class ReportFormat { Text, Json };
enum class ExportFormat { Json, Dot };

struct RunConfig {
    std::string input;
    RemedyMode remedy = RemedyMode::None;
    std::optional<std::string> json_path;
    std::optional<std::string> dot_path;
    /// Model written by `synth` and `flatten`; derived from `input` if unset.
    std::optional<std::string> output_path;
    std::optional<std::string> script_path;
    std::size_t max_states = kDefaultMaxStates;
    ReportFormat format = ReportFormat::Text;
    ExportFormat export_format = ExportFormat::Json;
};

/// One env set per step.
struct EnvScript {
    std::vector<SymbolSet> steps;
};

/// One whitespace-separated env set per line, `-` for the empty set; blank
/// lines and `#` comments are skipped. Throws Error("unknown-env-symbol")
/// for symbols outside the system's env alphabet.
EnvScript parse_env_script(std::string_view text, const CsmSystem& system);

/// Every stage of the pipeline for one input file.
struct Pipeline {
    SystemModel parsed;
    SynthesisResult synthesized;
    FlattenResult flat;
    CsmSystem system;
};

/// parse -> validate -> synth -> flatten -> translate (-> remedy).
Pipeline run_pipeline(const std::string& path, RemedyMode remedy);

/// Cap from CSMW_MAX_STATES, or the library default when unset. Throws
/// Error("usage") if the variable is not a positive integer.
std::size_t max_states_from_env();

int cmd_check(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_synth(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_flatten(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_translate(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_reach(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_export(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches; used by the `csmw` executable and tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace csmw::cli
