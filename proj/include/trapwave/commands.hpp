#pragma once

#include <filesystem>
#include <string>

#include "trapwave/run_config.hpp"

namespace trapwave {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitConfig = 2,
    kExitNumerical = 3,
    kExitEnvelope = 4,
};

/// Each command writes its artifacts into `out` (created if missing) and
/// returns an exit code. Exceptions escape; run_command maps them to codes.
int cmd_resonances(const RunConfig& config, const std::filesystem::path& out);
int cmd_sweep(const RunConfig& config, const std::filesystem::path& out);
int cmd_layer_sweep(const RunConfig& config, const std::filesystem::path& out);
int cmd_exclusion(const RunConfig& config, const std::filesystem::path& out);
int cmd_certify(const RunConfig& config, const std::filesystem::path& out);

/// Loads the config, dispatches on `command` and maps failures to exit codes
/// (config errors 2, numerical failures 3). Messages go to stderr.
int run_command(const std::string& command, const std::filesystem::path& config_path,
                const std::filesystem::path& out);

/// Shortest decimal that round-trips to the same double.
std::string format_number(double x);

}  // namespace trapwave
