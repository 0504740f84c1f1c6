#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace leadform {

/// Stable exit codes for scripting.
enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitInputError = 2 };

struct CommandOptions {
    std::optional<std::filesystem::path> scenario;
    std::optional<std::filesystem::path> out_dir;
    std::optional<double> dt;
    std::optional<double> horizon;
    std::optional<std::string> policy;
    std::uint64_t seed = 1;
    std::optional<std::filesystem::path> matrix;  // verify: closed-loop matrix file
    int random_size = 0;                          // verify: random cross-check size
    bool json = false;                            // machine-readable stdout
};

int cmd_check(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_synth(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_protocol(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_simulate(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_verify(const CommandOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace leadform
