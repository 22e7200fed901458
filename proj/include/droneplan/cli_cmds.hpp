#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace droneplan {

// Command-line overrides applied on top of the scenario file fields.
struct CliOverrides {
    std::optional<double> step_size;
    std::optional<double> lambda0;
    std::optional<double> merge_threshold;
    std::optional<std::string> ordering;
    std::optional<std::uint64_t> seed;
};

// Exit-code contract shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitSuiteFailure = 1;
inline constexpr int kExitParse = 2;
inline constexpr int kExitInfeasible = 3;
inline constexpr int kExitNumerical = 4;

int cmd_plan(const std::string& scenario_path, double target_length, const std::string& out_dir,
             const CliOverrides& overrides, std::ostream& out, std::ostream& err);

int cmd_sweep(const std::string& scenario_path, const std::string& out_dir,
              const CliOverrides& overrides, std::ostream& out, std::ostream& err);

int cmd_validate(const std::string& scenario_path, const CliOverrides& overrides,
                 std::ostream& out, std::ostream& err);

}  // namespace droneplan
