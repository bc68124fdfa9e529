#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lacldp/cli/config.hpp"

namespace lacldp::cli {

struct CommandResult {
  int exit_code = 0;
  std::vector<std::filesystem::path> files;
  std::string message;  // summary printed on stdout
};

CommandResult cmd_cgf(const RunConfig& config);
CommandResult cmd_rate(const RunConfig& config);
CommandResult cmd_sweep_q(const RunConfig& config);
CommandResult cmd_empirical(const RunConfig& config);
CommandResult cmd_verify(const RunConfig& config);
CommandResult cmd_dio(const RunConfig& config);

CommandResult dispatch(const RunConfig& config);

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

// Full command-line entry point: parses, dispatches, and reports errors as a
// one-line JSON object on stderr.
int run_main(int argc, char** argv);

}  // namespace lacldp::cli
