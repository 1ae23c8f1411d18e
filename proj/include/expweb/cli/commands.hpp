#pragma once

#include <ostream>
#include <string>

#include "expweb/cli/config.hpp"

namespace expweb::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitConfig = 2;

struct CommandResult {
  int exit_code = kExitPass;
  json report;
  std::string summary;  // human-readable lines for stdout
};

CommandResult cmd_verify(const RunConfig& cfg);
CommandResult cmd_render(const RunConfig& cfg);
CommandResult cmd_area(const RunConfig& cfg);
CommandResult cmd_web(const RunConfig& cfg);

/// Dispatches on cfg.command, writes the JSON report to cfg.out (render
/// writes the image there and the report beside it) and maps errors onto
/// exit codes: ConfigError gives 2, any other library error 1.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// Sidecar path for a render output: foo.ppm -> foo.json, otherwise foo.json appended.
std::string sidecar_path(const std::string& image_path);

}  // namespace expweb::cli
