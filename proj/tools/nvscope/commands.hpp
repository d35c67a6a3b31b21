#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

namespace nvscope::app {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitNumerical = 3,
  kExitVerify = 4,
};

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;   // overrides the config seed
  unsigned threads = 0;                // 0: NVSCOPE_THREADS or hardware concurrency
  std::filesystem::path output_dir = ".";
  std::optional<std::filesystem::path> input;  // overrides the default input file
  bool verify = false;
};

/// Runs one subcommand (simulate, acquire, fit, stitch, report, contours) and maps errors to
/// exit codes. With verify set, only checks the command's manifest against the files on disk.
int run_command(std::string_view command, const GlobalOptions &opts, std::ostream &out,
                std::ostream &err);

} // namespace nvscope::app
