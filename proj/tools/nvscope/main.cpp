#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "manifest.hpp"

int main(int argc, char **argv) {
  using namespace nvscope::app;
  CLI::App app{"NV-diamond microwave near-field imaging simulator and analysis toolkit", "nvscope"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  GlobalOptions opts;
  std::string output = ".";
  std::string input;
  std::uint64_t seed = 0;
  auto *cfg_opt = app.add_option("--config", opts.config_path, "Scenario JSON")->check(CLI::ExistingFile);
  auto *seed_opt = app.add_option("--seed", seed, "Noise seed (overrides the config)");
  app.add_option("--threads", opts.threads, "Worker threads (0: automatic)")->envname("NVSCOPE_THREADS");
  app.add_option("--output", output, "Output directory");
  app.add_option("--input", input, "Input file overriding the default in the output directory");
  app.add_flag("--verify", opts.verify, "Check existing outputs against the command's manifest");
  cfg_opt->configurable(false);

  const char *commands[][2] = {
      {"simulate", "Forward Biot-Savart simulation: phasor and polarized field maps"},
      {"acquire", "Synthesize a Rabi image cube and/or a timed frame stream"},
      {"fit", "Pixel-wise Rabi fit of an image cube into a field map"},
      {"stitch", "Combine overlapping field-map tiles"},
      {"report", "Line cuts, insertion loss, trap, dynamic range and sensitivity metrics"},
      {"contours", "Iso-B ridge extraction and counting calibration"}};
  for (const auto &c : commands)
    app.add_subcommand(c[0], c[1])->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  if (*seed_opt)
    opts.seed = seed;
  opts.output_dir = output;
  if (!input.empty())
    opts.input = input;
  const auto subs = app.get_subcommands();
  return run_command(subs.front()->get_name(), opts, std::cout, std::cerr);
}
