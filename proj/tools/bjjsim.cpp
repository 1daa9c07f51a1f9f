// bjjsim: experiments on a two-mode Bose Josephson junction with phase noise.
//
//   bjjsim visibility      [--config c.json] [--out visibility.csv]
//   bjjsim cat-relaxation  [--config c.json] [--out dir/]
//   bjjsim fisher-scan     [--config c.json] [--out fisher.csv]
//   bjjsim mc-validate     [--config c.json] [--out report.json] [--ensemble-out phases.csv]
//
// Exit status: 0 all validation gates pass, 1 a gate failed, 2 bad configuration
// or domain error, 3 I/O error, 4 numerical failure.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cli/commands.hpp"
#include "cli/config.hpp"

int main(int argc, char** argv) {
  using namespace bjj::cli;

  CLI::App app{"Bose Josephson junction phase-noise simulator"};
  app.require_subcommand(1);

  std::string config_path, out_path, format, ensemble_out;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  bool print_config = false;

  for (const auto& name : command_names()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", out_path, "output file (directory for cat-relaxation)");
    sub->add_option("--format", format, "tabular output format")->check(CLI::IsMember({"csv", "json-lines"}));
    sub->add_option("--seed", seed, "Monte-Carlo seed");
    sub->add_option("--threads", threads, "worker threads (0: all cores)");
    sub->add_flag("--print-config", print_config, "print the effective configuration and exit");
    if (name == "mc-validate") sub->add_option("--ensemble-out", ensemble_out, "dump sampled phases");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;  // --help is not an error
  }
  const std::string command = app.get_subcommands().front()->get_name();
  const auto* sub = app.get_subcommands().front();

  try {
    RunConfig config = config_path.empty() ? default_config(command) : load_config(config_path, command);
    if (!out_path.empty()) config.output.path = out_path;
    if (!format.empty()) config.output.format = format_from_string(format);
    if (sub->count("--seed")) config.mc.seed = seed;
    if (sub->count("--threads")) config.threads = threads;
    validate(config);

    if (print_config) {
      std::cout << serialize(config);
      return kExitOk;
    }
    std::optional<std::filesystem::path> ensemble;
    if (!ensemble_out.empty()) ensemble = ensemble_out;
    return run_command(config, std::cerr, ensemble);
  } catch (...) {
    return exit_code_for_current_exception(std::cerr);
  }
}
