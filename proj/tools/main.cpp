#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "airydim/errors.hpp"
#include "cli/commands.hpp"
#include "cli/config.hpp"

using namespace airydim;

int main(int argc, char** argv) {
  CLI::App app{"Airy process level sets, fractal dimension and tail checks"};
  app.require_subcommand(1);

  std::string config_path, manifest_path;
  std::vector<std::string> overrides;
  int threads = -1;
  bool keys_only = false;

  for (cli::Command c : cli::all_commands()) {
    auto* sub = app.add_subcommand(std::string(cli::to_string(c)));
    sub->add_option("--config,-c", config_path, "key=value config file");
    sub->add_option("--manifest", manifest_path, "repeat the run recorded in a manifest.json");
    sub->add_option("--set", overrides, "override one key, e.g. --set N=4000")->take_all();
    sub->add_option("--threads", threads, "worker threads (0 = all cores)");
    sub->add_flag("--keys", keys_only, "list accepted keys and exit");
  }

  CLI11_PARSE(app, argc, argv);
  const cli::Command command = cli::parse_command(app.get_subcommands().front()->get_name());

  if (keys_only) {
    std::cout << cli::describe_keys(command);
    return 0;
  }

  try {
    cli::RawConfig raw;
    if (!manifest_path.empty()) {
      cli::Command recorded = command;
      raw = cli::config_from_manifest(manifest_path, recorded);
      if (recorded != command)
        throw cli::ConfigError({"manifest records command '" + std::string(cli::to_string(recorded)) + "'"});
    }
    if (!config_path.empty()) {
      const cli::RawConfig file = cli::read_config_file(config_path);
      if (raw.entries.empty()) raw = file;  // keeps line numbers for diagnostics
      else
        for (const auto& [k, v] : file.entries) cli::apply_override(raw, k + "=" + v);
    }
    for (const auto& o : overrides) cli::apply_override(raw, o);
    if (threads >= 0) cli::apply_override(raw, "threads=" + std::to_string(threads));

    const cli::SimConfig cfg = cli::validate(command, raw);
    const cli::RunResult result = cli::run(cfg);
    for (const auto& f : result.files) std::cout << (result.output_dir / f).string() << "\n";
    if (result.exit_code != 0) std::cerr << "airydim: " << result.message << "\n";
    return result.exit_code;
  } catch (const cli::ConfigError& e) {
    for (const auto& d : e.diagnostics()) std::cerr << "config: " << d << "\n";
    return cli::exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "airydim: " << e.what() << "\n";
    return cli::exit_code_for(e);
  }
}
