#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "gkdv/errors.hpp"
#include "gkdv/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"gkdv: pseudospectral laboratory for u_t + u_xxx +- |u|^alpha u_x = 0"};
  app.set_version_flag("--version", gkdv::version());
  app.require_subcommand(1);

  struct Args {
    std::string config, out;
    std::uint64_t seed = 0;
  };
  Args args;
  for (const char* name : {"simulate", "picard", "regularity", "validate"}) {
    auto* sub = app.add_subcommand(name);
    auto* cfg = sub->add_option("--config", args.config, "configuration file (section.key = value)");
    if (std::string(name) != "validate") cfg->required();
    sub->add_option("--out", args.out, "output directory (overrides output.dir)");
    sub->add_option("--seed", args.seed, "seed for randomized data (overrides run.seed)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(gkdv::ExitCode::config);
  }

  const auto* sub = app.get_subcommands().front();
  std::optional<std::filesystem::path> config, out;
  std::optional<std::uint64_t> seed;
  if (sub->count("--config")) config = args.config;
  if (sub->count("--out")) out = args.out;
  if (sub->count("--seed")) seed = args.seed;
  return gkdv::run_cli(gkdv::parse_command(sub->get_name()), config, out, seed);
}
