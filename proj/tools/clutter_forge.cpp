#include "commands.hpp"

#include "clutter/error.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace clutter;

struct Args {
  std::string config;
  std::string output;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> length;
  std::optional<std::size_t> trials;
  std::optional<std::string> format;
  bool serial = false;
};

CLI::App* add_command(CLI::App& app, const char* name, const char* help, Args& args,
                      const char* default_output) {
  auto* sub = app.add_subcommand(name, help);
  sub->allow_extras();
  sub->add_option("config", args.config, "Run configuration (JSON)")->required();
  args.output = default_output;
  sub->add_option("-o,--output", args.output, "Output path prefix")->capture_default_str();
  sub->add_option("--set", args.sets, "Override path=value (repeatable)");
  sub->add_option("--seed", args.seed, "Override simulate.seed");
  sub->add_option("--length", args.length, "Override simulate.length");
  sub->add_flag("--serial", args.serial, "Use the serial reference kernels");
  return sub;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Correlated non-Gaussian clutter synthesis"};
  app.require_subcommand(1);
  Args args;
  auto* simulate = add_command(app, "simulate", "Generate one sample sequence", args, "samples");
  simulate->add_option("--format", args.format, "Override simulate.format (csv|f64le)");
  auto* validate = add_command(app, "validate", "Monte Carlo PDF/ACF MAE report", args, "validation");
  validate->add_option("--trials", args.trials, "Override validate.trials");
  auto* diagnose = add_command(app, "diagnose", "Compare both continuation paths", args, "diagnose");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  configure_threads();
  try {
    std::vector<Override> overrides;
    auto* active = app.get_subcommands().front();
    for (const auto& extra : active->remaining()) overrides.push_back(parse_override(extra));
    for (const auto& s : args.sets) overrides.push_back(parse_override(s));
    if (args.seed) overrides.push_back({"simulate.seed", *args.seed});
    if (args.length) overrides.push_back({"simulate.length", *args.length});
    if (args.trials) overrides.push_back({"validate.trials", *args.trials});
    if (args.format) overrides.push_back({"simulate.format", *args.format});

    cli::Invocation inv{load_config(args.config, overrides), overrides, args.output,
                        args.serial ? Execution::Serial : Execution::Parallel};
    std::vector<std::filesystem::path> files;
    if (active == simulate) {
      files = cli::cmd_simulate(inv);
    } else if (active == validate) {
      files = cli::cmd_validate(inv);
    } else if (active == diagnose) {
      files = cli::cmd_diagnose(inv);
    }
    for (const auto& f : files) std::cout << f.string() << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cerr << cli::error_record(e).dump() << '\n';
    return cli::exit_code_for(e);
  }
}
