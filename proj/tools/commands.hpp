#pragma once

#include "clutter/config.hpp"
#include "clutter/parallel.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace clutter::cli {

/// Everything a subcommand needs besides the parsed config.
struct Invocation {
  RunConfig config;
  /// Overrides in the order applied (dotted paths first, then flags).
  std::vector<Override> overrides;
  /// Output files are named <prefix>.<ext>, <prefix>_<table>.csv, ...
  std::filesystem::path output_prefix;
  Execution exec = Execution::Parallel;
};

/// Samples file plus <prefix>.json sidecar. Returns the files written.
std::vector<std::filesystem::path> cmd_simulate(const Invocation& inv);

/// <prefix>.json report plus <prefix>_pdf.csv and <prefix>_acf.csv plot data
/// from trial 0.
std::vector<std::filesystem::path> cmd_validate(const Invocation& inv);

/// <prefix>_lt.csv, <prefix>_pdf.csv and <prefix>.json. A failing
/// continuation path is recorded, not fatal.
std::vector<std::filesystem::path> cmd_diagnose(const Invocation& inv);

/// Shortest round-trip decimal form.
std::string format_double(double x);

/// Machine-readable error record; exit code 2 for config errors, 3 otherwise.
nlohmann::json error_record(const std::exception& e);
int exit_code_for(const std::exception& e);

}  // namespace clutter::cli
