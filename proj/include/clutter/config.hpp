#pragma once

#include "clutter/armodel.hpp"
#include "clutter/continuation.hpp"
#include "clutter/dist.hpp"
#include "clutter/ilt.hpp"
#include "clutter/sampler.hpp"
#include "clutter/validate.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace clutter {

struct ARConfig {
  std::size_t order = 2;
  std::optional<std::vector<double>> coeffs;
  double threshold = kDefaultTruncationThreshold;
  std::size_t warmup_factor = 5;
};

enum class SampleFormat { Csv, F64le };

struct SimulateConfig {
  std::size_t length = 10000;
  double prf_hz = 1000.0;
  std::uint64_t seed = 1;
  SampleFormat format = SampleFormat::Csv;
  /// Emit complex clutter (texture, I, Q) instead of the texture alone.
  bool speckle = false;
  SpeckleOptions speckle_options;
};

struct ValidateConfig {
  std::size_t trials = 50;
  std::optional<std::size_t> bins;
  std::size_t lags = 200;
};

struct DiagnoseConfig {
  double omega_max = 30.0;
  std::size_t points = 301;
  /// PDF table upper limit; defaults to kappa_1 + 10 sd.
  std::optional<double> u_max;
  std::size_t pdf_points = 1024;
};

struct RunConfig {
  DistributionSpec distribution = DistributionSpec::gamma(1.0, 1.0);
  /// Optional when ar.coeffs is given.
  std::optional<ACFSpec> acf;
  ARConfig ar;
  RecoveryOptions pade;
  ILTParams ilt;
  SimulateConfig simulate;
  ValidateConfig validate;
  DiagnoseConfig diagnose;

  PipelineOptions pipeline_options() const;
  /// The prescribed ACF, or the AR model's own when only coefficients are
  /// configured.
  ACFSpec acf_spec() const;
  ValidationOptions validation_options() const;
};

/// One "path=value" override. The value is parsed as JSON when possible and
/// kept as a string otherwise.
struct Override {
  std::string path;
  nlohmann::json value;
};

/// Parses "pade.K=12" (a leading "--" is accepted). Throws ConfigError.
Override parse_override(std::string_view text);

/// Applies overrides in order to a raw config document; intermediate objects
/// are created as needed. Unknown keys are caught later by parse_config.
nlohmann::json apply_overrides(nlohmann::json raw, std::span<const Override> overrides);

/// Strict parse: unknown keys, wrong types and invalid parameter values all
/// raise ConfigError.
RunConfig parse_config(const nlohmann::json& j);

/// Reads JSON from disk (ConfigError on I/O or syntax errors), applies the
/// overrides and parses.
RunConfig load_config(const std::filesystem::path& path, std::span<const Override> overrides = {});

/// Fully resolved document: every block with every default filled in.
/// parse_config(to_json(c)) reproduces c.
nlohmann::json to_json(const RunConfig& config);

}  // namespace clutter
