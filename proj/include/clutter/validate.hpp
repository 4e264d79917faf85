#pragma once

#include "clutter/parallel.hpp"
#include "clutter/sampler.hpp"

#include <json.hpp>

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace clutter {

/// (1/L) sum |theoretical_i - empirical_i|.
double mae(std::span<const double> theoretical, std::span<const double> empirical);

struct Histogram {
  std::vector<double> centers;
  std::vector<double> density;
  double lo = 0.0;
  double width = 0.0;
};

/// Density histogram with equal-width bins spanning [min, max] of the data.
Histogram empirical_pdf(std::span<const double> samples, std::size_t n_bins);

/// round(sqrt(n)).
std::size_t default_bin_count(std::size_t n);

/// Biased, mean-removed autocovariance normalized by lag 0: r_0..r_{n_lags}.
std::vector<double> empirical_acf(std::span<const double> samples, std::size_t n_lags,
                                  Execution exec = Execution::Parallel);

struct LTEstimate {
  std::complex<double> value;
  /// Standard errors of the real and imaginary parts of the mean.
  double se_real = 0.0;
  double se_imag = 0.0;
};

/// (1/N) sum exp(-s x_i) at each s.
std::vector<LTEstimate> empirical_lt(std::span<const double> samples,
                                     std::span<const std::complex<double>> s,
                                     Execution exec = Execution::Parallel);

/// Theoretical curves the trials are scored against.
struct ValidationReference {
  std::vector<double> grid;  // uniform
  std::vector<double> pdf;
  std::vector<double> acf;  // r_0..r_{n_lags}

  /// Linear interpolation of the reference density; 0 outside the grid.
  double pdf_at(double x) const;
};

/// Reference built from the prescribed distribution and ACF. With explicit
/// AR coefficients the prescribed ACF is that of the AR model itself.
ValidationReference make_reference(const PipelineModel& model, const ACFSpec& acf,
                                   const PipelineOptions& options, std::size_t n_lags,
                                   const ILTParams& ilt = {});

struct TrialResult {
  double pdf_mae = 0.0;
  double acf_mae = 0.0;
  std::size_t negative_count = 0;
};

/// PDF MAE over the histogram bins and ACF MAE over lags 1..n_lags.
TrialResult score_trial(std::span<const double> v, const ValidationReference& ref,
                        std::size_t n_bins, std::size_t n_lags,
                        Execution exec = Execution::Serial);

struct ValidationOptions {
  std::size_t trials = 50;
  std::size_t length = 10000;
  std::optional<std::size_t> bins;
  std::size_t lags = 200;
  std::uint64_t seed = 1;
};

struct ValidationReport {
  double pdf_mae = 0.0;
  double acf_mae = 0.0;
  std::size_t n_bins = 0;
  std::size_t n_lags = 0;
  std::size_t trial_count = 0;
  std::size_t length = 0;
  double wall_time_s = 0.0;
  std::size_t discarded_pole_count = 0;
  double negative_fraction = 0.0;
  std::vector<TrialResult> trials;
};

void to_json(nlohmann::json& j, const ValidationReport& r);

/// Trial t draws from RngStream(seed).split(t); results are combined in trial
/// order whatever the schedule.
ValidationReport monte_carlo(const PipelineModel& model, const ValidationReference& ref,
                             const ValidationOptions& options,
                             Execution exec = Execution::Parallel);

}  // namespace clutter
