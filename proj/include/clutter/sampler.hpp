#pragma once

#include "clutter/armodel.hpp"
#include "clutter/continuation.hpp"
#include "clutter/dist.hpp"
#include "clutter/parallel.hpp"
#include "clutter/rng.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

namespace clutter {

/// Draw with Laplace transform exp(-lambda s / (s + a)): a Poisson(lambda)
/// number of Exp(a) variates summed, i.e. Erlang(k, 1/a) given k > 0.
double sample_zj(double a, double lambda, RngStream& rng);

/// One AR input variate: the recorded shift plus one draw per term.
double sample_u(const PoleResidueForm& prf, RngStream& rng);

/// Inputs are drawn in chunks of this size, chunk c from rng.split(c).
inline constexpr std::size_t kInputChunk = 4096;

std::vector<double> generate_inputs(const PoleResidueForm& prf, std::size_t n,
                                    const RngStream& rng, Execution exec = Execution::Parallel);

struct PipelineOptions {
  /// Yule-Walker order (ignored when ar_coeffs is set).
  std::size_t ar_order = 2;
  /// Explicit AR coefficients in the y(m) = -sum a_k y(m-k) + u(m)
  /// convention; bypass fitting.
  std::optional<std::vector<double>> ar_coeffs;
  double truncation_threshold = kDefaultTruncationThreshold;
  RecoveryOptions pade;
  /// Warm-up length in units of L_IR.
  std::size_t warmup_factor = 5;
};

/// Deterministic part of the pipeline: AR model, cumulants, recovered input
/// transform. Independent of the seed, so it is built once per
/// configuration.
struct PipelineModel {
  DistributionSpec spec;
  ARModel ar;
  CumulantVector output_cumulants;
  CumulantVector input_cumulants;
  RecoveredLT input;
  double input_mean = 0.0;
  double output_mean = 0.0;
  std::size_t warmup_factor = 5;
};

/// Model fit, impulse response, cumulant back-solve and continuation.
/// Failures are rethrown as PipelineError naming the stage.
PipelineModel build_pipeline(const DistributionSpec& spec, const ACFSpec& acf,
                             const PipelineOptions& options);

struct TextureSequence {
  std::vector<double> v;
  std::size_t warmup = 0;
  std::size_t negative_sample_count = 0;
};

/// Draws the inputs from stream.split(0), removes the input mean, runs the
/// AR recursion, drops the warm-up and adds the output mean.
TextureSequence synthesize(const PipelineModel& model, std::size_t length,
                           const RngStream& stream, Execution exec = Execution::Parallel);

TextureSequence run_pipeline(const DistributionSpec& spec, const ACFSpec& acf,
                             const PipelineOptions& options, std::size_t length,
                             std::uint64_t seed, Execution exec = Execution::Parallel);

struct SpeckleOptions {
  /// Variance of each quadrature component.
  double variance = 2.0;
  /// When set, each quadrature is shaped to a Gaussian autocorrelation
  /// exp(-k^2 / (2 w^2)) with this width w in samples.
  std::optional<double> doppler_width;
  std::size_t doppler_order = 4;
};

struct ClutterSequence {
  std::vector<std::complex<double>> x;
  std::size_t clamp_count = 0;
};

/// x(m) = sqrt(v(m)) (z_I(m) + i z_Q(m)) with speckle drawn from
/// stream.split(1). Negative texture is clamped to 0 and counted.
ClutterSequence assemble_cg(const TextureSequence& texture, const SpeckleOptions& options,
                            const RngStream& stream, Execution exec = Execution::Parallel);

}  // namespace clutter
