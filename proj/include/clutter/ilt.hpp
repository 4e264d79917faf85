#pragma once

#include "clutter/parallel.hpp"

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace clutter {

using LaplaceFunction = std::function<std::complex<double>(std::complex<double>)>;

struct ILTParams {
  /// Initial number of frequency samples. Doubled until the node spacing is
  /// at most half the output grid spacing, the transform has decayed below
  /// decay_threshold and the interpolation error estimate is below
  /// interpolation_tolerance (relative to the peak), or ls_max is reached.
  std::size_t ls = 16384;
  std::size_t ls_max = std::size_t{1} << 18;
  /// Contour abscissa; defaults to 2 / u_max.
  std::optional<double> sigma;
  double decay_threshold = 1e-8;
  double interpolation_tolerance = 1e-6;
  /// Period of the Fourier series in units of u_max.
  double period_factor = 8.0;
  /// Parallel evaluation of the frequency samples requires a thread-safe
  /// transform.
  Execution execution = Execution::Serial;
};

/// Largest tail magnitude tolerated at ls_max before NonDecayingLT.
inline constexpr double kNonDecayingLimit = 1e-4;
/// Values below -kNegativeDensityTolerance count as negative density.
inline constexpr double kNegativeDensityTolerance = 1e-6;

struct ILTResult {
  std::vector<double> density;
  /// Point mass at 0 (limit of the transform at infinity), removed before
  /// inversion.
  double atom = 0.0;
  double min_value = 0.0;
  std::size_t negative_count = 0;
  std::size_t ls_used = 0;
  /// |F(sigma + i omega_max)| after atom removal.
  double tail_magnitude = 0.0;
};

/// Fourier-series (Bromwich) inversion on a uniform frequency grid, one
/// inverse FFT, then cubic interpolation onto `u_grid` (values in [0, u_max]).
/// Negative density is reported, never clipped.
ILTResult invert_laplace(const LaplaceFunction& lt, std::span<const double> u_grid,
                         const ILTParams& params = {});

inline std::vector<double> pdf_via_fft_ilt(const LaplaceFunction& lt,
                                           std::span<const double> u_grid,
                                           const ILTParams& params = {}) {
  return invert_laplace(lt, u_grid, params).density;
}

}  // namespace clutter
