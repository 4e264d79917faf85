#pragma once

#include "clutter/cumseries.hpp"
#include "clutter/ilt.hpp"

#include <json.hpp>

#include <complex>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace clutter {

struct GammaParams {
  double alpha = 1.0;   // shape
  double lambda = 1.0;  // scale
};

/// Positive tempered alpha-stable law.
struct TemperedStableParams {
  double alpha = 0.5;  // characteristic exponent
  double gamma = 1.0;  // scale
  double eta = 1.0;    // truncation parameter
};

enum class Family { Gamma, PTAlphaS };

class DistributionSpec {
 public:
  /// Throws InvalidArgument on non-positive parameters.
  static DistributionSpec gamma(double alpha, double lambda);
  /// alpha must lie in (0, 2); values above 1 are accepted with a warning.
  /// alpha = 1 degenerates to a point mass and is rejected.
  static DistributionSpec ptas(double alpha, double gamma, double eta);

  Family family() const {
    return std::holds_alternative<GammaParams>(params_) ? Family::Gamma
                                                        : Family::PTAlphaS;
  }
  const GammaParams& gamma_params() const { return std::get<GammaParams>(params_); }
  const TemperedStableParams& ptas_params() const {
    return std::get<TemperedStableParams>(params_);
  }

 private:
  explicit DistributionSpec(std::variant<GammaParams, TemperedStableParams> p)
      : params_(p) {}
  std::variant<GammaParams, TemperedStableParams> params_;
};

void to_json(nlohmann::json& j, const DistributionSpec& spec);
DistributionSpec distribution_from_json(const nlohmann::json& j);

/// L_V(s). Defined on the slit plane; s must be finite and off the branch
/// cut of (1 + lambda s) or (eta s + 1).
std::complex<double> closed_form_lt(const DistributionSpec& spec,
                                    std::complex<double> s);

/// kappa_1..kappa_{n_max}. The PTAlphaS ratio Gamma(n - alpha) / Gamma(1 - alpha)
/// is taken as a finite product in extended precision.
CumulantVector cumulants(const DistributionSpec& spec, std::size_t n_max);

/// Density on a grid. The gamma branch is closed form; PTAlphaS goes through
/// the FFT inversion of its Laplace transform.
std::vector<double> reference_pdf(const DistributionSpec& spec,
                                  std::span<const double> grid,
                                  const ILTParams& ilt = {});

/// Tabulated density with optional point masses.
struct SampledDensity {
  std::vector<double> x;  // ascending
  std::vector<double> f;
  std::vector<std::pair<double, double>> atoms;  // (location, mass)

  /// Trapezoid mass of f plus the atoms.
  double mass() const;
};

/// Texture mass below which amplitude_pdf refuses the grid.
inline constexpr double kMinTextureMass = 0.99;

/// Compound-Gaussian amplitude density
/// f_R(r) = int (r / 2v) exp(-r^2 / 4v) f_V(v) dv, with f_V interpolated
/// linearly between samples and integrated per cell by Gauss-Kronrod.
std::vector<double> amplitude_pdf(const SampledDensity& texture,
                                  std::span<const double> r_grid);

}  // namespace clutter
