#pragma once

#include "clutter/cumseries.hpp"
#include "clutter/ilt.hpp"
#include "clutter/pade.hpp"

#include <json.hpp>

#include <complex>
#include <span>
#include <string>
#include <vector>

namespace clutter {

enum class ContinuationPath { MomentPath, CumulantPath };

/// Laplace transform recovered from a continued series.
///   MomentPath:   L(s) = sum_j lambda_j / (s + a_j)^m_j + constant
///   CumulantPath: L(s) = exp(-constant * s - sum_j lambda_j s / (s + a_j))
struct RecoveredLT {
  PoleResidueForm prf;
  ContinuationPath path = ContinuationPath::CumulantPath;
  int K = 0;
  int L = 0;
  double hankel_condition = 1.0;
  /// One line per order tried by the recovery scan.
  std::vector<std::string> attempts;

  double constant_part() const { return prf.constant; }
};

void to_json(nlohmann::json& j, const PoleResidueForm& prf);
void to_json(nlohmann::json& j, const RecoveredLT& r);

struct RecoveryOptions {
  int K = 16;
  int L = 17;
  /// Lowest denominator order tried when the pole structure is not
  /// representable (cumulant path).
  int min_L = 8;
  FilterOptions filter;
};

/// Moment-path continuation: [K,L] fit of the Laplace series, partial
/// fractions, removal of right-half-plane poles. The order is stepped down
/// (keeping L - K fixed) only when the Hankel system is singular.
RecoveredLT recover_moment_path(const MomentVector& m, const RecoveryOptions& options = {});
RecoveredLT recover_moment_path(const CumulantVector& k, const RecoveryOptions& options = {});

/// Cumulant-path continuation of -log L(s) / s. Orders are stepped down while
/// the fit is singular, has repeated roots, or leaves complex terms; below
/// options.min_L the scan fails with ComplexPoleStructure (listing every
/// attempt).
RecoveredLT recover_cumulant_path(const CumulantVector& k, const RecoveryOptions& options = {});

/// Evaluates the recovered transform. Throws PoleHit when s sits on a pole.
std::complex<double> eval_lt(const RecoveredLT& r, std::complex<double> s);

struct DensitySamples {
  std::vector<double> values;
  double atom = 0.0;
  double min_value = 0.0;
  std::size_t negative_count = 0;

  bool valid() const { return negative_count == 0; }
};

/// Closed-form inverse of the moment-path partial fractions.
DensitySamples pdf_moment_path(const RecoveredLT& r, std::span<const double> u_grid);

struct ComponentDensity {
  double atom_mass = 0.0;
  std::vector<double> density;
};

/// Density of one compound Poisson-exponential component with transform
/// exp(-lambda s / (s + a)): an atom e^{-lambda} at 0 plus
/// e^{-a u - lambda} sqrt(a lambda / u) I_1(2 sqrt(a lambda u)).
ComponentDensity component_pdf_zj(double a, double lambda, std::span<const double> u_grid);

/// Density of sum_j Z_j on u_k = k du, k < n, by discretizing each
/// component into trapezoid cell masses and convolving with FFTs, then
/// extrapolating from du and du / 2. The atom at 0 is returned separately.
ComponentDensity convolve_components(const PoleResidueForm& prf, double du, std::size_t n);

/// prod_i L_U(h_i s), summed in the exponent for the cumulant path.
std::complex<double> ar_output_lt(const RecoveredLT& input, std::span<const double> h,
                                  std::complex<double> s);

ILTResult ar_output_pdf(const RecoveredLT& input, std::span<const double> h,
                        std::span<const double> y_grid, const ILTParams& params = {});

}  // namespace clutter
