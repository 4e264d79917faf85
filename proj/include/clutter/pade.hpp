#pragma once

#include "clutter/cumseries.hpp"
#include "clutter/precision.hpp"

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace clutter {

/// Rational approximant P(s)/Q(s) with Q_0 = 1, matching a power series
/// through order K+L.
struct PadeApproximant {
  std::vector<wide> p;  // P_0..P_K
  std::vector<wide> q;  // Q_0..Q_L
  int K = 0;
  int L = 0;
  /// 1-norm condition estimate of the Hankel system (1 when L = 0).
  double hankel_condition = 1.0;

  std::complex<double> operator()(std::complex<double> s) const;
  /// First `n` Taylor coefficients of P/Q about 0 (series long division).
  std::vector<wide> taylor(std::size_t n) const;
};

enum class PoleForm {
  /// L(s) = sum_j lambda_j / (s + a_j)^m_j + constant.
  SumOfPoles,
  /// L(s) = exp(-constant * s) * prod_j exp(-lambda_j s / (s + a_j)).
  ProductOfExponentials,
};

struct PoleTerm {
  std::complex<double> a;       // negative of the pole
  std::complex<double> lambda;  // residue-derived weight
  /// Power of 1/(s + a). Always 1 except for repeated poles of a
  /// SumOfPoles form.
  int multiplicity = 1;
};

struct DiscardRecord {
  PoleTerm term;
  std::string reason;
};

struct PoleResidueForm {
  std::vector<PoleTerm> terms;
  PoleForm form = PoleForm::SumOfPoles;
  /// Polynomial remainder of P/Q (nonzero only for K = L).
  double constant = 0.0;
  std::size_t discarded_count = 0;
  std::vector<DiscardRecord> discarded;

  /// Value of the rational part sum_j lambda_j / (s + a_j)^m_j + constant.
  std::complex<double> rational(std::complex<double> s) const;
  /// True when every term has real, strictly positive a and lambda.
  bool all_real_positive() const;
};

/// Hankel condition numbers above this are reported as SingularHankel. The
/// solve runs with ~50 significant digits.
inline constexpr double kHankelConditionLimit = 1e40;

/// [K, L] Padé approximant (K = L or K = L - 1) of the series.
PadeApproximant fit(const PowerSeries& series, int K, int L);

/// Roots of Q closer than this (relative) count as repeated.
inline constexpr double kRepeatedRootTolerance = 1e-6;

/// Partial-fraction decomposition of P/Q. Repeated poles are expanded with
/// generalized residues for SumOfPoles and rejected for
/// ProductOfExponentials.
PoleResidueForm to_pole_residue(const PadeApproximant& pa, PoleForm form);

struct FilterOptions {
  /// Relative tolerance for snapping conjugate-pair members to the real axis.
  double pairing_tolerance = 1e-6;
  /// Maximum deviation between the product of a conjugate pair's factors and
  /// the consolidated real factor at the probe points.
  double consolidation_tolerance = 1e-3;
  /// Emit one warning per discarded term.
  bool emit_warnings = true;
};

/// Removes terms that violate the analytic structure: Re(a) <= 0 for
/// SumOfPoles; anything but real positive (a, lambda) for
/// ProductOfExponentials, after conjugate-pair consolidation.
PoleResidueForm filter_poles(const PoleResidueForm& prf,
                             const FilterOptions& options = {});

/// True when a discard record names a complex term with Re(a) > 0, i.e. one
/// that the compound-Poisson sampler cannot represent.
bool is_complex_structure_discard(const DiscardRecord& record);

}  // namespace clutter
