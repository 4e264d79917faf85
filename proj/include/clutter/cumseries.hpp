#pragma once

#include "clutter/precision.hpp"

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace clutter {

/// Cumulants kappa_1..kappa_N. Index 0 holds kappa_1.
class CumulantVector {
 public:
  CumulantVector() = default;
  explicit CumulantVector(std::vector<wide> kappa);
  CumulantVector(std::initializer_list<double> kappa);

  std::size_t order() const { return kappa_.size(); }
  /// kappa_n for n in [1, order()].
  const wide& at(std::size_t n) const;
  double operator()(std::size_t n) const { return to_double(at(n)); }

  std::span<const wide> values() const { return kappa_; }
  std::vector<double> to_doubles() const { return clutter::to_doubles(kappa_); }

 private:
  std::vector<wide> kappa_;
};

/// Raw moments M_0..M_N with M_0 = 1.
class MomentVector {
 public:
  MomentVector() = default;
  explicit MomentVector(std::vector<wide> m);
  MomentVector(std::initializer_list<double> m);

  /// Highest moment index N.
  std::size_t order() const { return m_.size() - 1; }
  const wide& at(std::size_t n) const;
  double operator()(std::size_t n) const { return to_double(at(n)); }

  std::span<const wide> values() const { return m_; }
  std::vector<double> to_doubles() const { return clutter::to_doubles(m_); }

 private:
  std::vector<wide> m_;
};

enum class SeriesKind {
  /// L(s) = sum_n c_n s^n with c_n = M_n (-1)^n / n!.
  MomentExpansion,
  /// log L(s) = -s * sum_n c_n s^n with c_n = kappa_{n+1} (-1)^n / (n+1)!.
  CumulantExpansion,
};

/// Power series handed to the Padé fit. For CumulantExpansion the series
/// represents -log L(s) / s; the leading -s factor is reattached by the
/// continuation step.
struct PowerSeries {
  std::vector<wide> c;
  SeriesKind kind = SeriesKind::MomentExpansion;

  std::size_t size() const { return c.size(); }
};

MomentVector cumulants_to_moments(const CumulantVector& k);
CumulantVector moments_to_cumulants(const MomentVector& m);

/// Filter power sums iota_n = sum_i h_i^n for n = 1..n_max, evaluated in
/// extended precision.
std::vector<wide> filter_power_sums(std::span<const wide> h, std::size_t n_max);
std::vector<wide> filter_power_sums(std::span<const double> h,
                                    std::size_t n_max);

/// Relative guard for |iota_n| against sum_i |h_i|^n.
inline constexpr double kPowerSumFloor = 1e-8;

/// kappa_{U,n} = kappa_{Y,n} / iota_n. Throws NearSingularFilterPowerSum when
/// |iota_n| < kPowerSumFloor * sum_i |h_i|^n.
CumulantVector backsolve_input_cumulants(const CumulantVector& k_out,
                                         std::span<const double> h);
CumulantVector backsolve_input_cumulants(const CumulantVector& k_out,
                                         std::span<const wide> h);

/// kappa_{Y,n} = iota_n kappa_{U,n}.
CumulantVector forward_output_cumulants(const CumulantVector& k_in,
                                        std::span<const wide> h);

/// Series of the given kind with `n_coeffs` coefficients. The moment
/// expansion needs M_0..M_{n_coeffs-1}; the cumulant expansion needs
/// kappa_1..kappa_{n_coeffs}.
PowerSeries build_series(const MomentVector& m, std::size_t n_coeffs);
PowerSeries build_series(const CumulantVector& k, std::size_t n_coeffs);
PowerSeries build_series(const MomentVector& m);
PowerSeries build_series(const CumulantVector& k);

/// Scaled series coefficients c_n * scale^n, i.e. the series of f(scale * s).
PowerSeries rescale(const PowerSeries& series, const wide& scale);

/// Radius of convergence estimated from the tail half of the coefficients by
/// a least-squares fit of log|c_n| against n. Returns +inf when the slope
/// indicates superexponential decay.
double convergence_radius_estimate(const PowerSeries& series);

}  // namespace clutter
