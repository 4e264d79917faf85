#pragma once

#include "clutter/cumseries.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace clutter {

/// r(tau) = exp(-tau / t0) [d cos(2 pi tau / T0) + (1 - d)].
struct ExpCosineACF {
  double t0 = 8.0;
  double T0 = 10.0;
  double d = 0.6;
};

/// Prescribed normalized ACF: explicit lags r_0..r_P (r_0 = 1) or an
/// exp-cosine model sampled at the pulse repetition frequency.
struct ACFSpec {
  std::variant<std::vector<double>, ExpCosineACF> source;
  double prf_hz = 1000.0;

  /// r_0..r_{n_lags}. Explicit lag lists must be long enough.
  std::vector<double> lags(std::size_t n_lags) const;
};

/// r_0..r_{n_lags} of the exp-cosine model with lag spacing 1 / prf_hz.
std::vector<double> exp_cosine_acf(const ExpCosineACF& params, double prf_hz, std::size_t n_lags);

inline constexpr double kDefaultTruncationThreshold = 1e-3;
inline constexpr std::size_t kTruncationCap = 1'000'000;

struct ImpulseResponse {
  std::vector<double> h;  // h_0..h_{L_IR}
  std::size_t L_IR = 0;
};

/// Impulse response of y(m) = -sum_k a_k y(m-k) + u(m), truncated at the
/// first index from which |h_i| stays below `threshold` for p consecutive
/// lags.
ImpulseResponse impulse_response(std::span<const double> a,
                                 double threshold = kDefaultTruncationThreshold);

/// Roots of z^p + a_1 z^{p-1} + ... + a_p.
std::vector<std::complex<double>> characteristic_roots(std::span<const double> a);

/// Univariate AR model in the y(m) = -sum a_k y(m-k) + u(m) convention.
class ARModel {
 public:
  /// Throws UnstableModel unless every characteristic root lies strictly
  /// inside the unit circle. `iota_order` power sums are cached.
  explicit ARModel(std::vector<double> a, double threshold = kDefaultTruncationThreshold,
                   std::size_t iota_order = 35);

  std::size_t order() const { return a_.size(); }
  const std::vector<double>& coeffs() const { return a_; }
  const std::vector<double>& h() const { return h_; }
  std::size_t L_IR() const { return h_.size() - 1; }
  double threshold() const { return threshold_; }
  /// Impulse response recomputed in extended precision.
  const std::vector<wide>& h_wide() const { return h_wide_; }
  /// iota_1..iota_N.
  const std::vector<wide>& iota() const { return iota_; }
  /// Spectral radius of the companion matrix.
  double spectral_radius() const { return radius_; }

  /// Runs the difference equation over `u` from a zero state.
  std::vector<double> filter(std::span<const double> u) const;

 private:
  std::vector<double> a_;
  double threshold_;
  std::vector<double> h_;
  std::vector<wide> h_wide_;
  std::vector<wide> iota_;
  double radius_ = 0.0;
};

/// Levinson-Durbin solution of the Yule-Walker equations for lags r_0..r_p.
ARModel yule_walker(std::span<const double> r, std::size_t p,
                    double threshold = kDefaultTruncationThreshold);
ARModel yule_walker(const ACFSpec& acf, std::size_t p,
                    double threshold = kDefaultTruncationThreshold);

/// Normalized theoretical ACF r_0..r_{n_lags} of a stable AR model.
std::vector<double> ar_autocorrelation(std::span<const double> a, std::size_t n_lags);

/// Vector AR model y(m) = -sum_k A_k y(m-k) + u(m).
class MultivariateARModel {
 public:
  explicit MultivariateARModel(std::vector<Eigen::MatrixXd> A,
                               double threshold = kDefaultTruncationThreshold);

  std::size_t channels() const { return M_; }
  std::size_t order() const { return A_.size(); }
  const std::vector<Eigen::MatrixXd>& coeffs() const { return A_; }
  double threshold() const { return threshold_; }
  double spectral_radius() const { return radius_; }

 private:
  std::vector<Eigen::MatrixXd> A_;
  std::size_t M_;
  double threshold_;
  double radius_ = 0.0;
};

/// Matrix impulse response H_0 = I, H_i = -sum_k A_k H_{i-k}, entries
/// h_{i,p,q} = H_i(p, q). Computed in extended precision.
struct ImpulseTensor {
  std::size_t channels = 0;
  std::vector<std::vector<wide>> H;  // H[i] row-major channels x channels

  std::size_t L_IR() const { return H.size() - 1; }
  double at(std::size_t i, std::size_t p, std::size_t q) const {
    return to_double(H[i][p * channels + q]);
  }
};

ImpulseTensor mv_impulse_tensor(const MultivariateARModel& model);
ImpulseTensor mv_impulse_tensor(const MultivariateARModel& model, double threshold);

/// Largest condition number accepted for the per-order cumulant systems.
inline constexpr double kCumulantSystemConditionLimit = 1e10;

/// Output cumulants kappa_{Y,p,n} = sum_q (sum_i h_{i,p,q}^n) kappa_{U,q,n}.
std::vector<CumulantVector> mv_forward_cumulants(const std::vector<CumulantVector>& k_in,
                                                 const ImpulseTensor& tensor);

/// Inverts the per-order linear systems of mv_forward_cumulants.
std::vector<CumulantVector> mv_backsolve_cumulants(const std::vector<CumulantVector>& k_out,
                                                   const ImpulseTensor& tensor);

}  // namespace clutter
