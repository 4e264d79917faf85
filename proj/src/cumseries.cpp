#include "clutter/cumseries.hpp"

#include "clutter/error.hpp"

#include <boost/math/special_functions/fpclassify.hpp>

#include <cmath>
#include <string>

namespace clutter {

namespace {

void require_finite(std::span<const wide> xs, const char* what) {
  for (const auto& x : xs) {
    if (!boost::multiprecision::isfinite(x)) {
      fail(ErrorKind::RangeError, std::string(what) + " contains a non-finite entry");
    }
  }
}

// Row n of Pascal's triangle.
std::vector<wide> binomial_row(std::size_t n) {
  std::vector<wide> row(n + 1, wide(1));
  for (std::size_t k = 1; k < n; ++k) {
    row[k] = row[k - 1] * wide(n - k + 1) / wide(k);
  }
  return row;
}

}  // namespace

CumulantVector::CumulantVector(std::vector<wide> kappa)
    : kappa_(std::move(kappa)) {
  require_finite(kappa_, "cumulant vector");
}

CumulantVector::CumulantVector(std::initializer_list<double> kappa)
    : CumulantVector(std::vector<wide>(kappa.begin(), kappa.end())) {}

const wide& CumulantVector::at(std::size_t n) const {
  if (n < 1 || n > kappa_.size()) {
    fail(ErrorKind::InvalidArgument,
         "cumulant index " + std::to_string(n) + " out of range");
  }
  return kappa_[n - 1];
}

MomentVector::MomentVector(std::vector<wide> m) : m_(std::move(m)) {
  if (m_.empty() || m_[0] != 1) {
    fail(ErrorKind::InvalidArgument, "moment vector must start with M_0 = 1");
  }
  require_finite(m_, "moment vector");
}

MomentVector::MomentVector(std::initializer_list<double> m)
    : MomentVector(std::vector<wide>(m.begin(), m.end())) {}

const wide& MomentVector::at(std::size_t n) const {
  if (n >= m_.size()) {
    fail(ErrorKind::InvalidArgument,
         "moment index " + std::to_string(n) + " out of range");
  }
  return m_[n];
}

// Complete Bell recurrence B_{n+1} = sum_i C(n,i) B_{n-i} kappa_{i+1}.
MomentVector cumulants_to_moments(const CumulantVector& k) {
  const std::size_t N = k.order();
  if (N < 1) fail(ErrorKind::InsufficientOrders, "need at least one cumulant");
  const auto kappa = k.values();
  std::vector<wide> m(N + 1, wide(0));
  m[0] = 1;
  for (std::size_t n = 0; n < N; ++n) {
    const auto binom = binomial_row(n);
    wide acc = 0;
    for (std::size_t i = 0; i <= n; ++i) acc += binom[i] * m[n - i] * kappa[i];
    m[n + 1] = acc;
  }
  return MomentVector(std::move(m));
}

CumulantVector moments_to_cumulants(const MomentVector& m) {
  const std::size_t N = m.order();
  if (N < 1) fail(ErrorKind::InsufficientOrders, "need at least M_1");
  const auto mom = m.values();
  std::vector<wide> kappa(N, wide(0));
  for (std::size_t n = 0; n < N; ++n) {
    const auto binom = binomial_row(n);
    wide acc = mom[n + 1];
    for (std::size_t i = 0; i < n; ++i) acc -= binom[i] * mom[n - i] * kappa[i];
    kappa[n] = acc;
  }
  return CumulantVector(std::move(kappa));
}

std::vector<wide> filter_power_sums(std::span<const wide> h, std::size_t n_max) {
  std::vector<wide> iota(n_max, wide(0));
  std::vector<wide> power(h.begin(), h.end());
  for (std::size_t n = 0; n < n_max; ++n) {
    wide acc = 0;
    for (std::size_t i = 0; i < power.size(); ++i) {
      acc += power[i];
      power[i] *= h[i];
    }
    iota[n] = acc;
  }
  return iota;
}

std::vector<wide> filter_power_sums(std::span<const double> h, std::size_t n_max) {
  const auto hw = to_wide(h);
  return filter_power_sums(std::span<const wide>(hw), n_max);
}

CumulantVector backsolve_input_cumulants(const CumulantVector& k_out,
                                         std::span<const wide> h) {
  if (h.empty()) fail(ErrorKind::InvalidArgument, "empty impulse response");
  const std::size_t N = k_out.order();
  const auto iota = filter_power_sums(h, N);
  std::vector<wide> magnitudes(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) magnitudes[i] = abs(h[i]);
  const auto scale = filter_power_sums(std::span<const wide>(magnitudes), N);

  std::vector<wide> kappa(N);
  for (std::size_t n = 1; n <= N; ++n) {
    if (abs(iota[n - 1]) < kPowerSumFloor * scale[n - 1]) {
      fail(ErrorKind::NearSingularFilterPowerSum,
           "filter power sum iota_" + std::to_string(n) + " = " +
               std::to_string(to_double(iota[n - 1])) +
               " is below the degeneracy floor");
    }
    kappa[n - 1] = k_out.at(n) / iota[n - 1];
  }
  return CumulantVector(std::move(kappa));
}

CumulantVector backsolve_input_cumulants(const CumulantVector& k_out,
                                         std::span<const double> h) {
  const auto hw = to_wide(h);
  return backsolve_input_cumulants(k_out, std::span<const wide>(hw));
}

CumulantVector forward_output_cumulants(const CumulantVector& k_in,
                                        std::span<const wide> h) {
  const std::size_t N = k_in.order();
  const auto iota = filter_power_sums(h, N);
  std::vector<wide> kappa(N);
  for (std::size_t n = 1; n <= N; ++n) kappa[n - 1] = iota[n - 1] * k_in.at(n);
  return CumulantVector(std::move(kappa));
}

PowerSeries build_series(const MomentVector& m, std::size_t n_coeffs) {
  if (n_coeffs == 0 || m.order() + 1 < n_coeffs) {
    fail(ErrorKind::InsufficientOrders,
         "moment expansion needs " + std::to_string(n_coeffs) +
             " moments, have " + std::to_string(m.order() + 1));
  }
  PowerSeries s{std::vector<wide>(n_coeffs), SeriesKind::MomentExpansion};
  wide factorial = 1;
  for (std::size_t n = 0; n < n_coeffs; ++n) {
    if (n > 0) factorial *= wide(n);
    const wide sign = (n % 2 == 0) ? wide(1) : wide(-1);
    s.c[n] = sign * m.at(n) / factorial;
  }
  return s;
}

PowerSeries build_series(const CumulantVector& k, std::size_t n_coeffs) {
  if (n_coeffs == 0 || k.order() < n_coeffs) {
    fail(ErrorKind::InsufficientOrders,
         "cumulant expansion needs " + std::to_string(n_coeffs) +
             " cumulants, have " + std::to_string(k.order()));
  }
  PowerSeries s{std::vector<wide>(n_coeffs), SeriesKind::CumulantExpansion};
  wide factorial = 1;
  for (std::size_t n = 0; n < n_coeffs; ++n) {
    factorial *= wide(n + 1);
    const wide sign = (n % 2 == 0) ? wide(1) : wide(-1);
    s.c[n] = sign * k.at(n + 1) / factorial;
  }
  return s;
}

PowerSeries build_series(const MomentVector& m) {
  return build_series(m, m.order() + 1);
}

PowerSeries build_series(const CumulantVector& k) {
  return build_series(k, k.order());
}

PowerSeries rescale(const PowerSeries& series, const wide& scale) {
  PowerSeries out = series;
  wide f = 1;
  for (auto& c : out.c) {
    c *= f;
    f *= scale;
  }
  return out;
}

double convergence_radius_estimate(const PowerSeries& series) {
  const std::size_t n = series.size();
  if (n < 8) {
    fail(ErrorKind::InsufficientOrders,
         "radius estimate needs at least 8 coefficients");
  }
  constexpr double inf = std::numeric_limits<double>::infinity();

  std::vector<double> idx, logc;
  for (std::size_t i = n / 2; i < n; ++i) {
    if (series.c[i] == 0) continue;
    idx.push_back(static_cast<double>(i));
    logc.push_back(to_double(log(abs(series.c[i]))));
  }
  if (idx.size() < 2) return inf;

  // Domb-Sykes: |c_i / c_{i-1}| is linear in 1/i with intercept 1/R. An
  // intercept at or below zero means the ratios die out (entire function).
  {
    std::vector<double> x, y;
    for (std::size_t i = std::max<std::size_t>(n / 2, 1); i < n; ++i) {
      if (series.c[i - 1] == 0) continue;
      x.push_back(1.0 / static_cast<double>(i));
      y.push_back(to_double(abs(series.c[i] / series.c[i - 1])));
    }
    if (x.size() >= 2) {
      double mx = 0, my = 0;
      for (std::size_t i = 0; i < x.size(); ++i) { mx += x[i]; my += y[i]; }
      mx /= x.size();
      my /= y.size();
      double sxy = 0, sxx = 0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
      }
      const double intercept = my - (sxx > 0 ? sxy / sxx : 0.0) * mx;
      if (intercept <= 1e-3 * my) return inf;
    }
  }

  double mx = 0, my = 0;
  for (std::size_t i = 0; i < idx.size(); ++i) { mx += idx[i]; my += logc[i]; }
  mx /= idx.size();
  my /= idx.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    sxy += (idx[i] - mx) * (logc[i] - my);
    sxx += (idx[i] - mx) * (idx[i] - mx);
  }
  const double slope = sxy / sxx;
  return std::exp(-slope);
}

}  // namespace clutter
