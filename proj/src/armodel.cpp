#include "clutter/armodel.hpp"

#include "clutter/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace clutter {

namespace {

double spectral_radius_of(const Eigen::MatrixXd& companion) {
  if (companion.rows() == 0) return 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  if (solver.info() != Eigen::Success) {
    fail(ErrorKind::RangeError, "companion eigenvalue iteration did not converge");
  }
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

void require_stable(double radius) {
  if (!(radius < 1.0)) {
    std::ostringstream os;
    os << "AR model is not stable: companion spectral radius " << radius << " >= 1";
    fail(ErrorKind::UnstableModel, os.str());
  }
}

// Tracks the hold-down rule: truncation starts at the first index of a run of
// `needed` consecutive values below the threshold.
class TruncationRule {
 public:
  TruncationRule(double threshold, std::size_t needed) : threshold_(threshold), needed_(needed) {}

  /// Feeds the magnitude at index i; returns true once the rule fires.
  bool feed(std::size_t i, double magnitude) {
    if (magnitude < threshold_) {
      if (run_ == 0) start_ = i;
      ++run_;
    } else {
      run_ = 0;
    }
    if (i > kTruncationCap) {
      fail(ErrorKind::TruncationCapExceeded,
           "impulse response did not fall below the threshold within " +
               std::to_string(kTruncationCap) + " lags");
    }
    return run_ >= needed_;
  }

  std::size_t start() const { return start_; }

 private:
  double threshold_;
  std::size_t needed_;
  std::size_t run_ = 0;
  std::size_t start_ = 0;
};

// Partial-pivot Gaussian elimination in extended precision (small systems).
std::vector<wide> solve_dense(std::vector<wide> a, std::vector<wide> b, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (abs(a[i * n + k]) > abs(a[piv * n + k])) piv = i;
    }
    if (a[piv * n + k] == 0) fail(ErrorKind::SingularCumulantSystem, "singular cumulant system");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[piv * n + j]);
      std::swap(b[k], b[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const wide f = a[i * n + k] / a[k * n + k];
      for (std::size_t j = k; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
      b[i] -= f * b[k];
    }
  }
  std::vector<wide> x(n);
  for (std::size_t i = n; i-- > 0;) {
    wide acc = b[i];
    for (std::size_t j = i + 1; j < n; ++j) acc -= a[i * n + j] * x[j];
    x[i] = acc / a[i * n + i];
  }
  return x;
}

// G_n(p, q) = sum_i h_{i,p,q}^n.
std::vector<wide> power_sum_matrix(const ImpulseTensor& t, std::size_t n) {
  const std::size_t mm = t.channels * t.channels;
  std::vector<wide> g(mm, wide(0));
  for (const auto& Hi : t.H) {
    for (std::size_t e = 0; e < mm; ++e) g[e] += pow(Hi[e], static_cast<int>(n));
  }
  return g;
}

std::size_t common_order(const std::vector<CumulantVector>& ks, std::size_t channels) {
  if (ks.size() != channels) {
    fail(ErrorKind::LengthMismatch, "one cumulant vector per channel is required");
  }
  const std::size_t N = ks.front().order();
  for (const auto& k : ks) {
    if (k.order() != N) fail(ErrorKind::LengthMismatch, "channel cumulant orders differ");
  }
  return N;
}

}  // namespace

std::vector<double> exp_cosine_acf(const ExpCosineACF& params, double prf_hz, std::size_t n_lags) {
  if (!(params.t0 > 0.0) || !(params.T0 > 0.0) || !(params.d > 0.0 && params.d < 1.0) ||
      !(prf_hz > 0.0)) {
    fail(ErrorKind::InvalidArgument, "exp-cosine ACF needs t0, T0, prf > 0 and 0 < d < 1");
  }
  std::vector<double> r(n_lags + 1);
  for (std::size_t k = 0; k <= n_lags; ++k) {
    const double tau = static_cast<double>(k) / prf_hz;
    r[k] = std::exp(-tau / params.t0) *
           (params.d * std::cos(2.0 * std::numbers::pi * tau / params.T0) + (1.0 - params.d));
  }
  return r;
}

std::vector<double> ACFSpec::lags(std::size_t n_lags) const {
  if (const auto* model = std::get_if<ExpCosineACF>(&source)) {
    return exp_cosine_acf(*model, prf_hz, n_lags);
  }
  const auto& r = std::get<std::vector<double>>(source);
  if (r.size() < n_lags + 1) {
    fail(ErrorKind::InvalidArgument, "explicit ACF has " + std::to_string(r.size()) +
                                         " lags, need " + std::to_string(n_lags + 1));
  }
  if (r[0] != 1.0) fail(ErrorKind::InvalidArgument, "explicit ACF must start with r_0 = 1");
  for (double x : r) {
    if (!(std::abs(x) <= 1.0)) fail(ErrorKind::InvalidArgument, "ACF values must lie in [-1, 1]");
  }
  return {r.begin(), r.begin() + static_cast<std::ptrdiff_t>(n_lags + 1)};
}

std::vector<std::complex<double>> characteristic_roots(std::span<const double> a) {
  const auto p = static_cast<Eigen::Index>(a.size());
  if (p == 0) return {};
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index j = 0; j < p; ++j) c(0, j) = -a[static_cast<std::size_t>(j)];
  for (Eigen::Index i = 1; i < p; ++i) c(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(c, false);
  std::vector<std::complex<double>> roots;
  for (Eigen::Index i = 0; i < p; ++i) roots.push_back(solver.eigenvalues()[i]);
  return roots;
}

ImpulseResponse impulse_response(std::span<const double> a, double threshold) {
  if (!(threshold > 0.0)) fail(ErrorKind::InvalidArgument, "truncation threshold must be positive");
  ImpulseResponse out;
  out.h.push_back(1.0);
  const std::size_t p = a.size();
  if (p == 0) return out;
  TruncationRule rule(threshold, p);
  for (std::size_t i = 1;; ++i) {
    double hi = 0.0;
    for (std::size_t k = 1; k <= std::min(i, p); ++k) hi -= a[k - 1] * out.h[i - k];
    out.h.push_back(hi);
    if (rule.feed(i, std::abs(hi))) break;
  }
  out.L_IR = rule.start();
  out.h.resize(out.L_IR + 1);
  return out;
}

ARModel::ARModel(std::vector<double> a, double threshold, std::size_t iota_order)
    : a_(std::move(a)), threshold_(threshold) {
  for (double x : a_) {
    if (!std::isfinite(x)) fail(ErrorKind::InvalidArgument, "AR coefficients must be finite");
  }
  double radius = 0.0;
  for (const auto& z : characteristic_roots(a_)) radius = std::max(radius, std::abs(z));
  radius_ = radius;
  require_stable(radius_);

  h_ = impulse_response(a_, threshold_).h;
  h_wide_.assign(h_.size(), wide(0));
  h_wide_[0] = 1;
  for (std::size_t i = 1; i < h_.size(); ++i) {
    wide acc = 0;
    for (std::size_t k = 1; k <= std::min(i, a_.size()); ++k) acc -= wide(a_[k - 1]) * h_wide_[i - k];
    h_wide_[i] = acc;
  }
  iota_ = filter_power_sums(h_wide_, iota_order);
}

std::vector<double> ARModel::filter(std::span<const double> u) const {
  const std::size_t p = a_.size();
  std::vector<double> y(u.size());
  for (std::size_t m = 0; m < u.size(); ++m) {
    double acc = u[m];
    for (std::size_t k = 1; k <= std::min(m, p); ++k) acc -= a_[k - 1] * y[m - k];
    y[m] = acc;
  }
  return y;
}

ARModel yule_walker(std::span<const double> r, std::size_t p, double threshold) {
  if (p < 1) fail(ErrorKind::InvalidArgument, "AR order must be at least 1");
  if (r.size() < p + 1) fail(ErrorKind::InvalidArgument, "Yule-Walker needs lags 0..p");
  if (!(r[0] > 0.0)) fail(ErrorKind::NotPositiveDefinite, "lag-0 autocorrelation must be positive");
  std::vector<double> phi;
  double err = r[0];
  for (std::size_t m = 1; m <= p; ++m) {
    double acc = r[m];
    for (std::size_t j = 1; j < m; ++j) acc -= phi[j - 1] * r[m - j];
    const double k = acc / err;
    if (!(std::abs(k) < 1.0)) {
      std::ostringstream os;
      os << "autocorrelation matrix is not positive definite (reflection coefficient " << k
         << " at order " << m << ")";
      fail(ErrorKind::NotPositiveDefinite, os.str());
    }
    std::vector<double> next(m);
    for (std::size_t j = 1; j < m; ++j) next[j - 1] = phi[j - 1] - k * phi[m - j - 1];
    next[m - 1] = k;
    phi = std::move(next);
    err *= 1.0 - k * k;
    if (!(err > 0.0)) fail(ErrorKind::NotPositiveDefinite, "prediction error vanished");
  }
  std::vector<double> a(p);
  for (std::size_t j = 0; j < p; ++j) a[j] = -phi[j];
  return ARModel(std::move(a), threshold);
}

ARModel yule_walker(const ACFSpec& acf, std::size_t p, double threshold) {
  return yule_walker(acf.lags(p), p, threshold);
}

std::vector<double> ar_autocorrelation(std::span<const double> a, std::size_t n_lags) {
  const std::size_t p = a.size();
  std::vector<double> r(n_lags + 1, 0.0);
  r[0] = 1.0;
  if (p == 0) return r;
  // r_k + sum_j a_j r_{|k-j|} = 0 for k = 1..p, unknowns r_1..r_p.
  Eigen::MatrixXd sys = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(p),
                                                  static_cast<Eigen::Index>(p));
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(p));
  for (std::size_t k = 1; k <= p; ++k) {
    rhs(static_cast<Eigen::Index>(k - 1)) = -a[k - 1];
    for (std::size_t j = 1; j <= p; ++j) {
      const std::size_t lag = k > j ? k - j : j - k;
      if (lag == 0) continue;
      sys(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(lag - 1)) += a[j - 1];
    }
  }
  const Eigen::VectorXd sol = sys.partialPivLu().solve(rhs);
  std::vector<double> full(std::max(n_lags, p) + 1, 0.0);
  full[0] = 1.0;
  for (std::size_t k = 1; k <= p; ++k) full[k] = sol(static_cast<Eigen::Index>(k - 1));
  for (std::size_t k = p + 1; k < full.size(); ++k) {
    double acc = 0.0;
    for (std::size_t j = 1; j <= p; ++j) acc -= a[j - 1] * full[k - j];
    full[k] = acc;
  }
  std::copy_n(full.begin(), n_lags + 1, r.begin());
  return r;
}

MultivariateARModel::MultivariateARModel(std::vector<Eigen::MatrixXd> A, double threshold)
    : A_(std::move(A)), M_(0), threshold_(threshold) {
  if (A_.empty()) fail(ErrorKind::InvalidArgument, "multivariate AR needs at least one matrix");
  M_ = static_cast<std::size_t>(A_.front().rows());
  for (const auto& Ak : A_) {
    if (Ak.rows() != Ak.cols() || static_cast<std::size_t>(Ak.rows()) != M_ || M_ == 0) {
      fail(ErrorKind::InvalidArgument, "coefficient matrices must be square and equal-sized");
    }
    if (!Ak.allFinite()) fail(ErrorKind::InvalidArgument, "coefficient matrices must be finite");
  }
  const auto m = static_cast<Eigen::Index>(M_);
  const auto p = static_cast<Eigen::Index>(A_.size());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(m * p, m * p);
  for (Eigen::Index k = 0; k < p; ++k) c.block(0, k * m, m, m) = -A_[static_cast<std::size_t>(k)];
  if (p > 1) c.block(m, 0, m * (p - 1), m * (p - 1)).setIdentity();
  radius_ = spectral_radius_of(c);
  require_stable(radius_);
}

ImpulseTensor mv_impulse_tensor(const MultivariateARModel& model) {
  return mv_impulse_tensor(model, model.threshold());
}

ImpulseTensor mv_impulse_tensor(const MultivariateARModel& model, double threshold) {
  const std::size_t M = model.channels();
  const std::size_t p = model.order();
  const std::size_t mm = M * M;
  std::vector<std::vector<wide>> A(p, std::vector<wide>(mm));
  for (std::size_t k = 0; k < p; ++k) {
    for (std::size_t r = 0; r < M; ++r) {
      for (std::size_t c = 0; c < M; ++c) {
        A[k][r * M + c] = wide(model.coeffs()[k](static_cast<Eigen::Index>(r),
                                                 static_cast<Eigen::Index>(c)));
      }
    }
  }
  ImpulseTensor out;
  out.channels = M;
  out.H.emplace_back(mm, wide(0));
  for (std::size_t r = 0; r < M; ++r) out.H[0][r * M + r] = 1;
  TruncationRule rule(threshold, p);
  for (std::size_t i = 1;; ++i) {
    std::vector<wide> Hi(mm, wide(0));
    for (std::size_t k = 1; k <= std::min(i, p); ++k) {
      const auto& Ak = A[k - 1];
      const auto& Hp = out.H[i - k];
      for (std::size_t r = 0; r < M; ++r) {
        for (std::size_t c = 0; c < M; ++c) {
          wide acc = 0;
          for (std::size_t j = 0; j < M; ++j) acc += Ak[r * M + j] * Hp[j * M + c];
          Hi[r * M + c] -= acc;
        }
      }
    }
    double max_abs = 0.0;
    for (const auto& x : Hi) max_abs = std::max(max_abs, std::abs(to_double(x)));
    out.H.push_back(std::move(Hi));
    if (rule.feed(i, max_abs)) break;
  }
  out.H.resize(rule.start() + 1);
  return out;
}

std::vector<CumulantVector> mv_forward_cumulants(const std::vector<CumulantVector>& k_in,
                                                 const ImpulseTensor& tensor) {
  const std::size_t M = tensor.channels;
  const std::size_t N = common_order(k_in, M);
  std::vector<std::vector<wide>> out(M, std::vector<wide>(N));
  for (std::size_t n = 1; n <= N; ++n) {
    const auto g = power_sum_matrix(tensor, n);
    for (std::size_t p = 0; p < M; ++p) {
      wide acc = 0;
      for (std::size_t q = 0; q < M; ++q) acc += g[p * M + q] * k_in[q].at(n);
      out[p][n - 1] = acc;
    }
  }
  std::vector<CumulantVector> result;
  for (auto& v : out) result.emplace_back(std::move(v));
  return result;
}

std::vector<CumulantVector> mv_backsolve_cumulants(const std::vector<CumulantVector>& k_out,
                                                   const ImpulseTensor& tensor) {
  const std::size_t M = tensor.channels;
  const std::size_t N = common_order(k_out, M);
  std::vector<std::vector<wide>> out(M, std::vector<wide>(N));
  for (std::size_t n = 1; n <= N; ++n) {
    const auto g = power_sum_matrix(tensor, n);
    Eigen::MatrixXd gd(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(M));
    for (std::size_t e = 0; e < M * M; ++e) {
      gd(static_cast<Eigen::Index>(e / M), static_cast<Eigen::Index>(e % M)) = to_double(g[e]);
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(gd);
    const auto& sv = svd.singularValues();
    const double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                                 : std::numeric_limits<double>::infinity();
    if (!(cond < kCumulantSystemConditionLimit)) {
      std::ostringstream os;
      os << "cumulant system of order " << n << " is near singular (condition " << cond << ")";
      fail(ErrorKind::SingularCumulantSystem, os.str());
    }
    std::vector<wide> rhs(M);
    for (std::size_t p = 0; p < M; ++p) rhs[p] = k_out[p].at(n);
    const auto x = solve_dense(g, rhs, M);
    for (std::size_t p = 0; p < M; ++p) out[p][n - 1] = x[p];
  }
  std::vector<CumulantVector> result;
  for (auto& v : out) result.emplace_back(std::move(v));
  return result;
}

}  // namespace clutter
