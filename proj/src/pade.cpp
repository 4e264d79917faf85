#include "clutter/pade.hpp"

#include "clutter/error.hpp"
#include "clutter/warnings.hpp"

#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace clutter {

namespace {

using cwide = std::complex<wide>;

// Dense row-major LU with partial pivoting.
class WideLU {
 public:
  WideLU(std::vector<wide> a, std::size_t n) : a_(std::move(a)), n_(n), perm_(n) {
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
    for (std::size_t k = 0; k < n_; ++k) {
      std::size_t pivot = k;
      wide best = abs(at(k, k));
      for (std::size_t i = k + 1; i < n_; ++i) {
        if (abs(at(i, k)) > best) {
          best = abs(at(i, k));
          pivot = i;
        }
      }
      if (best == 0) {
        singular_ = true;
        return;
      }
      if (pivot != k) {
        for (std::size_t j = 0; j < n_; ++j) std::swap(at(k, j), at(pivot, j));
        std::swap(perm_[k], perm_[pivot]);
      }
      for (std::size_t i = k + 1; i < n_; ++i) {
        at(i, k) /= at(k, k);
        const wide f = at(i, k);
        if (f == 0) continue;
        for (std::size_t j = k + 1; j < n_; ++j) at(i, j) -= f * at(k, j);
      }
    }
  }

  bool singular() const { return singular_; }

  std::vector<wide> solve(const std::vector<wide>& b) const {
    std::vector<wide> x(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      wide acc = b[perm_[i]];
      for (std::size_t j = 0; j < i; ++j) acc -= at(i, j) * x[j];
      x[i] = acc;
    }
    for (std::size_t i = n_; i-- > 0;) {
      wide acc = x[i];
      for (std::size_t j = i + 1; j < n_; ++j) acc -= at(i, j) * x[j];
      x[i] = acc / at(i, i);
    }
    return x;
  }

 private:
  wide& at(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  const wide& at(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

  std::vector<wide> a_;
  std::size_t n_;
  std::vector<std::size_t> perm_;
  bool singular_ = false;
};

wide one_norm(const std::vector<wide>& a, std::size_t n) {
  wide best = 0;
  for (std::size_t j = 0; j < n; ++j) {
    wide col = 0;
    for (std::size_t i = 0; i < n; ++i) col += abs(a[i * n + j]);
    best = std::max(best, col);
  }
  return best;
}

cwide horner(const std::vector<wide>& coeffs, const cwide& x) {
  cwide acc(0, 0);
  for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * x + cwide(coeffs[i], 0);
  return acc;
}

std::complex<double> narrow(const cwide& z) {
  return {to_double(z.real()), to_double(z.imag())};
}

// Taylor coefficients of the polynomial about x0 (repeated synthetic
// division), truncated to `n` terms.
std::vector<cwide> shift_polynomial(std::vector<cwide> coeffs, const cwide& x0,
                                    std::size_t n) {
  std::vector<cwide> out;
  for (std::size_t k = 0; k < n; ++k) {
    if (coeffs.empty()) {
      out.emplace_back(0, 0);
      continue;
    }
    // Divide by (x - x0): remainder is the value at x0.
    const std::size_t deg = coeffs.size() - 1;
    std::vector<cwide> quotient(deg);
    cwide carry(0, 0);
    for (std::size_t i = deg + 1; i-- > 0;) {
      carry = carry * x0 + coeffs[i];
      if (i > 0) quotient[i - 1] = carry;
    }
    out.push_back(carry);
    coeffs = std::move(quotient);
  }
  return out;
}

std::size_t effective_degree(const std::vector<wide>& c) {
  wide scale = 0;
  for (const auto& x : c) scale = std::max(scale, wide(abs(x)));
  if (scale == 0) return 0;
  const wide floor = scale * wide("1e-45");
  std::size_t d = c.size() - 1;
  while (d > 0 && abs(c[d]) <= floor) --d;
  return d;
}

std::vector<cwide> companion_roots(const std::vector<wide>& q, std::size_t degree) {
  using Mat = Eigen::Matrix<wide, Eigen::Dynamic, Eigen::Dynamic>;
  const auto n = static_cast<Eigen::Index>(degree);
  Mat companion = Mat::Zero(n, n);
  for (Eigen::Index i = 1; i < n; ++i) companion(i, i - 1) = 1;
  for (Eigen::Index i = 0; i < n; ++i) {
    companion(i, n - 1) = -q[static_cast<std::size_t>(i)] / q[degree];
  }
  Eigen::EigenSolver<Mat> solver(companion, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    fail(ErrorKind::RangeError, "companion eigenvalue iteration did not converge");
  }
  std::vector<cwide> roots;
  roots.reserve(degree);
  for (Eigen::Index i = 0; i < n; ++i) roots.push_back(solver.eigenvalues()[i]);
  return roots;
}

std::complex<double> product_exponent(const PoleTerm& t, std::complex<double> s) {
  return -t.lambda * s / (s + t.a);
}

std::string describe(const PoleTerm& t) {
  std::ostringstream os;
  os.precision(6);
  os << "a=" << t.a << " lambda=" << t.lambda;
  return os.str();
}

}  // namespace

std::complex<double> PadeApproximant::operator()(std::complex<double> s) const {
  const cwide x(wide(s.real()), wide(s.imag()));
  return narrow(horner(p, x) / horner(q, x));
}

std::vector<wide> PadeApproximant::taylor(std::size_t n) const {
  std::vector<wide> t(n, wide(0));
  for (std::size_t k = 0; k < n; ++k) {
    wide acc = k < p.size() ? p[k] : wide(0);
    for (std::size_t j = 1; j < q.size() && j <= k; ++j) acc -= q[j] * t[k - j];
    t[k] = acc / q[0];
  }
  return t;
}

PadeApproximant fit(const PowerSeries& series, int K, int L) {
  if (K < 0 || L < 0 || !(K == L || K == L - 1)) {
    fail(ErrorKind::UnsupportedOrder,
         "only diagonal [L,L] and sub-diagonal [L-1,L] approximants are supported; got [" +
             std::to_string(K) + "," + std::to_string(L) + "]");
  }
  const auto need = static_cast<std::size_t>(K + L + 1);
  if (series.size() < need) {
    fail(ErrorKind::InsufficientOrders,
         "[" + std::to_string(K) + "," + std::to_string(L) + "] needs " +
             std::to_string(need) + " coefficients, have " +
             std::to_string(series.size()));
  }
  const auto& c = series.c;
  auto coef = [&](int idx) { return idx < 0 ? wide(0) : c[static_cast<std::size_t>(idx)]; };

  PadeApproximant pa;
  pa.K = K;
  pa.L = L;
  pa.q.assign(static_cast<std::size_t>(L) + 1, wide(0));
  pa.q[0] = 1;

  if (L > 0) {
    const auto n = static_cast<std::size_t>(L);
    std::vector<wide> a(n * n);
    std::vector<wide> b(n);
    for (int i = 1; i <= L; ++i) {
      for (int j = 1; j <= L; ++j) {
        a[static_cast<std::size_t>(i - 1) * n + static_cast<std::size_t>(j - 1)] = coef(K + i - j);
      }
      b[static_cast<std::size_t>(i - 1)] = -coef(K + i);
    }
    const WideLU lu(a, n);
    if (lu.singular()) {
      fail(ErrorKind::SingularHankel,
           "Hankel matrix is singular (condition number = inf)");
    }

    // ||A^-1||_1 from the explicit inverse; L is small.
    wide inv_norm = 0;
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<wide> e(n, wide(0));
      e[j] = 1;
      const auto col = lu.solve(e);
      wide s = 0;
      for (const auto& x : col) s += abs(x);
      inv_norm = std::max(inv_norm, s);
    }
    const wide cond = one_norm(a, n) * inv_norm;
    pa.hankel_condition = to_double(cond);
    if (!(cond < wide(kHankelConditionLimit))) {
      std::ostringstream os;
      os << "Hankel matrix is numerically singular (condition number "
         << pa.hankel_condition << ")";
      fail(ErrorKind::SingularHankel, os.str());
    }

    auto x = lu.solve(b);
    // One step of iterative refinement.
    std::vector<wide> r(n);
    for (std::size_t i = 0; i < n; ++i) {
      wide acc = b[i];
      for (std::size_t j = 0; j < n; ++j) acc -= a[i * n + j] * x[j];
      r[i] = acc;
    }
    const auto dx = lu.solve(r);
    for (std::size_t i = 0; i < n; ++i) x[i] += dx[i];

    // Unknown j-1 holds Q_j.
    for (std::size_t j = 0; j < n; ++j) pa.q[j + 1] = x[j];
  }

  pa.p.assign(static_cast<std::size_t>(K) + 1, wide(0));
  for (int m = 0; m <= K; ++m) {
    wide acc = 0;
    for (int j = 0; j <= std::min(m, L); ++j) acc += coef(m - j) * pa.q[static_cast<std::size_t>(j)];
    pa.p[static_cast<std::size_t>(m)] = acc;
  }
  return pa;
}

std::complex<double> PoleResidueForm::rational(std::complex<double> s) const {
  std::complex<double> acc = constant;
  for (const auto& t : terms) {
    std::complex<double> denom = s + t.a;
    if (t.multiplicity > 1) denom = std::pow(denom, t.multiplicity);
    acc += t.lambda / denom;
  }
  return acc;
}

bool PoleResidueForm::all_real_positive() const {
  return std::all_of(terms.begin(), terms.end(), [](const PoleTerm& t) {
    return t.multiplicity == 1 && t.a.imag() == 0 && t.lambda.imag() == 0 &&
           t.a.real() > 0 && t.lambda.real() > 0;
  });
}

PoleResidueForm to_pole_residue(const PadeApproximant& pa, PoleForm form) {
  PoleResidueForm out;
  out.form = form;

  const std::size_t dq = effective_degree(pa.q);
  std::vector<wide> num = pa.p;
  const std::size_t dp = effective_degree(num);
  if (dq == 0) {
    if (dp > 0) {
      fail(ErrorKind::DegreeMismatch,
           "denominator is constant; no pole-residue form for a polynomial");
    }
    out.constant = to_double(num[0] / pa.q[0]);
    return out;
  }
  if (dp > dq) {
    fail(ErrorKind::DegreeMismatch,
         "numerator degree exceeds denominator degree");
  }
  if (dp == dq) {
    const wide lead = num[dp] / pa.q[dq];
    out.constant = to_double(lead);
    for (std::size_t i = 0; i <= dq && i < num.size(); ++i) num[i] -= lead * pa.q[i];
  }

  const auto roots = companion_roots(pa.q, dq);

  // Group numerically coincident roots.
  std::vector<int> cluster(roots.size(), -1);
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (cluster[i] >= 0) continue;
    cluster[i] = static_cast<int>(groups.size());
    groups.push_back({i});
    for (std::size_t j = i + 1; j < roots.size(); ++j) {
      if (cluster[j] >= 0) continue;
      const wide scale = std::max({wide(abs(roots[i])), wide(abs(roots[j])), wide("1e-30")});
      if (abs(roots[i] - roots[j]) < wide(kRepeatedRootTolerance) * scale) {
        cluster[j] = cluster[i];
        groups.back().push_back(j);
      }
    }
  }

  std::vector<cwide> centers;
  std::vector<std::size_t> mult;
  for (const auto& g : groups) {
    cwide mean(0, 0);
    for (auto idx : g) mean += roots[idx];
    mean /= wide(g.size());
    centers.push_back(mean);
    mult.push_back(g.size());
  }

  if (form == PoleForm::ProductOfExponentials) {
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (mult[g] > 1) {
        std::ostringstream os;
        os << "denominator has a root of multiplicity " << mult[g] << " near "
           << narrow(centers[g]) << "; product-of-exponentials form needs simple poles";
        fail(ErrorKind::RepeatedRoots, os.str());
      }
    }
  }

  for (std::size_t g = 0; g < groups.size(); ++g) {
    const cwide r = centers[g];
    const std::size_t m = mult[g];
    if (m == 1) {
      // Residue R(r) / Q'(r).
      std::vector<wide> dq_coeffs(dq);
      for (std::size_t j = 1; j <= dq; ++j) dq_coeffs[j - 1] = pa.q[j] * wide(j);
      const cwide lam = horner(num, r) / horner(dq_coeffs, r);
      out.terms.push_back({-narrow(r), narrow(lam), 1});
      continue;
    }
    // Generalized residues: with D(s) = Q(s) / (s - r)^m, the coefficient
    // of (s - r)^-k is the (m-k)-th Taylor coefficient of R/D about r.
    std::vector<cwide> d_poly{cwide(pa.q[dq], 0)};
    for (std::size_t h = 0; h < groups.size(); ++h) {
      if (h == g) continue;
      for (std::size_t rep = 0; rep < mult[h]; ++rep) {
        std::vector<cwide> next(d_poly.size() + 1, cwide(0, 0));
        for (std::size_t i = 0; i < d_poly.size(); ++i) {
          next[i + 1] += d_poly[i];
          next[i] -= d_poly[i] * centers[h];
        }
        d_poly = std::move(next);
      }
    }
    std::vector<cwide> r_poly;
    for (const auto& x : num) r_poly.emplace_back(x, 0);
    const auto rt = shift_polynomial(r_poly, r, m);
    const auto dt = shift_polynomial(d_poly, r, m);
    std::vector<cwide> ratio(m, cwide(0, 0));
    for (std::size_t k = 0; k < m; ++k) {
      cwide acc = rt[k];
      for (std::size_t j = 1; j <= k; ++j) acc -= dt[j] * ratio[k - j];
      ratio[k] = acc / dt[0];
    }
    for (std::size_t k = 1; k <= m; ++k) {
      out.terms.push_back({-narrow(r), narrow(ratio[m - k]), static_cast<int>(k)});
    }
  }

  std::sort(out.terms.begin(), out.terms.end(), [](const PoleTerm& x, const PoleTerm& y) {
    if (x.a.real() != y.a.real()) return x.a.real() < y.a.real();
    if (x.a.imag() != y.a.imag()) return x.a.imag() < y.a.imag();
    return x.multiplicity < y.multiplicity;
  });
  return out;
}

PoleResidueForm filter_poles(const PoleResidueForm& prf, const FilterOptions& options) {
  PoleResidueForm out;
  out.form = prf.form;
  out.constant = prf.constant;
  out.discarded_count = prf.discarded_count;
  out.discarded = prf.discarded;

  auto discard = [&](const PoleTerm& t, std::string reason) {
    if (options.emit_warnings) warn("discarded pole term " + describe(t) + ": " + reason);
    out.discarded.push_back({t, std::move(reason)});
    ++out.discarded_count;
  };

  if (prf.form == PoleForm::SumOfPoles) {
    for (const auto& t : prf.terms) {
      if (t.a.real() > 0) {
        out.terms.push_back(t);
      } else {
        discard(t, "pole in the closed right half-plane (Re a <= 0)");
      }
    }
  } else {
    const double tol = options.pairing_tolerance;
    auto near_real = [tol](const PoleTerm& t) {
      return std::abs(t.a.imag()) <= tol * std::abs(t.a) &&
             std::abs(t.lambda.imag()) <= tol * std::abs(t.lambda);
    };
    const std::complex<double> probes[] = {{0.5, 0}, {2, 0}, {0, 0.1}, {0, 0.5},
                                           {0, 1},   {0, 2}, {0, 5},   {0, 10}};

    std::vector<bool> used(prf.terms.size(), false);
    std::vector<PoleTerm> candidates;
    for (std::size_t i = 0; i < prf.terms.size(); ++i) {
      if (used[i]) continue;
      used[i] = true;
      const auto& t = prf.terms[i];
      if (t.a.imag() == 0 && t.lambda.imag() == 0) {
        candidates.push_back(t);
        continue;
      }
      // Partner: the unused term closest to the conjugate.
      std::size_t partner = prf.terms.size();
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < prf.terms.size(); ++j) {
        if (used[j]) continue;
        const double d = std::abs(prf.terms[j].a - std::conj(t.a));
        if (d < best) {
          best = d;
          partner = j;
        }
      }
      const bool has_partner =
          partner < prf.terms.size() && best <= 1e-6 * std::abs(t.a);
      if (!has_partner) {
        if (near_real(t)) {
          candidates.push_back({{t.a.real(), 0}, {t.lambda.real(), 0}, 1});
        } else {
          discard(t, "complex term without a conjugate partner");
        }
        continue;
      }
      const auto& u = prf.terms[partner];
      used[partner] = true;
      if (!(near_real(t) && near_real(u))) {
        discard(t, "complex conjugate pair");
        discard(u, "complex conjugate pair");
        continue;
      }
      const PoleTerm merged{{0.5 * (t.a.real() + u.a.real()), 0},
                            {t.lambda.real() + u.lambda.real(), 0},
                            1};
      bool ok = true;
      for (auto s : probes) {
        const auto pair_value = std::exp(product_exponent(t, s) + product_exponent(u, s));
        const auto merged_value = std::exp(product_exponent(merged, s));
        if (std::abs(pair_value - merged_value) > options.consolidation_tolerance) {
          ok = false;
          break;
        }
      }
      if (ok) {
        candidates.push_back(merged);
      } else {
        discard(t, "complex conjugate pair failed the consolidation check");
        discard(u, "complex conjugate pair failed the consolidation check");
      }
    }

    for (const auto& t : candidates) {
      if (t.a.real() <= 0) {
        discard(t, "non-positive exponential rate (a <= 0)");
      } else if (t.lambda.real() <= 0) {
        discard(t, "non-positive Poisson rate (lambda <= 0)");
      } else {
        out.terms.push_back(t);
      }
    }
  }

  if (out.terms.empty() && !prf.terms.empty()) {
    fail(ErrorKind::AllPolesDiscarded,
         "every pole term violated the analytic structure (" +
             std::to_string(prf.terms.size()) + " discarded)");
  }
  return out;
}

bool is_complex_structure_discard(const DiscardRecord& record) {
  return record.term.a.real() > 0 && record.reason.rfind("complex", 0) == 0;
}

}  // namespace clutter
