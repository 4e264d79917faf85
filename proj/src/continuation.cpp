#include "clutter/continuation.hpp"

#include "clutter/error.hpp"
#include "clutter/warnings.hpp"
#include "fftw_lock.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace clutter {

namespace {

std::string order_tag(int K, int L) {
  return "[" + std::to_string(K) + "," + std::to_string(L) + "]";
}

void check_pole(const PoleTerm& t, std::complex<double> s) {
  if (std::abs(s + t.a) <= 1e-12 * std::max(1.0, std::abs(t.a))) {
    std::ostringstream os;
    os << "evaluation point " << s << " hits the pole at " << -t.a;
    fail(ErrorKind::PoleHit, os.str());
  }
}

void emit_discard_warnings(const PoleResidueForm& prf) {
  for (const auto& d : prf.discarded) {
    std::ostringstream os;
    os.precision(6);
    os << "discarded pole term a=" << d.term.a << " lambda=" << d.term.lambda << ": "
       << d.reason;
    warn(os.str());
  }
}

void check_orders(const RecoveryOptions& o) {
  if (!(o.K == o.L || o.K == o.L - 1) || o.L < 1) {
    fail(ErrorKind::UnsupportedOrder, "recovery needs [L,L] or [L-1,L] with L >= 1; got " +
                                          order_tag(o.K, o.L));
  }
}

// I_1(x) e^{-x}.
double bessel_i1_scaled(double x) {
  if (x < 500.0) return std::cyl_bessel_i(1.0, x) * std::exp(-x);
  double term = 1.0, sum = 1.0;
  for (int k = 1; k <= 8; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -(4.0 - odd * odd) / (8.0 * k * x);
    sum += term;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

}  // namespace

void to_json(nlohmann::json& j, const PoleResidueForm& prf) {
  j = nlohmann::json::object();
  j["form"] = prf.form == PoleForm::SumOfPoles ? "sum_of_poles" : "product_exp";
  auto terms = nlohmann::json::array();
  for (const auto& t : prf.terms) {
    nlohmann::json e;
    if (t.a.imag() == 0.0 && t.lambda.imag() == 0.0) {
      e = {{"a", t.a.real()}, {"lambda", t.lambda.real()}};
    } else {
      e = {{"a", {t.a.real(), t.a.imag()}}, {"lambda", {t.lambda.real(), t.lambda.imag()}}};
    }
    if (t.multiplicity != 1) e["multiplicity"] = t.multiplicity;
    terms.push_back(e);
  }
  j["terms"] = terms;
  j["constant"] = prf.constant;
  j["discarded"] = prf.discarded_count;
}

void to_json(nlohmann::json& j, const RecoveredLT& r) {
  j = nlohmann::json::object();
  j["path"] = r.path == ContinuationPath::MomentPath ? "moment" : "cumulant";
  j["K"] = r.K;
  j["L"] = r.L;
  j["hankel_condition"] = r.hankel_condition;
  j["pole_residue"] = r.prf;
  j["attempts"] = r.attempts;
}

RecoveredLT recover_moment_path(const MomentVector& m, const RecoveryOptions& options) {
  check_orders(options);
  const auto series = build_series(m);
  const int diff = options.L - options.K;
  RecoveredLT out;
  out.path = ContinuationPath::MomentPath;
  std::string last_error;
  for (int L = options.L; L >= 1; --L) {
    const int K = L - diff;
    PadeApproximant pa;
    try {
      pa = fit(series, K, L);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::SingularHankel) throw;
      out.attempts.push_back(order_tag(K, L) + ": " + e.what());
      last_error = e.what();
      continue;
    }
    auto prf = to_pole_residue(pa, PoleForm::SumOfPoles);
    FilterOptions quiet = options.filter;
    quiet.emit_warnings = false;
    out.prf = filter_poles(prf, quiet);
    emit_discard_warnings(out.prf);
    out.K = K;
    out.L = L;
    out.hankel_condition = pa.hankel_condition;
    out.attempts.push_back(order_tag(K, L) + ": accepted, " +
                           std::to_string(out.prf.terms.size()) + " terms, " +
                           std::to_string(out.prf.discarded_count) + " discarded");
    return out;
  }
  fail(ErrorKind::SingularHankel, "no order down to L = 1 gave a regular Hankel system (" +
                                      last_error + ")");
}

RecoveredLT recover_moment_path(const CumulantVector& k, const RecoveryOptions& options) {
  return recover_moment_path(cumulants_to_moments(k), options);
}

RecoveredLT recover_cumulant_path(const CumulantVector& k, const RecoveryOptions& options) {
  check_orders(options);
  const auto series = build_series(k);
  const int diff = options.L - options.K;
  RecoveredLT out;
  out.path = ContinuationPath::CumulantPath;
  bool structural_failure = false;
  std::string last_error;
  for (int L = options.L; L >= 1; --L) {
    const int K = L - diff;
    const auto tag = order_tag(K, L);
    auto structural = [&](const std::string& why) {
      out.attempts.push_back(tag + ": " + why);
      structural_failure = true;
      last_error = why;
    };
    PadeApproximant pa;
    try {
      pa = fit(series, K, L);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::SingularHankel) throw;
      out.attempts.push_back(tag + ": " + e.what());
      last_error = e.what();
      continue;
    }
    PoleResidueForm filtered;
    try {
      const auto prf = to_pole_residue(pa, PoleForm::ProductOfExponentials);
      FilterOptions quiet = options.filter;
      quiet.emit_warnings = false;
      filtered = filter_poles(prf, quiet);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::RepeatedRoots && e.kind() != ErrorKind::AllPolesDiscarded) throw;
      structural(e.what());
      if (L <= options.min_L) break;
      continue;
    }
    const auto complex_terms =
        std::count_if(filtered.discarded.begin(), filtered.discarded.end(),
                      [](const DiscardRecord& d) { return is_complex_structure_discard(d); });
    if (complex_terms > 0) {
      structural(std::to_string(complex_terms) + " complex terms with Re(a) > 0");
      if (L <= options.min_L) break;
      continue;
    }
    emit_discard_warnings(filtered);
    out.prf = std::move(filtered);
    out.K = K;
    out.L = L;
    out.hankel_condition = pa.hankel_condition;
    out.attempts.push_back(tag + ": accepted, " + std::to_string(out.prf.terms.size()) +
                           " terms, " + std::to_string(out.prf.discarded_count) + " discarded");
    if (L != options.L) {
      warn("cumulant-path continuation fell back from " + order_tag(options.K, options.L) +
           " to " + tag);
    }
    return out;
  }
  std::string detail;
  for (const auto& a : out.attempts) detail += "\n  " + a;
  if (structural_failure) {
    fail(ErrorKind::ComplexPoleStructure,
         "no order down to L = " + std::to_string(options.min_L) +
             " gave real positive (a, lambda) terms:" + detail);
  }
  fail(ErrorKind::SingularHankel, "no order gave a regular Hankel system:" + detail);
}

std::complex<double> eval_lt(const RecoveredLT& r, std::complex<double> s) {
  for (const auto& t : r.prf.terms) check_pole(t, s);
  if (r.path == ContinuationPath::MomentPath) return r.prf.rational(s);
  std::complex<double> exponent = -r.prf.constant * s;
  for (const auto& t : r.prf.terms) exponent -= t.lambda * s / (s + t.a);
  return std::exp(exponent);
}

DensitySamples pdf_moment_path(const RecoveredLT& r, std::span<const double> u_grid) {
  if (r.path != ContinuationPath::MomentPath) {
    fail(ErrorKind::WrongPath, "closed-form inversion needs a moment-path transform");
  }
  DensitySamples out;
  out.atom = r.prf.constant;
  out.values.reserve(u_grid.size());
  out.min_value = std::numeric_limits<double>::infinity();
  for (double u : u_grid) {
    std::complex<double> acc = 0.0;
    if (u >= 0.0) {
      for (const auto& t : r.prf.terms) {
        const int m = t.multiplicity;
        const double poly = m == 1 ? 1.0 : std::pow(u, m - 1) / std::tgamma(static_cast<double>(m));
        acc += t.lambda * poly * std::exp(-t.a * u);
      }
    }
    const double v = acc.real();
    out.values.push_back(v);
    out.min_value = std::min(out.min_value, v);
    if (v < -kNegativeDensityTolerance) ++out.negative_count;
  }
  if (out.negative_count > 0) {
    warn("moment-path density is negative at " + std::to_string(out.negative_count) +
         " grid points; it is not a valid PDF");
  }
  return out;
}

ComponentDensity component_pdf_zj(double a, double lambda, std::span<const double> u_grid) {
  if (!(a > 0.0) || !(lambda >= 0.0) || !std::isfinite(a) || !std::isfinite(lambda)) {
    fail(ErrorKind::InvalidArgument, "component needs a > 0 and lambda >= 0");
  }
  ComponentDensity out;
  out.atom_mass = std::exp(-lambda);
  out.density.reserve(u_grid.size());
  for (double u : u_grid) {
    if (lambda == 0.0 || u < 0.0) {
      out.density.push_back(0.0);
    } else if (u == 0.0) {
      out.density.push_back(a * lambda * std::exp(-lambda));
    } else {
      const double x = 2.0 * std::sqrt(a * lambda * u);
      out.density.push_back(std::exp(-a * u - lambda + x) * std::sqrt(a * lambda / u) *
                            bessel_i1_scaled(x));
    }
  }
  return out;
}

namespace {

ComponentDensity convolve_lattice(const PoleResidueForm& prf, double du, std::size_t n) {
  std::size_t m = 1;
  while (m < 2 * n) m *= 2;
  const std::size_t bins = m / 2 + 1;

  std::vector<double> grid(n);
  for (std::size_t k = 0; k < n; ++k) grid[k] = static_cast<double>(k) * du;

  std::vector<double> real(m);
  std::vector<std::complex<double>> spectrum(bins), acc(bins, 1.0);
  auto* spec_buf = reinterpret_cast<fftw_complex*>(spectrum.data());
  fftw_plan forward, backward;
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    forward = fftw_plan_dft_r2c_1d(static_cast<int>(m), real.data(), spec_buf,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    backward = fftw_plan_dft_c2r_1d(static_cast<int>(m), spec_buf, real.data(),
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
  }

  double atom = 1.0;
  for (const auto& t : prf.terms) {
    const auto c = component_pdf_zj(t.a.real(), t.lambda.real(), grid);
    atom *= c.atom_mass;
    std::fill(real.begin(), real.end(), 0.0);
    // Trapezoid cell masses on the lattice.
    real[0] = c.atom_mass + 0.5 * du * c.density[0];
    for (std::size_t k = 1; k < n; ++k) real[k] = du * c.density[k];
    fftw_execute(forward);
    for (std::size_t b = 0; b < bins; ++b) acc[b] *= spectrum[b];
  }
  spectrum = acc;
  fftw_execute(backward);
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }

  ComponentDensity out;
  out.atom_mass = atom;
  out.density.resize(n);
  const double scale = 1.0 / static_cast<double>(m);
  out.density[0] = (real[0] * scale - atom) / (0.5 * du);
  for (std::size_t k = 1; k < n; ++k) out.density[k] = real[k] * scale / du;
  return out;
}

}  // namespace

ComponentDensity convolve_components(const PoleResidueForm& prf, double du, std::size_t n) {
  if (prf.form != PoleForm::ProductOfExponentials || !prf.all_real_positive()) {
    fail(ErrorKind::WrongForm, "convolution needs real positive product-form terms");
  }
  if (!(du > 0.0) || n < 2) fail(ErrorKind::InvalidArgument, "invalid convolution grid");
  // Richardson step on the O(du^2) lattice error.
  auto coarse = convolve_lattice(prf, du, n);
  const auto fine = convolve_lattice(prf, 0.5 * du, 2 * n - 1);
  for (std::size_t k = 0; k < n; ++k) {
    coarse.density[k] = (4.0 * fine.density[2 * k] - coarse.density[k]) / 3.0;
  }
  return coarse;
}

std::complex<double> ar_output_lt(const RecoveredLT& input, std::span<const double> h,
                                  std::complex<double> s) {
  if (input.path == ContinuationPath::MomentPath) {
    std::complex<double> prod = 1.0;
    for (double hi : h) prod *= eval_lt(input, hi * s);
    return prod;
  }
  std::complex<double> exponent = 0.0;
  for (double hi : h) {
    if (hi == 0.0) continue;
    const auto x = hi * s;
    exponent -= input.prf.constant * x;
    for (const auto& t : input.prf.terms) {
      check_pole(t, x);
      exponent -= t.lambda * x / (x + t.a);
    }
  }
  return std::exp(exponent);
}

ILTResult ar_output_pdf(const RecoveredLT& input, std::span<const double> h,
                        std::span<const double> y_grid, const ILTParams& params) {
  return invert_laplace(
      [&](std::complex<double> s) { return ar_output_lt(input, h, s); }, y_grid, params);
}

}  // namespace clutter
