#include "clutter/dist.hpp"

#include "clutter/error.hpp"
#include "clutter/ilt.hpp"
#include "clutter/warnings.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <string>

namespace clutter {

namespace {

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

std::complex<double> checked_log(std::complex<double> base) {
  if (base.imag() == 0.0 && base.real() <= 0.0) {
    fail(ErrorKind::DomainError, "argument lies on the branch cut of the transform");
  }
  return std::log(base);
}

void reject_unknown_keys(const nlohmann::json& j, const std::set<std::string>& allowed) {
  for (const auto& item : j.items()) {
    if (!allowed.contains(item.key())) {
      fail(ErrorKind::ConfigError, "unknown key in distribution block: " + item.key());
    }
  }
}

double required_number(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    fail(ErrorKind::ConfigError, std::string("distribution block needs numeric '") + key + "'");
  }
  return j.at(key).get<double>();
}

}  // namespace

DistributionSpec DistributionSpec::gamma(double alpha, double lambda) {
  if (!positive_finite(alpha) || !positive_finite(lambda)) {
    fail(ErrorKind::InvalidArgument, "gamma shape and scale must be positive");
  }
  return DistributionSpec(GammaParams{alpha, lambda});
}

DistributionSpec DistributionSpec::ptas(double alpha, double gamma, double eta) {
  if (!positive_finite(gamma) || !positive_finite(eta)) {
    fail(ErrorKind::InvalidArgument, "PTaS scale and truncation parameter must be positive");
  }
  if (!std::isfinite(alpha) || alpha <= 0.0 || alpha >= 2.0) {
    fail(ErrorKind::InvalidArgument, "PTaS alpha must lie in (0, 2)");
  }
  if (alpha == 1.0) {
    fail(ErrorKind::DomainError, "PTaS with alpha = 1 is a point mass");
  }
  if (alpha > 1.0) {
    std::ostringstream os;
    os << "PTaS alpha = " << alpha
       << " is outside (0, 1]; the transform is not that of a positive law";
    warn(os.str());
  }
  return DistributionSpec(TemperedStableParams{alpha, gamma, eta});
}

void to_json(nlohmann::json& j, const DistributionSpec& spec) {
  if (spec.family() == Family::Gamma) {
    const auto& p = spec.gamma_params();
    j = {{"family", "gamma"}, {"alpha", p.alpha}, {"lambda", p.lambda}};
  } else {
    const auto& p = spec.ptas_params();
    j = {{"family", "ptas"}, {"alpha", p.alpha}, {"gamma", p.gamma}, {"eta", p.eta}};
  }
}

DistributionSpec distribution_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("family") || !j.at("family").is_string()) {
    fail(ErrorKind::ConfigError, "distribution block needs a 'family' string");
  }
  const auto family = j.at("family").get<std::string>();
  if (family == "gamma") {
    reject_unknown_keys(j, {"family", "alpha", "lambda"});
    return DistributionSpec::gamma(required_number(j, "alpha"), required_number(j, "lambda"));
  }
  if (family == "ptas") {
    reject_unknown_keys(j, {"family", "alpha", "gamma", "eta"});
    return DistributionSpec::ptas(required_number(j, "alpha"), required_number(j, "gamma"),
                                  required_number(j, "eta"));
  }
  fail(ErrorKind::ConfigError, "unknown distribution family: " + family);
}

std::complex<double> closed_form_lt(const DistributionSpec& spec, std::complex<double> s) {
  if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
    fail(ErrorKind::InvalidArgument, "Laplace argument must be finite");
  }
  if (spec.family() == Family::Gamma) {
    const auto& p = spec.gamma_params();
    return std::exp(-p.alpha * checked_log(1.0 + p.lambda * s));
  }
  const auto& p = spec.ptas_params();
  const double c = p.gamma / (p.alpha * std::pow(p.eta, p.alpha));
  const auto power = std::exp(p.alpha * checked_log(p.eta * s + 1.0));
  return std::exp(c * (1.0 - power));
}

CumulantVector cumulants(const DistributionSpec& spec, std::size_t n_max) {
  if (n_max < 1) fail(ErrorKind::InvalidArgument, "need at least one cumulant");
  std::vector<wide> k(n_max);
  if (spec.family() == Family::Gamma) {
    // alpha lambda^n (n-1)!
    const auto& p = spec.gamma_params();
    wide term = wide(p.alpha) * wide(p.lambda);
    for (std::size_t n = 1; n <= n_max; ++n) {
      if (n > 1) term *= wide(p.lambda) * wide(n - 1);
      k[n - 1] = term;
    }
  } else {
    // gamma eta^{n-alpha} Gamma(n-alpha)/Gamma(1-alpha), with the gamma ratio
    // expanded as prod_{m=1}^{n-1} (m - alpha).
    const auto& p = spec.ptas_params();
    const wide alpha(p.alpha);
    const wide eta(p.eta);
    wide term = wide(p.gamma) * pow(eta, 1 - alpha);
    for (std::size_t n = 1; n <= n_max; ++n) {
      if (n > 1) term *= eta * (wide(n - 1) - alpha);
      k[n - 1] = term;
    }
  }
  for (std::size_t n = 1; n <= n_max; ++n) {
    if (abs(k[n - 1]) > wide(1e300)) {
      fail(ErrorKind::RangeError,
           "cumulant of order " + std::to_string(n) + " overflows double range");
    }
  }
  if (n_max >= 2 && k[1] <= 0) {
    fail(ErrorKind::DomainError, "second cumulant is not positive for this parameter set");
  }
  return CumulantVector(std::move(k));
}

std::vector<double> reference_pdf(const DistributionSpec& spec, std::span<const double> grid,
                                  const ILTParams& ilt) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i]) || grid[i] < 0.0 || (i > 0 && grid[i] <= grid[i - 1])) {
      fail(ErrorKind::InvalidArgument, "density grid must be nonnegative and ascending");
    }
  }
  if (spec.family() == Family::Gamma) {
    const auto& p = spec.gamma_params();
    const double log_norm = std::lgamma(p.alpha) + p.alpha * std::log(p.lambda);
    std::vector<double> out;
    out.reserve(grid.size());
    for (double v : grid) {
      if (v == 0.0) {
        if (p.alpha == 1.0) {
          out.push_back(1.0 / p.lambda);
        } else {
          out.push_back(p.alpha > 1.0 ? 0.0 : std::numeric_limits<double>::infinity());
        }
        continue;
      }
      out.push_back(std::exp((p.alpha - 1.0) * std::log(v) - v / p.lambda - log_norm));
    }
    return out;
  }
  return pdf_via_fft_ilt([&spec](std::complex<double> s) { return closed_form_lt(spec, s); },
                         grid, ilt);
}

double SampledDensity::mass() const {
  double total = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) total += 0.5 * (f[i] + f[i - 1]) * (x[i] - x[i - 1]);
  for (const auto& [loc, m] : atoms) total += m;
  return total;
}

std::vector<double> amplitude_pdf(const SampledDensity& texture, std::span<const double> r_grid) {
  if (texture.x.size() != texture.f.size()) {
    fail(ErrorKind::LengthMismatch, "texture abscissae and values differ in length");
  }
  if (texture.x.size() == 1) {
    fail(ErrorKind::InvalidArgument, "texture grid needs at least two points");
  }
  for (std::size_t i = 1; i < texture.x.size(); ++i) {
    if (!(texture.x[i] > texture.x[i - 1])) {
      fail(ErrorKind::InvalidArgument, "texture grid must be ascending");
    }
  }
  const double mass = texture.mass();
  if (!(mass >= kMinTextureMass)) {
    std::ostringstream os;
    os << "texture grid captures only " << mass << " of the probability mass";
    fail(ErrorKind::InsufficientGrid, os.str());
  }

  auto kernel = [](double r, double v) {
    if (v <= 0.0) return 0.0;
    return r / (2.0 * v) * std::exp(-r * r / (4.0 * v));
  };
  using Quadrature = boost::math::quadrature::gauss_kronrod<double, 15>;

  std::vector<double> out;
  out.reserve(r_grid.size());
  for (double r : r_grid) {
    double acc = 0.0;
    for (const auto& [loc, m] : texture.atoms) acc += m * kernel(r, loc);
    for (std::size_t i = 1; i < texture.x.size(); ++i) {
      const double x0 = texture.x[i - 1], x1 = texture.x[i];
      const double f0 = texture.f[i - 1], f1 = texture.f[i];
      if (f0 == 0.0 && f1 == 0.0) continue;
      auto integrand = [&](double v) {
        const double w = (v - x0) / (x1 - x0);
        return kernel(r, v) * ((1.0 - w) * f0 + w * f1);
      };
      acc += Quadrature::integrate(integrand, x0, x1, 5, 1e-10);
    }
    out.push_back(acc);
  }
  return out;
}

}  // namespace clutter
