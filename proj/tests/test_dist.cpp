#include "clutter/dist.hpp"
#include "clutter/warnings.hpp"
#include "support.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>

using namespace clutter;
using cd = std::complex<double>;

TEST_SUITE("dist") {

TEST_CASE("parameter validation") {
  CHECK_ERROR(ErrorKind::InvalidArgument, DistributionSpec::gamma(-1.0, 1.0));
  CHECK_ERROR(ErrorKind::InvalidArgument, DistributionSpec::gamma(1.0, 0.0));
  CHECK_ERROR(ErrorKind::InvalidArgument, DistributionSpec::ptas(0.5, -1.0, 1.0));
  CHECK_ERROR(ErrorKind::InvalidArgument, DistributionSpec::ptas(2.5, 1.0, 1.0));
  CHECK_ERROR(ErrorKind::DomainError, DistributionSpec::ptas(1.0, 1.0, 1.0));
  WarningCapture capture;
  const auto spec = DistributionSpec::ptas(1.9, 2.0, 0.5);
  CHECK(capture.messages().size() == 1);
  CHECK_ERROR(ErrorKind::DomainError, cumulants(spec, 4));
}

TEST_CASE("closed-form transforms") {
  CHECK(std::abs(closed_form_lt(DistributionSpec::gamma(1, 1), 1.0) - 0.5) < 1e-15);
  const auto p = DistributionSpec::ptas(0.5, 1.0, 1.0);
  CHECK(std::abs(closed_form_lt(p, 1.0) - std::exp(2.0 * (1.0 - std::sqrt(2.0)))) < 1e-14);
  CHECK(std::abs(closed_form_lt(DistributionSpec::ptas(0.95, 2, 4), 0.0) - 1.0) < 1e-15);
  CHECK_ERROR(ErrorKind::DomainError, closed_form_lt(DistributionSpec::gamma(2, 1), -2.0));
}

TEST_CASE("cumulant formulas") {
  CHECK(cumulants(DistributionSpec::gamma(2, 1), 2)(2) == doctest::Approx(2.0));
  CHECK(cumulants(DistributionSpec::ptas(0.5, 1, 1), 1)(1) == doctest::Approx(1.0));
  const double k3 = cumulants(DistributionSpec::ptas(0.95, 2, 4), 3)(3);
  const double oracle = 2.0 * std::pow(4.0, 2.05) * std::tgamma(2.05) / std::tgamma(0.05);
  CHECK(k3 == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("low cumulants match derivatives of the log transform") {
  const auto spec = DistributionSpec::ptas(0.95, 2, 4);
  const auto k = cumulants(spec, 2);
  auto logl = [&](double s) { return std::log(closed_form_lt(spec, s).real()); };
  const double h = 1e-4;
  CHECK(-(logl(h) - logl(-h)) / (2 * h) == doctest::Approx(k(1)).epsilon(1e-6));
  CHECK((logl(h) - 2 * logl(0) + logl(-h)) / (h * h) == doctest::Approx(k(2)).epsilon(1e-4));
}

TEST_CASE("gamma reference density") {
  const std::vector<double> grid{0.0, 1.0};
  const auto f = reference_pdf(DistributionSpec::gamma(2, 1), grid);
  CHECK(f[0] == 0.0);
  CHECK(f[1] == doctest::Approx(std::exp(-1.0)));
  const auto e = reference_pdf(DistributionSpec::gamma(1, 2), std::vector<double>{0.0});
  CHECK(e[0] == doctest::Approx(0.5));
}

TEST_CASE("PTaS reference density integrates to one") {
  const auto grid = testing::linspace(0.01, 60.0, 6000);
  const auto f = reference_pdf(DistributionSpec::ptas(0.95, 2, 4), grid);
  double mass = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) mass += 0.5 * (f[i] + f[i - 1]) * (grid[i] - grid[i - 1]);
  CHECK(mass == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("JSON round trip and strictness") {
  const auto spec = DistributionSpec::ptas(0.95, 2, 4);
  nlohmann::json j = spec;
  const auto back = distribution_from_json(j);
  CHECK(back.family() == Family::PTAlphaS);
  CHECK(back.ptas_params().eta == 4.0);
  j["extra"] = 1;
  CHECK_ERROR(ErrorKind::ConfigError, distribution_from_json(j));
  CHECK_ERROR(ErrorKind::ConfigError, distribution_from_json({{"family", "weibull"}}));
  CHECK_ERROR(ErrorKind::ConfigError, distribution_from_json({{"family", "gamma"}, {"alpha", 2}}));
}

TEST_CASE("degenerate texture gives a Rayleigh amplitude") {
  SampledDensity tex;
  tex.atoms = {{1.5, 1.0}};
  const auto r = testing::linspace(0.0, 8.0, 41);
  const auto f = amplitude_pdf(tex, r);
  for (std::size_t i = 0; i < r.size(); ++i) {
    CHECK(f[i] == doctest::Approx(r[i] / 3.0 * std::exp(-r[i] * r[i] / 6.0)).epsilon(1e-12));
  }
}

TEST_CASE("gamma texture gives the K distribution") {
  const double alpha = 2.0, lambda = 1.0;
  SampledDensity tex;
  tex.x = testing::linspace(0.0, 60.0, 12001);
  tex.f = reference_pdf(DistributionSpec::gamma(alpha, lambda), tex.x);
  const auto r = testing::linspace(0.25, 8.0, 10);
  const auto f = amplitude_pdf(tex, r);
  for (std::size_t i = 0; i < r.size(); ++i) {
    // Independent route: quadrature of the mixing integral against the
    // closed-form gamma density.
    const double x = r[i];
    auto integrand = [&](double v) {
      if (v <= 0.0) return 0.0;
      return x / (2 * v) * std::exp(-x * x / (4 * v)) * v * std::exp(-v / lambda);
    };
    const double oracle =
        boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, 80.0, 15, 1e-12);
    const double bessel = x / (std::tgamma(alpha) * std::pow(lambda, alpha)) *
                          std::pow(x * x * lambda / 4.0, (alpha - 1.0) / 2.0) *
                          std::cyl_bessel_k(alpha - 1.0, x / std::sqrt(lambda));
    CHECK(oracle == doctest::Approx(bessel).epsilon(1e-8));
    CHECK(f[i] == doctest::Approx(bessel).epsilon(1e-4));
  }
}

TEST_CASE("scaling the texture scales the amplitude") {
  auto amp = [](double lambda, std::span<const double> r) {
    SampledDensity tex;
    tex.x = testing::linspace(0.0, 60.0 * lambda, 12001);
    tex.f = reference_pdf(DistributionSpec::gamma(2.0, lambda), tex.x);
    return amplitude_pdf(tex, r);
  };
  const auto r = testing::linspace(0.5, 6.0, 8);
  std::vector<double> r2;
  for (double x : r) r2.push_back(x * std::sqrt(2.0));
  const auto f1 = amp(1.0, r);
  const auto f2 = amp(2.0, r2);
  for (std::size_t i = 0; i < r.size(); ++i) {
    CHECK(f2[i] * std::sqrt(2.0) == doctest::Approx(f1[i]).epsilon(1e-6));
  }
}

TEST_CASE("too little texture mass is refused") {
  SampledDensity tex;
  tex.x = testing::linspace(0.0, 1.0, 101);
  tex.f = reference_pdf(DistributionSpec::gamma(2.0, 1.0), tex.x);
  CHECK_ERROR(ErrorKind::InsufficientGrid, amplitude_pdf(tex, std::vector<double>{1.0}));
}

}
