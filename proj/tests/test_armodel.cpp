#include "clutter/armodel.hpp"
#include "support.hpp"

#include <cmath>
#include <random>

using namespace clutter;

TEST_SUITE("armodel") {

TEST_CASE("exp-cosine ACF") {
  const ExpCosineACF p{8.0, 10.0, 0.6};
  const auto r = exp_cosine_acf(p, 1.0, 10);
  CHECK(r[0] == 1.0);
  CHECK(r[10] == doctest::Approx(std::exp(-1.25)).epsilon(1e-14));
  CHECK_ERROR(ErrorKind::InvalidArgument, exp_cosine_acf({8.0, 10.0, 0.0}, 1000.0, 5));
  CHECK_ERROR(ErrorKind::InvalidArgument, exp_cosine_acf({8.0, 10.0, 0.6}, 0.0, 5));
}

TEST_CASE("explicit ACF must start at one and cover the lags") {
  ACFSpec bad;
  bad.source = std::vector<double>{0.9, 0.5};
  CHECK_ERROR(ErrorKind::InvalidArgument, bad.lags(1));
  ACFSpec shortlist;
  shortlist.source = std::vector<double>{1.0, 0.5};
  CHECK_ERROR(ErrorKind::InvalidArgument, shortlist.lags(3));
}

TEST_CASE("Yule-Walker identities") {
  const double rho = 0.7;
  const auto ar1 = yule_walker(std::vector<double>{1.0, rho}, 1);
  CHECK(ar1.coeffs()[0] == doctest::Approx(-rho));
  const auto white = yule_walker(std::vector<double>{1, 0, 0, 0}, 3);
  for (double a : white.coeffs()) CHECK(a == 0.0);
}

TEST_CASE("Yule-Walker round trip") {
  for (const std::vector<double>& a : {std::vector<double>{-0.9, 0.1}, std::vector<double>{-1.2, 0.5},
                                       std::vector<double>{0.3, -0.2, 0.1}}) {
    const auto r = ar_autocorrelation(a, a.size() + 5);
    // Independent check of the theoretical ACF: r_k = -sum a_j r_{k-j} for k > p.
    for (std::size_t k = a.size() + 1; k < r.size(); ++k) {
      double acc = 0.0;
      for (std::size_t j = 1; j <= a.size(); ++j) acc -= a[j - 1] * r[k - j];
      CHECK(r[k] == doctest::Approx(acc).epsilon(1e-12));
    }
    const auto fit = yule_walker(r, a.size());
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::abs(fit.coeffs()[k] - a[k]) < 1e-8);
    const auto back = ar_autocorrelation(fit.coeffs(), a.size());
    for (std::size_t k = 1; k <= a.size(); ++k) CHECK(std::abs(back[k] - r[k]) < 1e-8);
  }
}

TEST_CASE("non positive-definite lags") {
  CHECK_ERROR(ErrorKind::NotPositiveDefinite, yule_walker(std::vector<double>{1.0, 1.0, 1.0}, 2));
}

TEST_CASE("impulse responses") {
  const auto geo = impulse_response(std::vector<double>{-0.5}, 1e-3);
  CHECK(geo.L_IR == 10);
  for (std::size_t i = 0; i <= geo.L_IR; ++i) CHECK(geo.h[i] == std::pow(0.5, i));
  const auto none = impulse_response(std::vector<double>{});
  CHECK(none.L_IR == 0);
  CHECK(none.h == std::vector<double>{1.0});
}

TEST_CASE("filtering a unit impulse reproduces h") {
  const ARModel m({-0.9, 0.1});
  std::vector<double> impulse(m.h().size(), 0.0);
  impulse[0] = 1.0;
  CHECK(m.filter(impulse) == m.h());
  CHECK(m.h()[1] == doctest::Approx(0.9));
}

TEST_CASE("unstable models are rejected") {
  CHECK_ERROR(ErrorKind::UnstableModel, ARModel({0.9, -0.1}));
  CHECK_ERROR(ErrorKind::UnstableModel, ARModel({-1.5}));
}

TEST_CASE("slow decay hits the truncation cap") {
  CHECK_ERROR(ErrorKind::TruncationCapExceeded, impulse_response(std::vector<double>{-0.99999999}, 1e-3));
}

TEST_CASE("power sums are cached") {
  const ARModel m({-0.5});
  CHECK(to_double(m.iota()[1]) == doctest::Approx((1 - std::pow(0.25, 11)) / 0.75));
  CHECK(m.spectral_radius() == doctest::Approx(0.5));
}

TEST_CASE("multivariate impulse tensors") {
  SUBCASE("one channel reduces to the scalar case") {
    Eigen::MatrixXd a(1, 1);
    a << -0.5;
    const auto t = mv_impulse_tensor(MultivariateARModel({a}));
    const auto h = impulse_response(std::vector<double>{-0.5});
    REQUIRE(t.L_IR() == h.L_IR);
    for (std::size_t i = 0; i <= h.L_IR; ++i) CHECK(t.at(i, 0, 0) == h.h[i]);
  }
  SUBCASE("diagonal") {
    Eigen::MatrixXd a(2, 2);
    a << -0.5, 0.0, 0.0, -0.2;
    const auto t = mv_impulse_tensor(MultivariateARModel({a}));
    for (std::size_t i = 0; i <= t.L_IR(); ++i) {
      CHECK(t.at(i, 0, 0) == doctest::Approx(std::pow(0.5, i)));
      CHECK(t.at(i, 1, 1) == doctest::Approx(std::pow(0.2, i)));
      CHECK(t.at(i, 0, 1) == 0.0);
      CHECK(t.at(i, 1, 0) == 0.0);
    }
  }
  SUBCASE("coupled") {
    Eigen::MatrixXd a(2, 2);
    a << -0.4, 0.2, -0.1, -0.3;
    const auto t = mv_impulse_tensor(MultivariateARModel({a}));
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(2, 2);
    for (std::size_t i = 0; i <= t.L_IR(); ++i) {
      for (std::size_t p = 0; p < 2; ++p) {
        for (std::size_t q = 0; q < 2; ++q) {
          CHECK(t.at(i, p, q) == doctest::Approx(power(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q))).epsilon(1e-12));
        }
      }
      power = (-a) * power;
    }
  }
}

TEST_CASE("multivariate back-solve") {
  Eigen::MatrixXd a(2, 2);
  a << -0.5, 0.0, 0.0, -0.2;
  const auto t = mv_impulse_tensor(MultivariateARModel({a}));
  const std::vector<CumulantVector> k_out{CumulantVector{1, 2, 3}, CumulantVector{2, 1, 0.5}};
  const auto k_in = mv_backsolve_cumulants(k_out, t);
  for (std::size_t ch = 0; ch < 2; ++ch) {
    std::vector<double> h;
    for (std::size_t i = 0; i <= t.L_IR(); ++i) h.push_back(t.at(i, ch, ch));
    const auto scalar = backsolve_input_cumulants(k_out[ch], h);
    for (std::size_t n = 1; n <= 3; ++n) CHECK(k_in[ch](n) == doctest::Approx(scalar(n)).epsilon(1e-12));
  }
}

TEST_CASE("multivariate round trip on random coupled filters") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> d(-0.45, 0.45);
  std::uniform_real_distribution<double> k(0.1, 2.0);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::MatrixXd a(2, 2);
    a << d(gen), d(gen), d(gen), d(gen);
    const auto t = mv_impulse_tensor(MultivariateARModel({a}));
    std::vector<CumulantVector> k_in;
    for (int ch = 0; ch < 2; ++ch) {
      std::vector<wide> kappa;
      for (int n = 0; n < 8; ++n) kappa.emplace_back(k(gen));
      k_in.emplace_back(kappa);
    }
    try {
      const auto back = mv_backsolve_cumulants(mv_forward_cumulants(k_in, t), t);
      for (std::size_t ch = 0; ch < 2; ++ch) {
        for (std::size_t n = 1; n <= 8; ++n) CHECK(std::abs(back[ch](n) / k_in[ch](n) - 1.0) < 1e-8);
      }
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::SingularCumulantSystem);
    }
  }
}

TEST_CASE("unstable multivariate model") {
  Eigen::MatrixXd a(2, 2);
  a << -1.2, 0.0, 0.0, 0.1;
  CHECK_ERROR(ErrorKind::UnstableModel, MultivariateARModel({a}));
}

}
