#include "clutter/rng.hpp"

#include "clutter/error.hpp"

#include <bit>
#include <cmath>
#include <numbers>

namespace clutter {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t mix64_variant(std::uint64_t z) {
  z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdULL;
  z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ULL;
  return z ^ (z >> 33);
}

// Odd increment with enough bit transitions.
std::uint64_t derive_gamma(std::uint64_t key) {
  std::uint64_t g = mix64_variant(key + kGolden) | 1ULL;
  if (std::popcount(g ^ (g >> 1)) < 24) g ^= 0xaaaaaaaaaaaaaaaaULL;
  return g;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed) : RngStream(mix64(seed + kGolden), true) {}

RngStream::RngStream(std::uint64_t key, bool) : key_(key), gamma_(derive_gamma(key)) {}

std::uint64_t RngStream::next_u64() {
  ++counter_;
  return mix64(key_ + counter_ * gamma_);
}

double RngStream::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::exponential() { return -std::log(uniform()); }

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  const double r = std::sqrt(-2.0 * std::log(uniform()));
  const double theta = 2.0 * std::numbers::pi * uniform();
  spare_normal_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

std::uint64_t RngStream::poisson(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    fail(ErrorKind::InvalidArgument, "Poisson rate must be finite and nonnegative");
  }
  if (lambda == 0.0) return 0;
  if (lambda < 30.0) {
    double p = std::exp(-lambda);
    double cdf = p;
    const double u = uniform();
    std::uint64_t k = 0;
    while (u > cdf && p > 0.0) {
      ++k;
      p *= lambda / static_cast<double>(k);
      cdf += p;
    }
    return k;
  }
  // Hormann's transformed rejection with squeeze.
  const double slam = std::sqrt(lambda);
  const double loglam = std::log(lambda);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = uniform() - 0.5;
    const double v = uniform();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -lambda + k * loglam - std::lgamma(k + 1.0)) {
      return static_cast<std::uint64_t>(k);
    }
  }
}

double RngStream::erlang(std::uint64_t k, double scale) {
  if (k == 0) fail(ErrorKind::InvalidArgument, "Erlang shape must be at least 1");
  if (k < 8) {
    double prod = 1.0;
    for (std::uint64_t i = 0; i < k; ++i) prod *= uniform();
    return -std::log(prod) * scale;
  }
  const double d = static_cast<double>(k) - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
  }
}

RngStream RngStream::split(std::uint64_t index) const {
  return RngStream(mix64(key_ ^ mix64_variant(index * kGolden + gamma_)), true);
}

}  // namespace clutter
