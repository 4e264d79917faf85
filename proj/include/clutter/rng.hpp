#pragma once

#include <cstdint>

namespace clutter {

/// Counter-based splittable generator. Output n of a stream is
/// mix(key + n * gamma), so a stream is fully described by (key, gamma,
/// counter) and split(i) derives an independent child from (key, i) alone,
/// whatever the parent's position.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1).
  double uniform();
  /// Standard normal (Box-Muller).
  double normal();
  /// Poisson(lambda): inversion for lambda < 30, PTRS rejection above.
  std::uint64_t poisson(double lambda);
  /// Gamma(shape k, scale) for integer k >= 1: product of uniforms for small
  /// k, Marsaglia-Tsang otherwise.
  double erlang(std::uint64_t k, double scale);
  /// Unit-rate exponential.
  double exponential();

  RngStream split(std::uint64_t index) const;

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  RngStream(std::uint64_t key, bool);

  std::uint64_t key_;
  std::uint64_t gamma_;
  std::uint64_t counter_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace clutter
