#include "clutter/ilt.hpp"

#include "clutter/error.hpp"
#include "clutter/warnings.hpp"
#include "fftw_lock.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>

namespace clutter {

std::mutex& detail::fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

namespace {

// In-place inverse DFT: x_n <- sum_k x_k exp(+2 pi i k n / N).
void inverse_dft(std::vector<std::complex<double>>& data) {
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(data.size()), buf, buf, FFTW_BACKWARD,
                            FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
}

double estimate_atom(const LaplaceFunction& lt, double threshold) {
  const double far = lt({1e15, 0.0}).real();
  const double nearer = lt({1e12, 0.0}).real();
  if (std::abs(far) <= threshold) return 0.0;
  if (std::abs(far - nearer) > 1e-3 * std::abs(far)) return 0.0;
  return far;
}

double catmull_rom(const std::vector<double>& g, double h, double u) {
  const double pos = u / h;
  auto i = static_cast<std::ptrdiff_t>(std::floor(pos));
  const auto last = static_cast<std::ptrdiff_t>(g.size()) - 1;
  i = std::clamp<std::ptrdiff_t>(i, 0, last - 1);
  const double t = pos - static_cast<double>(i);
  auto at = [&](std::ptrdiff_t k) {
    if (k < 0) return 2.0 * g[0] - g[1];
    if (k > last) return 2.0 * g[static_cast<std::size_t>(last)] - g[static_cast<std::size_t>(last - 1)];
    return g[static_cast<std::size_t>(k)];
  };
  const double p0 = at(i - 1), p1 = at(i), p2 = at(i + 1), p3 = at(i + 2);
  return 0.5 * ((2.0 * p1) + (-p0 + p2) * t + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * t * t +
                (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * t * t * t);
}

}  // namespace

ILTResult invert_laplace(const LaplaceFunction& lt, std::span<const double> u_grid,
                         const ILTParams& params) {
  if (u_grid.empty()) fail(ErrorKind::InvalidArgument, "empty evaluation grid");
  double u_max = 0.0;
  for (double u : u_grid) {
    if (!std::isfinite(u) || u < 0.0) {
      fail(ErrorKind::InvalidArgument, "inversion grid must be finite and nonnegative");
    }
    u_max = std::max(u_max, u);
  }
  if (u_max <= 0.0) fail(ErrorKind::InvalidArgument, "inversion grid has no positive point");
  if (params.ls < 16 || params.ls_max < params.ls || params.period_factor <= 1.0) {
    fail(ErrorKind::InvalidArgument, "invalid inversion parameters");
  }

  const double sigma = params.sigma.value_or(2.0 / u_max);
  const double period = params.period_factor * u_max;
  const double d_omega = 2.0 * std::numbers::pi / period;

  ILTResult out;
  out.atom = estimate_atom(lt, params.decay_threshold);

  // Node spacing at most half the finest output spacing.
  std::vector<double> sorted(u_grid.begin(), u_grid.end());
  std::sort(sorted.begin(), sorted.end());
  double du_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i] > sorted[i - 1]) du_min = std::min(du_min, sorted[i] - sorted[i - 1]);
  }
  std::size_t n = params.ls;
  while (n < params.ls_max && period / static_cast<double>(n) > 0.5 * du_min) n *= 2;
  double tail = 0.0;
  for (;;) {
    const double omega_max = static_cast<double>(n - 1) * d_omega;
    tail = std::abs(lt({sigma, omega_max}) - out.atom);
    if (tail < params.decay_threshold || n >= params.ls_max) break;
    n *= 2;
  }
  out.tail_magnitude = tail;
  if (tail >= params.decay_threshold) {
    std::ostringstream os;
    os << "Laplace transform has not decayed at omega_max: |F| = " << tail
       << " with " << n << " frequency samples";
    if (tail > kNonDecayingLimit) fail(ErrorKind::NonDecayingLT, os.str());
    warn(os.str() + "; inversion accuracy is limited");
  }

  auto lattice = [&](std::size_t nodes) {
    std::vector<std::complex<double>> data(nodes);
    for_each_index(nodes, params.execution, [&](std::size_t k) {
      const std::complex<double> s(sigma, static_cast<double>(k) * d_omega);
      data[k] = lt(s) - out.atom;
    });
    data[0] *= 0.5;
    inverse_dft(data);
    const double step = period / static_cast<double>(nodes);
    std::vector<double> g(nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
      const double u = static_cast<double>(i) * step;
      g[i] = std::exp(sigma * u) * d_omega / std::numbers::pi * data[i].real();
    }
    // The series converges to the midpoint of the jump at the origin.
    g[0] *= 2.0;
    return g;
  };

  // Interpolation error at spacing h, estimated from the odd nodes predicted
  // off the even ones (error at 2h, scaled by 2^-4).
  auto interpolation_ok = [&](const std::vector<double>& g) {
    const double step = period / static_cast<double>(g.size());
    const auto top = std::min(g.size() - 1, static_cast<std::size_t>(u_max / step) + 2);
    std::vector<double> even;
    even.reserve(g.size() / 2);
    for (std::size_t i = 0; i < g.size(); i += 2) even.push_back(g[i]);
    double err = 0.0, scale = 0.0;
    for (std::size_t i = 0; i <= top; ++i) {
      scale = std::max(scale, std::abs(g[i]));
      if (i % 2 == 1 && i > 3) {
        err = std::max(err, std::abs(g[i] - catmull_rom(even, 2.0 * step, static_cast<double>(i) * step)));
      }
    }
    return err / 16.0 <= params.interpolation_tolerance * scale;
  };

  auto g = lattice(n);
  while (n < params.ls_max && !interpolation_ok(g)) {
    n *= 2;
    g = lattice(n);
  }
  out.ls_used = n;
  const double h = period / static_cast<double>(n);

  out.density.reserve(u_grid.size());
  out.min_value = std::numeric_limits<double>::infinity();
  for (double u : u_grid) {
    const double v = catmull_rom(g, h, u);
    out.density.push_back(v);
    out.min_value = std::min(out.min_value, v);
    if (v < -kNegativeDensityTolerance) ++out.negative_count;
  }
  return out;
}

}  // namespace clutter
