#include "clutter/validate.hpp"

#include "clutter/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <string>

namespace clutter {

double mae(std::span<const double> theoretical, std::span<const double> empirical) {
  if (theoretical.size() != empirical.size()) {
    fail(ErrorKind::LengthMismatch, "MAE needs equal lengths (" +
                                        std::to_string(theoretical.size()) + " vs " +
                                        std::to_string(empirical.size()) + ")");
  }
  if (theoretical.empty()) fail(ErrorKind::LengthMismatch, "MAE of empty vectors");
  double acc = 0.0;
  for (std::size_t i = 0; i < theoretical.size(); ++i) {
    acc += std::abs(theoretical[i] - empirical[i]);
  }
  return acc / static_cast<double>(theoretical.size());
}

std::size_t default_bin_count(std::size_t n) {
  return static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
}

Histogram empirical_pdf(std::span<const double> samples, std::size_t n_bins) {
  if (n_bins < 2) fail(ErrorKind::InvalidArgument, "histogram needs at least two bins");
  if (samples.empty()) fail(ErrorKind::InvalidArgument, "histogram of an empty sample");
  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  double lo = *lo_it, hi = *hi_it;
  if (hi == lo) {
    // One occupied bin centred on the common value.
    const double half = 0.5 * static_cast<double>(n_bins);
    lo -= half;
    hi += half;
  }
  Histogram out;
  out.lo = lo;
  out.width = (hi - lo) / static_cast<double>(n_bins);
  std::vector<std::size_t> counts(n_bins, 0);
  for (double x : samples) {
    auto b = static_cast<std::size_t>(std::max(0.0, std::floor((x - lo) / out.width)));
    ++counts[std::min(b, n_bins - 1)];
  }
  const double norm = 1.0 / (static_cast<double>(samples.size()) * out.width);
  out.centers.resize(n_bins);
  out.density.resize(n_bins);
  for (std::size_t b = 0; b < n_bins; ++b) {
    out.centers[b] = lo + (static_cast<double>(b) + 0.5) * out.width;
    out.density[b] = static_cast<double>(counts[b]) * norm;
  }
  return out;
}

std::vector<double> empirical_acf(std::span<const double> samples, std::size_t n_lags,
                                  Execution exec) {
  const std::size_t n = samples.size();
  if (n_lags >= n) fail(ErrorKind::InvalidArgument, "ACF lag count must be below the length");
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= static_cast<double>(n);
  std::vector<double> centered(n);
  for (std::size_t i = 0; i < n; ++i) centered[i] = samples[i] - mean;

  std::vector<double> c(n_lags + 1);
  for_each_index(n_lags + 1, exec, [&](std::size_t k) {
    double acc = 0.0;
    for (std::size_t i = 0; i + k < n; ++i) acc += centered[i] * centered[i + k];
    c[k] = acc / static_cast<double>(n);
  });
  const double c0 = c[0];
  if (!(c0 > 0.0)) {
    std::vector<double> flat(n_lags + 1, 0.0);
    flat[0] = 1.0;
    return flat;
  }
  for (auto& x : c) x /= c0;
  c[0] = 1.0;
  return c;
}

std::vector<LTEstimate> empirical_lt(std::span<const double> samples,
                                     std::span<const std::complex<double>> s, Execution exec) {
  if (samples.empty()) fail(ErrorKind::InvalidArgument, "empirical LT of an empty sample");
  const auto n = static_cast<double>(samples.size());
  std::vector<LTEstimate> out(s.size());
  for_each_index(s.size(), exec, [&](std::size_t j) {
    if (s[j] == std::complex<double>(0.0, 0.0)) {
      out[j] = {1.0, 0.0, 0.0};
      return;
    }
    double sr = 0.0, si = 0.0, sr2 = 0.0, si2 = 0.0;
    for (double x : samples) {
      const auto e = std::exp(-s[j] * x);
      sr += e.real();
      si += e.imag();
      sr2 += e.real() * e.real();
      si2 += e.imag() * e.imag();
    }
    const double mr = sr / n, mi = si / n;
    const double vr = std::max(0.0, sr2 / n - mr * mr);
    const double vi = std::max(0.0, si2 / n - mi * mi);
    out[j] = {{mr, mi}, std::sqrt(vr / n), std::sqrt(vi / n)};
  });
  return out;
}

double ValidationReference::pdf_at(double x) const {
  if (grid.size() < 2 || x < grid.front() || x > grid.back()) return 0.0;
  const double h = grid[1] - grid[0];
  const double pos = (x - grid.front()) / h;
  const auto i = std::min(static_cast<std::size_t>(pos), grid.size() - 2);
  const double w = pos - static_cast<double>(i);
  return (1.0 - w) * pdf[i] + w * pdf[i + 1];
}

ValidationReference make_reference(const PipelineModel& model, const ACFSpec& acf,
                                   const PipelineOptions& options, std::size_t n_lags,
                                   const ILTParams& ilt) {
  ValidationReference ref;
  const double mean = model.output_cumulants(1);
  const double sd = std::sqrt(model.output_cumulants(2));
  const double hi = mean + 40.0 * sd;
  constexpr std::size_t kPoints = 8193;
  ref.grid.resize(kPoints);
  for (std::size_t i = 0; i < kPoints; ++i) {
    ref.grid[i] = hi * static_cast<double>(i) / static_cast<double>(kPoints - 1);
  }
  ref.pdf = reference_pdf(model.spec, ref.grid, ilt);
  if (options.ar_coeffs) {
    ref.acf = ar_autocorrelation(model.ar.coeffs(), n_lags);
  } else {
    ref.acf = acf.lags(n_lags);
  }
  return ref;
}

TrialResult score_trial(std::span<const double> v, const ValidationReference& ref,
                        std::size_t n_bins, std::size_t n_lags, Execution exec) {
  if (ref.acf.size() < n_lags + 1) {
    fail(ErrorKind::LengthMismatch, "reference ACF is shorter than the lag count");
  }
  TrialResult out;
  const auto hist = empirical_pdf(v, n_bins);
  std::vector<double> theo(n_bins);
  for (std::size_t b = 0; b < n_bins; ++b) theo[b] = ref.pdf_at(hist.centers[b]);
  out.pdf_mae = mae(theo, hist.density);

  const auto emp = empirical_acf(v, n_lags, exec);
  out.acf_mae = mae(std::span(ref.acf).subspan(1, n_lags), std::span(emp).subspan(1, n_lags));
  out.negative_count = static_cast<std::size_t>(std::count_if(v.begin(), v.end(),
                                                              [](double x) { return x < 0.0; }));
  return out;
}

void to_json(nlohmann::json& j, const ValidationReport& r) {
  auto trials = nlohmann::json::array();
  for (const auto& t : r.trials) {
    trials.push_back({{"pdf_mae", t.pdf_mae}, {"acf_mae", t.acf_mae},
                      {"negative_count", t.negative_count}});
  }
  j = {{"pdf_mae", r.pdf_mae},
       {"acf_mae", r.acf_mae},
       {"n_bins", r.n_bins},
       {"n_lags", r.n_lags},
       {"trial_count", r.trial_count},
       {"length", r.length},
       {"wall_time_s", r.wall_time_s},
       {"discarded_pole_count", r.discarded_pole_count},
       {"negative_fraction", r.negative_fraction},
       {"trials", trials}};
}

ValidationReport monte_carlo(const PipelineModel& model, const ValidationReference& ref,
                             const ValidationOptions& options, Execution exec) {
  if (options.trials < 1) fail(ErrorKind::InvalidArgument, "need at least one trial");
  ValidationReport report;
  report.n_bins = options.bins.value_or(default_bin_count(options.length));
  report.n_lags = options.lags;
  report.trial_count = options.trials;
  report.length = options.length;
  report.discarded_pole_count = model.input.prf.discarded_count;
  report.trials.resize(options.trials);

  const auto start = std::chrono::steady_clock::now();
  const RngStream master(options.seed);
  for_each_index(options.trials, exec, [&](std::size_t t) {
    try {
      const auto texture = synthesize(model, options.length, master.split(t), Execution::Serial);
      report.trials[t] = score_trial(texture.v, ref, report.n_bins, report.n_lags);
    } catch (const Error& e) {
      throw Error(e.kind(), "trial " + std::to_string(t) + ": " + e.what());
    }
  });
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::size_t negatives = 0;
  for (const auto& t : report.trials) {
    report.pdf_mae += t.pdf_mae;
    report.acf_mae += t.acf_mae;
    negatives += t.negative_count;
  }
  const auto n = static_cast<double>(options.trials);
  report.pdf_mae /= n;
  report.acf_mae /= n;
  report.negative_fraction = static_cast<double>(negatives) / (n * static_cast<double>(options.length));
  return report;
}

}  // namespace clutter
