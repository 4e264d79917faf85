#include "clutter/sampler.hpp"

#include "clutter/error.hpp"

#include <algorithm>
#include <cmath>

namespace clutter {

namespace {

template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const PipelineError&) {
    throw;
  } catch (const Error& e) {
    throw PipelineError(name, e);
  }
}

// Gaussian draws of the given variance, chunked like the inputs.
std::vector<double> gaussian_sequence(std::size_t n, double variance, const RngStream& rng,
                                      Execution exec) {
  std::vector<double> out(n);
  const std::size_t chunks = (n + kInputChunk - 1) / kInputChunk;
  const double sd = std::sqrt(variance);
  for_each_index(chunks, exec, [&](std::size_t c) {
    auto local = rng.split(c);
    const std::size_t end = std::min(n, (c + 1) * kInputChunk);
    for (std::size_t i = c * kInputChunk; i < end; ++i) out[i] = sd * local.normal();
  });
  return out;
}

}  // namespace

double sample_zj(double a, double lambda, RngStream& rng) {
  if (!(a > 0.0) || !(lambda >= 0.0)) {
    fail(ErrorKind::InvalidArgument, "component sampler needs a > 0 and lambda >= 0");
  }
  const auto k = rng.poisson(lambda);
  if (k == 0) return 0.0;
  return rng.erlang(k, 1.0 / a);
}

double sample_u(const PoleResidueForm& prf, RngStream& rng) {
  if (prf.form != PoleForm::ProductOfExponentials || !prf.all_real_positive()) {
    fail(ErrorKind::WrongForm, "sampling needs real positive product-form terms");
  }
  double u = prf.constant;
  for (const auto& t : prf.terms) u += sample_zj(t.a.real(), t.lambda.real(), rng);
  return u;
}

std::vector<double> generate_inputs(const PoleResidueForm& prf, std::size_t n,
                                    const RngStream& rng, Execution exec) {
  if (prf.form != PoleForm::ProductOfExponentials || !prf.all_real_positive()) {
    fail(ErrorKind::WrongForm, "sampling needs real positive product-form terms");
  }
  std::vector<double> u(n);
  const std::size_t chunks = (n + kInputChunk - 1) / kInputChunk;
  for_each_index(chunks, exec, [&](std::size_t c) {
    auto local = rng.split(c);
    const std::size_t end = std::min(n, (c + 1) * kInputChunk);
    for (std::size_t i = c * kInputChunk; i < end; ++i) u[i] = sample_u(prf, local);
  });
  return u;
}

PipelineModel build_pipeline(const DistributionSpec& spec, const ACFSpec& acf,
                             const PipelineOptions& options) {
  const auto n_cumulants = static_cast<std::size_t>(options.pade.K + options.pade.L + 2);

  auto ar = stage("ar_model", [&] {
    std::vector<double> coeffs;
    if (options.ar_coeffs) {
      coeffs = *options.ar_coeffs;
    } else {
      coeffs = yule_walker(acf, options.ar_order, options.truncation_threshold).coeffs();
    }
    return ARModel(std::move(coeffs), options.truncation_threshold, n_cumulants);
  });

  auto k_out = stage("cumulants", [&] { return cumulants(spec, n_cumulants); });
  auto k_in = stage("backsolve", [&] { return backsolve_input_cumulants(k_out, ar.h_wide()); });
  auto input = stage("continuation", [&] {
    if (!(k_in.at(2) > 0)) {
      fail(ErrorKind::DomainError, "back-solved input variance is not positive");
    }
    return recover_cumulant_path(k_in, options.pade);
  });

  const double in_mean = k_in(1);
  const double out_mean = k_out(1);
  return PipelineModel{spec,    std::move(ar), std::move(k_out),       std::move(k_in),
                       std::move(input), in_mean, out_mean, options.warmup_factor};
}

TextureSequence synthesize(const PipelineModel& model, std::size_t length,
                           const RngStream& stream, Execution exec) {
  return stage("sampling", [&] {
    TextureSequence out;
    out.warmup = model.warmup_factor * model.ar.L_IR();
    auto u = generate_inputs(model.input.prf, out.warmup + length, stream.split(0), exec);
    for (auto& x : u) x -= model.input_mean;
    const auto y = model.ar.filter(u);
    out.v.assign(y.begin() + static_cast<std::ptrdiff_t>(out.warmup), y.end());
    for (auto& x : out.v) {
      x += model.output_mean;
      if (x < 0.0) ++out.negative_sample_count;
    }
    return out;
  });
}

TextureSequence run_pipeline(const DistributionSpec& spec, const ACFSpec& acf,
                             const PipelineOptions& options, std::size_t length,
                             std::uint64_t seed, Execution exec) {
  const auto model = build_pipeline(spec, acf, options);
  return synthesize(model, length, RngStream(seed), exec);
}

ClutterSequence assemble_cg(const TextureSequence& texture, const SpeckleOptions& options,
                            const RngStream& stream, Execution exec) {
  if (!(options.variance > 0.0)) fail(ErrorKind::InvalidArgument, "speckle variance must be positive");
  const std::size_t n = texture.v.size();
  const auto speckle = stream.split(1);
  auto zi = gaussian_sequence(n, options.variance, speckle.split(0), exec);
  auto zq = gaussian_sequence(n, options.variance, speckle.split(1), exec);

  if (options.doppler_width) {
    const double w = *options.doppler_width;
    if (!(w > 0.0)) fail(ErrorKind::InvalidArgument, "Doppler width must be positive");
    std::vector<double> r(options.doppler_order + 1);
    for (std::size_t k = 0; k < r.size(); ++k) {
      const double x = static_cast<double>(k) / w;
      r[k] = std::exp(-0.5 * x * x);
    }
    const auto shaping = yule_walker(r, options.doppler_order);
    double energy = 0.0;
    for (double h : shaping.h()) energy += h * h;
    const double gain = 1.0 / std::sqrt(energy);
    const std::size_t warm = 5 * shaping.L_IR();
    for (auto* z : {&zi, &zq}) {
      std::vector<double> padded(warm, 0.0);
      padded.insert(padded.end(), z->begin(), z->end());
      auto extra = gaussian_sequence(warm, options.variance,
                                     speckle.split(z == &zi ? 2 : 3), exec);
      std::copy(extra.begin(), extra.end(), padded.begin());
      const auto y = shaping.filter(padded);
      for (std::size_t i = 0; i < n; ++i) (*z)[i] = gain * y[warm + i];
    }
  }

  ClutterSequence out;
  out.x.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v = texture.v[i];
    if (v < 0.0) {
      v = 0.0;
      ++out.clamp_count;
    }
    out.x[i] = std::sqrt(v) * std::complex<double>(zi[i], zq[i]);
  }
  return out;
}

}  // namespace clutter
