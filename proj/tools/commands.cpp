#include "commands.hpp"

#include "clutter/error.hpp"
#include "clutter/warnings.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <unistd.h>

namespace clutter::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Stages output in memory; nothing touches the disk until commit().
class OutputSet {
 public:
  explicit OutputSet(fs::path prefix) : prefix_(std::move(prefix)) {}

  fs::path path(const std::string& suffix) const {
    return fs::path(prefix_.string() + suffix);
  }

  void add(const std::string& suffix, std::string content) {
    files_.emplace_back(path(suffix), std::move(content));
  }

  // Temp file next to the target, then rename over it.
  std::vector<fs::path> commit() const {
    std::vector<std::pair<fs::path, fs::path>> staged;
    try {
      for (const auto& [target, content] : files_) {
        if (target.has_parent_path()) fs::create_directories(target.parent_path());
        auto tmp = target;
        tmp += ".tmp." + std::to_string(::getpid());
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.close();
        if (!out) fail(ErrorKind::InvalidArgument, "cannot write " + tmp.string());
        staged.emplace_back(tmp, target);
      }
      for (const auto& [tmp, target] : staged) fs::rename(tmp, target);
    } catch (...) {
      std::error_code ec;
      for (const auto& [tmp, target] : staged) fs::remove(tmp, ec);
      throw;
    }
    std::vector<fs::path> out;
    for (const auto& f : files_) out.push_back(f.first);
    return out;
  }

 private:
  fs::path prefix_;
  std::vector<std::pair<fs::path, std::string>> files_;
};

void append_double(std::string& out, double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  out.append(buf, res.ptr);
}

std::string csv(const std::vector<std::string>& header,
                const std::vector<const std::vector<double>*>& columns) {
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c) out += ',';
    out += header[c];
  }
  out += '\n';
  const std::size_t rows = columns.empty() ? 0 : columns.front()->size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) out += ',';
      append_double(out, (*columns[c])[r]);
    }
    out += '\n';
  }
  return out;
}

std::string f64le(const std::vector<const std::vector<double>*>& columns) {
  const std::size_t rows = columns.empty() ? 0 : columns.front()->size();
  std::string out;
  out.reserve(rows * columns.size() * 8);
  for (std::size_t r = 0; r < rows; ++r) {
    for (const auto* col : columns) {
      const auto bits = std::bit_cast<std::uint64_t>((*col)[r]);
      for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xffu));
    }
  }
  return out;
}

json overrides_json(const std::vector<Override>& overrides) {
  auto out = json::array();
  for (const auto& o : overrides) out.push_back({{"path", o.path}, {"value", o.value}});
  return out;
}

json doubles_json(const CumulantVector& k) { return k.to_doubles(); }

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

json path_failure(const std::exception& e) {
  json out = {{"status", "failed"}, {"message", e.what()}};
  if (const auto* err = dynamic_cast<const Error*>(&e)) out["kind"] = to_string(err->kind());
  return out;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string format_double(double x) {
  std::string out;
  append_double(out, x);
  return out;
}

nlohmann::json error_record(const std::exception& e) {
  json err = {{"message", e.what()}};
  if (const auto* pe = dynamic_cast<const PipelineError*>(&e)) {
    err["kind"] = to_string(pe->kind());
    err["stage"] = pe->stage();
    err["cause"] = to_string(pe->cause());
  } else if (const auto* ce = dynamic_cast<const Error*>(&e)) {
    err["kind"] = to_string(ce->kind());
  } else if (dynamic_cast<const nlohmann::json::exception*>(&e)) {
    err["kind"] = to_string(ErrorKind::ConfigError);
  } else {
    err["kind"] = "InternalError";
  }
  err["exit_code"] = exit_code_for(e);
  return {{"error", err}};
}

int exit_code_for(const std::exception& e) {
  if (const auto* ce = dynamic_cast<const Error*>(&e)) {
    return ce->kind() == ErrorKind::ConfigError ? 2 : 3;
  }
  if (dynamic_cast<const nlohmann::json::exception*>(&e)) return 2;
  return 3;
}

std::vector<fs::path> cmd_simulate(const Invocation& inv) {
  const auto& cfg = inv.config;
  WarningCapture warnings;
  const auto model = build_pipeline(cfg.distribution, cfg.acf_spec(), cfg.pipeline_options());
  const RngStream stream(cfg.simulate.seed);
  const auto texture = synthesize(model, cfg.simulate.length, stream, inv.exec);

  std::vector<std::string> header{"v"};
  std::vector<const std::vector<double>*> columns{&texture.v};
  std::vector<double> re, im;
  json clutter = nullptr;
  if (cfg.simulate.speckle) {
    const auto cg = assemble_cg(texture, cfg.simulate.speckle_options, stream, inv.exec);
    re.reserve(cg.x.size());
    im.reserve(cg.x.size());
    for (const auto& x : cg.x) {
      re.push_back(x.real());
      im.push_back(x.imag());
    }
    header.insert(header.end(), {"x_re", "x_im"});
    columns.insert(columns.end(), {&re, &im});
    clutter = {{"clamp_count", cg.clamp_count}};
  }

  OutputSet out(inv.output_prefix);
  const bool as_csv = cfg.simulate.format == SampleFormat::Csv;
  const std::string sample_suffix = as_csv ? ".csv" : ".f64";
  out.add(sample_suffix, as_csv ? csv(header, columns) : f64le(columns));

  const json sidecar = {
      {"config", to_json(cfg)},
      {"overrides", overrides_json(inv.overrides)},
      {"seed", cfg.simulate.seed},
      {"samples",
       {{"file", out.path(sample_suffix).filename().string()},
        {"format", as_csv ? "csv" : "f64le"},
        {"columns", header},
        {"length", texture.v.size()}}},
      {"ar",
       {{"coeffs", model.ar.coeffs()},
        {"L_IR", model.ar.L_IR()},
        {"spectral_radius", model.ar.spectral_radius()}}},
      {"output_cumulants", doubles_json(model.output_cumulants)},
      {"input_cumulants", doubles_json(model.input_cumulants)},
      {"input", model.input},
      {"warmup", texture.warmup},
      {"negative_sample_count", texture.negative_sample_count},
      {"clutter", clutter},
      {"warnings", warnings.messages()},
  };
  out.add(".json", dump(sidecar));
  return out.commit();
}

std::vector<fs::path> cmd_validate(const Invocation& inv) {
  const auto& cfg = inv.config;
  WarningCapture warnings;
  const auto popts = cfg.pipeline_options();
  const auto acf = cfg.acf_spec();
  const auto model = build_pipeline(cfg.distribution, acf, popts);
  const auto ref = make_reference(model, acf, popts, cfg.validate.lags, cfg.ilt);
  const auto vopts = cfg.validation_options();
  const auto report = monte_carlo(model, ref, vopts, inv.exec);

  // Plot data from trial 0.
  const auto texture =
      synthesize(model, vopts.length, RngStream(vopts.seed).split(0), Execution::Serial);
  const auto hist = empirical_pdf(texture.v, report.n_bins);
  std::vector<double> theo_pdf;
  for (double c : hist.centers) theo_pdf.push_back(ref.pdf_at(c));
  const auto emp_acf = empirical_acf(texture.v, report.n_lags, inv.exec);
  std::vector<double> lag(report.n_lags + 1);
  for (std::size_t k = 0; k < lag.size(); ++k) lag[k] = static_cast<double>(k);
  std::vector<double> theo_acf(ref.acf.begin(),
                               ref.acf.begin() + static_cast<std::ptrdiff_t>(report.n_lags + 1));

  OutputSet out(inv.output_prefix);
  out.add("_pdf.csv", csv({"bin_center", "theoretical", "empirical"},
                          {&hist.centers, &theo_pdf, &hist.density}));
  out.add("_acf.csv", csv({"lag", "theoretical", "empirical"}, {&lag, &theo_acf, &emp_acf}));
  json j = report;
  j["config"] = to_json(cfg);
  j["overrides"] = overrides_json(inv.overrides);
  j["seed"] = vopts.seed;
  j["L_IR"] = model.ar.L_IR();
  j["input"] = model.input;
  j["warnings"] = warnings.messages();
  out.add(".json", dump(j));
  return out.commit();
}

std::vector<fs::path> cmd_diagnose(const Invocation& inv) {
  const auto& cfg = inv.config;
  const auto& d = cfg.diagnose;
  WarningCapture warnings;
  const auto k = cumulants(cfg.distribution, static_cast<std::size_t>(cfg.pade.K + cfg.pade.L + 2));
  const auto m = cumulants_to_moments(k);
  const auto n_coeffs = static_cast<std::size_t>(cfg.pade.K + cfg.pade.L + 1);

  json diag = {{"config", to_json(cfg)},
               {"overrides", overrides_json(inv.overrides)},
               {"cumulants", doubles_json(k)},
               {"moment_series_radius", convergence_radius_estimate(build_series(m, n_coeffs))},
               {"cumulant_series_radius", convergence_radius_estimate(build_series(k, n_coeffs))}};

  std::optional<RecoveredLT> moment, cumulant;
  try {
    moment = recover_moment_path(k, cfg.pade);
  } catch (const Error& e) {
    diag["moment_path"] = path_failure(e);
  }
  try {
    cumulant = recover_cumulant_path(k, cfg.pade);
  } catch (const Error& e) {
    diag["cumulant_path"] = path_failure(e);
  }

  auto eval = [](const std::optional<RecoveredLT>& r, std::complex<double> s) {
    if (!r) return std::complex<double>(nan(), nan());
    try {
      return eval_lt(*r, s);
    } catch (const Error&) {
      return std::complex<double>(nan(), nan());
    }
  };

  std::vector<double> omega(d.points), th_re, th_im, mo_re, mo_im, cu_re, cu_im;
  double mo_err = 0.0, cu_err = 0.0;
  for (std::size_t i = 0; i < d.points; ++i) {
    omega[i] = d.omega_max * static_cast<double>(i) / static_cast<double>(d.points - 1);
    const std::complex<double> s(0.0, omega[i]);
    const auto th = closed_form_lt(cfg.distribution, s);
    const auto mo = eval(moment, s);
    const auto cu = eval(cumulant, s);
    th_re.push_back(th.real());
    th_im.push_back(th.imag());
    mo_re.push_back(mo.real());
    mo_im.push_back(mo.imag());
    cu_re.push_back(cu.real());
    cu_im.push_back(cu.imag());
    mo_err = std::max(mo_err, std::abs(mo - th));
    cu_err = std::max(cu_err, std::abs(cu - th));
  }

  const double mean = k(1), sd = std::sqrt(k(2));
  const double u_max = d.u_max.value_or(mean + 10.0 * sd);
  std::vector<double> u(d.pdf_points);
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = u_max * static_cast<double>(i) / static_cast<double>(u.size() - 1);
  }
  std::vector<double> ref = reference_pdf(cfg.distribution, u, cfg.ilt);
  std::vector<double> mo_pdf(u.size(), nan()), cu_pdf(u.size(), nan()), conv_pdf(u.size(), nan());
  auto pdf_error = [&](const std::vector<double>& f) {
    // Skip u = 0, where the reference may be singular.
    double acc = 0.0;
    for (std::size_t i = 1; i < u.size(); ++i) acc += std::abs(f[i] - ref[i]);
    return acc / static_cast<double>(u.size() - 1);
  };

  if (moment) {
    json pj = {{"status", "ok"}, {"recovered", *moment}, {"max_lt_error", mo_err}};
    try {
      const auto dens = pdf_moment_path(*moment, u);
      mo_pdf = dens.values;
      pj["pdf"] = {{"valid", dens.valid()},
                   {"negative_count", dens.negative_count},
                   {"min_value", dens.min_value},
                   {"mae", pdf_error(mo_pdf)}};
    } catch (const Error& e) {
      pj["pdf"] = path_failure(e);
    }
    diag["moment_path"] = pj;
  }
  if (cumulant) {
    json pj = {{"status", "ok"}, {"recovered", *cumulant}, {"max_lt_error", cu_err}};
    try {
      const auto res = invert_laplace([&](std::complex<double> s) { return eval_lt(*cumulant, s); },
                                      u, cfg.ilt);
      cu_pdf = res.density;
      pj["pdf"] = {{"atom", res.atom},
                   {"negative_count", res.negative_count},
                   {"min_value", res.min_value},
                   {"ls_used", res.ls_used},
                   {"mae", pdf_error(cu_pdf)}};
    } catch (const Error& e) {
      pj["pdf"] = path_failure(e);
    }
    try {
      const auto conv = convolve_components(cumulant->prf, u[1] - u[0], u.size());
      conv_pdf = conv.density;
      pj["convolution"] = {{"atom", conv.atom_mass}, {"mae", pdf_error(conv_pdf)}};
    } catch (const Error& e) {
      pj["convolution"] = path_failure(e);
    }
    diag["cumulant_path"] = pj;
  }
  diag["warnings"] = warnings.messages();

  OutputSet out(inv.output_prefix);
  out.add("_lt.csv", csv({"omega", "theoretical_re", "theoretical_im", "moment_re", "moment_im",
                          "cumulant_re", "cumulant_im"},
                         {&omega, &th_re, &th_im, &mo_re, &mo_im, &cu_re, &cu_im}));
  out.add("_pdf.csv", csv({"u", "reference", "moment_path", "cumulant_ilt", "cumulant_convolution"},
                          {&u, &ref, &mo_pdf, &cu_pdf, &conv_pdf}));
  out.add(".json", dump(diag));
  return out.commit();
}

}  // namespace clutter::cli
