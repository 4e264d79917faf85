#include "clutter/config.hpp"

#include "clutter/error.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace clutter {

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& what) { fail(ErrorKind::ConfigError, what); }

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) config_error(where + " must be an object");
}

void reject_unknown(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  for (const auto& item : j.items()) {
    if (!allowed.contains(item.key())) config_error("unknown key '" + where + "." + item.key() + "'");
  }
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) config_error(where + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) config_error(where + " must be finite");
  return v;
}

double positive(const json& j, const std::string& where) {
  const double v = number(j, where);
  if (!(v > 0.0)) config_error(where + " must be positive");
  return v;
}

std::uint64_t unsigned_int(const json& j, const std::string& where) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0) {
    config_error(where + " must be a nonnegative integer");
  }
  return static_cast<std::uint64_t>(j.get<std::int64_t>());
}

std::size_t count(const json& j, const std::string& where, std::size_t min_value) {
  const auto v = unsigned_int(j, where);
  if (v < min_value) config_error(where + " must be at least " + std::to_string(min_value));
  return static_cast<std::size_t>(v);
}

std::vector<double> number_list(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) config_error(where + " must be a non-empty array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

template <typename Fn>
void with(const json& block, const char* key, Fn&& fn) {
  if (block.contains(key)) fn(block.at(key));
}

ACFSpec parse_acf(const json& j, double prf_hz) {
  require_object(j, "acf");
  ACFSpec acf;
  acf.prf_hz = prf_hz;
  if (j.contains("lags")) {
    reject_unknown(j, "acf", {"lags"});
    auto r = number_list(j.at("lags"), "acf.lags");
    if (r.front() != 1.0) config_error("acf.lags must start with r_0 = 1");
    acf.source = std::move(r);
    return acf;
  }
  if (!j.contains("model")) config_error("acf needs either 'lags' or 'model'");
  if (j.at("model") != "exp_cosine") config_error("acf.model must be \"exp_cosine\"");
  reject_unknown(j, "acf", {"model", "t0", "T0", "d"});
  ExpCosineACF m;
  with(j, "t0", [&](const json& v) { m.t0 = positive(v, "acf.t0"); });
  with(j, "T0", [&](const json& v) { m.T0 = positive(v, "acf.T0"); });
  with(j, "d", [&](const json& v) {
    m.d = number(v, "acf.d");
    if (!(m.d > 0.0 && m.d < 1.0)) config_error("acf.d must lie in (0, 1)");
  });
  if (m.d < 0.0 || m.d > 1.0) config_error("acf.d must lie in [0, 1]");
  acf.source = m;
  return acf;
}

void parse_ar(const json& j, ARConfig& ar) {
  require_object(j, "ar");
  reject_unknown(j, "ar", {"order", "coeffs", "threshold", "warmup_factor"});
  with(j, "order", [&](const json& v) { ar.order = count(v, "ar.order", 1); });
  with(j, "coeffs", [&](const json& v) {
    if (!v.is_null()) ar.coeffs = number_list(v, "ar.coeffs");
  });
  with(j, "threshold", [&](const json& v) { ar.threshold = positive(v, "ar.threshold"); });
  with(j, "warmup_factor", [&](const json& v) { ar.warmup_factor = count(v, "ar.warmup_factor", 0); });
}

void parse_pade(const json& j, RecoveryOptions& pade) {
  require_object(j, "pade");
  reject_unknown(j, "pade", {"K", "L", "min_L"});
  with(j, "K", [&](const json& v) { pade.K = static_cast<int>(count(v, "pade.K", 0)); });
  with(j, "L", [&](const json& v) { pade.L = static_cast<int>(count(v, "pade.L", 1)); });
  with(j, "min_L", [&](const json& v) { pade.min_L = static_cast<int>(count(v, "pade.min_L", 1)); });
  if (pade.K != pade.L && pade.K != pade.L - 1) config_error("pade.K must equal L or L - 1");
  if (pade.K + pade.L > 60) config_error("pade.K + pade.L must not exceed 60");
}

void parse_ilt(const json& j, ILTParams& ilt) {
  require_object(j, "ilt");
  reject_unknown(j, "ilt", {"ls", "ls_max", "sigma", "decay_threshold", "interpolation_tolerance",
                               "period_factor"});
  with(j, "ls", [&](const json& v) { ilt.ls = count(v, "ilt.ls", 16); });
  with(j, "ls_max", [&](const json& v) { ilt.ls_max = count(v, "ilt.ls_max", 16); });
  with(j, "sigma", [&](const json& v) {
    if (!v.is_null()) ilt.sigma = positive(v, "ilt.sigma");
  });
  with(j, "decay_threshold", [&](const json& v) { ilt.decay_threshold = positive(v, "ilt.decay_threshold"); });
  with(j, "interpolation_tolerance", [&](const json& v) {
    ilt.interpolation_tolerance = positive(v, "ilt.interpolation_tolerance");
  });
  with(j, "period_factor", [&](const json& v) { ilt.period_factor = number(v, "ilt.period_factor"); });
  if (ilt.ls_max < ilt.ls) ilt.ls_max = ilt.ls;
  if (ilt.period_factor <= 1.0) config_error("ilt.period_factor must exceed 1");
}

void parse_simulate(const json& j, SimulateConfig& sim) {
  require_object(j, "simulate");
  reject_unknown(j, "simulate", {"length", "prf_hz", "seed", "format", "speckle",
                                 "speckle_variance", "doppler_width", "doppler_order"});
  with(j, "length", [&](const json& v) { sim.length = count(v, "simulate.length", 1); });
  with(j, "prf_hz", [&](const json& v) { sim.prf_hz = positive(v, "simulate.prf_hz"); });
  with(j, "seed", [&](const json& v) { sim.seed = unsigned_int(v, "simulate.seed"); });
  with(j, "format", [&](const json& v) {
    if (v == "csv") {
      sim.format = SampleFormat::Csv;
    } else if (v == "f64le") {
      sim.format = SampleFormat::F64le;
    } else {
      config_error("simulate.format must be \"csv\" or \"f64le\"");
    }
  });
  with(j, "speckle", [&](const json& v) {
    if (!v.is_boolean()) config_error("simulate.speckle must be a boolean");
    sim.speckle = v.get<bool>();
  });
  with(j, "speckle_variance", [&](const json& v) {
    sim.speckle_options.variance = positive(v, "simulate.speckle_variance");
  });
  with(j, "doppler_width", [&](const json& v) {
    if (!v.is_null()) sim.speckle_options.doppler_width = positive(v, "simulate.doppler_width");
  });
  with(j, "doppler_order", [&](const json& v) {
    sim.speckle_options.doppler_order = count(v, "simulate.doppler_order", 1);
  });
}

void parse_validate(const json& j, ValidateConfig& val) {
  require_object(j, "validate");
  reject_unknown(j, "validate", {"trials", "bins", "lags"});
  with(j, "trials", [&](const json& v) { val.trials = count(v, "validate.trials", 1); });
  with(j, "bins", [&](const json& v) {
    if (!v.is_null()) val.bins = count(v, "validate.bins", 2);
  });
  with(j, "lags", [&](const json& v) { val.lags = count(v, "validate.lags", 1); });
}

void parse_diagnose(const json& j, DiagnoseConfig& diag) {
  require_object(j, "diagnose");
  reject_unknown(j, "diagnose", {"omega_max", "points", "u_max", "pdf_points"});
  with(j, "omega_max", [&](const json& v) { diag.omega_max = positive(v, "diagnose.omega_max"); });
  with(j, "points", [&](const json& v) { diag.points = count(v, "diagnose.points", 2); });
  with(j, "u_max", [&](const json& v) {
    if (!v.is_null()) diag.u_max = positive(v, "diagnose.u_max");
  });
  with(j, "pdf_points", [&](const json& v) { diag.pdf_points = count(v, "diagnose.pdf_points", 2); });
}

json optional_json(const auto& value) {
  if (value) return json(*value);
  return nullptr;
}

}  // namespace

PipelineOptions RunConfig::pipeline_options() const {
  PipelineOptions opts;
  opts.ar_order = ar.order;
  opts.ar_coeffs = ar.coeffs;
  opts.truncation_threshold = ar.threshold;
  opts.pade = pade;
  opts.warmup_factor = ar.warmup_factor;
  return opts;
}

ACFSpec RunConfig::acf_spec() const {
  if (acf) return *acf;
  ACFSpec out;
  out.source = ar_autocorrelation(*ar.coeffs, std::max(validate.lags, ar.coeffs->size()));
  out.prf_hz = simulate.prf_hz;
  return out;
}

ValidationOptions RunConfig::validation_options() const {
  ValidationOptions opts;
  opts.trials = validate.trials;
  opts.length = simulate.length;
  opts.bins = validate.bins;
  opts.lags = validate.lags;
  opts.seed = simulate.seed;
  return opts;
}

Override parse_override(std::string_view text) {
  if (text.starts_with("--")) text.remove_prefix(2);
  const auto eq = text.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    config_error("override must look like path=value: " + std::string(text));
  }
  Override out;
  out.path = std::string(text.substr(0, eq));
  const auto raw = std::string(text.substr(eq + 1));
  out.value = json::parse(raw, nullptr, false);
  if (out.value.is_discarded()) out.value = raw;
  return out;
}

json apply_overrides(json raw, std::span<const Override> overrides) {
  if (!raw.is_object()) config_error("config must be a JSON object");
  for (const auto& o : overrides) {
    json* node = &raw;
    std::string_view rest = o.path;
    for (;;) {
      const auto dot = rest.find('.');
      const std::string key(rest.substr(0, dot));
      if (key.empty()) config_error("empty path segment in override " + o.path);
      if (!node->is_object()) config_error("override path crosses a non-object: " + o.path);
      if (dot == std::string_view::npos) {
        (*node)[key] = o.value;
        break;
      }
      node = &(*node)[key];
      if (node->is_null()) *node = json::object();
      rest.remove_prefix(dot + 1);
    }
  }
  return raw;
}

RunConfig parse_config(const json& j) {
  require_object(j, "config");
  reject_unknown(j, "config",
                 {"distribution", "acf", "ar", "pade", "ilt", "simulate", "validate", "diagnose"});
  RunConfig c;
  if (!j.contains("distribution")) config_error("config needs a 'distribution' block");
  try {
    c.distribution = distribution_from_json(j.at("distribution"));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigError) throw;
    config_error(std::string("distribution: ") + e.what());
  }
  with(j, "simulate", [&](const json& v) { parse_simulate(v, c.simulate); });
  with(j, "ar", [&](const json& v) { parse_ar(v, c.ar); });
  with(j, "acf", [&](const json& v) {
    if (!v.is_null()) c.acf = parse_acf(v, c.simulate.prf_hz);
  });
  with(j, "pade", [&](const json& v) { parse_pade(v, c.pade); });
  with(j, "ilt", [&](const json& v) { parse_ilt(v, c.ilt); });
  with(j, "validate", [&](const json& v) { parse_validate(v, c.validate); });
  with(j, "diagnose", [&](const json& v) { parse_diagnose(v, c.diagnose); });
  if (!c.acf && !c.ar.coeffs) config_error("config needs an 'acf' block or explicit 'ar.coeffs'");
  if (c.acf && !c.ar.coeffs) {
    if (const auto* lags = std::get_if<std::vector<double>>(&c.acf->source)) {
      if (lags->size() < c.ar.order + 1) config_error("acf.lags must cover lags 0..ar.order");
    }
  }
  if (c.validate.lags >= c.simulate.length) config_error("validate.lags must be below simulate.length");
  return c;
}

RunConfig load_config(const std::filesystem::path& path, std::span<const Override> overrides) {
  std::ifstream in(path);
  if (!in) config_error("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  auto raw = json::parse(buf.str(), nullptr, false);
  if (raw.is_discarded()) config_error("config file is not valid JSON: " + path.string());
  return parse_config(apply_overrides(std::move(raw), overrides));
}

json to_json(const RunConfig& c) {
  json out;
  out["distribution"] = c.distribution;
  if (c.acf) {
    if (const auto* lags = std::get_if<std::vector<double>>(&c.acf->source)) {
      out["acf"] = {{"lags", *lags}};
    } else {
      const auto& m = std::get<ExpCosineACF>(c.acf->source);
      out["acf"] = {{"model", "exp_cosine"}, {"t0", m.t0}, {"T0", m.T0}, {"d", m.d}};
    }
  } else {
    out["acf"] = nullptr;
  }
  out["ar"] = {{"order", c.ar.order},
               {"coeffs", optional_json(c.ar.coeffs)},
               {"threshold", c.ar.threshold},
               {"warmup_factor", c.ar.warmup_factor}};
  out["pade"] = {{"K", c.pade.K}, {"L", c.pade.L}, {"min_L", c.pade.min_L}};
  out["ilt"] = {{"ls", c.ilt.ls},
                {"ls_max", c.ilt.ls_max},
                {"sigma", optional_json(c.ilt.sigma)},
                {"decay_threshold", c.ilt.decay_threshold},
                {"interpolation_tolerance", c.ilt.interpolation_tolerance},
                {"period_factor", c.ilt.period_factor}};
  out["simulate"] = {{"length", c.simulate.length},
                     {"prf_hz", c.simulate.prf_hz},
                     {"seed", c.simulate.seed},
                     {"format", c.simulate.format == SampleFormat::Csv ? "csv" : "f64le"},
                     {"speckle", c.simulate.speckle},
                     {"speckle_variance", c.simulate.speckle_options.variance},
                     {"doppler_width", optional_json(c.simulate.speckle_options.doppler_width)},
                     {"doppler_order", c.simulate.speckle_options.doppler_order}};
  out["validate"] = {{"trials", c.validate.trials},
                     {"bins", optional_json(c.validate.bins)},
                     {"lags", c.validate.lags}};
  out["diagnose"] = {{"omega_max", c.diagnose.omega_max},
                     {"points", c.diagnose.points},
                     {"u_max", optional_json(c.diagnose.u_max)},
                     {"pdf_points", c.diagnose.pdf_points}};
  return out;
}

}  // namespace clutter
