#include "clutter/config.hpp"
#include "support.hpp"

#include <fstream>

using namespace clutter;
using nlohmann::json;

namespace {

json minimal() {
  return {{"distribution", {{"family", "gamma"}, {"alpha", 2}, {"lambda", 1}}},
          {"ar", {{"coeffs", {-0.5}}}}};
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  return json::parse(in);
}

std::set<std::string> keys(const json& j) {
  std::set<std::string> out;
  for (const auto& item : j.items()) out.insert(item.key());
  return out;
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("defaults") {
  const auto c = parse_config(minimal());
  CHECK(c.pade.K == 16);
  CHECK(c.pade.L == 17);
  CHECK(c.simulate.length == 10000);
  CHECK(c.validate.lags == 200);
  CHECK(c.ilt.ls == 16384);
  CHECK(c.pipeline_options().ar_coeffs->size() == 1);
}

TEST_CASE("resolved document round-trips") {
  auto raw = minimal();
  raw["acf"] = {{"model", "exp_cosine"}, {"t0", 8}, {"T0", 10}, {"d", 0.6}};
  raw["validate"] = {{"bins", 50}};
  const auto c = parse_config(raw);
  const auto resolved = to_json(c);
  CHECK(to_json(parse_config(resolved)) == resolved);
}

TEST_CASE("strictness") {
  auto bad = minimal();
  bad["pade"] = {{"K", 4}, {"L", 9}};
  CHECK_ERROR(ErrorKind::ConfigError, parse_config(bad));
  bad = minimal();
  bad["simulate"] = {{"lenght", 10}};
  CHECK_ERROR(ErrorKind::ConfigError, parse_config(bad));
  bad = minimal();
  bad["simulate"] = {{"format", "xml"}};
  CHECK_ERROR(ErrorKind::ConfigError, parse_config(bad));
  bad = minimal();
  bad["simulate"] = {{"length", -5}};
  CHECK_ERROR(ErrorKind::ConfigError, parse_config(bad));
  bad = minimal();
  bad.erase("ar");
  CHECK_ERROR(ErrorKind::ConfigError, parse_config(bad));
  bad = minimal();
  bad["distribution"]["alpha"] = -1;
  CHECK_ERROR(ErrorKind::ConfigError, parse_config(bad));
  bad = minimal();
  bad["acf"] = {{"lags", {0.5, 0.2}}};
  CHECK_ERROR(ErrorKind::ConfigError, parse_config(bad));
}

TEST_CASE("overrides") {
  const auto o = parse_override("--pade.K=12");
  CHECK(o.path == "pade.K");
  CHECK(o.value == 12);
  CHECK(parse_override("simulate.format=f64le").value == "f64le");
  CHECK_ERROR(ErrorKind::ConfigError, parse_override("pade.K"));

  auto raw = minimal();
  raw["pade"] = {{"K", 16}, {"L", 17}};
  const std::vector<Override> ov{parse_override("pade.K=12"), parse_override("pade.L=13"),
                                 parse_override("simulate.seed=99")};
  const auto c = parse_config(apply_overrides(raw, ov));
  CHECK(c.pade.K == 12);
  CHECK(c.pade.L == 13);
  CHECK(c.simulate.seed == 99);
  CHECK_ERROR(ErrorKind::ConfigError,
              parse_config(apply_overrides(raw, std::vector<Override>{parse_override("pade.Q=1")})));
}

TEST_CASE("missing and malformed files") {
  CHECK_ERROR(ErrorKind::ConfigError, load_config("/nonexistent/config.json"));
  const std::string path = "config_test_malformed.json";
  std::ofstream(path) << "{\"distribution\": ";
  CHECK_ERROR(ErrorKind::ConfigError, load_config(path));
}

TEST_CASE("published schema lists exactly the accepted keys") {
  const auto schema = read_json(CLUTTER_FORGE_SCHEMA);
  auto raw = minimal();
  raw["acf"] = {{"model", "exp_cosine"}};
  const auto resolved = to_json(parse_config(raw));
  CHECK(keys(schema["properties"]) == keys(resolved));
  for (const auto& block : {"ar", "pade", "ilt", "simulate", "validate", "diagnose"}) {
    CAPTURE(block);
    CHECK(keys(schema["properties"][block]["properties"]) == keys(resolved[block]));
  }
}

TEST_CASE("shipped configs parse") {
  for (const auto* name : {"example1.json", "example2.json", "gamma_diagnose.json", "ptas_diagnose.json"}) {
    CAPTURE(name);
    CHECK_NOTHROW(load_config(std::string(CLUTTER_FORGE_CONFIG_DIR) + "/" + name));
  }
}

}
