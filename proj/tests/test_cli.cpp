#include "commands.hpp"
#include "support.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kBin = CLUTTER_FORGE_BIN;
const std::string kConfigs = CLUTTER_FORGE_CONFIG_DIR;

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("clutter_forge_cli_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run(const std::string& args) {
  const int status = std::system((kBin + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("shortest round-trip numbers") {
  CHECK(clutter::cli::format_double(0.1) == "0.1");
  CHECK(std::stod(clutter::cli::format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("simulate writes samples and sidecar") {
  const auto dir = scratch("simulate");
  REQUIRE(run("simulate " + kConfigs + "/example1.json -o " + (dir / "ex1").string()) == 0);
  const auto csv = slurp(dir / "ex1.csv");
  CHECK(csv.rfind("v\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 10001);
  const auto sidecar = json::parse(slurp(dir / "ex1.json"));
  CHECK(sidecar["input"]["pole_residue"]["terms"].size() > 0);
  CHECK(sidecar["ar"]["L_IR"] == 28);
  CHECK(sidecar["seed"] == 1);
  CHECK(sidecar["config"]["simulate"]["length"] == 10000);
  CHECK(sidecar.contains("output_cumulants"));
}

TEST_CASE("same seed gives identical bytes; a new seed changes samples only") {
  const auto dir = scratch("determinism");
  const auto cfg = kConfigs + "/example1.json";
  REQUIRE(run("simulate " + cfg + " -o " + (dir / "a").string()) == 0);
  REQUIRE(run("simulate " + cfg + " --serial -o " + (dir / "b").string()) == 0);
  REQUIRE(run("simulate " + cfg + " --seed 5 -o " + (dir / "c").string()) == 0);
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
  CHECK(slurp(dir / "a.csv") != slurp(dir / "c.csv"));
  auto ja = json::parse(slurp(dir / "a.json"));
  auto jc = json::parse(slurp(dir / "c.json"));
  CHECK(jc["seed"] == 5);
  std::function<void(const json&, const json&)> same_shape = [&](const json& x, const json& y) {
    REQUIRE(x.type() == y.type());
    if (x.is_object()) {
      for (const auto& item : x.items()) {
        REQUIRE(y.contains(item.key()));
        if (item.key() != "overrides") same_shape(item.value(), y[item.key()]);
      }
    }
  };
  same_shape(ja, jc);
}

TEST_CASE("raw float output") {
  const auto dir = scratch("f64");
  REQUIRE(run("simulate " + kConfigs + "/example1.json --format f64le --length 1000 -o " +
              (dir / "s").string()) == 0);
  CHECK(fs::file_size(dir / "s.f64") == 8000);
}

TEST_CASE("malformed config: exit 2 and nothing written") {
  const auto dir = scratch("malformed");
  std::ofstream(dir / "bad.json") << "{ \"distribution\": ";
  CHECK(run("simulate " + (dir / "bad.json").string() + " -o " + (dir / "out").string()) == 2);
  CHECK(run("validate " + (dir / "bad.json").string() + " -o " + (dir / "out").string()) == 2);
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++files;
  CHECK(files == 1);
}

TEST_CASE("pipeline failure: exit 3 and nothing written") {
  const auto dir = scratch("unstable");
  std::ofstream(dir / "cfg.json")
      << R"({"distribution":{"family":"gamma","alpha":2,"lambda":1},"ar":{"coeffs":[0.9,-0.1]}})";
  CHECK(run("simulate " + (dir / "cfg.json").string() + " -o " + (dir / "out").string()) == 3);
  CHECK_FALSE(fs::exists(dir / "out.csv"));
  CHECK_FALSE(fs::exists(dir / "out.json"));
}

TEST_CASE("flags win over the config and are recorded") {
  const auto dir = scratch("validate");
  REQUIRE(run("validate " + kConfigs + "/example1.json --trials 1 --pade.K=12 --set pade.L=13 -o " +
              (dir / "v").string()) == 0);
  const auto report = json::parse(slurp(dir / "v.json"));
  CHECK(report["trial_count"] == 1);
  CHECK(report["trials"].size() == 1);
  CHECK(report["config"]["validate"]["trials"] == 1);
  CHECK(report["config"]["pade"]["K"] == 12);
  CHECK(report.contains("pdf_mae"));
  CHECK(report.contains("acf_mae"));
  CHECK(report.contains("wall_time_s"));
  bool recorded = false;
  for (const auto& o : report["overrides"]) recorded |= o["path"] == "validate.trials";
  CHECK(recorded);
  CHECK(fs::exists(dir / "v_pdf.csv"));
  CHECK(fs::exists(dir / "v_acf.csv"));
}

TEST_CASE("diagnose reports both paths") {
  const auto dir = scratch("diagnose");
  REQUIRE(run("diagnose " + kConfigs + "/gamma_diagnose.json -o " + (dir / "g").string()) == 0);
  const auto g = json::parse(slurp(dir / "g.json"));
  CHECK(g["moment_path"]["max_lt_error"].get<double>() < 1e-3);
  CHECK(g["cumulant_path"]["max_lt_error"].get<double>() < 1e-3);
  std::istringstream lt(slurp(dir / "g_lt.csv"));
  std::string header, first;
  std::getline(lt, header);
  std::getline(lt, first);
  CHECK(header == "omega,theoretical_re,theoretical_im,moment_re,moment_im,cumulant_re,cumulant_im");
  std::vector<double> row;
  std::stringstream fields(first);
  for (std::string f; std::getline(fields, f, ',');) row.push_back(std::stod(f));
  REQUIRE(row.size() == 7);
  CHECK(row[1] == 1.0);
  CHECK(row[3] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(row[5] == 1.0);

  REQUIRE(run("diagnose " + kConfigs + "/ptas_diagnose.json -o " + (dir / "p").string()) == 0);
  const auto p = json::parse(slurp(dir / "p.json"));
  CHECK(p["moment_path"]["max_lt_error"].get<double>() > 5e-2);
  CHECK(p["cumulant_path"]["max_lt_error"].get<double>() < 1e-2);
}

}
