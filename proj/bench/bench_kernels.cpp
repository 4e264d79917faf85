// Serial reference vs OpenMP kernels: best-of-N wall time and a bitwise
// equality check of the outputs.

#include "clutter/config.hpp"
#include "clutter/dist.hpp"
#include "clutter/ilt.hpp"
#include "clutter/parallel.hpp"
#include "clutter/rng.hpp"
#include "clutter/sampler.hpp"
#include "clutter/validate.hpp"
#include "clutter/warnings.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#ifdef CLUTTER_FORGE_HAVE_OPENMP
#include <omp.h>
#endif

using namespace clutter;
using cd = std::complex<double>;

namespace {

template <typename Fn>
double best_of(int reps, Fn&& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

bool same(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin());
}

int mismatches = 0;

void report(const char* name, double serial, double parallel, bool identical) {
  mismatches += !identical;
  std::printf("%-16s %10.2f %10.2f %8.2fx  %s\n", name, serial * 1e3, parallel * 1e3,
              serial / parallel, identical ? "identical" : "DIFFERENT");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Serial vs parallel kernel timings"};
  std::string config = "configs/example1.json";
  std::size_t length = 1'000'000;
  std::size_t trials = 50;
  int reps = 3;
  app.add_option("config", config, "Run configuration")->capture_default_str();
  app.add_option("--length", length, "Samples for the per-sequence kernels")->capture_default_str();
  app.add_option("--trials", trials, "Monte Carlo trials")->capture_default_str();
  app.add_option("--reps", reps, "Repetitions (best time is reported)")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  configure_threads();
  set_warning_sink([](std::string_view) {});
  const auto cfg = load_config(config);
  const auto popts = cfg.pipeline_options();
  const auto acf = cfg.acf_spec();
  const auto model = build_pipeline(cfg.distribution, acf, popts);

#ifdef CLUTTER_FORGE_HAVE_OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (built without OpenMP)\n");
#endif
  std::printf("%-16s %10s %10s %9s\n", "kernel", "serial ms", "omp ms", "speedup");

  const RngStream rng(cfg.simulate.seed);
  std::vector<double> a, b;
  const double gs = best_of(reps, [&] { a = generate_inputs(model.input.prf, length, rng, Execution::Serial); });
  const double gp = best_of(reps, [&] { b = generate_inputs(model.input.prf, length, rng, Execution::Parallel); });
  report("generate_inputs", gs, gp, same(a, b));

  const auto x = a;
  const double as = best_of(reps, [&] { a = empirical_acf(x, 200, Execution::Serial); });
  const double ap = best_of(reps, [&] { b = empirical_acf(x, 200, Execution::Parallel); });
  report("empirical_acf", as, ap, same(a, b));

  std::vector<cd> s;
  for (int i = 0; i < 16; ++i) s.emplace_back(0.1 * (i + 1), 0.5 * i);
  std::vector<LTEstimate> la, lb;
  const double ls = best_of(reps, [&] { la = empirical_lt(x, s, Execution::Serial); });
  const double lp = best_of(reps, [&] { lb = empirical_lt(x, s, Execution::Parallel); });
  bool lt_same = la.size() == lb.size();
  for (std::size_t i = 0; lt_same && i < la.size(); ++i) lt_same = la[i].value == lb[i].value;
  report("empirical_lt", ls, lp, lt_same);

  const auto k = cumulants(cfg.distribution, 2);
  std::vector<double> grid(8193);
  const double top = k(1) + 40.0 * std::sqrt(k(2));
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = top * static_cast<double>(i) / 8192.0;
  auto ilt = cfg.ilt;
  auto lt = [&](cd z) { return closed_form_lt(cfg.distribution, z); };
  ilt.execution = Execution::Serial;
  const double is = best_of(reps, [&] { a = invert_laplace(lt, grid, ilt).density; });
  ilt.execution = Execution::Parallel;
  const double ip = best_of(reps, [&] { b = invert_laplace(lt, grid, ilt).density; });
  report("invert_laplace", is, ip, same(a, b));

  const auto ref = make_reference(model, acf, popts, cfg.validate.lags, cfg.ilt);
  auto vopts = cfg.validation_options();
  vopts.trials = trials;
  ValidationReport rs, rp;
  const double ms = best_of(reps, [&] { rs = monte_carlo(model, ref, vopts, Execution::Serial); });
  const double mp = best_of(reps, [&] { rp = monte_carlo(model, ref, vopts, Execution::Parallel); });
  report("monte_carlo", ms, mp, rs.pdf_mae == rp.pdf_mae && rs.acf_mae == rp.acf_mae);
  return mismatches == 0 ? 0 : 1;
}
