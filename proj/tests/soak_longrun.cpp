// Long-run optimization profile. Disabled in the default test run (hours of
// compute); enable with `ctest -L soak` or run the binary directly.
#include <chrono>
#include <cstdio>

#include "msort/config.hpp"

namespace {

bool long_run(const char* label, const std::string& config, double min_ability) {
  using namespace msort;
  RunConfig rc = parse_config(config);
  rc.ga.threads = 4;
  const EvalContext ctx{make_setup(rc), make_inputs(rc), rc.ga.threads};
  const auto t0 = std::chrono::steady_clock::now();
  const auto [best, hist] = run(rc.ga, ctx);
  const double minutes = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - t0).count() / 60.0;
  const bool ok = best.metrics.ability >= min_ability;
  std::printf("%s: %s — ability %.4f (>= %.2f), efficiency %.4f, R %.4f, %.1f min\n",
              label, ok ? "PASS" : "FAIL", best.metrics.ability, min_ability,
              best.metrics.mean_efficiency, best.metrics.R, minutes);
  std::fflush(stdout);
  return ok;
}

}  // namespace

int main() {
  int failures = 0;
  if (!long_run("soak d=2 (budget 1e5)",
                "[grid]\nn = 128\n[mode]\nfamily = oam\nd = 2\n"
                "[ga]\nbudget = 100000\nswitch_at = 10000\nseed = 1\n",
                0.98))
    ++failures;
  if (!long_run("soak d=6 (budget 2e5)",
                "[grid]\nn = 128\n[mode]\nfamily = oam\nd = 6\n"
                "[ga]\nbudget = 200000\nswitch_at = 10000\nseed = 1\n",
                0.97))
    ++failures;
  return failures == 0 ? 0 : 1;
}
