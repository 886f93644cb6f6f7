#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "msort/ga.hpp"

using namespace msort;

namespace {

// Small geometry so one evaluation is a single 64 x 64 propagation.
EvalContext small_context(int planes = 1) {
  Grid g(64, 20e-6, 780e-9);
  ChannelLayout layout;
  layout.channels.push_back({-0.3e-3, -0.3e-3, 200e-6});
  layout.channels.push_back({0.3e-3, 0.3e-3, 200e-6});
  SorterSetup setup{planes, 1.0, g, layout, 1};
  std::vector<ComplexField> inputs{sample_lg(g, {-1, 0, 160e-6}),
                                   sample_lg(g, {1, 0, 160e-6})};
  return EvalContext{setup, inputs, 1};
}

GAConfig small_config(int planes = 1) {
  GAConfig cfg;
  cfg.population = 6;
  cfg.m = 16;
  cfg.macro_pitch = 80e-6;
  cfg.rank_tau = 2.0;
  cfg.switch_at = 50;
  cfg.budget = 120;
  cfg.seed = 42;
  cfg.planes = planes;
  return cfg;
}

PhaseElement random_element(int m, double pitch, std::mt19937_64& rng) {
  PhaseElement e(m, pitch);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  for (double& p : e.phases) p = u(rng);
  return e;
}

double mean_wrapped_gradient(const PhaseElement& e) {
  double acc = 0.0;
  long count = 0;
  for (int y = 0; y < e.m; ++y)
    for (int x = 0; x + 1 < e.m; ++x) {
      double d = std::abs(e.at(x + 1, y) - e.at(x, y));
      acc += std::min(d, kTwoPi - d);
      ++count;
    }
  return acc / count;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("blur_phase: identity cases") {
  std::mt19937_64 rng(3);
  const PhaseElement e = random_element(32, 20e-6, rng);
  CHECK(blur_phase(e, 0.0).phases == e.phases);

  PhaseElement constant(32, 20e-6);
  for (double& p : constant.phases) p = 1.234;
  const PhaseElement blurred = blur_phase(constant, 2.0);
  for (double p : blurred.phases) CHECK(p == doctest::Approx(1.234).epsilon(1e-12));
}

TEST_CASE("blur_phase: gradients shrink monotonically with sigma") {
  std::mt19937_64 rng(11);
  const PhaseElement e = random_element(48, 20e-6, rng);
  double prev = mean_wrapped_gradient(e);
  for (double sigma : {0.5, 1.0, 2.0, 4.0}) {
    const double cur = mean_wrapped_gradient(blur_phase(e, sigma));
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("blur_phase: output stays wrapped") {
  std::mt19937_64 rng(5);
  const PhaseElement blurred = blur_phase(random_element(32, 20e-6, rng), 1.5);
  for (double p : blurred.phases) {
    CHECK(p >= 0.0);
    CHECK(p < kTwoPi);
  }
}

TEST_CASE("select_parents: distinct, population of two, better first more often") {
  std::vector<Individual> pop(2);
  pop[0].fitness = 2.0;
  pop[1].fitness = 1.0;
  std::mt19937_64 rng(1);
  int first_is_best = 0;
  for (int i = 0; i < 2000; ++i) {
    const auto [a, b] = select_parents(pop, 2.0 / 3.0, rng);
    CHECK(a != b);
    CHECK(((a == 0 && b == 1) || (a == 1 && b == 0)));
    if (a == 0) ++first_is_best;
  }
  CHECK(first_is_best > 1200);
}

TEST_CASE("select_parents: frequencies match exp(-rank/tau) within 2% per rank") {
  const int n = 10;
  const double tau = n / 3.0;
  std::vector<Individual> pop(n);
  for (int i = 0; i < n; ++i) pop[i].fitness = n - i;
  std::vector<double> expected(n);
  double z = 0.0;
  for (int i = 0; i < n; ++i) {
    expected[i] = std::exp(-i / tau);
    z += expected[i];
  }
  for (double& e : expected) e /= z;

  std::mt19937_64 rng(29);
  const long draws = 100000;
  std::vector<long> counts(n, 0);
  for (long i = 0; i < draws; ++i) ++counts[select_parents(pop, tau, rng).first];
  for (int i = 0; i < n; ++i) {
    const double freq = static_cast<double>(counts[i]) / draws;
    CHECK(std::abs(freq - expected[i]) / expected[i] < 0.02);
  }
}

TEST_CASE("select_parents: tau -> infinity approaches uniform (chi-square)") {
  const int n = 8;
  std::vector<Individual> pop(n);
  for (int i = 0; i < n; ++i) pop[i].fitness = n - i;
  std::mt19937_64 rng(77);
  const long draws = 100000;
  std::vector<long> counts(n, 0);
  for (long i = 0; i < draws; ++i) ++counts[select_parents(pop, 1e12, rng).first];
  const double expected = static_cast<double>(draws) / n;
  double chi2 = 0.0;
  for (long c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // 7 dof; chi2 < 18.48 corresponds to p > 0.01.
  CHECK(chi2 < 18.48);
}

TEST_CASE("crossover: identical parents, forced halves, pixel provenance") {
  std::mt19937_64 rng(9);
  Individual a, b;
  a.elements.push_back(random_element(16, 80e-6, rng));
  b.elements = a.elements;
  const Individual same = crossover(a, b, rng);
  CHECK(same.elements[0].phases == a.elements[0].phases);

  Individual zero, pi;
  zero.elements.push_back(PhaseElement(16, 80e-6));
  pi.elements.push_back(PhaseElement(16, 80e-6));
  for (double& p : pi.elements[0].phases) p = M_PI;
  for (int trial = 0; trial < 20; ++trial) {
    const Individual child = crossover(zero, pi, rng);
    long zeros = 0, pis = 0;
    for (double p : child.elements[0].phases) {
      if (p == 0.0) ++zeros;
      if (p == M_PI) ++pis;
    }
    CHECK(zeros == 128);
    CHECK(pis == 128);
  }

  Individual c, d;
  c.elements.push_back(random_element(16, 80e-6, rng));
  d.elements.push_back(random_element(16, 80e-6, rng));
  const Individual child = crossover(c, d, rng);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) {
      const double v = child.elements[0].at(x, y);
      CHECK((v == c.elements[0].at(x, y) || v == d.elements[0].at(x, y)));
    }
}

TEST_CASE("mutate: identity cases and exact count contract") {
  std::mt19937_64 rng(13);
  const PhaseElement e = random_element(16, 80e-6, rng);
  CHECK(mutate(e, 0.0, 0.15, rng).phases == e.phases);
  CHECK(mutate(e, 1.0, 0.0, rng).phases == e.phases);

  const PhaseElement big = random_element(125, 20e-6, rng);
  const PhaseElement mutated = mutate(big, 0.10, 0.15, rng);
  long changed = 0;
  for (size_t i = 0; i < big.phases.size(); ++i)
    if (big.phases[i] != mutated.phases[i]) ++changed;
  CHECK(changed == 1563);  // round(0.10 * 125^2)
  for (double p : mutated.phases) {
    CHECK(p >= 0.0);
    CHECK(p < kTwoPi);
  }
}

TEST_CASE("mutation_fraction: endpoints and geometric midpoint") {
  GAConfig cfg;
  cfg.budget = 100000;
  CHECK(mutation_fraction(0, cfg) == doctest::Approx(0.10));
  CHECK(mutation_fraction(cfg.budget, cfg) == doctest::Approx(0.0001));
  CHECK(mutation_fraction(cfg.budget / 2, cfg) ==
        doctest::Approx(std::sqrt(0.10 * 0.0001)).epsilon(1e-9));
}

TEST_CASE("init_population: size, determinism, ranking") {
  const EvalContext ctx = small_context();
  const GAConfig cfg = small_config();
  GAState s1, s2;
  init_population(s1, cfg, ctx);
  init_population(s2, cfg, ctx);
  CHECK(static_cast<int>(s1.population.size()) == cfg.population);
  for (size_t i = 0; i + 1 < s1.population.size(); ++i)
    CHECK(s1.population[i].fitness >= s1.population[i + 1].fitness);
  for (size_t i = 0; i < s1.population.size(); ++i)
    CHECK(s1.population[i].elements[0].phases == s2.population[i].elements[0].phases);
  // Distinct individuals.
  CHECK(s1.population[0].elements[0].phases != s1.population[1].elements[0].phases);
}

TEST_CASE("step: replace-worst semantics and wrap closure") {
  const EvalContext ctx = small_context();
  const GAConfig cfg = small_config();
  GAState state;
  init_population(state, cfg, ctx);
  for (int i = 0; i < 30; ++i) {
    const double best_before = state.population.front().fitness;
    const size_t size_before = state.population.size();
    step(state, cfg, ctx);
    CHECK(state.population.size() == size_before);
    CHECK(state.population.front().fitness >= best_before);
    for (const Individual& ind : state.population)
      for (const PhaseElement& e : ind.elements)
        for (double p : e.phases) {
          CHECK(p >= 0.0);
          CHECK(p < kTwoPi);
        }
  }
  CHECK(state.history.rows.size() == 30);
}

TEST_CASE("run: budget zero returns best of initial population") {
  const EvalContext ctx = small_context();
  GAConfig cfg = small_config();
  cfg.budget = 0;
  const auto [best, history] = run(cfg, ctx);
  CHECK(history.rows.empty());
  GAState state;
  init_population(state, cfg, ctx);
  CHECK(best.elements[0].phases == state.population[0].elements[0].phases);
}

TEST_CASE("run: monotone best fitness per phase, constant population") {
  const EvalContext ctx = small_context(2);
  const GAConfig cfg = small_config(2);
  const auto [best, history] = run(cfg, ctx);
  CHECK(static_cast<long>(history.rows.size()) == cfg.budget);
  for (size_t i = 1; i < history.rows.size(); ++i) {
    const auto& prev = history.rows[i - 1];
    const auto& cur = history.rows[i];
    if (prev.iteration >= cfg.switch_at || cur.iteration <= cfg.switch_at) continue;
    CHECK(cur.best_fitness >= prev.best_fitness);
  }
}

TEST_CASE("run: identical seeds give byte-identical history CSVs") {
  const EvalContext ctx = small_context();
  const GAConfig cfg = small_config();
  const auto r1 = run(cfg, ctx);
  const auto r2 = run(cfg, ctx);
  const auto dir = std::filesystem::temp_directory_path();
  const std::string p1 = (dir / "msort_hist_1.csv").string();
  const std::string p2 = (dir / "msort_hist_2.csv").string();
  write_history_csv(r1.second, p1);
  write_history_csv(r2.second, p2);
  CHECK(slurp(p1) == slurp(p2));
  CHECK(!slurp(p1).empty());
}

TEST_CASE("checkpoint: save + resume reproduces the straight run exactly") {
  const EvalContext ctx = small_context();
  GAConfig cfg = small_config();
  cfg.budget = 80;
  const auto full = run(cfg, ctx);

  const auto dir = std::filesystem::temp_directory_path();
  const std::string ckpt = (dir / "msort_ckpt.txt").string();
  GAState state;
  init_population(state, cfg, ctx);
  while (state.iteration < 40) step(state, cfg, ctx);
  save_checkpoint(state, cfg, ckpt);

  const auto resumed = resume(cfg, ctx, ckpt);
  CHECK(resumed.first.fitness == full.first.fitness);
  CHECK(resumed.first.elements[0].phases == full.first.elements[0].phases);
  CHECK(resumed.second.rows.size() == 40);
  CHECK(resumed.second.rows.back().best_fitness ==
        full.second.rows.back().best_fitness);
}

TEST_CASE("run_islands: isolated replicas, best-of returned") {
  const EvalContext ctx = small_context();
  GAConfig cfg = small_config();
  cfg.budget = 20;
  const auto combined = run_islands(cfg, ctx, 3);
  double best = -1e300;
  for (int i = 0; i < 3; ++i) {
    GAConfig local = cfg;
    local.seed = cfg.seed + i;
    const auto single = run(local, ctx);
    best = std::max(best, single.first.fitness);
  }
  CHECK(combined.first.fitness == doctest::Approx(best).epsilon(1e-15));
}

TEST_CASE("config validation") {
  const EvalContext ctx = small_context();
  GAConfig cfg = small_config();
  cfg.population = 1;
  GAState state;
  CHECK_THROWS_AS(init_population(state, cfg, ctx), std::invalid_argument);
  cfg = small_config();
  cfg.mutate_frac_end = 0.0;
  CHECK_THROWS_AS(init_population(state, cfg, ctx), std::invalid_argument);
  cfg = small_config();
  cfg.mutate_frac_end = 0.5;
  cfg.mutate_frac_start = 0.1;
  CHECK_THROWS_AS(init_population(state, cfg, ctx), std::invalid_argument);
}
