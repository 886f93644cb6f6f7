#include "msort/ga.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

namespace msort {
namespace {

void validate(const GAConfig& cfg) {
  if (cfg.population < 2)
    throw std::invalid_argument("ga: population must be >= 2");
  if (cfg.budget < 0) throw std::invalid_argument("ga: budget must be >= 0");
  if (!(cfg.mutate_frac_end > 0.0 && cfg.mutate_frac_end <= cfg.mutate_frac_start &&
        cfg.mutate_frac_start <= 1.0))
    throw std::invalid_argument("ga: need 0 < mutate_frac_end <= mutate_frac_start <= 1");
  if (cfg.mutate_amp < 0.0 || cfg.mutate_amp > 1.0)
    throw std::invalid_argument("ga: mutate_amp must be in [0, 1]");
  if (cfg.planes != 1 && cfg.planes != 2)
    throw std::invalid_argument("ga: planes must be 1 or 2");
  if (cfg.rank_tau <= 0.0) throw std::invalid_argument("ga: rank_tau must be positive");
  if (cfg.switch_at < 0) throw std::invalid_argument("ga: switch_at must be >= 0");
}

void rank_population(std::vector<Individual>& pop) {
  std::stable_sort(pop.begin(), pop.end(), [](const Individual& a, const Individual& b) {
    return a.fitness > b.fitness;
  });
}

void evaluate_individual(Individual& ind, const GAConfig& cfg, const EvalContext& ctx,
                         long iteration) {
  ind.metrics = ctx.evaluate(phenotype(ind, cfg));
  ind.fitness = fitness(ind.metrics, iteration, cfg.switch_at);
  ind.metrics.F = ind.fitness;
}

void record(GAState& state) {
  const Individual& best = state.population.front();
  state.history.rows.push_back({state.iteration, best.fitness,
                                best.metrics.ability, best.metrics.e_b});
}

std::pair<Individual, RunHistory> run_loop(GAState& state, const GAConfig& cfg,
                                           const EvalContext& ctx,
                                           const std::string& checkpoint_path,
                                           long checkpoint_interval) {
  constexpr long kStopWindow = 10000;
  constexpr double kStopRelative = 1e-4;

  while (state.iteration < cfg.budget) {
    if (state.iteration == cfg.switch_at && cfg.switch_at > 0) {
      // Fitness schedule changed; re-rank under the new objective.
      for (Individual& ind : state.population) {
        ind.fitness = fitness(ind.metrics, state.iteration, cfg.switch_at);
        ind.metrics.F = ind.fitness;
      }
      rank_population(state.population);
    }
    step(state, cfg, ctx);
    if (checkpoint_interval > 0 && !checkpoint_path.empty() &&
        state.iteration % checkpoint_interval == 0)
      save_checkpoint(state, cfg, checkpoint_path);
    if (cfg.early_stop && state.iteration >= kStopWindow) {
      const long t_then = state.iteration - kStopWindow;
      // Compare only within one schedule phase.
      if ((t_then >= cfg.switch_at) == (state.iteration > cfg.switch_at)) {
        const auto& rows = state.history.rows;
        const double then = rows[rows.size() - kStopWindow].best_fitness;
        const double now = rows.back().best_fitness;
        if (then != 0.0 && (now - then) / std::abs(then) < kStopRelative) break;
      }
    }
  }
  if (!checkpoint_path.empty()) save_checkpoint(state, cfg, checkpoint_path);
  return {state.population.front(), state.history};
}

}  // namespace

PhaseElement blur_phase(const PhaseElement& e, double sigma) {
  if (sigma < 0.0) throw std::invalid_argument("blur_phase: sigma must be >= 0");
  if (sigma == 0.0) return e;
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> kernel(2 * radius + 1);
  for (int i = -radius; i <= radius; ++i)
    kernel[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));

  const int m = e.m;
  std::vector<double> c(e.phases.size()), s(e.phases.size());
  for (size_t i = 0; i < e.phases.size(); ++i) {
    c[i] = std::cos(e.phases[i]);
    s[i] = std::sin(e.phases[i]);
  }
  // Separable convolution with zero padding; the common positive scale
  // cancels in atan2.
  auto convolve = [&](std::vector<double>& v) {
    std::vector<double> tmp(v.size(), 0.0);
    for (int y = 0; y < m; ++y)
      for (int x = 0; x < m; ++x) {
        double acc = 0.0;
        for (int k = -radius; k <= radius; ++k) {
          const int xx = x + k;
          if (xx >= 0 && xx < m) acc += kernel[k + radius] * v[static_cast<size_t>(y) * m + xx];
        }
        tmp[static_cast<size_t>(y) * m + x] = acc;
      }
    for (int y = 0; y < m; ++y)
      for (int x = 0; x < m; ++x) {
        double acc = 0.0;
        for (int k = -radius; k <= radius; ++k) {
          const int yy = y + k;
          if (yy >= 0 && yy < m) acc += kernel[k + radius] * tmp[static_cast<size_t>(yy) * m + x];
        }
        v[static_cast<size_t>(y) * m + x] = acc;
      }
  };
  convolve(c);
  convolve(s);

  PhaseElement out = e;
  for (size_t i = 0; i < out.phases.size(); ++i)
    out.phases[i] = wrap_phase(std::atan2(s[i], c[i]));
  return out;
}

std::vector<PhaseElement> phenotype(const Individual& ind, const GAConfig& cfg) {
  std::vector<PhaseElement> out;
  out.reserve(ind.elements.size());
  for (const PhaseElement& e : ind.elements)
    out.push_back(cfg.blur_children ? blur_phase(e, cfg.blur_sigma) : e);
  return out;
}

std::pair<int, int> select_parents(const std::vector<Individual>& ranked,
                                   double rank_tau, std::mt19937_64& rng) {
  const int n = static_cast<int>(ranked.size());
  if (n < 2) throw std::invalid_argument("select_parents: population must be >= 2");
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = std::exp(-i / rank_tau);

  auto draw = [&](int exclude) {
    double total = 0.0;
    for (int i = 0; i < n; ++i)
      if (i != exclude) total += w[i];
    std::uniform_real_distribution<double> dist(0.0, total);
    double u = dist(rng);
    for (int i = 0; i < n; ++i) {
      if (i == exclude) continue;
      u -= w[i];
      if (u <= 0.0) return i;
    }
    return exclude == n - 1 ? n - 2 : n - 1;
  };

  const int first = draw(-1);
  const int second = draw(first);
  return {first, second};
}

Individual crossover(const Individual& a, const Individual& b, std::mt19937_64& rng) {
  if (a.elements.size() != b.elements.size())
    throw std::invalid_argument("crossover: plane count mismatch");
  Individual child;
  child.elements.reserve(a.elements.size());
  std::uniform_int_distribution<int> coin(0, 1);
  for (size_t k = 0; k < a.elements.size(); ++k) {
    const PhaseElement& ea = a.elements[k];
    const PhaseElement& eb = b.elements[k];
    if (ea.m != eb.m || ea.macro_pitch != eb.macro_pitch)
      throw std::invalid_argument("crossover: element shape mismatch");
    const bool vertical_cut = coin(rng) != 0;  // split along x (left|right)
    const bool a_first = coin(rng) != 0;
    const PhaseElement& first = a_first ? ea : eb;
    const PhaseElement& second = a_first ? eb : ea;
    PhaseElement ec = ea;
    const int half = ea.m / 2;
    for (int y = 0; y < ea.m; ++y)
      for (int x = 0; x < ea.m; ++x) {
        const bool in_first = vertical_cut ? (x < half) : (y < half);
        ec.at(x, y) = in_first ? first.at(x, y) : second.at(x, y);
      }
    child.elements.push_back(std::move(ec));
  }
  return child;
}

PhaseElement mutate(const PhaseElement& e, double frac, double amp,
                    std::mt19937_64& rng) {
  if (frac < 0.0 || frac > 1.0 || amp < 0.0 || amp > 1.0)
    throw std::invalid_argument("mutate: frac and amp must be in [0, 1]");
  const long total = static_cast<long>(e.m) * e.m;
  const long count = std::lround(frac * total);
  PhaseElement out = e;
  if (count == 0) return out;

  // Partial Fisher-Yates for a uniform sample without replacement.
  std::vector<int> idx(total);
  std::iota(idx.begin(), idx.end(), 0);
  std::uniform_real_distribution<double> delta(-amp * kTwoPi, amp * kTwoPi);
  for (long i = 0; i < count; ++i) {
    std::uniform_int_distribution<long> pick(i, total - 1);
    std::swap(idx[i], idx[pick(rng)]);
    const int j = idx[i];
    out.phases[j] = wrap_phase(out.phases[j] + delta(rng));
  }
  return out;
}

double mutation_fraction(long iteration, const GAConfig& cfg) {
  if (iteration < 0) throw std::invalid_argument("mutation_fraction: negative iteration");
  if (cfg.budget == 0) return cfg.mutate_frac_start;
  const double t = std::min(1.0, static_cast<double>(iteration) / cfg.budget);
  return cfg.mutate_frac_start *
         std::pow(cfg.mutate_frac_end / cfg.mutate_frac_start, t);
}

void init_population(GAState& state, const GAConfig& cfg, const EvalContext& ctx) {
  validate(cfg);
  state.population.clear();
  state.iteration = 0;
  state.rng.seed(cfg.seed);
  state.history = RunHistory{};
  state.history.seed = cfg.seed;

  std::uniform_real_distribution<double> uniform(0.0, kTwoPi);
  for (int i = 0; i < cfg.population; ++i) {
    Individual ind;
    for (int plane = 0; plane < cfg.planes; ++plane) {
      PhaseElement e(cfg.m, cfg.macro_pitch);
      for (double& phi : e.phases) phi = wrap_phase(uniform(state.rng));
      ind.elements.push_back(std::move(e));
    }
    evaluate_individual(ind, cfg, ctx, 0);
    state.population.push_back(std::move(ind));
  }
  rank_population(state.population);
}

void step(GAState& state, const GAConfig& cfg, const EvalContext& ctx) {
  if (state.population.empty()) throw std::logic_error("step: uninitialized state");
  const auto [ia, ib] = select_parents(state.population, cfg.rank_tau, state.rng);
  Individual child = crossover(state.population[ia], state.population[ib], state.rng);
  const double frac = mutation_fraction(state.iteration, cfg);
  for (PhaseElement& e : child.elements)
    e = mutate(e, frac, cfg.mutate_amp, state.rng);
  evaluate_individual(child, cfg, ctx, state.iteration);
  if (child.fitness > state.population.back().fitness) {
    state.population.back() = std::move(child);
    rank_population(state.population);
    ++state.history.accepted;
  }
  ++state.iteration;
  record(state);
}

std::pair<Individual, RunHistory> run(const GAConfig& cfg, const EvalContext& ctx,
                                      const std::string& checkpoint_path,
                                      long checkpoint_interval) {
  GAState state;
  init_population(state, cfg, ctx);
  return run_loop(state, cfg, ctx, checkpoint_path, checkpoint_interval);
}

std::pair<Individual, RunHistory> resume(const GAConfig& cfg, const EvalContext& ctx,
                                         const std::string& resume_path,
                                         const std::string& checkpoint_path,
                                         long checkpoint_interval) {
  GAState state;
  load_checkpoint(state, cfg, ctx, resume_path);
  return run_loop(state, cfg, ctx, checkpoint_path, checkpoint_interval);
}

std::pair<Individual, RunHistory> run_islands(const GAConfig& cfg,
                                              const EvalContext& ctx, int islands) {
  if (islands < 1) throw std::invalid_argument("run_islands: need at least one island");
  std::vector<std::pair<Individual, RunHistory>> results(islands);
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex guard;
  for (int i = 0; i < islands; ++i)
    pool.emplace_back([&, i] {
      try {
        GAConfig local = cfg;
        local.seed = cfg.seed + static_cast<std::uint64_t>(i);
        local.threads = 1;  // replicas are fully isolated, one thread each
        results[i] = run(local, ctx);
      } catch (...) {
        std::lock_guard<std::mutex> lock(guard);
        if (!error) error = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  int best = 0;
  for (int i = 1; i < islands; ++i)
    if (results[i].first.fitness > results[best].first.fitness) best = i;
  return results[best];
}

void save_checkpoint(const GAState& state, const GAConfig& cfg,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("checkpoint: cannot open " + path + " for writing");
  out << "MSORT-CKPT 1\n";
  out << "iteration " << state.iteration << '\n';
  out << "accepted " << state.history.accepted << '\n';
  out << "seed " << state.history.seed << '\n';
  out << "population " << state.population.size() << '\n';
  out << "planes " << cfg.planes << '\n';
  out << "m " << cfg.m << '\n';
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", cfg.macro_pitch);
  out << "macro_pitch " << buf << '\n';
  out << "rng " << state.rng << '\n';
  for (const Individual& ind : state.population)
    for (const PhaseElement& e : ind.elements) {
      out << "element";
      for (double phi : e.phases) {
        std::snprintf(buf, sizeof buf, " %a", phi);
        out << buf;
      }
      out << '\n';
    }
  if (!out) throw std::runtime_error("checkpoint: write failed for " + path);
}

void load_checkpoint(GAState& state, const GAConfig& cfg, const EvalContext& ctx,
                     const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "MSORT-CKPT" || version != 1)
    throw std::runtime_error("checkpoint: unrecognized file format");
  std::string key;
  long iteration = 0, accepted = 0;
  std::uint64_t seed = 0;
  size_t population = 0;
  int planes = 0, m = 0;
  double macro_pitch = 0.0;
  in >> key >> iteration >> key >> accepted >> key >> seed >> key >> population
      >> key >> planes >> key >> m >> key >> macro_pitch;
  in >> key;  // "rng"
  in >> state.rng;
  if (!in) throw std::runtime_error("checkpoint: truncated header");
  if (planes != cfg.planes || m != cfg.m)
    throw std::runtime_error("checkpoint: geometry does not match the configuration");

  state.iteration = iteration;
  state.history = RunHistory{};
  state.history.seed = seed;
  state.history.accepted = accepted;
  state.population.clear();
  for (size_t i = 0; i < population; ++i) {
    Individual ind;
    for (int plane = 0; plane < planes; ++plane) {
      in >> key;  // "element"
      if (key != "element") throw std::runtime_error("checkpoint: truncated population");
      PhaseElement e(m, macro_pitch);
      for (double& phi : e.phases) {
        std::string tok;
        in >> tok;
        phi = std::strtod(tok.c_str(), nullptr);
      }
      ind.elements.push_back(std::move(e));
    }
    if (!in) throw std::runtime_error("checkpoint: truncated population");
    evaluate_individual(ind, cfg, ctx, iteration);
    state.population.push_back(std::move(ind));
  }
  rank_population(state.population);
}

void write_history_csv(const RunHistory& history, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("history: cannot open " + path + " for writing");
  out << "# rng=" << history.rng_name << " seed=" << history.seed
      << " accepted=" << history.accepted << '\n';
  out << "iteration,best_fitness,best_ability,best_qber\n";
  char buf[128];
  for (const HistoryRow& r : history.rows) {
    std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g,%.17g\n", r.iteration,
                  r.best_fitness, r.best_ability, r.best_qber);
    out << buf;
  }
  if (!out) throw std::runtime_error("history: write failed for " + path);
}

}  // namespace msort
