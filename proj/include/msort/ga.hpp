#pragma once

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "msort/sorter.hpp"

namespace msort {

/// Steady-state GA hyperparameters.
struct GAConfig {
  int population = 10;
  int m = 125;                    ///< macropixels per element side
  double macro_pitch = 20e-6;
  double blur_sigma = 1.0;        ///< [macropixels]
  double mutate_frac_start = 0.10;
  double mutate_frac_end = 0.0001;
  double mutate_amp = 0.15;       ///< fraction of 2pi
  double rank_tau = 10.0 / 3.0;
  long switch_at = 10000;         ///< iteration of the B -> B*R fitness switch
  long budget = 100000;
  std::uint64_t seed = 1;
  int planes = 2;
  bool blur_children = true;
  bool early_stop = false;
  int threads = 1;                ///< parallel per-mode evaluation
};

struct Individual {
  std::vector<PhaseElement> elements;
  double fitness = 0.0;
  SortMetrics metrics;
};

struct HistoryRow {
  long iteration = 0;
  double best_fitness = 0.0;
  double best_ability = 0.0;
  double best_qber = 0.0;
};

struct RunHistory {
  std::string rng_name = "mt19937_64";
  std::uint64_t seed = 0;
  long accepted = 0;
  std::vector<HistoryRow> rows;
};

/// Sorter evaluation context: fixed setup and pre-sampled input modes.
struct EvalContext {
  SorterSetup setup;
  std::vector<ComplexField> inputs;
  int threads = 1;

  SortMetrics evaluate(const std::vector<PhaseElement>& elements) const {
    return run_sorter(setup, elements, inputs, threads);
  }
};

struct GAState {
  std::vector<Individual> population;  ///< kept sorted by fitness, best first
  std::mt19937_64 rng;
  long iteration = 0;
  RunHistory history;
};

/// Wrap-aware Gaussian blur: cos and sin convolved separately, phases
/// recovered with atan2 and wrapped to [0, 2pi).
PhaseElement blur_phase(const PhaseElement& e, double sigma);

/// Displayable patterns for an individual: the genome with the smoothing
/// blur applied (the genome itself when blurring is disabled). Fitness is
/// always measured on this phenotype, so the blur never accumulates across
/// generations.
std::vector<PhaseElement> phenotype(const Individual& ind, const GAConfig& cfg);

/// Two distinct indices drawn without replacement, P(rank) ~ exp(-rank/tau).
std::pair<int, int> select_parents(const std::vector<Individual>& ranked,
                                   double rank_tau, std::mt19937_64& rng);

/// Per element: random split axis and parent order, one half from each
/// parent along a straight middle cut.
Individual crossover(const Individual& a, const Individual& b,
                     std::mt19937_64& rng);

/// Perturbs round(frac * m^2) distinct macropixels by uniform draws in
/// [-amp*2pi, +amp*2pi], wrapped.
PhaseElement mutate(const PhaseElement& e, double frac, double amp,
                    std::mt19937_64& rng);

/// Geometric decay from mutate_frac_start at t = 0 to mutate_frac_end at budget.
double mutation_fraction(long iteration, const GAConfig& cfg);

/// Random blurred population, evaluated and ranked best-first.
void init_population(GAState& state, const GAConfig& cfg, const EvalContext& ctx);

/// One steady-state iteration: breed, evaluate, replace worst if better.
void step(GAState& state, const GAConfig& cfg, const EvalContext& ctx);

/// Full optimization run. Re-ranks the population at the fitness switch.
std::pair<Individual, RunHistory> run(const GAConfig& cfg, const EvalContext& ctx,
                                      const std::string& checkpoint_path = "",
                                      long checkpoint_interval = 0);

/// Resume from a checkpoint and run the remaining budget.
std::pair<Individual, RunHistory> resume(const GAConfig& cfg, const EvalContext& ctx,
                                         const std::string& resume_path,
                                         const std::string& checkpoint_path = "",
                                         long checkpoint_interval = 0);

/// Runs `islands` fully isolated replicas (seed + island index) on threads
/// and returns the overall best.
std::pair<Individual, RunHistory> run_islands(const GAConfig& cfg,
                                              const EvalContext& ctx, int islands);

void save_checkpoint(const GAState& state, const GAConfig& cfg,
                     const std::string& path);
void load_checkpoint(GAState& state, const GAConfig& cfg, const EvalContext& ctx,
                     const std::string& path);

void write_history_csv(const RunHistory& history, const std::string& path);

}  // namespace msort
