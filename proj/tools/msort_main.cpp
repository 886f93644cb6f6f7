#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "msort/config.hpp"
#include "msort/ga.hpp"
#include "msort/io.hpp"

namespace fs = std::filesystem;
using namespace msort;

namespace {

void print_report(const SortMetrics& m) {
  std::printf("d=%d ability=%.6f efficiency=%.6f e_b=%.6f R=%.6f B=%.6f\n", m.d,
              m.ability, m.mean_efficiency, m.e_b, m.R, m.B);
}

void write_reports(const SortMetrics& m, const fs::path& dir) {
  fs::create_directories(dir);
  write_crosstalk_csv(m, (dir / "crosstalk.csv").string());
  write_raw_csv(m, (dir / "raw.csv").string());
}

int cmd_optimize(const std::string& config_path, std::optional<long> seed,
                 const std::string& resume_path, int threads, int islands) {
  RunConfig cfg = parse_config_file(config_path);
  if (seed) cfg.ga.seed = static_cast<std::uint64_t>(*seed);
  cfg.ga.threads = threads;

  EvalContext ctx{make_setup(cfg), make_inputs(cfg), threads};
  const fs::path dir = cfg.output_dir;
  fs::create_directories(dir);
  const std::string ckpt = (dir / "checkpoint.txt").string();

  std::pair<Individual, RunHistory> result;
  if (islands > 1)
    result = run_islands(cfg.ga, ctx, islands);
  else if (!resume_path.empty())
    result = resume(cfg.ga, ctx, resume_path, ckpt, cfg.checkpoint_interval);
  else
    result = run(cfg.ga, ctx, ckpt, cfg.checkpoint_interval);

  const Individual& best = result.first;
  // Export the displayable (smoothed) patterns; re-evaluating the saved
  // files reproduces the reported metrics up to phase quantization.
  const std::vector<PhaseElement> display = phenotype(best, cfg.ga);
  for (size_t i = 0; i < display.size(); ++i)
    save_hologram(display[i],
                  (dir / ("best_element_" + std::to_string(i + 1) + ".pgm")).string(),
                  cfg.wavelength, cfg.ga.seed);
  write_reports(best.metrics, dir);
  write_history_csv(result.second, (dir / "history.csv").string());
  print_report(best.metrics);
  return 0;
}

std::vector<PhaseElement> load_elements(const std::vector<std::string>& paths) {
  std::vector<PhaseElement> elements;
  for (const std::string& p : paths) elements.push_back(load_hologram(p));
  return elements;
}

int cmd_evaluate(const std::string& config_path, const std::vector<std::string>& holos,
                 int threads) {
  RunConfig cfg = parse_config_file(config_path);
  SorterSetup setup = make_setup(cfg);
  setup.planes = static_cast<int>(holos.size());
  const SortMetrics m = run_sorter(setup, load_elements(holos), make_inputs(cfg), threads);
  write_reports(m, cfg.output_dir);
  print_report(m);
  return 0;
}

int cmd_baseline(const std::string& config_path) {
  RunConfig cfg = parse_config_file(config_path);
  SorterSetup setup = make_setup(cfg);
  setup.planes = 1;
  const PhaseElement e = fork_baseline(make_basis(cfg), setup.layout, setup.grid, cfg.focal);
  const fs::path dir = cfg.output_dir;
  fs::create_directories(dir);
  save_hologram(e, (dir / "baseline.pgm").string(), cfg.wavelength, 0);
  const SortMetrics m = run_sorter(setup, {e}, make_inputs(cfg));
  write_reports(m, dir);
  print_report(m);
  return 0;
}

int cmd_propagate(const std::string& config_path, const std::vector<std::string>& holos,
                  int mode_index, double interval) {
  RunConfig cfg = parse_config_file(config_path);
  SorterSetup setup = make_setup(cfg);
  setup.planes = static_cast<int>(holos.size());
  const auto elements = load_elements(holos);
  const auto inputs = make_inputs(cfg);
  if (mode_index < 0 || mode_index >= static_cast<int>(inputs.size()))
    throw ValidationError("mode index out of range");

  const PhaseMap lens = lens_phase(setup.grid, setup.focal);
  const fs::path dir = cfg.output_dir;
  fs::create_directories(dir);

  ComplexField f = inputs[mode_index];
  int frame = 0;
  auto dump = [&](const std::vector<double>& map) {
    char name[64];
    std::snprintf(name, sizeof name, "snapshot_%03d.pgm", frame++);
    export_intensity_map(map, setup.grid.n, (dir / name).string());
  };
  for (int plane = 0; plane < setup.planes; ++plane) {
    f = apply_phase(f, embed_element(elements[plane], setup.grid));
    f = apply_phase(f, lens);
    const auto frames = snapshot_propagation(f, setup.focal, interval);
    // The segment start duplicates the previous segment end; skip it after
    // the first segment.
    for (size_t i = (plane == 0 ? 0 : 1); i < frames.size(); ++i) dump(frames[i]);
    f = propagate(f, setup.focal, setup.steps);
    if (edge_power_fraction(f) > 0.01)
      std::cerr << "warning: more than 1% of power in the outer 8-sample frame\n";
  }
  std::printf("wrote %d snapshots to %s\n", frame, dir.string().c_str());
  return 0;
}

int cmd_mub(int d) {
  const MubFamily fam = mub_family(d);
  double max_dev = 0.0;
  for (size_t i = 0; i < fam.bases.size(); ++i) {
    std::printf("basis %zu:\n", i);
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) {
        const cdouble v = fam.bases[i].at(r, c);
        std::printf(" %+.6f%+.6fi", v.real(), v.imag());
      }
      std::printf("\n");
    }
    for (size_t j = i + 1; j < fam.bases.size(); ++j)
      max_dev = std::max(max_dev, unbiasedness_deviation(fam.bases[i], fam.bases[j]));
  }
  std::printf("bases: %zu\nmax unbiasedness deviation: %.3e\n", fam.bases.size(), max_dev);
  return 0;
}

int cmd_keyrate(int d, double qber_value) {
  std::printf("%.6f\n", key_rate(d, qber_value));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase-element mode sorter designer and evaluator"};
  app.require_subcommand(1);

  std::string config_path, resume_path;
  std::vector<std::string> holos;
  std::optional<long> seed;
  int threads = 1, islands = 1, d = 3, mode_index = 0;
  double qber_value = 0.0, interval = 0.2;

  auto* optimize = app.add_subcommand("optimize", "run the evolutionary optimization");
  optimize->add_option("--config", config_path, "config file")->required();
  optimize->add_option("--seed", seed, "override the config seed");
  optimize->add_option("--resume", resume_path, "resume from a checkpoint file");
  optimize->add_option("--threads", threads, "parallel per-mode evaluation threads");
  optimize->add_option("--islands", islands, "independent seeded replicas");

  auto* evaluate = app.add_subcommand("evaluate", "evaluate given holograms");
  evaluate->add_option("--config", config_path, "config file")->required();
  evaluate->add_option("--holo", holos, "hologram file (repeat for two planes)")
      ->required()->expected(1, 2);
  evaluate->add_option("--threads", threads, "parallel per-mode evaluation threads");

  auto* baseline = app.add_subcommand("baseline", "analytic fork-grating baseline");
  baseline->add_option("--config", config_path, "config file")->required();

  auto* prop = app.add_subcommand("propagate", "intensity snapshot series");
  prop->add_option("--config", config_path, "config file")->required();
  prop->add_option("--holo", holos, "hologram file (repeat for two planes)")
      ->required()->expected(1, 2);
  prop->add_option("--mode", mode_index, "input mode index")->required();
  prop->add_option("--interval", interval, "snapshot interval [m]")->required();

  auto* mub = app.add_subcommand("mub", "print MUB coefficient matrices");
  mub->add_option("--d", d, "prime dimension")->required();

  auto* keyrate = app.add_subcommand("keyrate", "secret-key rate from dimension and QBER");
  keyrate->add_option("--d", d, "dimension")->required();
  keyrate->add_option("--qber", qber_value, "quantum bit error rate")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (optimize->parsed())
      return cmd_optimize(config_path, seed, resume_path, threads, islands);
    if (evaluate->parsed()) return cmd_evaluate(config_path, holos, threads);
    if (baseline->parsed()) return cmd_baseline(config_path);
    if (prop->parsed()) return cmd_propagate(config_path, holos, mode_index, interval);
    if (mub->parsed()) return cmd_mub(d);
    if (keyrate->parsed()) return cmd_keyrate(d, qber_value);
  } catch (const IoError& e) {
    std::cerr << "error: io: " << e.what() << '\n';
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: validation: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: validation: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: runtime: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
