#include "msort/sorter.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <thread>

namespace msort {
namespace {

/// Sample index range [lo, hi) whose centers fall inside [c - side/2, c + side/2).
std::pair<int, int> channel_span(const Grid& g, double center, double side) {
  const double lo = center - side / 2.0;
  const double hi = center + side / 2.0;
  // coord(i) = (i - n/2) * pitch
  int ilo = static_cast<int>(std::ceil(lo / g.pitch - 1e-9)) + g.n / 2;
  int ihi = static_cast<int>(std::ceil(hi / g.pitch - 1e-9)) + g.n / 2;
  ilo = std::clamp(ilo, 0, g.n);
  ihi = std::clamp(ihi, 0, g.n);
  return {ilo, ihi};
}

double channel_power(const ComplexField& f, const Channel& ch) {
  const auto [x0, x1] = channel_span(f.grid, ch.cx, ch.side);
  const auto [y0, y1] = channel_span(f.grid, ch.cy, ch.side);
  double acc = 0.0;
  for (int iy = y0; iy < y1; ++iy)
    for (int ix = x0; ix < x1; ++ix) acc += std::norm(f.at(ix, iy));
  return acc * f.grid.pitch * f.grid.pitch;
}

}  // namespace

PhaseMap embed_element(const PhaseElement& e, const Grid& grid) {
  const double ratio = e.macro_pitch / grid.pitch;
  const int s = static_cast<int>(std::lround(ratio));
  if (s < 1 || std::abs(ratio - s) > 1e-9)
    throw std::invalid_argument("embed_element: grid pitch does not divide macro pitch");
  const int span = e.m * s;
  if (span > grid.n)
    throw std::invalid_argument("embed_element: element exceeds grid extent");
  const int off = (grid.n - span) / 2;
  PhaseMap out(grid);
  for (int my = 0; my < e.m; ++my)
    for (int mx = 0; mx < e.m; ++mx) {
      const double phi = e.at(mx, my);
      for (int sy = 0; sy < s; ++sy) {
        double* row = out.phases.data() + static_cast<size_t>(off + my * s + sy) * grid.n;
        for (int sx = 0; sx < s; ++sx) row[off + mx * s + sx] = phi;
      }
    }
  return out;
}

double sorting_performance(const std::vector<double>& raw, int d) {
  double b = 0.0;
  for (int n = 0; n < d; ++n) {
    double row = 0.0;
    for (int m = 0; m < d; ++m) row += raw[static_cast<size_t>(n) * d + m];
    b += 2.0 * raw[static_cast<size_t>(n) * d + n] - row;
  }
  return b;
}

double sorting_probability(const std::vector<double>& raw, int d, int n) {
  double row = 0.0;
  for (int m = 0; m < d; ++m) row += raw[static_cast<size_t>(n) * d + m];
  if (row <= 0.0) return 1.0 / d;
  return raw[static_cast<size_t>(n) * d + n] / row;
}

double qber(const SortMetrics& metrics) { return 1.0 - metrics.ability; }

double shannon_entropy_d(double x, int d) {
  if (d < 2) throw std::invalid_argument("shannon_entropy_d: d must be >= 2");
  if (x < 0.0 || x > 1.0)
    throw std::invalid_argument("shannon_entropy_d: x must be in [0, 1]");
  double h = 0.0;
  if (x > 0.0) h -= x * std::log2(x / (d - 1));
  if (x < 1.0) h -= (1.0 - x) * std::log2(1.0 - x);
  return h;
}

double key_rate(int d, double e_b) {
  return std::log2(static_cast<double>(d)) - 2.0 * shannon_entropy_d(e_b, d);
}

double fitness(const SortMetrics& metrics, long iteration, long switch_at) {
  if (switch_at < 0) throw std::invalid_argument("fitness: switch_at must be >= 0");
  if (iteration < switch_at) return metrics.B;
  return metrics.B * std::max(metrics.R, 1e-3);
}

std::vector<double> crosstalk_normalized(const SortMetrics& metrics) {
  const int d = metrics.d;
  std::vector<double> out(static_cast<size_t>(d) * d);
  for (int n = 0; n < d; ++n) {
    double row = 0.0;
    for (int m = 0; m < d; ++m) row += metrics.raw_at(n, m);
    for (int m = 0; m < d; ++m)
      out[static_cast<size_t>(n) * d + m] =
          row > 0.0 ? metrics.raw_at(n, m) / row : 1.0 / d;
  }
  return out;
}

SortMetrics run_sorter(const SorterSetup& setup,
                       const std::vector<PhaseElement>& elements,
                       const std::vector<ComplexField>& inputs,
                       int threads) {
  if (setup.planes != 1 && setup.planes != 2)
    throw std::invalid_argument("run_sorter: planes must be 1 or 2");
  if (static_cast<int>(elements.size()) != setup.planes)
    throw std::invalid_argument("run_sorter: element count does not match planes");
  const int d = setup.layout.d();
  if (static_cast<int>(inputs.size()) != d)
    throw std::invalid_argument("run_sorter: input count does not match channel count");
  if (d < 1) throw std::invalid_argument("run_sorter: empty channel layout");

  std::vector<PhaseMap> embedded;
  embedded.reserve(elements.size());
  for (const PhaseElement& e : elements) embedded.push_back(embed_element(e, setup.grid));
  const PhaseMap lens = lens_phase(setup.grid, setup.focal);

  SortMetrics metrics;
  metrics.d = d;
  metrics.raw.assign(static_cast<size_t>(d) * d, 0.0);
  metrics.P.resize(d);
  metrics.efficiency.resize(d);
  metrics.degenerate_row.assign(d, 0);

  std::vector<double> input_power(d);

  auto eval_mode = [&](int n) {
    if (!(inputs[n].grid == setup.grid))
      throw std::invalid_argument("run_sorter: input grid mismatch");
    input_power[n] = power(inputs[n]);
    ComplexField f = inputs[n];
    for (int plane = 0; plane < setup.planes; ++plane) {
      f = apply_phase(f, embedded[plane]);
      f = apply_phase(f, lens);
      f = propagate(f, setup.focal, setup.steps);
    }
    for (int m = 0; m < d; ++m)
      metrics.raw[static_cast<size_t>(n) * d + m] =
          channel_power(f, setup.layout.channels[m]);
  };

  if (threads > 1 && d > 1) {
    // Modes are independent; parallel rows are bitwise-identical to serial.
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    const int workers = std::min(threads, d);
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (int n = w; n < d; n += workers) {
          try {
            eval_mode(n);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  } else {
    for (int n = 0; n < d; ++n) eval_mode(n);
  }

  metrics.B = sorting_performance(metrics.raw, d);
  double sum_p = 0.0, sum_eff = 0.0;
  for (int n = 0; n < d; ++n) {
    double row = 0.0;
    for (int m = 0; m < d; ++m) row += metrics.raw_at(n, m);
    if (row <= 0.0) metrics.degenerate_row[n] = 1;
    metrics.P[n] = sorting_probability(metrics.raw, d, n);
    metrics.efficiency[n] =
        input_power[n] > 0.0 ? metrics.raw_at(n, n) / input_power[n] : 0.0;
    sum_p += metrics.P[n];
    sum_eff += metrics.efficiency[n];
  }
  metrics.ability = sum_p / d;
  metrics.mean_efficiency = sum_eff / d;
  metrics.e_b = 1.0 - metrics.ability;
  metrics.R = key_rate(d, std::clamp(metrics.e_b, 0.0, 1.0));
  metrics.F = metrics.B;
  return metrics;
}

PhaseElement fork_baseline(const BasisSpec& basis, const ChannelLayout& layout,
                           const Grid& grid, double focal) {
  const int d = basis.d();
  if (d != layout.d())
    throw std::invalid_argument("fork_baseline: basis and layout sizes differ");
  if (d < 1) throw std::invalid_argument("fork_baseline: empty basis");
  for (const LGSpec& m : basis.modes)
    if (m.p != 0)
      throw std::invalid_argument("fork_baseline: basis must be pure OAM (p = 0)");
  if (focal == 0.0) throw std::invalid_argument("fork_baseline: zero focal length");

  PhaseElement e(grid.n, grid.pitch);
  const double kc = kTwoPi / (grid.wavelength * focal);
  for (int iy = 0; iy < grid.n; ++iy) {
    const double y = grid.coord(iy);
    for (int ix = 0; ix < grid.n; ++ix) {
      const double x = grid.coord(ix);
      const double theta = std::atan2(y, x);
      cdouble acc = 0.0;
      for (int n = 0; n < d; ++n) {
        const Channel& ch = layout.channels[n];
        const double phi = -basis.modes[n].ell * theta + kc * (ch.cx * x + ch.cy * y);
        acc += std::polar(1.0, phi);
      }
      e.at(ix, iy) = wrap_phase(std::arg(acc));
    }
  }
  return e;
}

}  // namespace msort
