#pragma once

#include <cstdint>
#include <vector>

#include "msort/modes.hpp"
#include "msort/optics.hpp"

namespace msort {

/// Phase hologram genome: m x m macropixels, phases in [0, 2pi).
struct PhaseElement {
  int m = 125;
  double macro_pitch = 20e-6;
  std::vector<double> phases;

  PhaseElement() = default;
  PhaseElement(int m_, double macro_pitch_)
      : m(m_), macro_pitch(macro_pitch_),
        phases(static_cast<size_t>(m_) * m_, 0.0) {
    if (m_ < 16) throw std::invalid_argument("phase element: m must be >= 16");
    if (macro_pitch_ <= 0.0)
      throw std::invalid_argument("phase element: macro pitch must be positive");
  }
  double& at(int ix, int iy) { return phases[static_cast<size_t>(iy) * m + ix]; }
  const double& at(int ix, int iy) const { return phases[static_cast<size_t>(iy) * m + ix]; }
};

/// Axis-aligned square detector region (center, side in meters).
struct Channel {
  double cx = 0.0;
  double cy = 0.0;
  double side = 200e-6;
};

struct ChannelLayout {
  std::vector<Channel> channels;
  int d() const { return static_cast<int>(channels.size()); }
};

/// One- or two-plane sorter geometry. For planes = 2 the second element
/// sits at the focal plane of the first lens.
struct SorterSetup {
  int planes = 2;
  double focal = 1.0;
  Grid grid;
  ChannelLayout layout;
  int steps = 1;  ///< propagation sub-steps per segment
};

/// Raw channel intensities plus all derived sorting metrics.
struct SortMetrics {
  int d = 0;
  std::vector<double> raw;         ///< d x d, raw[n*d+m] = power of mode n in channel m
  double B = 0.0;                  ///< sorting performance
  std::vector<double> P;           ///< per-mode sorting probabilities
  double ability = 0.0;            ///< mean of P
  std::vector<double> efficiency;  ///< raw(n,n) / input power n
  double mean_efficiency = 0.0;
  double e_b = 0.0;                ///< QBER = 1 - ability
  double R = 0.0;                  ///< secret-key rate [bits]
  double F = 0.0;                  ///< fitness under the active schedule
  std::vector<std::uint8_t> degenerate_row;  ///< all-zero raw row flags

  double raw_at(int n, int m) const { return raw[static_cast<size_t>(n) * d + m]; }
};

/// Centers the element on the grid, replicating each macropixel over its
/// s x s samples (s = macro_pitch / grid pitch, must be an integer).
/// Phase is zero outside the element.
PhaseMap embed_element(const PhaseElement& e, const Grid& grid);

/// Forward model: per input mode apply element(s), lens(es) and focal-length
/// propagation, then integrate |a|^2 pitch^2 over each channel square.
/// threads > 1 evaluates modes in parallel (bitwise-identical results).
SortMetrics run_sorter(const SorterSetup& setup,
                       const std::vector<PhaseElement>& elements,
                       const std::vector<ComplexField>& inputs,
                       int threads = 1);

/// B = sum_n (I_n - sum_{m != n} I~_m).
double sorting_performance(const std::vector<double>& raw, int d);

/// P_n = I_n / (I_n + sum_{m != n} I~_m); 1/d for an all-zero row.
double sorting_probability(const std::vector<double>& raw, int d, int n);

double qber(const SortMetrics& metrics);

/// d-dimensional Shannon entropy h(x) = -x log2(x/(d-1)) - (1-x) log2(1-x),
/// extended by continuity at x = 0 and x = 1.
double shannon_entropy_d(double x, int d);

/// R = log2(d) - 2 h^(d)(e_b); may be negative.
double key_rate(int d, double e_b);

/// B before switch_at iterations, afterwards B * max(R, 1e-3).
double fitness(const SortMetrics& metrics, long iteration, long switch_at);

/// Row-normalized crosstalk matrix; rows sum to 1, diagonal = P_n.
/// All-zero rows become uniform 1/d.
std::vector<double> crosstalk_normalized(const SortMetrics& metrics);

/// Analytic multiplexed fork grating arg(sum_n exp(i(-ell_n theta + k_n . r)))
/// with carrier k_n = 2 pi (channel center) / (lambda f). Requires pure-OAM
/// basis modes (p = 0). Spans the full grid aperture.
PhaseElement fork_baseline(const BasisSpec& basis, const ChannelLayout& layout,
                           const Grid& grid, double focal = 1.0);

}  // namespace msort
