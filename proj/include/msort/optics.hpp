#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

namespace msort {

using cdouble = std::complex<double>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Wraps an angle into [0, 2pi).
double wrap_phase(double phi);

/// Uniform square sampling grid with physical pitch and wavelength.
struct Grid {
  int n = 256;            ///< samples per side, power of two, >= 32
  double pitch = 20e-6;   ///< sample spacing [m]
  double wavelength = 780e-9;

  Grid() = default;
  Grid(int n_, double pitch_, double wavelength_);

  double side() const { return n * pitch; }
  /// Centered sample coordinate; index n/2 maps to exactly 0.
  double coord(int i) const { return (i - n / 2) * pitch; }

  bool operator==(const Grid&) const = default;
};

/// Sampled complex scalar field. Intensity = |amplitude|^2.
struct ComplexField {
  Grid grid;
  std::vector<cdouble> samples;  ///< row-major, samples[iy * n + ix]

  ComplexField() = default;
  explicit ComplexField(const Grid& g)
      : grid(g), samples(static_cast<size_t>(g.n) * g.n) {}

  cdouble& at(int ix, int iy) { return samples[static_cast<size_t>(iy) * grid.n + ix]; }
  const cdouble& at(int ix, int iy) const { return samples[static_cast<size_t>(iy) * grid.n + ix]; }
};

/// Phase pattern on a grid, values wrapped to [0, 2pi).
struct PhaseMap {
  Grid grid;
  std::vector<double> phases;

  PhaseMap() = default;
  explicit PhaseMap(const Grid& g)
      : grid(g), phases(static_cast<size_t>(g.n) * g.n, 0.0) {}
};

/// Total power sum(|a|^2) * pitch^2.
double power(const ComplexField& f);

/// Inner product sum(conj(a) * b) * pitch^2. Throws on grid mismatch.
cdouble overlap(const ComplexField& a, const ComplexField& b);

/// Pointwise multiply by exp(i * phase). Power-conserving.
ComplexField apply_phase(const ComplexField& f, const PhaseMap& p);

/// Quadratic phase of a thin lens: wrap(-pi (x^2+y^2) / (lambda f)).
PhaseMap lens_phase(const Grid& g, double focal_length);

/// Angular-spectrum free-space propagation over `distance` in `steps`
/// equal sub-steps. Evanescent components are zeroed.
ComplexField propagate(const ComplexField& f, double distance, int steps = 1);

/// Intensity |a|^2 per sample.
std::vector<double> intensity(const ComplexField& f);

/// Intensity frames at z = 0, interval, ..., total. `interval` must divide
/// `total`; one sub-step per interval.
std::vector<std::vector<double>> snapshot_propagation(const ComplexField& f,
                                                      double total,
                                                      double interval);

/// Fraction of total power in the outer `frame`-sample border.
double edge_power_fraction(const ComplexField& f, int frame = 8);

}  // namespace msort
