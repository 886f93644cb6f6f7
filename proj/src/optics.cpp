#include "msort/optics.hpp"

#include <cmath>

#include "msort/fft.hpp"

namespace msort {

double wrap_phase(double phi) {
  double w = phi - kTwoPi * std::floor(phi / kTwoPi);
  if (w >= kTwoPi) w -= kTwoPi;
  if (w < 0.0) w = 0.0;
  return w;
}

Grid::Grid(int n_, double pitch_, double wavelength_)
    : n(n_), pitch(pitch_), wavelength(wavelength_) {
  if (n < 32 || (n & (n - 1)) != 0)
    throw std::invalid_argument("grid: n must be a power of two >= 32");
  if (pitch <= 0.0) throw std::invalid_argument("grid: pitch must be positive");
  if (wavelength <= 0.0)
    throw std::invalid_argument("grid: wavelength must be positive");
}

double power(const ComplexField& f) {
  double acc = 0.0;
  for (const cdouble& a : f.samples) acc += std::norm(a);
  return acc * f.grid.pitch * f.grid.pitch;
}

cdouble overlap(const ComplexField& a, const ComplexField& b) {
  if (!(a.grid == b.grid)) throw std::invalid_argument("overlap: grid mismatch");
  cdouble acc = 0.0;
  for (size_t i = 0; i < a.samples.size(); ++i)
    acc += std::conj(a.samples[i]) * b.samples[i];
  return acc * (a.grid.pitch * a.grid.pitch);
}

ComplexField apply_phase(const ComplexField& f, const PhaseMap& p) {
  if (!(f.grid == p.grid))
    throw std::invalid_argument("apply_phase: grid mismatch");
  ComplexField out = f;
  for (size_t i = 0; i < out.samples.size(); ++i)
    out.samples[i] *= std::polar(1.0, p.phases[i]);
  return out;
}

PhaseMap lens_phase(const Grid& g, double focal_length) {
  if (focal_length == 0.0)
    throw std::invalid_argument("lens_phase: zero focal length");
  PhaseMap out(g);
  const double c = -M_PI / (g.wavelength * focal_length);
  for (int iy = 0; iy < g.n; ++iy) {
    const double y = g.coord(iy);
    for (int ix = 0; ix < g.n; ++ix) {
      const double x = g.coord(ix);
      out.phases[static_cast<size_t>(iy) * g.n + ix] = wrap_phase(c * (x * x + y * y));
    }
  }
  return out;
}

ComplexField propagate(const ComplexField& f, double distance, int steps) {
  if (distance < 0.0) throw std::invalid_argument("propagate: negative distance");
  if (steps < 1) throw std::invalid_argument("propagate: steps must be >= 1");
  if (distance == 0.0) return f;

  const int n = f.grid.n;
  const double k0 = kTwoPi / f.grid.wavelength;
  const double dk = kTwoPi / (n * f.grid.pitch);
  const double dz = distance / steps;

  // Per-sub-step transfer function exp(i (kz - k0) dz); the on-axis piston
  // phase exp(i k0 z) is factored out. Evanescent components -> 0.
  std::vector<cdouble> tf(static_cast<size_t>(n) * n);
  std::vector<double> ksq(n);
  for (int i = 0; i < n; ++i) {
    const double k = (i <= n / 2 ? i : i - n) * dk;
    ksq[i] = k * k;
  }
  const double k0sq = k0 * k0;
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const double kt2 = ksq[ix] + ksq[iy];
      cdouble h = 0.0;
      if (kt2 <= k0sq) h = std::polar(1.0, dz * (std::sqrt(k0sq - kt2) - k0));
      tf[static_cast<size_t>(iy) * n + ix] = h;
    }
  }

  ComplexField out = f;
  fft2_inplace(n, out.samples.data(), false);
  for (int s = 0; s < steps; ++s)
    for (size_t i = 0; i < out.samples.size(); ++i) out.samples[i] *= tf[i];
  fft2_inplace(n, out.samples.data(), true);
  return out;
}

std::vector<double> intensity(const ComplexField& f) {
  std::vector<double> out(f.samples.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = std::norm(f.samples[i]);
  return out;
}

std::vector<std::vector<double>> snapshot_propagation(const ComplexField& f,
                                                      double total,
                                                      double interval) {
  if (total < 0.0) throw std::invalid_argument("snapshot: negative total");
  std::vector<std::vector<double>> frames;
  frames.push_back(intensity(f));
  if (total == 0.0) return frames;
  if (interval <= 0.0)
    throw std::invalid_argument("snapshot: interval must be positive");
  const double ratio = total / interval;
  const long count = std::lround(ratio);
  if (count < 1 || std::abs(ratio - count) > 1e-9)
    throw std::invalid_argument("snapshot: interval does not divide total");
  ComplexField cur = f;
  for (long i = 0; i < count; ++i) {
    cur = propagate(cur, interval, 1);
    frames.push_back(intensity(cur));
  }
  return frames;
}

double edge_power_fraction(const ComplexField& f, int frame) {
  const int n = f.grid.n;
  double edge = 0.0, all = 0.0;
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const double v = std::norm(f.at(ix, iy));
      all += v;
      if (ix < frame || ix >= n - frame || iy < frame || iy >= n - frame)
        edge += v;
    }
  }
  return all > 0.0 ? edge / all : 0.0;
}

}  // namespace msort
