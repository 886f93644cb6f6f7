#include "msort/modes.hpp"

#include <algorithm>
#include <cmath>

namespace msort {

double laguerre(int p, int alpha, double x) {
  if (p == 0) return 1.0;
  double lm1 = 1.0;
  double l = 1.0 + alpha - x;
  for (int k = 2; k <= p; ++k) {
    double next = ((2.0 * k - 1.0 + alpha - x) * l - (k - 1.0 + alpha) * lm1) / k;
    lm1 = l;
    l = next;
  }
  return l;
}

ComplexField sample_lg(const Grid& grid, const LGSpec& spec) {
  if (spec.p < 0) throw std::invalid_argument("sample_lg: p must be >= 0");
  if (spec.waist <= 0.0) throw std::invalid_argument("sample_lg: waist must be positive");
  if (spec.waist / grid.pitch < 8.0)
    throw std::invalid_argument("sample_lg: waist under-resolved (< 8 samples)");

  const int n = grid.n;
  const int al = std::abs(spec.ell);
  const double w = spec.waist;
  ComplexField field(grid);
  for (int iy = 0; iy < n; ++iy) {
    const double y = grid.coord(iy);
    for (int ix = 0; ix < n; ++ix) {
      const double x = grid.coord(ix);
      const double r2 = x * x + y * y;
      const double rho = 2.0 * r2 / (w * w);
      double amp = std::pow(rho, al / 2.0) * laguerre(spec.p, al, rho) * std::exp(-rho / 2.0);
      const double theta = std::atan2(y, x);
      field.at(ix, iy) = std::polar(amp, spec.ell * theta);
    }
  }

  const double p_total = power(field);
  if (p_total <= 0.0) throw std::invalid_argument("sample_lg: degenerate mode");
  const double scale = 1.0 / std::sqrt(p_total);
  for (cdouble& a : field.samples) a *= scale;

  // Clipping check: peak vs maximum boundary intensity.
  double peak = 0.0, edge = 0.0;
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const double v = std::norm(field.at(ix, iy));
      peak = std::max(peak, v);
      if (ix == 0 || ix == n - 1 || iy == 0 || iy == n - 1)
        edge = std::max(edge, v);
    }
  if (edge >= 1e-6 * peak)
    throw std::invalid_argument("sample_lg: mode clipped by the grid aperture");
  return field;
}

ComplexField sample_vector(const Grid& grid, const ModeVector& v) {
  if (v.coeffs.size() != v.basis.modes.size())
    throw std::invalid_argument("sample_vector: coefficient count mismatch");
  double norm2 = 0.0;
  for (const cdouble& c : v.coeffs) norm2 += std::norm(c);
  if (std::abs(norm2 - 1.0) > 1e-10)
    throw std::invalid_argument("sample_vector: coefficients not unit norm");
  ComplexField out(grid);
  for (size_t k = 0; k < v.coeffs.size(); ++k) {
    if (v.coeffs[k] == cdouble(0.0)) continue;
    ComplexField mode = sample_lg(grid, v.basis.modes[k]);
    for (size_t i = 0; i < out.samples.size(); ++i)
      out.samples[i] += v.coeffs[k] * mode.samples[i];
  }
  return out;
}

BasisSpec oam_basis(int d, double waist) {
  if (d < 2) throw std::invalid_argument("oam_basis: d must be >= 2");
  BasisSpec b;
  if (d % 2 == 1) {
    for (int l = -(d - 1) / 2; l <= (d - 1) / 2; ++l)
      b.modes.push_back({l, 0, waist});
  } else {
    for (int l = -d / 2; l <= d / 2; ++l)
      if (l != 0) b.modes.push_back({l, 0, waist});
  }
  return b;
}

BasisSpec radial_basis(int d, double waist) {
  if (d < 2) throw std::invalid_argument("radial_basis: d must be >= 2");
  BasisSpec b;
  for (int p = 0; p < d; ++p) b.modes.push_back({0, p, waist});
  return b;
}

BasisSpec fullfield_basis(const std::vector<int>& ells,
                          const std::vector<int>& ps, double waist) {
  if (ells.empty() || ps.empty())
    throw std::invalid_argument("fullfield_basis: empty index list");
  BasisSpec b;
  std::vector<int> se = ells, sp = ps;
  std::sort(se.begin(), se.end());
  std::sort(sp.begin(), sp.end());
  for (int p : sp)
    for (int l : se) b.modes.push_back({l, p, waist});
  return b;
}

}  // namespace msort
