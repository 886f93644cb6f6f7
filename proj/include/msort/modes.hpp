#pragma once

#include <vector>

#include "msort/optics.hpp"

namespace msort {

/// Laguerre-Gauss mode indices at the waist plane.
struct LGSpec {
  int ell = 0;          ///< azimuthal index (OAM quanta)
  int p = 0;            ///< radial index, >= 0
  double waist = 250e-6;  ///< w0 [m]
};

/// Ordered computational basis of d LG modes sharing one waist.
struct BasisSpec {
  std::vector<LGSpec> modes;
  int d() const { return static_cast<int>(modes.size()); }
};

/// Unit-norm superposition over a BasisSpec.
struct ModeVector {
  BasisSpec basis;
  std::vector<cdouble> coeffs;
};

/// Samples LG_{ell,p} at its waist plane, normalized to unit grid power.
/// Throws if the waist is under-resolved (< 8 samples) or the mode is
/// clipped (edge intensity >= 1e-6 of peak).
ComplexField sample_lg(const Grid& grid, const LGSpec& spec);

/// Coherent sum of basis modes with the given coefficients.
ComplexField sample_vector(const Grid& grid, const ModeVector& v);

/// ell sorted ascending: d odd -> -(d-1)/2 .. +(d-1)/2, d even skips 0.
BasisSpec oam_basis(int d, double waist);

/// p = 0 .. d-1 at ell = 0.
BasisSpec radial_basis(int d, double waist);

/// (p, ell) lexicographic over the given index lists; d = |ps| * |ells|.
BasisSpec fullfield_basis(const std::vector<int>& ells,
                          const std::vector<int>& ps, double waist);

/// Generalized Laguerre polynomial L_p^alpha(x).
double laguerre(int p, int alpha, double x);

}  // namespace msort
