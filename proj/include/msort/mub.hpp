#pragma once

#include <vector>

#include "msort/optics.hpp"

namespace msort {

/// Small dense complex matrix; basis vectors are columns.
struct Cmatrix {
  int d = 0;
  std::vector<cdouble> a;  ///< row-major, d x d

  Cmatrix() = default;
  explicit Cmatrix(int d_) : d(d_), a(static_cast<size_t>(d_) * d_) {}
  cdouble& at(int r, int c) { return a[static_cast<size_t>(r) * d + c]; }
  const cdouble& at(int r, int c) const { return a[static_cast<size_t>(r) * d + c]; }
};

/// A complete family of d+1 mutually unbiased bases for prime d.
/// Index 0 is the computational basis.
struct MubFamily {
  int d = 0;
  std::vector<Cmatrix> bases;
};

bool is_prime(int d);

/// d = 2: eigenbases of the three Pauli operators. Odd prime d: the
/// Wootters-Fields construction, basis k vector j with components
/// w^(k l^2 + j l) / sqrt(d), w = exp(2 pi i / d). Throws for non-prime d.
MubFamily mub_family(int d);

/// max_{i,j} | |<a_i|b_j>|^2 - 1/d |
double unbiasedness_deviation(const Cmatrix& a, const Cmatrix& b);

/// max deviation of a^H a from the identity.
double unitarity_deviation(const Cmatrix& a);

}  // namespace msort
