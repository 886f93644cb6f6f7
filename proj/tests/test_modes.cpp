#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "msort/modes.hpp"
#include "msort/mub.hpp"

using namespace msort;

namespace {
const Grid kDefault(256, 20e-6, 780e-9);
}

TEST_CASE("sample_lg: fundamental mode is a centered gaussian") {
  const ComplexField f = sample_lg(kDefault, {0, 0, 250e-6});
  const int c = kDefault.n / 2;
  double peak = 0.0;
  int px = 0, py = 0;
  for (int iy = 0; iy < kDefault.n; ++iy)
    for (int ix = 0; ix < kDefault.n; ++ix)
      if (std::norm(f.at(ix, iy)) > peak) {
        peak = std::norm(f.at(ix, iy));
        px = ix;
        py = iy;
      }
  CHECK(px == c);
  CHECK(py == c);
  // No phase variation.
  for (size_t i = 0; i < f.samples.size(); i += 101)
    if (std::abs(f.samples[i]) > 1e-9) CHECK(std::abs(std::arg(f.samples[i])) < 1e-12);
}

TEST_CASE("sample_lg: ell=1 vortex has dark core and 2pi winding") {
  const ComplexField f = sample_lg(kDefault, {1, 0, 250e-6});
  const int c = kDefault.n / 2;
  double peak = 0.0;
  for (const cdouble& a : f.samples) peak = std::max(peak, std::norm(a));
  CHECK(std::norm(f.at(c, c)) < 1e-9 * peak);

  const int r = 12;
  double winding = 0.0;
  double prev = std::arg(f.at(c + r, c));
  for (int k = 1; k <= 32; ++k) {
    const double th = kTwoPi * k / 32;
    const int ix = c + static_cast<int>(std::lround(r * std::cos(th)));
    const int iy = c + static_cast<int>(std::lround(r * std::sin(th)));
    double diff = std::arg(f.at(ix, iy)) - prev;
    while (diff > M_PI) diff -= kTwoPi;
    while (diff < -M_PI) diff += kTwoPi;
    winding += diff;
    prev = std::arg(f.at(ix, iy));
  }
  CHECK(winding == doctest::Approx(kTwoPi).epsilon(0.01));
}

TEST_CASE("sample_lg: p=1 has one radial node with a sign flip") {
  const double w0 = 250e-6;
  const ComplexField f = sample_lg(kDefault, {0, 1, w0});
  const int c = kDefault.n / 2;
  // L_1^0(2r^2/w^2) = 1 - 2r^2/w^2 changes sign at r = w/sqrt(2).
  const int node = static_cast<int>(w0 / std::sqrt(2.0) / kDefault.pitch);
  const double inside = f.at(c + node - 4, c).real();
  const double outside = f.at(c + node + 4, c).real();
  CHECK(inside * outside < 0.0);
  // Exactly one amplitude sign change along the +x radius.
  int sign_changes = 0;
  for (int i = 1; i < 60; ++i) {
    const double a = f.at(c + i - 1, c).real();
    const double b = f.at(c + i, c).real();
    if (a * b < 0.0) ++sign_changes;
  }
  CHECK(sign_changes == 1);
}

TEST_CASE("sample_lg: intensity invariant under sign of ell, phases conjugate") {
  const ComplexField plus = sample_lg(kDefault, {2, 1, 250e-6});
  const ComplexField minus = sample_lg(kDefault, {-2, 1, 250e-6});
  double max_idiff = 0.0, max_conj = 0.0;
  for (size_t i = 0; i < plus.samples.size(); ++i) {
    max_idiff = std::max(max_idiff, std::abs(std::norm(plus.samples[i]) - std::norm(minus.samples[i])));
    max_conj = std::max(max_conj, std::abs(plus.samples[i] - std::conj(minus.samples[i])));
  }
  CHECK(max_idiff < 1e-12);
  CHECK(max_conj < 1e-12);
}

TEST_CASE("sample_lg: rejects under-resolved and clipped modes") {
  CHECK_THROWS_AS(sample_lg(kDefault, {0, 0, 100e-6}), std::invalid_argument);
  CHECK_THROWS_AS(sample_lg(kDefault, {0, 0, 3e-3}), std::invalid_argument);  // clipped
  CHECK_THROWS_AS(sample_lg(kDefault, {0, -1, 250e-6}), std::invalid_argument);
}

TEST_CASE("basis gram matrix is the identity on the default grid") {
  BasisSpec basis;
  for (int l = -2; l <= 2; ++l)
    for (int p = 0; p <= 4; ++p) basis.modes.push_back({l, p, 250e-6});
  std::vector<ComplexField> fields;
  for (const LGSpec& m : basis.modes) fields.push_back(sample_lg(kDefault, m));
  for (size_t i = 0; i < fields.size(); ++i)
    for (size_t j = i; j < fields.size(); ++j) {
      const double expected = i == j ? 1.0 : 0.0;
      CHECK(std::abs(overlap(fields[i], fields[j]) - expected) < 1e-3);
    }
}

TEST_CASE("sample_vector: basis vector, superposition lobes, unit power") {
  BasisSpec basis;
  basis.modes = {{-1, 0, 250e-6}, {1, 0, 250e-6}};

  ModeVector pure{basis, {1.0, 0.0}};
  const ComplexField a = sample_vector(kDefault, pure);
  const ComplexField ref = sample_lg(kDefault, {-1, 0, 250e-6});
  double max_diff = 0.0;
  for (size_t i = 0; i < a.samples.size(); ++i)
    max_diff = std::max(max_diff, std::abs(a.samples[i] - ref.samples[i]));
  CHECK(max_diff < 1e-12);

  const double s = 1.0 / std::sqrt(2.0);
  ModeVector super{basis, {s, s}};
  const ComplexField two = sample_vector(kDefault, super);
  CHECK(power(two) == doctest::Approx(1.0).epsilon(1e-4));
  // cos(theta) interference: zeros on the +-y axis, lobes on the x axis.
  const int c = kDefault.n / 2;
  const int r = 12;
  CHECK(std::norm(two.at(c, c + r)) < 1e-6 * std::norm(two.at(c + r, c)));
  CHECK(std::norm(two.at(c, c - r)) < 1e-6 * std::norm(two.at(c + r, c)));

  ModeVector bad{basis, {1.0, 1.0}};
  CHECK_THROWS_AS(sample_vector(kDefault, bad), std::invalid_argument);
}

TEST_CASE("basis builders") {
  const BasisSpec oam3 = oam_basis(3, 250e-6);
  CHECK(oam3.modes[0].ell == -1);
  CHECK(oam3.modes[1].ell == 0);
  CHECK(oam3.modes[2].ell == 1);
  const BasisSpec oam2 = oam_basis(2, 250e-6);
  CHECK(oam2.modes[0].ell == -1);
  CHECK(oam2.modes[1].ell == 1);
  const BasisSpec rad5 = radial_basis(5, 250e-6);
  for (int p = 0; p < 5; ++p) {
    CHECK(rad5.modes[p].p == p);
    CHECK(rad5.modes[p].ell == 0);
  }
  const BasisSpec ff = fullfield_basis({-1, 0, 1}, {0, 1}, 250e-6);
  CHECK(ff.d() == 6);
  CHECK(ff.modes[0].p == 0);
  CHECK(ff.modes[0].ell == -1);
  CHECK(ff.modes[3].p == 1);
  CHECK(ff.modes[3].ell == -1);
}

TEST_CASE("mub_family: counts and defining property") {
  CHECK_THROWS_AS(mub_family(4), std::invalid_argument);
  CHECK_THROWS_AS(mub_family(1), std::invalid_argument);

  for (int d : {2, 3, 5, 7}) {
    const MubFamily fam = mub_family(d);
    CHECK(static_cast<int>(fam.bases.size()) == d + 1);
    for (const Cmatrix& b : fam.bases) CHECK(unitarity_deviation(b) < 1e-12);
    for (size_t i = 0; i < fam.bases.size(); ++i)
      for (size_t j = i + 1; j < fam.bases.size(); ++j)
        CHECK(unbiasedness_deviation(fam.bases[i], fam.bases[j]) <= 1e-12);
  }
}

TEST_CASE("unbiasedness_deviation: self-comparison and DFT basis") {
  const int d = 5;
  const MubFamily fam = mub_family(d);
  CHECK(unbiasedness_deviation(fam.bases[0], fam.bases[0]) ==
        doctest::Approx(1.0 - 1.0 / d));

  // Computational vs plain DFT basis.
  Cmatrix dft(d);
  const double s = 1.0 / std::sqrt(static_cast<double>(d));
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) dft.at(r, c) = std::polar(s, kTwoPi * r * c / d);
  CHECK(unbiasedness_deviation(fam.bases[0], dft) <= 1e-12);

  Cmatrix small(3);
  CHECK_THROWS_AS(unbiasedness_deviation(fam.bases[0], small), std::invalid_argument);
}
