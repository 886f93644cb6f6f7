#include "msort/mub.hpp"

#include <cmath>

namespace msort {

bool is_prime(int d) {
  if (d < 2) return false;
  for (int k = 2; k * k <= d; ++k)
    if (d % k == 0) return false;
  return true;
}

MubFamily mub_family(int d) {
  if (!is_prime(d)) throw std::invalid_argument("mub_family: d must be prime");
  MubFamily fam;
  fam.d = d;

  Cmatrix comp(d);
  for (int i = 0; i < d; ++i) comp.at(i, i) = 1.0;
  fam.bases.push_back(comp);

  if (d == 2) {
    const double s = 1.0 / std::sqrt(2.0);
    Cmatrix x(2), y(2);
    x.at(0, 0) = s;  x.at(1, 0) = s;
    x.at(0, 1) = s;  x.at(1, 1) = -s;
    y.at(0, 0) = s;  y.at(1, 0) = cdouble(0.0, s);
    y.at(0, 1) = s;  y.at(1, 1) = cdouble(0.0, -s);
    fam.bases.push_back(x);
    fam.bases.push_back(y);
    return fam;
  }

  const double s = 1.0 / std::sqrt(static_cast<double>(d));
  for (int k = 0; k < d; ++k) {
    Cmatrix b(d);
    for (int j = 0; j < d; ++j)
      for (int l = 0; l < d; ++l) {
        const long e = (static_cast<long>(k) * l * l + static_cast<long>(j) * l) % d;
        b.at(l, j) = std::polar(s, kTwoPi * e / d);
      }
    fam.bases.push_back(b);
  }
  return fam;
}

double unbiasedness_deviation(const Cmatrix& a, const Cmatrix& b) {
  if (a.d != b.d)
    throw std::invalid_argument("unbiasedness_deviation: dimension mismatch");
  const int d = a.d;
  const double target = 1.0 / d;
  double dev = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      cdouble ip = 0.0;
      for (int l = 0; l < d; ++l) ip += std::conj(a.at(l, i)) * b.at(l, j);
      dev = std::max(dev, std::abs(std::norm(ip) - target));
    }
  return dev;
}

double unitarity_deviation(const Cmatrix& a) {
  const int d = a.d;
  double dev = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      cdouble ip = 0.0;
      for (int l = 0; l < d; ++l) ip += std::conj(a.at(l, i)) * a.at(l, j);
      dev = std::max(dev, std::abs(ip - (i == j ? cdouble(1.0) : cdouble(0.0))));
    }
  return dev;
}

}  // namespace msort
