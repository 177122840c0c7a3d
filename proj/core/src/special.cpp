#include "ppm/special.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace ppm::special {

namespace {

double series(double x) {
  // Si(x) = sum_k (-1)^k x^(2k+1) / ((2k+1) (2k+1)!)
  const double x2 = x * x;
  double term = x;  // x^(2k+1)/(2k+1)!
  double sum = x;
  for (int k = 1; k < 60; ++k) {
    term *= -x2 / ((2.0 * k) * (2.0 * k + 1.0));
    const double add = term / (2.0 * k + 1.0);
    sum += add;
    if (std::abs(add) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

// pi/2 - Si(x) = -Im[exp(-ix) * h], with h the continued fraction for E1(ix)
// evaluated by the modified Lentz method.
double continued_fraction_complement(double x) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  std::complex<double> b(1.0, x);
  std::complex<double> c = 1.0 / kTiny;
  std::complex<double> d = 1.0 / b;
  std::complex<double> h = d;
  for (int i = 2; i < 100000; ++i) {
    const double a = -static_cast<double>((i - 1) * (i - 1));
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const std::complex<double> del = c * d;
    h *= del;
    if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < kEps) {
      h *= std::complex<double>(std::cos(x), -std::sin(x));
      return -h.imag();
    }
  }
  throw std::runtime_error("sine integral continued fraction did not converge");
}

constexpr double kSwitch = 2.0;

}  // namespace

double sine_integral(double x) {
  if (x < 0.0) return -sine_integral(-x);
  if (x <= kSwitch) return series(x);
  return std::numbers::pi / 2.0 - continued_fraction_complement(x);
}

double sine_integral_complement(double x) {
  if (x < 0.0) return std::numbers::pi - sine_integral_complement(-x);
  if (x <= kSwitch) return std::numbers::pi / 2.0 - series(x);
  return continued_fraction_complement(x);
}

}  // namespace ppm::special
