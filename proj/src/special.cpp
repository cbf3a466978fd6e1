#include "pplab/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "pplab/errors.hpp"

namespace pplab {

namespace {

constexpr double kEulerGamma = 0.57721566490153286061;
constexpr double kCrossover = 2.0;

// Power series about the origin (Abramowitz-Stegun 9.6.13 and 9.6.11).
void small_k01(double x, double& k0, double& k1) {
  const double q = 0.25 * x * x;
  const double lg = std::log(0.5 * x);
  double i0 = 0.0, i1 = 0.0, s0 = 0.0, s1 = 0.0;
  double t0 = 1.0;  // q^k / (k!)^2
  double t1 = 1.0;  // q^k / (k! (k+1)!)
  double harm = 0.0;
  double psi_sum = 1.0 - 2.0 * kEulerGamma;  // psi(1) + psi(2)
  for (int k = 0; k < 60; ++k) {
    i0 += t0;
    i1 += t1;
    s0 += harm * t0;
    s1 += psi_sum * t1;
    if (t0 < 1e-18 * i0 && k > 2) break;
    const double kp1 = k + 1.0;
    t0 *= q / (kp1 * kp1);
    t1 *= q / (kp1 * (kp1 + 1.0));
    harm += 1.0 / kp1;
    psi_sum += 1.0 / kp1 + 1.0 / (kp1 + 1.0);
  }
  i1 *= 0.5 * x;
  k0 = -(lg + kEulerGamma) * i0 + s0;
  k1 = 1.0 / x + lg * i1 - 0.25 * x * s1;
}

// Steed's continued fraction CF2 (Temme's normalization), order mu = 0.
void large_k01(double x, double& k0, double& k1) {
  constexpr double eps = 1e-17;
  const double a1 = 0.25;
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d, delh = d;
  double q1 = 0.0, q2 = 1.0;
  double q = a1, c = a1, a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 2; i < 100000; ++i) {
    a -= 2.0 * (i - 1);
    c = -a * c / i;
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < eps) break;
  }
  h *= a1;
  k0 = std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x) / s;
  k1 = k0 * (x + 0.5 - h) / x;
}

void k01(double x, double& k0, double& k1) {
  if (x < kCrossover)
    small_k01(x, k0, k1);
  else
    large_k01(x, k0, k1);
}

}  // namespace

double bessel_k0(double r) {
  if (!(r > 0.0)) throw domain_error("bessel_k0: r must be positive");
  double k0, k1;
  k01(r, k0, k1);
  return k0;
}

double bessel_k1(double r) {
  if (!(r > 0.0)) throw domain_error("bessel_k1: r must be positive");
  double k0, k1;
  k01(r, k0, k1);
  return k1;
}

double bessel_k(double nu, double r) {
  const double twice = 2.0 * nu;
  const long m = std::lround(twice);
  if (std::abs(twice - m) > 1e-12 || m < -1 || m > 3)
    throw unsupported_order_error("bessel_k: unsupported order " + std::to_string(nu));
  if (!(r > 0.0)) throw domain_error("bessel_k: r must be positive");
  const double half = std::sqrt(std::numbers::pi / (2.0 * r)) * std::exp(-r);
  switch (m) {
    case -1:
    case 1:
      return half;
    case 3:
      return half * (1.0 + 1.0 / r);
    case 0:
      return bessel_k0(r);
    default:
      return bessel_k1(r);
  }
}

double zeta(double s) {
  if (!(s > 1.0)) throw domain_error("zeta: s must exceed 1");
  constexpr long N = 1000000;
  // Reverse order so the small terms accumulate first.
  double sum = 0.0;
  for (long k = N; k >= 1; --k) sum += std::pow(static_cast<double>(k), -s);
  const double n = static_cast<double>(N);
  const double tail =
      std::pow(n, 1.0 - s) / (s - 1.0) - 0.5 * std::pow(n, -s) + s * std::pow(n, -s - 1.0) / 12.0;
  return sum + tail;
}

double sphere_area(int n) {
  switch (n) {
    case 1:
      return 2.0;
    case 2:
      return 2.0 * std::numbers::pi;
    case 3:
      return 4.0 * std::numbers::pi;
    default:
      throw domain_error("sphere_area: dimension must be 1, 2 or 3");
  }
}

}  // namespace pplab
