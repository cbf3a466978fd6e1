#include "pplab/kernel.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "pplab/errors.hpp"
#include "pplab/special.hpp"

namespace pplab {

BesselKernel::BesselKernel(int n) : n_(n) {
  if (n < 1 || n > 3) throw domain_error("BesselKernel: dimension must be 1, 2 or 3");
  norm_ = std::pow(2.0 * std::numbers::pi, -0.5 * n);
}

double BesselKernel::operator()(double r) const {
  if (r < 0.0) throw domain_error("BesselKernel: negative radius");
  if (r == 0.0) return n_ == 1 ? 0.5 : std::numeric_limits<double>::infinity();
  return norm_ * std::pow(r, 1.0 - 0.5 * n_) * bessel_k(0.5 * n_ - 1.0, r);
}

double BesselKernel::gradient_magnitude(double r) const {
  if (!(r > 0.0)) throw domain_error("gradient_magnitude: r must be positive");
  return norm_ * std::pow(r, 1.0 - 0.5 * n_) * bessel_k(0.5 * n_, r);
}

double BesselKernel::lower_shape(double r) const {
  if (!(r > 0.0)) throw domain_error("lower_shape: r must be positive");
  if (n_ == 2 && r < 1.0) return 1.0 - std::log(r);
  return std::pow(r, 0.5 * (1.0 - n_));
}

double BesselKernel::upper_shape(double r) const {
  if (!(r > 0.0)) throw domain_error("upper_shape: r must be positive");
  if (r >= 1.0) return std::pow(r, 0.5 * (1.0 - n_));
  switch (n_) {
    case 1:
      return 1.0;
    case 2:
      return 1.0 - std::log(r);
    default:
      return std::pow(r, 2.0 - n_);
  }
}

BoundPair BesselKernel::bounds(double r) const {
  const double e = std::exp(-r);
  return {lower_shape(r) * e, upper_shape(r) * e};
}

double BesselKernel::ball_mass(double R) const {
  if (R <= 0.0) return 0.0;
  // d/dr (r^nu K_nu) = -r^nu K_{nu-1};  r^nu K_nu -> 2^{nu-1} Gamma(nu) at 0.
  const double nu = 0.5 * n_;
  const double at0 = std::pow(2.0, nu - 1.0) * std::tgamma(nu);
  return sphere_area(n_) * norm_ * (at0 - std::pow(R, nu) * bessel_k(nu, R));
}

double BesselKernel::cell_integral(double h) const {
  if (!(h > 0.0)) throw domain_error("cell_integral: h must be positive");
  const double a = 0.5 * h;
  if (n_ == 1) return ball_mass(a);
  // Split the cube into 2n pyramids over its faces; each face is parametrized by u in [-1,1]^{n-1}.
  using Gauss = boost::math::quadrature::gauss<double, 40>;
  const double omega = sphere_area(n_);
  auto face = [&](double q2) {
    const double s = std::sqrt(1.0 + q2);
    return std::pow(1.0 + q2, -0.5 * n_) * ball_mass(a * s) / omega;
  };
  double integral;
  if (n_ == 2) {
    integral = Gauss::integrate([&](double u) { return face(u * u); }, 0.0, 1.0);
  } else {
    integral = Gauss::integrate(
        [&](double u) {
          return Gauss::integrate([&](double v) { return face(u * u + v * v); }, 0.0, 1.0);
        },
        0.0, 1.0);
  }
  return n_ * std::pow(2.0, n_) * integral;
}

double CompositeKernel::operator()(double r) const {
  const double b = base_(r);
  return include_gradient_ ? b + base_.gradient_magnitude(r) : b;
}

}  // namespace pplab
