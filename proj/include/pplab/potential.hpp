#pragma once

#include <array>
#include <string>

#include "pplab/grid.hpp"

namespace pplab {

// Lambda(t) in one of three closed-form families: c, c t^nu (nu >= 0), c e^{-t}.
struct TimeFactor {
  enum class Kind { constant, power, exp_decay };

  Kind kind = Kind::constant;
  double c = 0.0;
  double nu = 0.0;

  static TimeFactor constant(double c) { return {Kind::constant, c, 0.0}; }
  static TimeFactor power(double c, double nu) { return {Kind::power, c, nu}; }
  static TimeFactor exp_decay(double c) { return {Kind::exp_decay, c, 0.0}; }

  double operator()(double t) const;
  // Lambda_*(t) = int_0^t Lambda
  double integral(double t) const;
  // ||Lambda||_{L^inf(0, tau)}
  double sup_abs(double tau) const;
  // lim_{t -> inf} Lambda_*(t), possibly infinite
  double integral_limit() const;
  bool time_independent() const;
  void validate() const;
};

std::string to_string(TimeFactor::Kind k);
TimeFactor::Kind time_factor_kind(const std::string& s);

enum class PotentialMode { exact_power, lower_bounded, bounded_abs };

std::string to_string(PotentialMode m);
PotentialMode potential_mode(const std::string& s);

// Realized forms of a(x,t):
//   exact_power   a = Lambda(t) |x|^sigma
//   lower_bounded a = Lambda(t) |x|^sigma on |x| >= R0, 0 inside
//   bounded_abs   a = sign Lambda(t) |x|^sigma
struct PotentialSpec {
  double sigma = 0.0;
  TimeFactor lambda = TimeFactor::constant(0.0);
  double R0 = 0.0;
  PotentialMode mode = PotentialMode::exact_power;
  double sign = 1.0;

  double a(double r, double t) const;
  double V(double r, double t) const { return a(r, t) + 1.0; }
  // V on the grid at time t.
  Eigen::ArrayXd V_values(const GridDomain& d, double t) const;
  bool time_independent() const { return lambda.time_independent(); }
  // The mode declares a class of potentials; the realized a is one member of it.
  // Lower growth hypothesis: a >= Lambda |x|^sigma outside R0 with Lambda >= 0.
  bool lower_hypothesis() const;
  // Upper growth hypothesis: |a| <= Lambda |x|^sigma.
  bool upper_hypothesis() const;
  void validate() const;
};

// Affine drift b_k(x,t) = Lambda_b(t) (c_k + g_k x_k), so div b = Lambda_b(t) sum_k g_k.
struct ConvectionSpec {
  TimeFactor lambda_b = TimeFactor::constant(1.0);
  std::array<double, 3> c{0.0, 0.0, 0.0};
  std::array<double, 3> g{0.0, 0.0, 0.0};

  double b(int k, const std::array<double, 3>& x, double t) const;
  double div_b(double t) const;
  Eigen::ArrayXd b_values(const GridDomain& d, int k, double t) const;
  // W = 1 + a - div b on the grid.
  Eigen::ArrayXd W_values(const PotentialSpec& p, const GridDomain& d, double t) const;
  bool vanishes() const;
};

// max{|a|, |b|, |div b|} <= Lambda(t)|x|^sigma on the grid at the sampled times.
bool convection_hypothesis_holds(const PotentialSpec& p, const ConvectionSpec& cs, const GridDomain& d,
                                 double t_max);

}  // namespace pplab
