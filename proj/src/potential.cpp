#include "pplab/potential.hpp"

#include <cmath>
#include <limits>

#include "pplab/errors.hpp"

namespace pplab {

double TimeFactor::operator()(double t) const {
  switch (kind) {
    case Kind::constant:
      return c;
    case Kind::power:
      return nu == 0.0 ? c : c * std::pow(t, nu);
    case Kind::exp_decay:
      return c * std::exp(-t);
  }
  return 0.0;
}

double TimeFactor::integral(double t) const {
  switch (kind) {
    case Kind::constant:
      return c * t;
    case Kind::power:
      return c * std::pow(t, nu + 1.0) / (nu + 1.0);
    case Kind::exp_decay:
      return c * -std::expm1(-t);
  }
  return 0.0;
}

double TimeFactor::sup_abs(double tau) const {
  switch (kind) {
    case Kind::constant:
      return std::abs(c);
    case Kind::power:
      return nu == 0.0 ? std::abs(c) : std::abs(c) * std::pow(tau, nu);
    case Kind::exp_decay:
      return std::abs(c);
  }
  return 0.0;
}

double TimeFactor::integral_limit() const {
  if (c == 0.0) return 0.0;
  if (kind == Kind::exp_decay) return c;
  return c > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
}

bool TimeFactor::time_independent() const {
  return c == 0.0 || kind == Kind::constant || (kind == Kind::power && nu == 0.0);
}

void TimeFactor::validate() const {
  if (!std::isfinite(c)) throw precondition_error("time factor: c must be finite");
  if (kind == Kind::power && !(nu >= 0.0)) throw precondition_error("time factor: power nu must be >= 0");
}

std::string to_string(TimeFactor::Kind k) {
  switch (k) {
    case TimeFactor::Kind::constant:
      return "constant";
    case TimeFactor::Kind::power:
      return "power";
    case TimeFactor::Kind::exp_decay:
      return "exp_decay";
  }
  return "?";
}

TimeFactor::Kind time_factor_kind(const std::string& s) {
  if (s == "constant") return TimeFactor::Kind::constant;
  if (s == "power") return TimeFactor::Kind::power;
  if (s == "exp_decay") return TimeFactor::Kind::exp_decay;
  throw precondition_error("unknown time factor kind '" + s + "'");
}

std::string to_string(PotentialMode m) {
  switch (m) {
    case PotentialMode::exact_power:
      return "exact_power";
    case PotentialMode::lower_bounded:
      return "lower_bounded";
    case PotentialMode::bounded_abs:
      return "bounded_abs";
  }
  return "?";
}

PotentialMode potential_mode(const std::string& s) {
  if (s == "exact_power") return PotentialMode::exact_power;
  if (s == "lower_bounded") return PotentialMode::lower_bounded;
  if (s == "bounded_abs") return PotentialMode::bounded_abs;
  throw precondition_error("unknown potential mode '" + s + "'");
}

double PotentialSpec::a(double r, double t) const {
  const double lam = lambda(t);
  if (lam == 0.0) return 0.0;
  if (mode == PotentialMode::lower_bounded && r < R0) return 0.0;
  const double base = sigma == 0.0 ? lam : lam * std::pow(r, sigma);
  return mode == PotentialMode::bounded_abs ? sign * base : base;
}

Eigen::ArrayXd PotentialSpec::V_values(const GridDomain& d, double t) const {
  Eigen::ArrayXd v(static_cast<Eigen::Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) v[static_cast<Eigen::Index>(i)] = V(d.radius(i), t);
  return v;
}

bool PotentialSpec::lower_hypothesis() const {
  return lambda.c >= 0.0 && mode != PotentialMode::bounded_abs;
}

bool PotentialSpec::upper_hypothesis() const { return mode != PotentialMode::lower_bounded; }

void PotentialSpec::validate() const {
  lambda.validate();
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw precondition_error("potential: sigma must be >= 0");
  if (!(R0 >= 0.0)) throw precondition_error("potential: R0 must be >= 0");
  if (mode == PotentialMode::bounded_abs && std::abs(sign) > 1.0)
    throw precondition_error("potential: bounded_abs sign must lie in [-1, 1]");
  if (mode != PotentialMode::bounded_abs && lambda.c < 0.0)
    throw precondition_error("potential: " + to_string(mode) + " mode needs a nonnegative Lambda");
}

double ConvectionSpec::b(int k, const std::array<double, 3>& x, double t) const {
  return lambda_b(t) * (c[k] + g[k] * x[k]);
}

double ConvectionSpec::div_b(double t) const { return lambda_b(t) * (g[0] + g[1] + g[2]); }

Eigen::ArrayXd ConvectionSpec::b_values(const GridDomain& d, int k, double t) const {
  Eigen::ArrayXd v(static_cast<Eigen::Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) v[static_cast<Eigen::Index>(i)] = b(k, d.point(i), t);
  return v;
}

Eigen::ArrayXd ConvectionSpec::W_values(const PotentialSpec& p, const GridDomain& d, double t) const {
  double div = 0.0;
  for (int k = 0; k < d.n; ++k) div += g[k];
  div *= lambda_b(t);
  return p.V_values(d, t) - div;
}

bool ConvectionSpec::vanishes() const {
  if (lambda_b.c == 0.0) return true;
  for (int k = 0; k < 3; ++k)
    if (c[k] != 0.0 || g[k] != 0.0) return false;
  return true;
}

bool convection_hypothesis_holds(const PotentialSpec& p, const ConvectionSpec& cs, const GridDomain& d,
                                 double t_max) {
  for (int s = 0; s <= 8; ++s) {
    const double t = t_max * s / 8.0;
    const double lam = p.lambda.sup_abs(t);
    double div = 0.0;
    for (int k = 0; k < d.n; ++k) div += cs.g[k];
    div = std::abs(div * cs.lambda_b(t));
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double r = d.radius(i);
      const double bound = lam * (p.sigma == 0.0 ? 1.0 : std::pow(r, p.sigma));
      const auto x = d.point(i);
      double b2 = 0.0;
      for (int k = 0; k < d.n; ++k) b2 += cs.b(k, x, t) * cs.b(k, x, t);
      if (std::abs(p.a(r, t)) > bound * (1 + 1e-12) || std::sqrt(b2) > bound || div > bound) return false;
    }
  }
  return true;
}

}  // namespace pplab
