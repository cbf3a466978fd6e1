#pragma once

#include <Eigen/Core>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "pplab/errors.hpp"

namespace pplab {

// Cell-centered grid on [-L, L]^n with M points per dimension, row-major (first axis slowest).
struct GridDomain {
  int n = 1;
  double L = 1.0;
  int M = 2;

  static constexpr std::size_t default_point_cap = std::size_t{1} << 24;

  GridDomain() = default;
  GridDomain(int n_, double L_, int M_, std::size_t cap = default_point_cap);

  double h() const { return 2.0 * L / M; }
  std::size_t size() const;
  double coord(int i) const { return -L + (i + 0.5) * h(); }
  std::array<int, 3> multi_index(std::size_t flat) const;
  std::array<double, 3> point(std::size_t flat) const;
  double radius(std::size_t flat) const;
  // Every coordinate inside [-L/2, L/2].
  bool interior(std::size_t flat) const;
  double cell_volume() const { return std::pow(h(), n); }

  bool operator==(const GridDomain& o) const { return n == o.n && L == o.L && M == o.M; }
};

enum class Gauge { u, mu };
enum class FieldState { finite, diverged, invalid };

template <typename Scalar>
struct BasicField {
  using Values = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  GridDomain domain;
  Values values;
  double t = 0.0;
  Gauge gauge = Gauge::u;
  FieldState state = FieldState::finite;

  BasicField() = default;
  BasicField(const GridDomain& d, Values v, double time = 0.0, Gauge g = Gauge::u)
      : domain(d), values(std::move(v)), t(time), gauge(g) {
    if (static_cast<std::size_t>(values.size()) != domain.size())
      throw precondition_error("field size does not match its domain");
    refresh_state();
  }

  static BasicField zeros(const GridDomain& d, double time = 0.0, Gauge g = Gauge::u) {
    return BasicField(d, Values::Zero(static_cast<Eigen::Index>(d.size())), time, g);
  }
  static BasicField constant(const GridDomain& d, Scalar c, double time = 0.0, Gauge g = Gauge::u) {
    return BasicField(d, Values::Constant(static_cast<Eigen::Index>(d.size()), c), time, g);
  }

  bool finite() const { return state == FieldState::finite; }

  void refresh_state() {
    if (state == FieldState::invalid) return;
    state = values.isFinite().all() ? FieldState::finite : FieldState::diverged;
  }
};

using Field = BasicField<double>;

template <typename Scalar>
BasicField<Scalar> to_mu(const BasicField<Scalar>& f) {
  if (f.gauge == Gauge::mu) return f;
  BasicField<Scalar> out = f;
  out.values = f.values * Scalar(std::exp(f.t));
  out.gauge = Gauge::mu;
  return out;
}

template <typename Scalar>
BasicField<Scalar> to_u(const BasicField<Scalar>& f) {
  if (f.gauge == Gauge::u) return f;
  BasicField<Scalar> out = f;
  out.values = f.values * Scalar(std::exp(-f.t));
  out.gauge = Gauge::u;
  return out;
}

// Weight e^{-rho |x|}; rho in [0, 1).
struct WeightedNorm {
  double rho = 0.0;
  explicit WeightedNorm(double r);
};

// Midpoint rule for the e^{-rho|x|}-weighted L1 norm; +infinity for diverged fields.
double weighted_l1_norm(const Field& f, const WeightedNorm& w);
double weighted_l1_norm(const GridDomain& d, const Eigen::ArrayXd& values, double rho);

// Phi_rho f = e^{-rho |.|} * f with zero extension outside the box.
Field phi_rho_convolve(const Field& f, const WeightedNorm& w);

// u0(x) = C0 exp(delta |x|^alpha) |x|^d_pow
struct InitialSpec {
  double C0 = 1.0;
  double delta = 0.0;
  double alpha = 0.0;
  double d_pow = 0.0;

  double operator()(double r) const;
  void validate() const;
};

Field sample_initial(const InitialSpec& spec, const GridDomain& d);

struct MembershipReport {
  double norm_L = 0.0;
  double norm_2L = 0.0;
  double growth = 0.0;
  bool member = true;
};

// Compares the weighted norm of the sampled datum on [-L,L]^n and [-2L,2L]^n at fixed spacing;
// growth beyond 1.5 is reported as "not in E_rho at this resolution".
MembershipReport check_membership(const InitialSpec& spec, const GridDomain& d, const WeightedNorm& w);

// Same trend test for a field that only exists on its own box: inner half versus full box.
MembershipReport check_membership(const Field& f, const WeightedNorm& w);

// Exact membership of C0 e^{delta|x|^alpha}|x|^d in the union of the spaces E_rho, rho < 1.
bool initial_in_weighted_space(const InitialSpec& spec);

}  // namespace pplab
