#include "pplab/operators.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>

#include "pplab/fft.hpp"
#include "pplab/kernel.hpp"

namespace pplab {

namespace {

constexpr double kLatticeRadius = 40.0;

void require_finite(const Field& f, const char* who) {
  if (!f.finite()) throw precondition_error(std::string(who) + ": field is not finite");
}

void guard_cost(const GridDomain& d, bool force, const char* who) {
  if (!force && d.size() > quadrature_point_cap)
    throw cost_guard_error(std::string(who) + ": " + std::to_string(d.size()) +
                           " points exceed the quadrature cap; pass force to override");
}

std::size_t table_index(const GridDomain& d, const std::array<int, 3>& off) {
  const std::size_t side = 2 * static_cast<std::size_t>(d.M) - 1;
  std::size_t idx = 0;
  for (int k = 0; k < d.n; ++k) idx = idx * side + static_cast<std::size_t>(off[k] + d.M - 1);
  return idx;
}

std::size_t table_size(const GridDomain& d) {
  const std::size_t side = 2 * static_cast<std::size_t>(d.M) - 1;
  std::size_t s = 1;
  for (int k = 0; k < d.n; ++k) s *= side;
  return s;
}

template <typename Fn>
void for_each_offset(const GridDomain& d, Fn&& fn) {
  const std::size_t total = table_size(d);
  const int side = 2 * d.M - 1;
  std::array<int, 3> off{0, 0, 0};
  for (std::size_t t = 0; t < total; ++t) {
    std::size_t rest = t;
    for (int k = d.n - 1; k >= 0; --k) {
      off[k] = static_cast<int>(rest % side) - (d.M - 1);
      rest /= side;
    }
    fn(t, off);
  }
}

// Visits lattice points j >= 0 (componentwise) with |j| h <= R; mult counts the sign images.
template <typename Fn>
void for_each_orthant_point(int n, double h, Fn&& fn) {
  const int J = static_cast<int>(kLatticeRadius / h);
  const long J2 = static_cast<long>(J) * J;
  std::array<int, 3> j{0, 0, 0};
  auto visit = [&]() {
    int nz = 0;
    for (int k = 0; k < n; ++k) nz += j[k] != 0;
    fn(j, static_cast<double>(1 << nz));
  };
  if (n == 1) {
    for (j[0] = 0; j[0] <= J; ++j[0]) visit();
  } else if (n == 2) {
    for (j[0] = 0; j[0] <= J; ++j[0]) {
      const int lim = static_cast<int>(std::sqrt(static_cast<double>(J2 - long(j[0]) * j[0])));
      for (j[1] = 0; j[1] <= lim; ++j[1]) visit();
    }
  } else {
    for (j[0] = 0; j[0] <= J; ++j[0]) {
      const long r0 = J2 - long(j[0]) * j[0];
      const int lim1 = static_cast<int>(std::sqrt(static_cast<double>(r0)));
      for (j[1] = 0; j[1] <= lim1; ++j[1]) {
        const int lim2 = static_cast<int>(std::sqrt(static_cast<double>(r0 - long(j[1]) * j[1])));
        for (j[2] = 0; j[2] <= lim2; ++j[2]) visit();
      }
    }
  }
}

using Offsets = std::vector<std::pair<std::array<int, 3>, double>>;

// Symmetric stencil groups for the even kernel: axis +-1, axis +-2, face diagonals.
Offsets even_group(int n, int which) {
  Offsets g;
  for (int a = 0; a < n; ++a) {
    for (int s : {1, -1}) {
      if (which == 1 || which == 2) {
        std::array<int, 3> o{0, 0, 0};
        o[a] = s * which;
        g.push_back({o, 1.0});
      } else {
        for (int b = a + 1; b < n; ++b)
          for (int t : {1, -1}) {
            std::array<int, 3> o{0, 0, 0};
            o[a] = s;
            o[b] = t;
            g.push_back({o, 1.0});
          }
      }
    }
  }
  return g;
}

// Antisymmetric groups along `axis`; the sign follows the axis component.
Offsets odd_group(int n, int axis, int which) {
  Offsets g;
  for (int s : {1, -1}) {
    if (which == 1 || which == 2) {
      std::array<int, 3> o{0, 0, 0};
      o[axis] = s * which;
      g.push_back({o, double(s)});
    } else {
      for (int b = 0; b < n; ++b) {
        if (b == axis) continue;
        for (int t : {1, -1}) {
          std::array<int, 3> o{0, 0, 0};
          o[axis] = s;
          o[b] = t;
          g.push_back({o, double(s)});
        }
      }
    }
  }
  return g;
}

void add_group(StencilWeights& w, const Offsets& g, double delta) {
  for (const auto& [o, s] : g) w.table[static_cast<Eigen::Index>(table_index(w.domain, o))] += s * delta;
}

std::unique_ptr<StencilWeights> build_bessel_weights(const GridDomain& d) {
  const int n = d.n;
  const double h = d.h();
  const double hn = d.cell_volume();
  const BesselKernel B(n);
  const double self = B.cell_integral(h);

  auto w = std::make_unique<StencilWeights>();
  w->domain = d;
  w->table.resize(static_cast<Eigen::Index>(table_size(d)));
  for_each_offset(d, [&](std::size_t t, const std::array<int, 3>& off) {
    double r2 = 0.0;
    for (int k = 0; k < n; ++k) r2 += double(off[k]) * off[k];
    w->table[static_cast<Eigen::Index>(t)] = r2 == 0.0 ? self : B(h * std::sqrt(r2)) * hn;
  });

  // Moments of the uncorrected rule on the infinite lattice.
  double m0 = 0.0, m2 = 0.0, m4 = 0.0, m22 = 0.0;
  for_each_orthant_point(n, h, [&](const std::array<int, 3>& j, double mult) {
    double r2 = 0.0;
    for (int k = 0; k < n; ++k) r2 += double(j[k]) * j[k];
    const double wt = mult * (r2 == 0.0 ? self : B(h * std::sqrt(r2)) * hn);
    const double y0 = j[0] * h, y1 = n > 1 ? j[1] * h : 0.0;
    m0 += wt;
    m2 += wt * r2 * h * h;
    m4 += wt * y0 * y0 * y0 * y0;
    m22 += wt * y0 * y0 * y1 * y1;
  });

  const Offsets center{{{0, 0, 0}, 1.0}};
  const Offsets g1 = even_group(n, 1), g2 = even_group(n, 2), g3 = even_group(n, 3);
  const double h2 = h * h, h4 = h2 * h2;
  const Eigen::ArrayXd base = w->table;

  auto accept = [&]() {
    w->min_weight = w->table.minCoeff();
    return w->min_weight > 0.0;
  };

  if (d.M >= 3) {
    const int rows = n == 1 ? 3 : 4;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, rows);
    Eigen::VectorXd rhs(rows);
    A(0, 0) = 1.0;
    A(0, 1) = 2.0 * n, A(1, 1) = 2.0 * n * h2, A(2, 1) = 2.0 * h4;
    A(0, 2) = 2.0 * n, A(1, 2) = 8.0 * n * h2, A(2, 2) = 32.0 * h4;
    rhs(0) = 1.0 - m0, rhs(1) = 2.0 * n - m2, rhs(2) = 24.0 - m4;
    if (n > 1) {
      A(0, 3) = 2.0 * n * (n - 1), A(1, 3) = 4.0 * n * (n - 1) * h2, A(2, 3) = 4.0 * (n - 1) * h4;
      A(3, 3) = 4.0 * h4;
      rhs(3) = 8.0 - m22;
    }
    const Eigen::VectorXd delta = A.fullPivLu().solve(rhs);
    add_group(*w, center, delta(0));
    add_group(*w, g1, delta(1));
    add_group(*w, g2, delta(2));
    if (n > 1) add_group(*w, g3, delta(3));
    w->order = 4;
    if (accept()) return w;
    w->table = base;
  }
  {
    Eigen::Matrix2d A;
    A << 1.0, 2.0 * n, 0.0, 2.0 * n * h2;
    const Eigen::Vector2d delta = A.fullPivLu().solve(Eigen::Vector2d(1.0 - m0, 2.0 * n - m2));
    add_group(*w, center, delta(0));
    add_group(*w, g1, delta(1));
    w->order = 2;
    if (accept()) return w;
    w->table = base;
  }
  w->order = 0;
  accept();
  return w;
}

std::unique_ptr<StencilWeights> build_gradient_weights(const GridDomain& d, int axis) {
  const int n = d.n;
  const double h = d.h();
  const double hn = d.cell_volume();
  const BesselKernel B(n);

  auto w = std::make_unique<StencilWeights>();
  w->domain = d;
  w->table.resize(static_cast<Eigen::Index>(table_size(d)));
  for_each_offset(d, [&](std::size_t t, const std::array<int, 3>& off) {
    double r2 = 0.0;
    for (int k = 0; k < n; ++k) r2 += double(off[k]) * off[k];
    if (r2 == 0.0) {
      w->table[static_cast<Eigen::Index>(t)] = 0.0;
      return;
    }
    const double r = h * std::sqrt(r2);
    w->table[static_cast<Eigen::Index>(t)] = -B.gradient_magnitude(r) * off[axis] * h / r * hn;
  });

  // Odd moments y_k, y_k^3 and y_k y_l^2 of the uncorrected rule.
  const int other = (axis + 1) % n;
  double m1 = 0.0, m3 = 0.0, m12 = 0.0;
  for_each_orthant_point(n, h, [&](const std::array<int, 3>& j, double mult) {
    double r2 = 0.0;
    for (int k = 0; k < n; ++k) r2 += double(j[k]) * j[k];
    if (r2 == 0.0) return;
    const double r = h * std::sqrt(r2);
    const double f = -mult * B.gradient_magnitude(r) / r * hn;
    const double yk = j[axis] * h, yl = n > 1 ? j[other] * h : 0.0;
    m1 += f * yk * yk;
    m3 += f * yk * yk * yk * yk;
    m12 += f * yk * yk * yl * yl;
  });

  const double h3 = h * h * h;
  const int rows = n == 1 ? 2 : 3;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, rows);
  Eigen::VectorXd rhs(rows);
  A(0, 0) = 2.0 * h, A(1, 0) = 2.0 * h3;
  A(0, 1) = 4.0 * h, A(1, 1) = 16.0 * h3;
  rhs(0) = -1.0 - m1, rhs(1) = -6.0 - m3;
  if (n > 1) {
    A(0, 2) = 4.0 * (n - 1) * h, A(1, 2) = 4.0 * (n - 1) * h3, A(2, 2) = 4.0 * h3;
    rhs(2) = -2.0 - m12;
  }
  if (d.M >= 3) {
    const Eigen::VectorXd delta = A.fullPivLu().solve(rhs);
    add_group(*w, odd_group(n, axis, 1), delta(0));
    add_group(*w, odd_group(n, axis, 2), delta(1));
    if (n > 1) add_group(*w, odd_group(n, axis, 3), delta(2));
    w->order = 3;
  } else {
    add_group(*w, odd_group(n, axis, 1), rhs(0) / A(0, 0));
    w->order = 1;
  }
  w->min_weight = w->table.minCoeff();
  return w;
}

using CacheKey = std::tuple<int, double, int, int>;

const StencilWeights& cached(const GridDomain& d, int slot) {
  static std::mutex mu;
  static std::map<CacheKey, std::unique_ptr<StencilWeights>> cache;
  const CacheKey key{d.n, d.L, d.M, slot};
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it == cache.end()) {
    auto w = slot < 0 ? build_bessel_weights(d) : build_gradient_weights(d, slot);
    it = cache.emplace(key, std::move(w)).first;
  }
  return *it->second;
}

}  // namespace

double StencilWeights::at(const std::array<int, 3>& off) const {
  return table[static_cast<Eigen::Index>(table_index(domain, off))];
}

const StencilWeights& bessel_weights(const GridDomain& d) { return cached(d, -1); }

const StencilWeights& gradient_weights(const GridDomain& d, int axis) {
  if (axis < 0 || axis >= d.n) throw domain_error("gradient_weights: axis out of range");
  return cached(d, axis);
}

Eigen::ArrayXd stencil_apply(const StencilWeights& w, const Eigen::ArrayXd& v) {
  const GridDomain& d = w.domain;
  const std::size_t m = d.size();
  const std::size_t side = 2 * static_cast<std::size_t>(d.M) - 1;
  // table_index(i - j) = A_i - B_j
  std::vector<std::size_t> A(m), Bj(m);
  for (std::size_t f = 0; f < m; ++f) {
    const auto idx = d.multi_index(f);
    std::size_t a = 0, b = 0;
    for (int k = 0; k < d.n; ++k) {
      a = a * side + static_cast<std::size_t>(idx[k] + d.M - 1);
      b = b * side + static_cast<std::size_t>(idx[k]);
    }
    A[f] = a;
    Bj[f] = b;
  }
  const double* tab = w.table.data();
  const double* val = v.data();
  Eigen::ArrayXd out(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    const double* row = tab + A[i];
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) s += *(row - Bj[j]) * val[j];
    out[static_cast<Eigen::Index>(i)] = s;
  }
  return out;
}

Eigen::ArrayXd B_spectral_values(const GridDomain& d, const Eigen::ArrayXd& v) {
  PaddedSpectrum ps(d);
  Eigen::ArrayXcd spec = ps.forward(v);
  ps.multiply(spec, [&](const std::array<int, 3>& k) {
    double xi2 = 0.0;
    for (int a = 0; a < d.n; ++a) {
      const double xi = ps.frequency(k[a]);
      xi2 += xi * xi;
    }
    return std::complex<double>(1.0 / (1.0 + xi2), 0.0);
  });
  return ps.inverse_crop(std::move(spec));
}

Field apply_B_spectral(const Field& f) {
  require_finite(f, "apply_B_spectral");
  return Field(f.domain, B_spectral_values(f.domain, f.values), f.t, f.gauge);
}

Field apply_B_quadrature(const Field& f, bool force) {
  require_finite(f, "apply_B_quadrature");
  guard_cost(f.domain, force, "apply_B_quadrature");
  return Field(f.domain, stencil_apply(bessel_weights(f.domain), f.values), f.t, f.gauge);
}

Field apply_B(const Field& f, Backend backend) {
  return backend == Backend::spectral ? apply_B_spectral(f) : apply_B_quadrature(f);
}

Field apply_BV(const Field& f, const PotentialSpec& p, double t, Backend backend) {
  require_finite(f, "apply_BV");
  Field g(f.domain, f.values * p.V_values(f.domain, t), f.t, f.gauge);
  return apply_B(g, backend);
}

Field iterate_BV(const Field& f, const PotentialSpec& p, double t, int N, Backend backend) {
  if (N < 0) throw domain_error("iterate_BV: N must be nonnegative");
  Field g = f;
  for (int k = 0; k < N; ++k) g = apply_BV(g, p, t, backend);
  return g;
}

Eigen::ArrayXd D_b_spectral_values(const GridDomain& d, const Eigen::ArrayXd& v, const ConvectionSpec& cs,
                                   double t) {
  PaddedSpectrum ps(d);
  Eigen::ArrayXcd acc = Eigen::ArrayXcd::Zero(static_cast<Eigen::Index>(ps.padded_size()));
  for (int axis = 0; axis < d.n; ++axis) {
    Eigen::ArrayXcd spec = ps.forward(v * cs.b_values(d, axis, t));
    ps.multiply(spec, [&](const std::array<int, 3>& k) {
      double xi2 = 0.0;
      for (int a = 0; a < d.n; ++a) {
        const double xi = ps.frequency(k[a]);
        xi2 += xi * xi;
      }
      const double xk = ps.nyquist(k[axis]) ? 0.0 : ps.frequency(k[axis]);
      return std::complex<double>(0.0, xk / (1.0 + xi2));
    });
    acc += spec;
  }
  return ps.inverse_crop(std::move(acc));
}

Field apply_D_b(const Field& f, const ConvectionSpec& cs, double t) {
  require_finite(f, "apply_D_b");
  if (cs.vanishes()) return Field::zeros(f.domain, f.t, f.gauge);
  return Field(f.domain, D_b_spectral_values(f.domain, f.values, cs, t), f.t, f.gauge);
}

Field apply_D_b_quadrature(const Field& f, const ConvectionSpec& cs, double t, bool force) {
  require_finite(f, "apply_D_b_quadrature");
  guard_cost(f.domain, force, "apply_D_b_quadrature");
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(f.values.size());
  if (cs.vanishes()) return Field(f.domain, out, f.t, f.gauge);
  for (int axis = 0; axis < f.domain.n; ++axis)
    out += stencil_apply(gradient_weights(f.domain, axis), f.values * cs.b_values(f.domain, axis, t));
  return Field(f.domain, std::move(out), f.t, f.gauge);
}

FieldHistory FieldHistory::constant(const Field& f) {
  FieldHistory h;
  h.domain = f.domain;
  h.gauge = f.gauge;
  h.times = {f.t};
  h.values = {f.values};
  return h;
}

Eigen::ArrayXd FieldHistory::at(double t) const {
  if (times.empty()) throw precondition_error("FieldHistory: empty history");
  if (times.size() == 1) return values.front();
  const double tol = 1e-12 * std::max(1.0, std::abs(times.back()));
  if (t < times.front() - tol || t > times.back() + tol)
    throw precondition_error("FieldHistory: time outside the stored range");
  if (t <= times.front()) return values.front();
  if (t >= times.back()) return values.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t j = static_cast<std::size_t>(it - times.begin());
  const double t0 = times[j - 1], t1 = times[j];
  const double w = (t - t0) / (t1 - t0);
  return (1.0 - w) * values[j - 1] + w * values[j];
}

std::vector<double> time_nodes(double t, int quad_steps) {
  if (t < 0.0) throw domain_error("time_nodes: negative time");
  if (quad_steps < 1) throw domain_error("time_nodes: quad_steps must be positive");
  if (t == 0.0) return {0.0};
  const int m = std::max(1, static_cast<int>(std::ceil(t * quad_steps - 1e-9)));
  std::vector<double> nodes(m + 1);
  for (int j = 0; j <= m; ++j) nodes[j] = t * j / m;
  nodes.back() = t;
  return nodes;
}

std::vector<Eigen::ArrayXd> cumulative_Bhat_V(const GridDomain& d, const std::vector<double>& nodes,
                                              const std::vector<Eigen::ArrayXd>& phi, const PotentialSpec& p) {
  if (nodes.empty() || nodes.size() != phi.size())
    throw precondition_error("cumulative_Bhat_V: nodes and values must match and be nonempty");
  std::vector<Eigen::ArrayXd> out(nodes.size());
  Eigen::ArrayXd prev = B_spectral_values(d, phi[0] * p.V_values(d, nodes[0]));
  out[0] = Eigen::ArrayXd::Zero(prev.size());
  for (std::size_t j = 1; j < nodes.size(); ++j) {
    Eigen::ArrayXd cur = B_spectral_values(d, phi[j] * p.V_values(d, nodes[j]));
    out[j] = out[j - 1] + 0.5 * (nodes[j] - nodes[j - 1]) * (prev + cur);
    prev = std::move(cur);
  }
  return out;
}

Field apply_Bhat_V(const FieldHistory& f, const PotentialSpec& p, double t, int quad_steps) {
  return iterate_Bhat_V(f, p, t, 1, quad_steps);
}

Field iterate_Bhat_V(const FieldHistory& f, const PotentialSpec& p, double t, int N, int quad_steps) {
  if (f.empty()) throw precondition_error("apply_Bhat_V: empty history");
  const std::vector<double> nodes = time_nodes(t, quad_steps);
  std::vector<Eigen::ArrayXd> phi(nodes.size());
  for (std::size_t j = 0; j < nodes.size(); ++j) phi[j] = f.at(nodes[j]);
  for (int k = 0; k < N; ++k) phi = cumulative_Bhat_V(f.domain, nodes, phi, p);
  return Field(f.domain, phi.back(), t, f.gauge);
}

}  // namespace pplab
