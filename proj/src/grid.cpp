#include "pplab/grid.hpp"

#include <algorithm>
#include <string>

#include "pplab/fft.hpp"

namespace pplab {

GridDomain::GridDomain(int n_, double L_, int M_, std::size_t cap) : n(n_), L(L_), M(M_) {
  if (n < 1 || n > 3) throw domain_error("GridDomain: dimension must be 1, 2 or 3");
  if (!(L > 0.0)) throw domain_error("GridDomain: half width must be positive");
  if (M < 2) throw domain_error("GridDomain: need at least 2 points per dimension");
  if (size() > cap)
    throw cost_guard_error("GridDomain: " + std::to_string(size()) + " points exceed the cap of " +
                           std::to_string(cap));
}

std::size_t GridDomain::size() const {
  std::size_t s = 1;
  for (int k = 0; k < n; ++k) s *= static_cast<std::size_t>(M);
  return s;
}

std::array<int, 3> GridDomain::multi_index(std::size_t flat) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int k = n - 1; k >= 0; --k) {
    idx[k] = static_cast<int>(flat % M);
    flat /= M;
  }
  return idx;
}

std::array<double, 3> GridDomain::point(std::size_t flat) const {
  const auto idx = multi_index(flat);
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int k = 0; k < n; ++k) x[k] = coord(idx[k]);
  return x;
}

double GridDomain::radius(std::size_t flat) const {
  const auto x = point(flat);
  return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
}

bool GridDomain::interior(std::size_t flat) const {
  const auto x = point(flat);
  for (int k = 0; k < n; ++k)
    if (std::abs(x[k]) > 0.5 * L) return false;
  return true;
}

WeightedNorm::WeightedNorm(double r) : rho(r) {
  if (!(r >= 0.0 && r < 1.0)) throw domain_error("WeightedNorm: rho must lie in [0, 1)");
}

double weighted_l1_norm(const GridDomain& d, const Eigen::ArrayXd& values, double rho) {
  if (!values.isFinite().all()) return std::numeric_limits<double>::infinity();
  double s = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i)
    s += std::exp(-rho * d.radius(i)) * std::abs(values[static_cast<Eigen::Index>(i)]);
  return s * d.cell_volume();
}

double weighted_l1_norm(const Field& f, const WeightedNorm& w) {
  if (!f.finite()) return std::numeric_limits<double>::infinity();
  return weighted_l1_norm(f.domain, f.values, w.rho);
}

Field phi_rho_convolve(const Field& f, const WeightedNorm& w) {
  if (!(w.rho > 0.0)) throw domain_error("phi_rho_convolve: rho must be positive");
  if (!f.finite()) throw precondition_error("phi_rho_convolve: field is not finite");
  const GridDomain& d = f.domain;
  const double h = d.h();
  const double rho = w.rho;
  Eigen::ArrayXd out = linear_convolve(d, f.values, [&](const std::array<int, 3>& off) {
    double r2 = 0.0;
    for (int k = 0; k < d.n; ++k) r2 += double(off[k]) * off[k];
    return std::exp(-rho * h * std::sqrt(r2));
  });
  out *= d.cell_volume();
  // Positive kernel: clip transform round-off when the input has no negative values.
  if ((f.values >= 0.0).all()) out = out.max(0.0);
  return Field(d, std::move(out), f.t, f.gauge);
}

double InitialSpec::operator()(double r) const {
  double v = C0;
  if (delta != 0.0) v *= std::exp(delta * std::pow(r, alpha));
  if (d_pow != 0.0) v *= std::pow(r, d_pow);
  return v;
}

void InitialSpec::validate() const {
  if (!(C0 > 0.0)) throw precondition_error("InitialSpec: C0 must be positive");
  if (!(d_pow >= 0.0)) throw precondition_error("InitialSpec: d_pow must be nonnegative");
  if (!std::isfinite(delta) || !std::isfinite(alpha))
    throw precondition_error("InitialSpec: delta and alpha must be finite");
}

Field sample_initial(const InitialSpec& spec, const GridDomain& d) {
  spec.validate();
  Eigen::ArrayXd v(static_cast<Eigen::Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) v[static_cast<Eigen::Index>(i)] = spec(d.radius(i));
  return Field(d, std::move(v), 0.0, Gauge::u);
}

namespace {

MembershipReport trend(double a, double b) {
  MembershipReport rep;
  rep.norm_L = a;
  rep.norm_2L = b;
  rep.growth = a > 0.0 ? b / a : (b > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
  rep.member = std::isfinite(b) && rep.growth <= 1.5;
  return rep;
}

}  // namespace

MembershipReport check_membership(const InitialSpec& spec, const GridDomain& d, const WeightedNorm& w) {
  const GridDomain wide(d.n, 2.0 * d.L, 2 * d.M, std::size_t{1} << 27);
  const double a = weighted_l1_norm(sample_initial(spec, d), w);
  const double b = weighted_l1_norm(sample_initial(spec, wide), w);
  return trend(a, b);
}

MembershipReport check_membership(const Field& f, const WeightedNorm& w) {
  const GridDomain& d = f.domain;
  double inner = 0.0, full = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double v = std::exp(-w.rho * d.radius(i)) * std::abs(f.values[static_cast<Eigen::Index>(i)]);
    full += v;
    if (d.interior(i)) inner += v;
  }
  if (!std::isfinite(full)) full = std::numeric_limits<double>::infinity();
  return trend(inner * d.cell_volume(), full * d.cell_volume());
}

bool initial_in_weighted_space(const InitialSpec& spec) {
  spec.validate();
  if (spec.delta <= 0.0) return true;
  if (spec.alpha < 0.0) return false;  // exp(delta |x|^alpha) is not locally integrable
  if (spec.alpha < 1.0) return true;
  if (spec.alpha == 1.0) return spec.delta < 1.0;
  return false;
}

}  // namespace pplab
