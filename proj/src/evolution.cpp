#include "pplab/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pplab/errors.hpp"

namespace pplab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kHistoryByteCap = std::size_t{1} << 31;

void check_times(const std::vector<double>& ts) {
  if (ts.empty()) throw precondition_error("time_grid must not be empty");
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!(ts[i] >= 0.0) || !std::isfinite(ts[i])) throw domain_error("time_grid entries must be finite and >= 0");
    if (i > 0 && ts[i] <= ts[i - 1]) throw domain_error("time_grid must be strictly increasing");
  }
}

void check_datum(const Field& u0, const SeriesParams& sp) {
  if (!u0.finite()) throw precondition_error("initial field is not finite");
  if (u0.gauge != Gauge::u) throw precondition_error("initial field must be given in the u gauge");
  if (sp.force_unsafe) return;
  const MembershipReport m = check_membership(u0, WeightedNorm(sp.rho));
  if (!m.member) throw precondition_error("initial field is not in the weighted space at this resolution");
}

double interior_sup(const GridDomain& d, const Eigen::ArrayXd& v) {
  double best = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d.interior(i)) {
      const double a = std::abs(v[static_cast<Eigen::Index>(i)]);
      if (!(a <= best)) best = a;  // propagates NaN as +inf below
    }
  return std::isfinite(best) ? best : kInf;
}

Field snapshot_u(const GridDomain& d, const Eigen::ArrayXd& mu, double t) {
  Field f(d, mu, t, Gauge::mu);
  return to_u(f);
}

// Node set: each output interval [t_{i-1}, t_i] split into ceil(len * quad_steps) pieces.
std::vector<double> picard_nodes(const std::vector<double>& times, int quad_steps, std::vector<std::size_t>& outputs) {
  std::vector<double> nodes{0.0};
  outputs.clear();
  double prev = 0.0;
  for (double t : times) {
    if (t > prev) {
      const double len = t - prev;
      const int m = std::max(1, static_cast<int>(std::ceil(len * quad_steps - 1e-9)));
      for (int j = 1; j <= m; ++j) nodes.push_back(j == m ? t : prev + len * j / m);
    }
    outputs.push_back(nodes.size() - 1);
    prev = t;
  }
  return nodes;
}

// Integrand of the mild equation at one node.
struct Integrand {
  const GridDomain& d;
  const PotentialSpec& p;
  const ConvectionSpec* cs;

  Eigen::ArrayXd operator()(const Eigen::ArrayXd& mu, double t) const {
    if (cs == nullptr || cs->vanishes()) return B_spectral_values(d, mu * p.V_values(d, t));
    return B_spectral_values(d, mu * cs->W_values(p, d, t)) + D_b_spectral_values(d, mu, *cs, t);
  }
};

EvolutionResult picard_run(const Field& u0, const PotentialSpec& p, const ConvectionSpec* cs,
                           const SeriesParams& sp, int quad_steps) {
  sp.validate();
  check_times(sp.time_grid);
  p.validate();
  if (!sp.force_unsafe) {
    if (p.sigma >= 1.0) throw unsupported_regime_error("Picard solve requires sigma < 1");
    if (cs == nullptr && !p.upper_hypothesis())
      throw precondition_error("Picard solve needs |a| <= Lambda |x|^sigma (lower_bounded mode given)");
    if (cs != nullptr && !convection_hypothesis_holds(p, *cs, u0.domain, sp.time_grid.back()))
      throw precondition_error("convection coefficients exceed Lambda |x|^sigma");
  }
  check_datum(u0, sp);

  const GridDomain& d = u0.domain;
  EvolutionResult r;
  r.method = cs ? SolveMethod::convection : SolveMethod::picard;
  r.domain = d;
  r.u0 = u0;
  r.times = sp.time_grid;
  r.rho = sp.rho;
  r.tol = sp.tol;

  const std::vector<double> nodes = picard_nodes(sp.time_grid, quad_steps, r.output_nodes);
  if (nodes.size() * d.size() * sizeof(double) > kHistoryByteCap)
    throw cost_guard_error("Picard history exceeds the memory cap; reduce quad_steps or the grid");

  const Integrand q{d, p, cs};
  const Eigen::ArrayXd& base = u0.values;
  std::vector<Eigen::ArrayXd> mu(nodes.size(), base);
  r.term_norms.assign(sp.time_grid.size(), {});

  r.status = SolveStatus::truncated;
  for (int sweep = 1; sweep <= sp.max_terms; ++sweep) {
    r.iterations = sweep;
    double change = 0.0, size = 0.0;
    std::vector<double> node_change(nodes.size(), 0.0);
    Eigen::ArrayXd integral = Eigen::ArrayXd::Zero(base.size());
    Eigen::ArrayXd q_prev = q(mu[0], nodes[0]);
    bool finite = true;
    for (std::size_t j = 1; j < nodes.size(); ++j) {
      const Eigen::ArrayXd q_cur = q(mu[j], nodes[j]);
      integral += 0.5 * (nodes[j] - nodes[j - 1]) * (q_prev + q_cur);
      Eigen::ArrayXd next = base + integral;
      const double dn = weighted_l1_norm(d, next - mu[j], sp.rho);
      const double nn = weighted_l1_norm(d, next, sp.rho);
      if (!std::isfinite(dn) || !std::isfinite(nn)) {
        finite = false;
        break;
      }
      node_change[j] = dn;
      change = std::max(change, dn);
      size = std::max(size, nn);
      mu[j] = std::move(next);
      // The trapezoid at the next node uses the updated value here.
      q_prev = q(mu[j], nodes[j]);
    }
    for (std::size_t i = 0; i < r.output_nodes.size(); ++i) r.term_norms[i].push_back(node_change[r.output_nodes[i]]);
    if (!finite) {
      r.status = SolveStatus::diverged;
      break;
    }
    size = std::max(size, weighted_l1_norm(d, base, sp.rho));
    if (change <= sp.tol * size) {
      r.status = SolveStatus::converged;
      break;
    }
  }

  r.history.domain = d;
  r.history.gauge = Gauge::mu;
  r.history.times = nodes;
  r.history.values = std::move(mu);
  for (std::size_t i = 0; i < r.output_nodes.size(); ++i) {
    Field s = snapshot_u(d, r.history.values[r.output_nodes[i]], sp.time_grid[i]);
    if (r.status == SolveStatus::diverged) s.state = FieldState::diverged;
    r.snapshots.push_back(std::move(s));
  }
  if (r.status == SolveStatus::diverged)
    r.residuals.assign(r.times.size(), kInf);
  else
    r.residuals = mild_residual(r, p, cs);
  return r;
}

void rebuild_autonomous(EvolutionResult& r) {
  const GridDomain& d = r.domain;
  r.snapshots.clear();
  r.term_norms.assign(r.times.size(), {});
  std::vector<double> pk_norm;
  for (const auto& pk : r.series_terms) pk_norm.push_back(weighted_l1_norm(d, pk, r.rho));
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    const double t = r.times[i];
    const double s = r.series_T > 0.0 ? t / r.series_T : 0.0;
    Eigen::ArrayXd mu = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(d.size()));
    double scale = 1.0;
    for (std::size_t k = 0; k < r.series_terms.size(); ++k) {
      if (k > 0) scale *= s;
      if (scale != 0.0 || k == 0) mu += scale * r.series_terms[k];
      r.term_norms[i].push_back(scale * pk_norm[k]);
    }
    Field f = snapshot_u(d, mu, t);
    if (r.status == SolveStatus::diverged) f.state = FieldState::diverged;
    r.snapshots.push_back(std::move(f));
  }
}

}  // namespace

void SeriesParams::validate() const {
  if (max_terms < 2) throw domain_error("max_terms must be at least 2");
  if (!(tol > 0.0)) throw domain_error("tol must be positive");
  if (!(rho >= 0.0 && rho < 1.0)) throw domain_error("rho must lie in [0, 1)");
  if (quad_steps < 1) throw domain_error("quad_steps must be positive");
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::truncated: return "truncated";
    case SolveStatus::diverged: return "diverged";
  }
  return "?";
}

std::string to_string(SolveMethod m) {
  switch (m) {
    case SolveMethod::autonomous: return "autonomous";
    case SolveMethod::picard: return "picard";
    case SolveMethod::convection: return "convection";
  }
  return "?";
}

EvolutionResult solve_autonomous(const Field& u0, const PotentialSpec& p, const SeriesParams& sp) {
  sp.validate();
  check_times(sp.time_grid);
  p.validate();
  if (!p.time_independent()) throw precondition_error("solve_autonomous needs a time-independent potential");
  if (p.sigma >= 1.0 && !sp.force_unsafe)
    throw unsupported_regime_error("series solution is only available for sigma < 1");
  check_datum(u0, sp);

  const GridDomain& d = u0.domain;
  EvolutionResult r;
  r.method = SolveMethod::autonomous;
  r.domain = d;
  r.u0 = u0;
  r.times = sp.time_grid;
  r.rho = sp.rho;
  r.tol = sp.tol;
  r.series_T = sp.time_grid.back();

  const double T = r.series_T;
  const Eigen::ArrayXd V = p.V_values(d, 0.0);
  const std::size_t nt = r.times.size();
  std::vector<Eigen::ArrayXd> mu(nt, u0.values);
  std::vector<double> scale(nt, 1.0);
  r.series_terms.push_back(u0.values);

  r.status = SolveStatus::truncated;
  double prev_norm = weighted_l1_norm(d, u0.values, sp.rho);
  int rising = 0;
  if (T == 0.0 || prev_norm == 0.0) {
    r.status = SolveStatus::converged;
  } else {
    for (int k = 1; k <= sp.max_terms; ++k) {
      r.iterations = k;
      Eigen::ArrayXd pk = (T / k) * B_spectral_values(d, V * r.series_terms.back());
      const double nk = weighted_l1_norm(d, pk, sp.rho);
      if (!std::isfinite(nk) || !pk.isFinite().all()) {
        r.status = SolveStatus::diverged;
        break;
      }
      bool done = true;
      for (std::size_t i = 0; i < nt; ++i) {
        scale[i] *= r.times[i] / T;
        if (scale[i] == 0.0) continue;
        mu[i] += scale[i] * pk;
        const double total = weighted_l1_norm(d, mu[i], sp.rho);
        if (!(scale[i] * nk <= sp.tol * total)) done = false;
      }
      r.series_terms.push_back(std::move(pk));
      rising = nk > prev_norm ? rising + 1 : 0;
      prev_norm = nk;
      if (done) {
        r.status = SolveStatus::converged;
        break;
      }
      if (rising > sp.max_terms / 2) {
        r.status = SolveStatus::diverged;
        break;
      }
    }
  }
  rebuild_autonomous(r);
  if (r.status == SolveStatus::diverged)
    r.residuals.assign(nt, kInf);
  else
    r.residuals = mild_residual(r, p);
  return r;
}

EvolutionResult solve_picard(const Field& u0, const PotentialSpec& p, const SeriesParams& sp) {
  return picard_run(u0, p, nullptr, sp, sp.quad_steps);
}

EvolutionResult solve_picard(const Field& u0, const PotentialSpec& p, const SeriesParams& sp, int quad_steps) {
  return picard_run(u0, p, nullptr, sp, quad_steps);
}

EvolutionResult solve_convection(const Field& u0, const PotentialSpec& p, const ConvectionSpec& cs,
                                 const SeriesParams& sp) {
  return picard_run(u0, p, &cs, sp, sp.quad_steps);
}

std::vector<double> mild_residual(const EvolutionResult& r, const PotentialSpec& p, const ConvectionSpec* cs) {
  const GridDomain& d = r.domain;
  std::vector<double> out;
  if (r.method == SolveMethod::autonomous) {
    // The series is a polynomial in t, so the time integral is exact term by term.
    if (cs != nullptr && !cs->vanishes())
      throw precondition_error("mild_residual: autonomous runs carry no drift term");
    const double T = r.series_T;
    std::vector<Eigen::ArrayXd> bv;
    for (const auto& pk : r.series_terms) bv.push_back(B_spectral_values(d, pk * p.V_values(d, 0.0)));
    for (std::size_t i = 0; i < r.times.size(); ++i) {
      const double t = r.times[i];
      const Eigen::ArrayXd mu = to_mu(r.snapshots[i]).values;
      Eigen::ArrayXd integral = Eigen::ArrayXd::Zero(mu.size());
      double s = t;  // t (t/T)^k
      for (std::size_t k = 0; k < bv.size(); ++k) {
        if (k > 0) s *= t / T;
        if (s == 0.0) break;
        integral += (s / double(k + 1)) * bv[k];
      }
      out.push_back(interior_sup(d, mu - r.u0.values - integral));
    }
    return out;
  }
  if (r.history.empty()) throw precondition_error("mild_residual: result carries no history");
  const Integrand q{d, p, cs};
  const auto& nodes = r.history.times;
  const auto& mu = r.history.values;
  Eigen::ArrayXd integral = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(d.size()));
  std::vector<Eigen::ArrayXd> at_output;
  Eigen::ArrayXd q_prev = q(mu[0], nodes[0]);
  std::size_t next_out = 0;
  std::vector<double> res(r.output_nodes.size(), 0.0);
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    if (j > 0) {
      const Eigen::ArrayXd q_cur = q(mu[j], nodes[j]);
      integral += 0.5 * (nodes[j] - nodes[j - 1]) * (q_prev + q_cur);
      q_prev = q_cur;
    }
    while (next_out < r.output_nodes.size() && r.output_nodes[next_out] == j) {
      res[next_out] = interior_sup(d, mu[j] - r.u0.values - integral);
      ++next_out;
    }
  }
  return res;
}

void truncate_series(EvolutionResult& r, int N) {
  if (r.method != SolveMethod::autonomous) throw precondition_error("truncate_series: autonomous runs only");
  if (N < 0) throw domain_error("truncate_series: N must be nonnegative");
  if (static_cast<std::size_t>(N + 1) < r.series_terms.size()) {
    r.series_terms.resize(static_cast<std::size_t>(N + 1));
    r.status = SolveStatus::truncated;
  }
  rebuild_autonomous(r);
}

nlohmann::json manifest(const EvolutionResult& r) {
  nlohmann::json j;
  j["method"] = to_string(r.method);
  j["status"] = to_string(r.status);
  j["grid"] = {{"n", r.domain.n}, {"L", r.domain.L}, {"M", r.domain.M}};
  j["times"] = r.times;
  j["residuals"] = r.residuals;
  j["term_norms"] = r.term_norms;
  j["iterations"] = r.iterations;
  j["rho"] = r.rho;
  j["tol"] = r.tol;
  return j;
}

}  // namespace pplab
