#include "pplab/envelope.hpp"

#include <cmath>
#include <random>

#include "pplab/errors.hpp"
#include "pplab/operators.hpp"
#include "pplab/special.hpp"

namespace pplab {

namespace {

// sum_{j > k} j^{-s} <= k^{1-s} / (s - 1)
double tail_sum_bound(double s, int k) { return std::pow(double(k), 1.0 - s) / (s - 1.0); }

}  // namespace

EpsSequence make_eps_sequence(double sigma, double rho, int K) {
  if (sigma >= 1.0)
    throw unsupported_regime_error("make_eps_sequence: the construction fails when sigma = 1 and beyond");
  if (sigma < 0.0) throw domain_error("make_eps_sequence: sigma must be nonnegative");
  if (!(rho > 0.0 && rho < 1.0)) throw domain_error("make_eps_sequence: rho must lie in (0, 1)");
  if (K < 1) throw domain_error("make_eps_sequence: K must be positive");

  EpsSequence es;
  es.sigma = sigma;
  es.rho = rho;
  es.K = K;
  if (sigma > 0.0) {
    es.l = 0.5 * (1.0 / sigma - 1.0);
    es.s = 1.0 / sigma - es.l;
  } else {
    es.l = 0.0;
    es.s = 2.0;
  }
  es.zeta_s = zeta(es.s);
  es.theta0 = 0.5 * std::min(std::log(2.0), -std::log(rho) / es.zeta_s);
  es.theta = es.theta0;

  es.eps.resize(K);
  es.rho_partial.resize(K);
  es.gamma.resize(K);
  double prod = 1.0;
  for (int k = 1; k <= K; ++k) {
    const double e = 1.0 - es.theta * std::pow(double(k), -es.s);
    es.eps[k - 1] = e;
    es.gamma[k - 1] = (1.0 - e) * prod;
    prod *= e;
    es.rho_partial[k - 1] = prod;
  }
  // -ln(1 - x) <= x (1 + x) for 0 <= x <= 1/2, with x <= theta K^{-s} beyond K.
  const double x = es.theta * std::pow(double(K), -es.s);
  es.rho_star = prod * std::exp(-(1.0 + x) * es.theta * tail_sum_bound(es.s, K));
  es.rho_star_bound = std::exp(-2.0 * es.theta * es.zeta_s);
  return es;
}

double EpsSequence::tail_gap_bound(int k, int m) const {
  if (m <= k) return 0.0;
  double sum = 0.0;
  for (int j = k + 1; j <= m; ++j) sum += std::pow(double(j), -s);
  const double x = theta * std::pow(double(k + 1), -s);
  return (1.0 + x) * theta * sum;
}

double EnvelopeParams::power(double r, double gamma) const {
  return Lambda0 * std::pow(r + sigma / gamma, sigma) + 1.0;
}

double EnvelopeParams::L_inf(double r, double t) const {
  return std::exp(2.0 * h * Lambda0 * t * std::pow(r, sigma));
}

double EnvelopeParams::M_inf(double t, int* stop_index) const {
  if (sigma == 0.0) {
    if (stop_index) *stop_index = 0;
    return std::exp(2.0 * h * t);
  }
  if (t == 0.0) {
    if (stop_index) *stop_index = 0;
    return 1.0;
  }
  // term_k = (2hFt)^k / k! * k^{k(1 - sigma l)}, summed in log space.
  const double c = 1.0 - sigma * l;
  const double lx = std::log(2.0 * h * F * t);
  auto log_term = [&](int k) { return k * lx - std::lgamma(k + 1.0) + (k > 0 ? c * k * std::log(double(k)) : 0.0); };
  constexpr int kMaxTerms = 10000;
  double lmax = log_term(0);
  std::vector<double> logs{lmax};
  int stop = -1;
  for (int k = 1; k <= kMaxTerms; ++k) {
    const double lt = log_term(k);
    logs.push_back(lt);
    lmax = std::max(lmax, lt);
    const double ratio = std::exp(lt - logs[k - 1]);
    if (ratio < 1.0 && stop < 0) stop = k;
    if (stop > 0 && lt < lmax + std::log(1e-18)) {
      // The term ratio decreases from here on; bound the tail geometrically.
      const double r = std::exp(log_term(k + 1) - lt);
      double sum = 0.0;
      for (double v : logs) sum += std::exp(v - lmax);
      sum += std::exp(lt - lmax) * r / (1.0 - r);
      if (stop_index) *stop_index = stop;
      return std::exp(lmax) * sum;
    }
  }
  throw envelope_divergence_error("M_inf: ratio test not passed within 10^4 terms (2hFt = " +
                                  std::to_string(2.0 * h * F * t) + ")");
}

double estimate_c0(const GridDomain& d, std::uint64_t seed, int probes) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> centre(-0.5 * d.L, 0.5 * d.L);
  std::uniform_real_distribution<double> width(0.3, 2.0);
  std::uniform_real_distribution<double> half(d.h(), 1.5);
  const double Ds[] = {0.0, 0.3, 0.7, 0.99};
  const double Es[] = {0.5, 0.8, 0.9, 0.95};
  const Eigen::Index m = static_cast<Eigen::Index>(d.size());
  Eigen::ArrayXd r(m);
  for (Eigen::Index i = 0; i < m; ++i) r[i] = d.radius(static_cast<std::size_t>(i));

  double best = 0.0;
  for (int p = 0; p < probes; ++p) {
    std::array<double, 3> c{0.0, 0.0, 0.0};
    for (int k = 0; k < d.n; ++k) c[k] = centre(rng);
    const bool gaussian = p % 2 == 0;
    const double s = gaussian ? width(rng) : half(rng);
    Eigen::ArrayXd g(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto x = d.point(static_cast<std::size_t>(i));
      double q = 0.0, box = 0.0;
      for (int k = 0; k < d.n; ++k) {
        q += (x[k] - c[k]) * (x[k] - c[k]);
        box = std::max(box, std::abs(x[k] - c[k]));
      }
      g[i] = gaussian ? std::exp(-q / (s * s)) : (box <= s ? 1.0 : 0.0);
    }
    if (g.maxCoeff() <= 0.0) continue;
    const Field gf(d, g);
    for (double e : Es) {
      const Eigen::ArrayXd phi = phi_rho_convolve(gf, WeightedNorm(e)).values;
      for (double D : Ds) {
        const Eigen::ArrayXd lhs = B_spectral_values(d, (r.pow(D) + 1.0) * g).abs();
        const Eigen::ArrayXd rhs = ((r + D / (1.0 - e)).pow(D) + 1.0) * phi;
        // Far-tail values of lhs are dominated by discretization error; compare where rhs is resolvable.
        const double floor = 1e-6 * rhs.maxCoeff();
        for (Eigen::Index i = 0; i < m; ++i)
          if (rhs[i] > floor) best = std::max(best, lhs[i] / rhs[i]);
      }
    }
  }
  return 1.05 * best;
}

EnvelopeParams make_envelope(const PotentialSpec& p, const EpsSequence& es, double tau0,
                             const GridDomain& probe_grid, std::uint64_t seed) {
  if (p.sigma >= 1.0) throw unsupported_regime_error("make_envelope: requires sigma < 1");
  if (std::abs(p.sigma - es.sigma) > 1e-15)
    throw precondition_error("make_envelope: sequence was built for a different sigma");
  EnvelopeParams env;
  env.n = probe_grid.n;
  env.sigma = p.sigma;
  env.l = es.l;
  env.tau0 = tau0;
  env.Lambda0 = p.lambda.sup_abs(tau0);
  if (!std::isfinite(env.Lambda0)) throw precondition_error("make_envelope: Lambda unbounded on [0, tau0]");
  env.theta0 = es.theta0;
  env.theta = es.theta;
  env.rho_star = es.rho_star;
  env.rho_star_bound = es.rho_star_bound;
  env.eps1 = es.eps.front();
  env.c0 = estimate_c0(probe_grid, seed);
  env.L = env.Lambda0 * std::pow(p.sigma / (1.0 - env.eps1), p.sigma) + 1.0;
  const double kappa = env.eps1 * (1.0 - env.eps1);
  const int n = probe_grid.n;
  env.kappa_integral = sphere_area(n) * std::tgamma(double(n)) / std::pow(kappa, n);
  env.h = env.c0 * env.L * std::max(1.0, env.kappa_integral);
  env.F = env.Lambda0 * std::pow(p.sigma / (es.theta * es.rho_star), p.sigma) + 1.0;
  env.M_inf_tau0 = env.M_inf(tau0, &env.M_inf_stop_index);
  return env;
}

Field iterated_envelope(const Field& f, const EnvelopeParams& env, const EpsSequence& es, int N) {
  if (N < 1 || N > es.K) throw domain_error("iterated_envelope: N must lie in [1, K]");
  const GridDomain& d = f.domain;
  const double gam = es.gamma[N - 1];
  const double rho = es.rho_partial[N - 1];
  Field abs_f(d, f.values.abs(), f.t, f.gauge);
  Field out = phi_rho_convolve(abs_f, WeightedNorm(rho));
  for (std::size_t i = 0; i < d.size(); ++i)
    out.values[static_cast<Eigen::Index>(i)] *= std::pow(env.h * env.power(d.radius(i), gam), N);
  return out;
}

LemmaEx1Report verify_lemma_ex1(long samples, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-10.0, 10.0);
  std::uniform_real_distribution<double> Dd(0.0, 5.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  LemmaEx1Report rep;
  rep.samples = samples;
  for (long s = 0; s < samples; ++s) {
    double x2 = 0.0, d2 = 0.0;
    double y2 = 0.0;
    for (int k = 0; k < n; ++k) {
      const double x = coord(rng), y = coord(rng);
      x2 += x * x;
      y2 += y * y;
      d2 += (x - y) * (x - y);
    }
    const double D = Dd(rng);
    const double g = 3.0 * (1.0 - unit(rng));  // (0, 3]
    double e = unit(rng);
    if (e == 0.0) e = 0.5;
    const double dist = std::sqrt(d2);
    // Compare logarithms; both sides are positive unless y = 0 with D > 0.
    const double ly = y2 > 0.0 ? 0.5 * std::log(y2) : -INFINITY;
    const double lhs = (D == 0.0 ? 0.0 : D * ly) - g * dist;
    const double rhs = (D == 0.0 ? 0.0 : D * std::log(std::sqrt(x2) + D / ((1.0 - e) * g))) - e * g * dist;
    rep.max_ratio = std::max(rep.max_ratio, std::exp(lhs - rhs));
    if (lhs > rhs + 1e-12 * std::max(1.0, std::abs(rhs))) ++rep.violations;
  }
  return rep;
}

nlohmann::json to_json(const EnvelopeParams& env, const EpsSequence& es) {
  nlohmann::json j;
  j["sigma"] = env.sigma;
  j["rho"] = es.rho;
  j["l"] = env.l;
  j["theta0"] = env.theta0;
  j["rho_star_bound"] = env.rho_star_bound;
  j["h"] = env.h;
  j["c0"] = env.c0;
  j["M_inf_stop_index"] = env.M_inf_stop_index;
  return j;
}

}  // namespace pplab
