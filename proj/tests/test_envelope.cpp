#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pplab/envelope.hpp"
#include "pplab/errors.hpp"
#include "pplab/operators.hpp"

using namespace pplab;

namespace {

PotentialSpec power_potential(double sigma, double lambda) {
  PotentialSpec p;
  p.sigma = sigma;
  p.lambda = TimeFactor::constant(lambda);
  return p;
}

Field random_bumps(const GridDomain& d, std::mt19937_64& rng, int count) {
  std::uniform_real_distribution<double> centre(-0.4 * d.L, 0.4 * d.L);
  std::uniform_real_distribution<double> width(0.3, 1.5);
  std::uniform_real_distribution<double> amp(0.1, 2.0);
  Field f = Field::zeros(d);
  for (int b = 0; b < count; ++b) {
    const double c = centre(rng), w = width(rng), a = amp(rng);
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double x = d.point(i)[0] - c;
      f.values[static_cast<Eigen::Index>(i)] += a * std::exp(-x * x / (w * w));
    }
  }
  return f;
}

// sum_{k <= terms} t^k / k! BV^k f
Field exponential_series(const Field& f, const PotentialSpec& p, double t, int terms) {
  Field out = f;
  Field term = f;
  for (int k = 1; k <= terms; ++k) {
    term = apply_BV(term, p, 0.0);
    term.values *= t / k;
    out.values += term.values;
  }
  return out;
}

bool dominated(const Eigen::ArrayXd& lhs, const Eigen::ArrayXd& rhs) { return (lhs.abs() <= rhs).all(); }

}  // namespace

TEST_CASE("theta0 for sigma = 1/2 and rho = 1/2") {
  const EpsSequence es = make_eps_sequence(0.5, 0.5, 100);
  CHECK(es.l == doctest::Approx(0.5));
  CHECK(es.s == doctest::Approx(1.5));
  CHECK(es.zeta_s == doctest::Approx(2.612375).epsilon(1e-6));
  CHECK(es.theta0 == doctest::Approx(0.132666).epsilon(1e-5));
  CHECK(es.theta0 == doctest::Approx(0.5 * std::log(2.0) / oracle::zeta_direct(1.5)).epsilon(1e-8));
  CHECK(es.rho_star_bound == doctest::Approx(std::exp(-2.0 * es.theta0 * es.zeta_s)));
  CHECK(es.rho_star_bound >= 0.5 - 1e-12);
}

TEST_CASE("the first term of the min is ln 2 when rho is small") {
  const EpsSequence es = make_eps_sequence(0.5, 1e-4, 10);
  CHECK(es.theta0 == doctest::Approx(0.5 * std::log(2.0)));
}

TEST_CASE("eps sequence is strictly increasing and below one") {
  for (double sigma : {0.0, 0.3, 0.5, 0.9}) {
    const EpsSequence es = make_eps_sequence(sigma, 0.5, 1000);
    REQUIRE(es.eps.size() == 1000);
    for (std::size_t k = 1; k < es.eps.size(); ++k) CHECK(es.eps[k] > es.eps[k - 1]);
    CHECK(es.eps.back() < 1.0);
    CHECK(es.eps.front() > 0.0);
    for (std::size_t k = 1; k < es.rho_partial.size(); ++k) CHECK(es.rho_partial[k] < es.rho_partial[k - 1]);
  }
}

TEST_CASE("gamma_k is (1 - eps_k) times the preceding product") {
  const EpsSequence es = make_eps_sequence(0.3, 0.6, 20);
  CHECK(es.gamma[0] == doctest::Approx(1.0 - es.eps[0]));
  for (int k = 1; k < 20; ++k) CHECK(es.gamma[k] == doctest::Approx((1.0 - es.eps[k]) * es.rho_partial[k - 1]));
}

TEST_CASE("eps sequence rejects bad arguments") {
  CHECK_THROWS_AS(make_eps_sequence(1.0, 0.5, 10), unsupported_regime_error);
  CHECK_THROWS_AS(make_eps_sequence(1.7, 0.5, 10), unsupported_regime_error);
  CHECK_THROWS_AS(make_eps_sequence(0.5, 1.0, 10), domain_error);
  CHECK_THROWS_AS(make_eps_sequence(0.5, 0.0, 10), domain_error);
  CHECK_THROWS_AS(make_eps_sequence(-0.1, 0.5, 10), domain_error);
  CHECK_THROWS_AS(make_eps_sequence(0.5, 0.5, 0), domain_error);
}

TEST_CASE("partial products converge above the closed-form bound") {
  for (double sigma : {0.0, 0.1, 0.2}) {
    const EpsSequence es = make_eps_sequence(sigma, 0.5, 200000);
    const double a = es.rho_partial[99999], b = es.rho_partial[199999];
    CHECK(std::abs(a - b) < 1e-5);
    CHECK(b >= es.rho_star_bound);
    CHECK(es.rho_star <= b);
    CHECK(es.rho_star >= es.rho);
  }
  // The tail decays like K^{1-s}; with s near one the products drift for a long time but stay inside
  // the tail estimate and above the bound.
  for (double sigma : {0.5, 0.7, 0.9}) {
    const EpsSequence es = make_eps_sequence(sigma, 0.5, 200000);
    for (int k : {10, 1000, 100000}) {
      const double gap = es.rho_partial[k - 1] - es.rho_partial[199999];
      CHECK(gap >= 0.0);
      CHECK(gap <= es.rho_partial[k - 1] * es.tail_gap_bound(k, 200000));
    }
    CHECK(es.rho_partial.back() >= es.rho_star_bound);
    CHECK(es.rho_star <= es.rho_partial.back());
  }
}

TEST_CASE("M_inf is exp(2ht) for sigma = 0") {
  const GridDomain d(1, 20.0, 256);
  const EpsSequence es = make_eps_sequence(0.0, 0.5, 50);
  const EnvelopeParams env = make_envelope(power_potential(0.0, 0.8), es, 1e-4, d, 3);
  for (double t : {0.0, 0.01, 0.1, 1.0}) CHECK(env.M_inf(t) == std::exp(2.0 * env.h * t));
  CHECK(env.L_inf(3.0, 0.1) == doctest::Approx(std::exp(2.0 * env.h * 0.8 * 0.1)));
  CHECK(env.Gamma(3.0, 0.1) == doctest::Approx(env.L_inf(3.0, 0.1) + env.M_inf(0.1)));
}

TEST_CASE("M_inf matches a direct partial sum") {
  const GridDomain d(1, 20.0, 256);
  const EpsSequence es = make_eps_sequence(0.3, 0.5, 50);
  const EnvelopeParams env = make_envelope(power_potential(0.3, 1.0), es, 1e-4, d, 3);
  const double t = 1e-4;
  int stop = 0;
  const double m = env.M_inf(t, &stop);
  CHECK(stop >= 1);
  const double x = 2.0 * env.h * env.F * t;
  const double c = 1.0 - env.sigma * env.l;
  double sum = 1.0;
  for (int k = 1; k < 400; ++k) sum += std::exp(k * std::log(x) - std::lgamma(k + 1.0) + c * k * std::log(double(k)));
  CHECK(m == doctest::Approx(sum).epsilon(1e-12));
}

TEST_CASE("envelope constants follow their closed forms") {
  const GridDomain d(1, 20.0, 256);
  const EpsSequence es = make_eps_sequence(0.3, 0.5, 50);
  const EnvelopeParams env = make_envelope(power_potential(0.3, 1.5), es, 1e-4, d, 1);
  CHECK(env.c0 > 0.0);
  CHECK(env.eps1 == es.eps[0]);
  CHECK(env.L == doctest::Approx(1.5 * std::pow(0.3 / (1.0 - env.eps1), 0.3) + 1.0));
  const double kappa = env.eps1 * (1.0 - env.eps1);
  CHECK(env.kappa_integral == doctest::Approx(2.0 / kappa));
  CHECK(env.h == doctest::Approx(env.c0 * env.L * std::max(1.0, 2.0 / kappa)));
  CHECK(env.F == doctest::Approx(1.5 * std::pow(0.3 / (es.theta * es.rho_star), 0.3) + 1.0));
  CHECK(env.power(2.0, 0.5) == doctest::Approx(1.5 * std::pow(2.0 + 0.6, 0.3) + 1.0));
}

TEST_CASE("c0 estimate is deterministic for a seed") {
  const GridDomain d(1, 20.0, 256);
  CHECK(estimate_c0(d, 5) == estimate_c0(d, 5));
  CHECK(estimate_c0(d, 5) > 0.0);
}

TEST_CASE("iterated operator lies under the envelope") {
  const GridDomain d(1, 20.0, 256);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lam(0.2, 2.0);
  for (double sigma : {0.0, 0.3, 0.7}) {
    const EpsSequence es = make_eps_sequence(sigma, 0.5, 20);
    for (int trial = 0; trial < 3; ++trial) {
      const PotentialSpec p = power_potential(sigma, lam(rng));
      const EnvelopeParams env = make_envelope(p, es, 1e-4, d, 7);
      Field f = random_bumps(d, rng, 3);
      std::normal_distribution<double> g;
      for (Eigen::Index i = 0; i < f.values.size(); ++i) f.values[i] *= g(rng) > -0.5 ? 1.0 : -1.0;
      Field it = f;
      for (int N = 1; N <= 4; ++N) {
        it = apply_BV(it, p, 0.0);
        CHECK(dominated(it.values, iterated_envelope(f, env, es, N).values));
      }
    }
  }
}

TEST_CASE("time-dependent potentials stay under the envelope built from the sup") {
  const GridDomain d(1, 20.0, 256);
  std::mt19937_64 rng(4);
  for (double sigma : {0.0, 0.5}) {
    PotentialSpec p;
    p.sigma = sigma;
    p.lambda = TimeFactor::power(2.0, 1.0);
    // M_inf needs a short horizon to pass the ratio test once sigma > 0.
    const double tau0 = sigma == 0.0 ? 0.75 : 0.01;
    const EpsSequence es = make_eps_sequence(sigma, 0.5, 10);
    const EnvelopeParams env = make_envelope(p, es, tau0, d, 2);
    CHECK(env.Lambda0 == doctest::Approx(2.0 * tau0));
    const Field f = random_bumps(d, rng, 2);
    const double times[] = {tau0, 0.1 * tau0, 0.6 * tau0, 0.3 * tau0};
    Field it = f;
    for (int N = 1; N <= 4; ++N) {
      it = apply_BV(it, p, times[N - 1]);
      CHECK(dominated(it.values, iterated_envelope(f, env, es, N).values));
    }
  }
}

TEST_CASE("exponential series is dominated by Gamma Phi_rho*") {
  const GridDomain d(1, 20.0, 256);
  std::mt19937_64 rng(8);
  for (double sigma : {0.0, 0.3}) {
    const PotentialSpec p = power_potential(sigma, 1.0);
    const EpsSequence es = make_eps_sequence(sigma, 0.5, 60);
    const EnvelopeParams env = make_envelope(p, es, 1e-4, d, 2);
    const double t = 1e-3;
    const Field f = random_bumps(d, rng, 3);
    const Field series = exponential_series(f, p, t, 30);
    const Field phi = phi_rho_convolve(f, WeightedNorm(es.rho_star));
    Eigen::ArrayXd bound(phi.values.size());
    for (std::size_t i = 0; i < d.size(); ++i)
      bound[static_cast<Eigen::Index>(i)] = env.Gamma(d.radius(i), t) * phi.values[static_cast<Eigen::Index>(i)];
    CHECK(dominated(series.values, bound));
  }
}

TEST_CASE("Gamma increases as rho approaches one") {
  const GridDomain d(1, 20.0, 256);
  const PotentialSpec p = power_potential(0.3, 1.0);
  double prev = 0.0;
  for (double rho : {0.5, 0.7, 0.9}) {
    const EpsSequence es = make_eps_sequence(0.3, rho, 50);
    const EnvelopeParams env = make_envelope(p, es, 1e-4, d, 2);
    const double g = env.Gamma(1.0, 1e-3);
    CHECK(g > prev);
    prev = g;
  }
}

TEST_CASE("M_inf reports divergence when the ratio test never passes") {
  const GridDomain d(1, 20.0, 256);
  const EpsSequence es = make_eps_sequence(0.9, 0.5, 10);
  const EnvelopeParams env = make_envelope(power_potential(0.9, 1.0), es, 1e-6, d, 2);
  CHECK_THROWS_AS(env.M_inf(10.0), envelope_divergence_error);
}

TEST_CASE("make_envelope rejects sigma >= 1 and mismatched sequences") {
  const GridDomain d(1, 20.0, 64);
  const EpsSequence es = make_eps_sequence(0.3, 0.5, 10);
  CHECK_THROWS_AS(make_envelope(power_potential(1.0, 1.0), es, 1.0, d), unsupported_regime_error);
  CHECK_THROWS_AS(make_envelope(power_potential(0.5, 1.0), es, 1.0, d), precondition_error);
}

TEST_CASE("elementary shift inequality") {
  const LemmaEx1Report big = verify_lemma_ex1(100000, 2, 1);
  CHECK(big.samples == 100000);
  CHECK(big.violations == 0);
  CHECK(big.pass());
  CHECK(big.max_ratio <= 1.0 + 1e-12);
  CHECK(verify_lemma_ex1(20000, 1, 2).pass());
  CHECK(verify_lemma_ex1(20000, 3, 3).pass());
}

TEST_CASE("envelope JSON carries the documented keys") {
  const GridDomain d(1, 20.0, 128);
  const EpsSequence es = make_eps_sequence(0.5, 0.5, 10);
  const auto j = to_json(make_envelope(power_potential(0.5, 1.0), es, 1e-3, d), es);
  for (const char* k : {"sigma", "rho", "l", "theta0", "rho_star_bound", "h", "c0", "M_inf_stop_index"})
    CHECK(j.contains(k));
  CHECK(j["theta0"].get<double>() == doctest::Approx(0.132666).epsilon(1e-5));
}
