#pragma once

#include <cstdint>
#include <json.hpp>
#include <vector>

#include "pplab/grid.hpp"
#include "pplab/potential.hpp"

namespace pplab {

// eps_k = 1 - theta k^{-s} with s = 1/sigma - l and l = (1/sigma - 1)/2; for sigma = 0, s = 2.
struct EpsSequence {
  double sigma = 0.0;
  double rho = 0.0;  // target weight the product must dominate
  double l = 0.0;
  double s = 0.0;
  double zeta_s = 0.0;
  double theta0 = 0.0;
  double theta = 0.0;
  int K = 0;
  std::vector<double> eps;          // eps_1 .. eps_K
  std::vector<double> rho_partial;  // eps_1 ... eps_k
  std::vector<double> gamma;        // (1 - eps_k) eps_1 ... eps_{k-1}
  double rho_star = 0.0;            // lower bound for the infinite product from the partial product and its tail
  double rho_star_bound = 0.0;      // exp(-2 theta zeta(s))

  // Upper bound for rho_k - rho_m (k < m) from the tail sum of theta j^{-s}.
  double tail_gap_bound(int k, int m) const;
};

EpsSequence make_eps_sequence(double sigma, double rho, int K);

struct EnvelopeParams {
  int n = 1;
  double sigma = 0.0;
  double l = 0.0;
  double Lambda0 = 0.0;
  double tau0 = 0.0;
  double theta0 = 0.0;
  double theta = 0.0;
  double rho_star = 0.0;
  double rho_star_bound = 0.0;
  double eps1 = 0.0;
  double c0 = 0.0;
  double L = 0.0;
  double kappa_integral = 0.0;  // int e^{-eps1 (1 - eps1) |y|} dy
  double h = 0.0;
  double F = 0.0;
  double M_inf_tau0 = 0.0;
  int M_inf_stop_index = 0;

  // Lambda0 (r + sigma/gamma)^sigma + 1
  double power(double r, double gamma) const;
  double L_inf(double r, double t) const;
  // Throws envelope_divergence_error when the ratio test is not passed within 10^4 terms.
  double M_inf(double t, int* stop_index = nullptr) const;
  double Gamma(double r, double t) const { return L_inf(r, t) + M_inf(t); }
};

// 1.05 times the largest ratio |B((|.|^D + 1) g)| / ([(|x| + D/(1-eps))^D + 1] Phi_eps|g|) over
// 20 seeded Gaussian and indicator probes on the grid.
double estimate_c0(const GridDomain& d, std::uint64_t seed = 0, int probes = 20);

EnvelopeParams make_envelope(const PotentialSpec& p, const EpsSequence& es, double tau0,
                             const GridDomain& probe_grid, std::uint64_t seed = 0);

// h^N P_{gamma_N}^N Phi_{rho_N}|f|
Field iterated_envelope(const Field& f, const EnvelopeParams& env, const EpsSequence& es, int N);

struct LemmaEx1Report {
  long samples = 0;
  long violations = 0;
  double max_ratio = 0.0;  // largest lhs / rhs seen
  bool pass() const { return violations == 0; }
};

// |y|^D e^{-g|x-y|} <= (|x| + D/((1-e) g))^D e^{-e g|x-y|} on random draws.
LemmaEx1Report verify_lemma_ex1(long samples, int n = 2, std::uint64_t seed = 0);

nlohmann::json to_json(const EnvelopeParams& env, const EpsSequence& es);

}  // namespace pplab
