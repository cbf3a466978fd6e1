#pragma once

#include <json.hpp>
#include <limits>
#include <string>
#include <vector>

#include "pplab/evolution.hpp"
#include "pplab/grid.hpp"
#include "pplab/potential.hpp"

namespace pplab {

enum class Verdict { GlobalExists, NoGlobalSolution, InstantaneousBlowup, CompleteBlowupAnyPotential, Undetermined };

std::string to_string(Verdict v);

struct Classification {
  Verdict verdict = Verdict::Undetermined;
  std::string citation;
  nlohmann::json certificate = nlohmann::json::object();
};

// min{1, R0^{-sigma} / ||Lambda||_{L^inf(0,T)}}
double c_T(const PotentialSpec& p, double T);

// sup over tau in (0, horizon] of c_tau Lambda_*(tau): a geometric grid on [1e-3, min(horizon, 100)]
// plus the closed-form limit when the horizon is infinite.
double sup_c_lambda_star(const PotentialSpec& p, double horizon = std::numeric_limits<double>::infinity());

// Threshold the sup above must exceed for the sigma = 1 nonexistence branch.
double nonexistence_threshold(const InitialSpec& i);

Classification classify(const PotentialSpec& p, const InitialSpec& i,
                        double horizon = std::numeric_limits<double>::infinity());

struct BlowupIndicator {
  std::vector<double> radii;
  std::vector<double> partials;    // K_L(x)
  std::vector<double> increments;  // K_{L_i} - K_{L_{i-1}}, first entry K_{L_0}
  bool divergent = false;
  bool convergent = false;
  bool datum_positive = true;
};

// K_L(x) = int_{|y| <= L} lower_shape(|y|) e^{beta |x-y|^sigma - |y|} dy; n = x_probe.size().
BlowupIndicator blowup_indicator(const InitialSpec& i, double beta, double sigma, const std::vector<double>& x_probe,
                                 const std::vector<double>& L_sweep);

// (1 - eps) c_T Lambda_*(tau0) / 2 with T = tau0.
double default_beta(const PotentialSpec& p, double eps = 0.2, double tau0 = 1.0);

struct SlopeFit {
  double t = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  double floor = 0.0;
  int shells = 0;
  bool pass = false;
};

struct LowerBoundReport {
  std::vector<SlopeFit> fits;
  bool pass = false;
};

// Least-squares slope of log mu - delta |x|^{alpha_+} against |x|^sigma on |x| in [L/4, L/2] for every
// snapshot with t >= tau0; passes when slope >= 0.95 (1 - eps) c_t Lambda_*(t).
LowerBoundReport verify_lower_bound(const EvolutionResult& r, const PotentialSpec& p, const InitialSpec& i,
                                    double eps, double tau0);

struct DecayFloorReport {
  double rate = 0.0;
  double offset = 0.0;
  bool trivial = false;
  bool pass = false;
  std::string note;
};

// Linear fit of log u(., tau0) against |x| on the annulus; passes when the rate is >= -delta.
DecayFloorReport verify_decay_floor(const EvolutionResult& r, double tau0, double delta);

enum class Lemma { Non1, BlowerExp };

struct BoundCertificate {
  Lemma lemma = Lemma::Non1;
  int n = 1;
  double delta = 0.0;
  double alpha = 0.0;
  double gamma = 0.0;
  double R = 0.0;
  double d_pow = 0.0;
  bool found = false;
  double d0 = std::numeric_limits<double>::quiet_NaN();
  double eta0 = std::numeric_limits<double>::quiet_NaN();
  double eta1 = 0.0;
  double eta2 = 0.0;
  double lower_constant = 0.0;  // inf of B / (lower_shape e^{-r})
  double min_ratio = 0.0;
  std::vector<double> candidate_ratios;
};

// First d in the candidate list with B(r^d e^{delta r^alpha}) >= gamma r^d e^{delta r^alpha} on the interior.
BoundCertificate certify_lemma_non1(const GridDomain& grid, double delta, double alpha, double gamma,
                                    const std::vector<double>& d_candidates);

// eta0 for B(|.|^d e^{delta|.|^alpha} 1_{|.| >= R}) >= eta0 2^{-d} |x|^d e^{delta|x|^alpha}, checked on the interior.
BoundCertificate certify_lemma_blower_exp(const GridDomain& grid, double d_pow, double delta, double alpha, double R);

struct ComparisonReport {
  bool pass = true;
  double max_violation = 0.0;
  double at_time = 0.0;
  std::size_t at_index = 0;
  int shared_times = 0;
};

// u <= v + 1e-7 at every shared snapshot time.
ComparisonReport check_comparison(const EvolutionResult& u_run, const EvolutionResult& v_run);

struct GronwallReport {
  std::vector<double> s;
  int first_below = -1;  // first k with s_k < 1e-10
  bool eventually_decreasing = false;
  bool pass = false;
};

// s_k = (t^k/k!) ||B V0bar^k w0||_inf with V0bar = sup_{[0,t]}|Lambda| |x|^sigma + 1.
GronwallReport gronwall_decay_check(const Field& w0, const PotentialSpec& p, double t, int N_max);

nlohmann::json to_json(const Classification& c);
nlohmann::json to_json(const BlowupIndicator& b);
nlohmann::json to_json(const LowerBoundReport& r);
nlohmann::json to_json(const DecayFloorReport& r);
nlohmann::json to_json(const BoundCertificate& c);
nlohmann::json to_json(const ComparisonReport& r);
nlohmann::json to_json(const GronwallReport& r);

}  // namespace pplab
