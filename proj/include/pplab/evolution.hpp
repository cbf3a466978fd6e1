#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "pplab/grid.hpp"
#include "pplab/operators.hpp"
#include "pplab/potential.hpp"

namespace pplab {

struct SeriesParams {
  int max_terms = 64;
  double tol = 1e-10;
  std::vector<double> time_grid{1.0};
  double rho = 0.5;
  int quad_steps = 64;
  // Skips the regime and membership preconditions.
  bool force_unsafe = false;

  void validate() const;
};

enum class SolveStatus { converged, truncated, diverged };
enum class SolveMethod { autonomous, picard, convection };

std::string to_string(SolveStatus s);
std::string to_string(SolveMethod m);

struct EvolutionResult {
  SolveMethod method = SolveMethod::autonomous;
  SolveStatus status = SolveStatus::converged;
  GridDomain domain;
  Field u0;
  std::vector<double> times;
  std::vector<Field> snapshots;  // gauge u
  // Autonomous: weighted norm of (t^k/k!) BV^k u0 per output time and k.
  // Picard: weighted norm of the per-sweep change per output time.
  std::vector<std::vector<double>> term_norms;
  std::vector<double> residuals;
  int iterations = 0;
  double rho = 0.5;
  double tol = 1e-10;

  // Autonomous runs keep p_k = (T^k/k!) BV^k u0 at T = times.back().
  double series_T = 0.0;
  std::vector<Eigen::ArrayXd> series_terms;
  // Picard and convection runs keep mu at every quadrature node.
  FieldHistory history;
  std::vector<std::size_t> output_nodes;
};

// mu(t) = sum_k (t^k/k!) BV0^k u0 with term_k = (t/k) BV0 term_{k-1}.
EvolutionResult solve_autonomous(const Field& u0, const PotentialSpec& p, const SeriesParams& sp);

// Fixed point of mu = u0 + int_0^t B(V mu) on a trapezoid node history.
EvolutionResult solve_picard(const Field& u0, const PotentialSpec& p, const SeriesParams& sp);
EvolutionResult solve_picard(const Field& u0, const PotentialSpec& p, const SeriesParams& sp, int quad_steps);

// Same iteration with the integrand B(W mu) + D_b mu, W = 1 + a - div b.
EvolutionResult solve_convection(const Field& u0, const PotentialSpec& p, const ConvectionSpec& cs,
                                 const SeriesParams& sp);

// Sup over the inner half of the box of |mu(t) - u0 - int_0^t (B(V mu) + D_b mu)|.
std::vector<double> mild_residual(const EvolutionResult& r, const PotentialSpec& p,
                                  const ConvectionSpec* cs = nullptr);

// Drops autonomous series terms beyond index N and rebuilds the snapshots.
void truncate_series(EvolutionResult& r, int N);

nlohmann::json manifest(const EvolutionResult& r);

}  // namespace pplab
