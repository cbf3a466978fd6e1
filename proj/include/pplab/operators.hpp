#pragma once

#include <Eigen/Core>
#include <vector>

#include "pplab/grid.hpp"
#include "pplab/potential.hpp"

namespace pplab {

enum class Backend { spectral, quadrature };

// Quadrature backends cost O(M^{2n}); beyond this many points they refuse unless forced.
inline constexpr std::size_t quadrature_point_cap = std::size_t{1} << 14;

// (1 - Laplacian)^{-1} through the multiplier 1/(1+|xi|^2) on a 2x zero-padded box.
Field apply_B_spectral(const Field& f);

// Direct lattice sum with the exact self-cell integral plus moment-matching corrections on
// the nearest stencil points. All weights are positive.
Field apply_B_quadrature(const Field& f, bool force = false);

Field apply_B(const Field& f, Backend backend);

struct StencilWeights {
  GridDomain domain;
  // Offsets in [-(M-1), M-1]^n, row-major with side 2M-1.
  Eigen::ArrayXd table;
  // Highest moment matched exactly on the infinite lattice (4, 2 or 0).
  int order = 0;
  double min_weight = 0.0;

  double at(const std::array<int, 3>& off) const;
};

const StencilWeights& bessel_weights(const GridDomain& d);
// Weights of the derivative kernel d_k B; antisymmetric, matched through third moments.
const StencilWeights& gradient_weights(const GridDomain& d, int axis);

// Direct sum out_i = sum_j w(i-j) v_j.
Eigen::ArrayXd stencil_apply(const StencilWeights& w, const Eigen::ArrayXd& v);

// phi -> B(V(.,t) phi)
Field apply_BV(const Field& f, const PotentialSpec& p, double t, Backend backend = Backend::spectral);
Field iterate_BV(const Field& f, const PotentialSpec& p, double t, int N,
                 Backend backend = Backend::spectral);

Eigen::ArrayXd B_spectral_values(const GridDomain& d, const Eigen::ArrayXd& v);

// Drift term: sum_k d_k B * (b_k phi).
Field apply_D_b(const Field& f, const ConvectionSpec& cs, double t);
Field apply_D_b_quadrature(const Field& f, const ConvectionSpec& cs, double t, bool force = false);
Eigen::ArrayXd D_b_spectral_values(const GridDomain& d, const Eigen::ArrayXd& v, const ConvectionSpec& cs,
                                   double t);

// Time-indexed fields; linear interpolation between stored times, constant if only one is stored.
struct FieldHistory {
  GridDomain domain;
  Gauge gauge = Gauge::mu;
  std::vector<double> times;
  std::vector<Eigen::ArrayXd> values;

  static FieldHistory constant(const Field& f);
  bool empty() const { return times.empty(); }
  Eigen::ArrayXd at(double t) const;
};

// Nodes 0 = tau_0 < ... < tau_m = t with ceil(t * quad_steps) uniform intervals (at least one).
std::vector<double> time_nodes(double t, int quad_steps);

// Cumulative trapezoid of B(V(tau) phi(tau)) over the given nodes; entry j is the integral to tau_j.
std::vector<Eigen::ArrayXd> cumulative_Bhat_V(const GridDomain& d, const std::vector<double>& nodes,
                                              const std::vector<Eigen::ArrayXd>& phi, const PotentialSpec& p);

// int_0^t B(V(.,tau) phi(tau)) dtau by the composite trapezoid rule.
Field apply_Bhat_V(const FieldHistory& f, const PotentialSpec& p, double t, int quad_steps = 64);
// N-fold composition, each factor integrated from 0 to the running time.
Field iterate_Bhat_V(const FieldHistory& f, const PotentialSpec& p, double t, int N, int quad_steps = 64);

}  // namespace pplab
