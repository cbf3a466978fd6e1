#pragma once

namespace pplab {

// Modified Bessel function of the second kind for the orders a kernel in
// dimension <= 3 needs: nu in {-1/2, 0, 1/2, 1, 3/2}.
double bessel_k(double nu, double r);

double bessel_k0(double r);
double bessel_k1(double r);

// Riemann zeta for s > 1: 10^6-term partial sum plus an Euler-Maclaurin tail.
double zeta(double s);

// Surface area of the unit sphere in R^n.
double sphere_area(int n);

}  // namespace pplab
