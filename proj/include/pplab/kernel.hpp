#pragma once

namespace pplab {

struct BoundPair {
  double lower;
  double upper;
};

// Radial kernel of (1 - Laplacian)^{-1} in R^n, normalized so that it integrates to 1:
//   B(r) = (2 pi)^{-n/2} r^{1-n/2} K_{n/2-1}(r).
class BesselKernel {
 public:
  explicit BesselKernel(int n);

  int dimension() const { return n_; }
  double normalization() const { return norm_; }

  // +infinity at r = 0 for n >= 2.
  double operator()(double r) const;
  double gradient_magnitude(double r) const;

  // Lower and upper shape functions of the two-sided estimate, without the e^{-r} factor.
  double lower_shape(double r) const;
  double upper_shape(double r) const;
  // (lower_shape(r) e^{-r}, upper_shape(r) e^{-r})
  BoundPair bounds(double r) const;

  // Mass of B inside the ball of radius R.
  double ball_mass(double R) const;
  // Exact integral of B over the cube [-h/2, h/2]^n.
  double cell_integral(double h) const;

 private:
  int n_;
  double norm_;
};

// H = B + |grad B| when the gradient is included, H = B otherwise.
class CompositeKernel {
 public:
  CompositeKernel(BesselKernel base, bool include_gradient)
      : base_(base), include_gradient_(include_gradient) {}

  const BesselKernel& base() const { return base_; }
  bool include_gradient() const { return include_gradient_; }
  double operator()(double r) const;

 private:
  BesselKernel base_;
  bool include_gradient_;
};

}  // namespace pplab
