#pragma once

#include <Eigen/Core>
#include <array>
#include <complex>
#include <functional>

#include "pplab/grid.hpp"

namespace pplab {

// Zero-padded transforms on a box of P = 2M points per dimension with the spacing of the grid.
class PaddedSpectrum {
 public:
  explicit PaddedSpectrum(const GridDomain& d);

  int padded() const { return P_; }
  std::size_t padded_size() const;
  // Continuous angular frequency of padded index k: 2 pi k' / (P h), k' in [-P/2, P/2).
  double frequency(int k) const;
  bool nyquist(int k) const { return k == P_ / 2; }

  Eigen::ArrayXcd forward(const Eigen::ArrayXd& values) const;
  // Inverse transform, real part, cropped back to the first M points per dimension.
  Eigen::ArrayXd inverse_crop(Eigen::ArrayXcd spectrum) const;

  // Multiplies the spectrum in place by m(k) where k holds the padded indices.
  void multiply(Eigen::ArrayXcd& spectrum,
                const std::function<std::complex<double>(const std::array<int, 3>&)>& m) const;

  // In-place transform of data already laid out on the padded box.
  void transform(Eigen::ArrayXcd& data, bool inverse) const;

 private:
  GridDomain d_;
  int P_;
};

// out_i = sum_j k(i - j) v_j over the grid (no cell volume factor), computed with a padded FFT.
Eigen::ArrayXd linear_convolve(const GridDomain& d, const Eigen::ArrayXd& values,
                               const std::function<double(const std::array<int, 3>&)>& kernel);

}  // namespace pplab
