#include "pplab/fft.hpp"

#include <unsupported/Eigen/FFT>
#include <numbers>
#include <vector>

namespace pplab {

PaddedSpectrum::PaddedSpectrum(const GridDomain& d) : d_(d), P_(2 * d.M) {}

std::size_t PaddedSpectrum::padded_size() const {
  std::size_t s = 1;
  for (int k = 0; k < d_.n; ++k) s *= static_cast<std::size_t>(P_);
  return s;
}

double PaddedSpectrum::frequency(int k) const {
  const int signed_k = k < P_ / 2 ? k : k - P_;
  return 2.0 * std::numbers::pi * signed_k / (P_ * d_.h());
}

void PaddedSpectrum::transform(Eigen::ArrayXcd& data, bool inverse) const {
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> line(P_), out(P_);
  const std::size_t total = padded_size();
  for (int axis = 0; axis < d_.n; ++axis) {
    std::size_t stride = 1;
    for (int k = axis + 1; k < d_.n; ++k) stride *= P_;
    const std::size_t block = stride * P_;
    for (std::size_t base = 0; base < total; base += block) {
      for (std::size_t off = 0; off < stride; ++off) {
        const std::size_t start = base + off;
        for (int i = 0; i < P_; ++i) line[i] = data[static_cast<Eigen::Index>(start + i * stride)];
        if (inverse)
          fft.inv(out, line);
        else
          fft.fwd(out, line);
        for (int i = 0; i < P_; ++i) data[static_cast<Eigen::Index>(start + i * stride)] = out[i];
      }
    }
  }
}

Eigen::ArrayXcd PaddedSpectrum::forward(const Eigen::ArrayXd& values) const {
  Eigen::ArrayXcd data = Eigen::ArrayXcd::Zero(static_cast<Eigen::Index>(padded_size()));
  const std::size_t m = d_.size();
  for (std::size_t flat = 0; flat < m; ++flat) {
    const auto idx = d_.multi_index(flat);
    std::size_t p = 0;
    for (int k = 0; k < d_.n; ++k) p = p * P_ + idx[k];
    data[static_cast<Eigen::Index>(p)] = values[static_cast<Eigen::Index>(flat)];
  }
  transform(data, false);
  return data;
}

Eigen::ArrayXd PaddedSpectrum::inverse_crop(Eigen::ArrayXcd spectrum) const {
  transform(spectrum, true);
  const std::size_t m = d_.size();
  Eigen::ArrayXd out(static_cast<Eigen::Index>(m));
  for (std::size_t flat = 0; flat < m; ++flat) {
    const auto idx = d_.multi_index(flat);
    std::size_t p = 0;
    for (int k = 0; k < d_.n; ++k) p = p * P_ + idx[k];
    out[static_cast<Eigen::Index>(flat)] = spectrum[static_cast<Eigen::Index>(p)].real();
  }
  return out;
}

void PaddedSpectrum::multiply(
    Eigen::ArrayXcd& spectrum,
    const std::function<std::complex<double>(const std::array<int, 3>&)>& m) const {
  const std::size_t total = padded_size();
  std::array<int, 3> k{0, 0, 0};
  for (std::size_t p = 0; p < total; ++p) {
    std::size_t rest = p;
    for (int a = d_.n - 1; a >= 0; --a) {
      k[a] = static_cast<int>(rest % P_);
      rest /= P_;
    }
    spectrum[static_cast<Eigen::Index>(p)] *= m(k);
  }
}

Eigen::ArrayXd linear_convolve(const GridDomain& d, const Eigen::ArrayXd& values,
                               const std::function<double(const std::array<int, 3>&)>& kernel) {
  PaddedSpectrum ps(d);
  const int P = ps.padded();
  Eigen::ArrayXd table = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(ps.padded_size()));
  std::array<int, 3> off{0, 0, 0};
  for (std::size_t p = 0; p < ps.padded_size(); ++p) {
    std::size_t rest = p;
    bool skip = false;
    for (int a = d.n - 1; a >= 0; --a) {
      const int k = static_cast<int>(rest % P);
      rest /= P;
      off[a] = k < P / 2 ? k : k - P;
      if (off[a] == -P / 2) skip = true;
    }
    if (!skip) table[static_cast<Eigen::Index>(p)] = kernel(off);
  }
  Eigen::ArrayXcd kt = table.cast<std::complex<double>>();
  ps.transform(kt, false);
  Eigen::ArrayXcd fv = ps.forward(values);
  fv *= kt;
  return ps.inverse_crop(std::move(fv));
}

}  // namespace pplab
