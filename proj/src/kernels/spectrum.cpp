#include <stdexcept>

#include "tunnelsplit/errors.hpp"
#include "tunnelsplit/kernels.hpp"

namespace tunnelsplit::kernels {

PlaneWaveSpectrum::PlaneWaveSpectrum(double k_first, double dk,
                                     std::span<const std::complex<double>> forward,
                                     std::span<const std::complex<double>> backward)
    : k_first_(k_first), dk_(dk), n_(forward.size()) {
  if (!backward.empty() && backward.size() != forward.size())
    throw InvalidInput("PlaneWaveSpectrum: forward/backward size mismatch");
  std::size_t padded = (n_ + 3) / 4 * 4;
  sr_.assign(padded, 0.0);
  si_.assign(padded, 0.0);
  dr_.assign(padded, 0.0);
  di_.assign(padded, 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    std::complex<double> f = forward[j];
    std::complex<double> b = backward.empty() ? std::complex<double>{} : backward[j];
    sr_[j] = f.real() + b.real();
    si_[j] = f.imag() + b.imag();
    dr_[j] = f.real() - b.real();
    di_[j] = b.imag() - f.imag();
  }
}

}  // namespace tunnelsplit::kernels
