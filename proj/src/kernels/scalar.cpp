#include <algorithm>
#include <cmath>
#include <vector>

#include "tunnelsplit/kernels.hpp"

namespace tunnelsplit::kernels::scalar {

void plane_wave_sums(std::span<const PlaneWaveSpectrum* const> spectra, double x,
                     std::span<std::complex<double>> out) {
  if (spectra.empty()) return;
  const std::size_t n = spectra[0]->padded_size();
  const double k0 = spectra[0]->k_first();
  const double dk = spectra[0]->dk();
  const std::size_t ns = spectra.size();
  std::vector<double> re(ns, 0.0), im(ns, 0.0);
  const double wr = std::cos(dk * x);
  const double wi = std::sin(dk * x);
  for (std::size_t j0 = 0; j0 < n; j0 += kReseedInterval) {
    const double phase = (k0 + static_cast<double>(j0) * dk) * x;
    double zr = std::cos(phase);
    double zi = std::sin(phase);
    const std::size_t end = std::min(n, j0 + kReseedInterval);
    for (std::size_t j = j0; j < end; ++j) {
      for (std::size_t s = 0; s < ns; ++s) {
        const PlaneWaveSpectrum& c = *spectra[s];
        re[s] += zr * c.sum_re()[j] + zi * c.diff_im()[j];
        im[s] += zr * c.sum_im()[j] + zi * c.diff_re()[j];
      }
      const double t = zr * wr - zi * wi;
      zi = zr * wi + zi * wr;
      zr = t;
    }
  }
  for (std::size_t s = 0; s < ns; ++s) out[s] = {re[s], im[s]};
}

Moments density_moments(std::span<const std::complex<double>> psi, double x0, double dx) {
  const std::size_t n = psi.size();
  if (n == 0) return {0.0, 0.0};
  double s0 = 0.0;
  double s1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::norm(psi[i]);
    s0 += d;
    s1 += static_cast<double>(i) * d;
  }
  const double d0 = std::norm(psi[0]);
  const double dn = std::norm(psi[n - 1]);
  s0 -= 0.5 * (d0 + dn);
  s1 -= 0.5 * static_cast<double>(n - 1) * dn;
  return {dx * s0, dx * (x0 * s0 + dx * s1)};
}

}  // namespace tunnelsplit::kernels::scalar
