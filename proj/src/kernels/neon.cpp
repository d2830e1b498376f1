#include <algorithm>
#include <cmath>

#include "tunnelsplit/kernels.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>
#endif

namespace tunnelsplit::kernels::neon {

#if defined(__aarch64__)

namespace {

constexpr std::size_t kGroup = 4;

void sums_group(const PlaneWaveSpectrum* const* spectra, std::size_t ns, double x,
                std::complex<double>* out) {
  const std::size_t n = spectra[0]->padded_size();
  const double k0 = spectra[0]->k_first();
  const double dk = spectra[0]->dk();
  float64x2_t re[kGroup], im[kGroup];
  for (std::size_t s = 0; s < ns; ++s) re[s] = im[s] = vdupq_n_f64(0.0);
  const float64x2_t wr = vdupq_n_f64(std::cos(2.0 * dk * x));
  const float64x2_t wi = vdupq_n_f64(std::sin(2.0 * dk * x));
  for (std::size_t j0 = 0; j0 < n; j0 += kReseedInterval) {
    double seed_r[2], seed_i[2];
    for (int l = 0; l < 2; ++l) {
      const double phase = (k0 + static_cast<double>(j0 + l) * dk) * x;
      seed_r[l] = std::cos(phase);
      seed_i[l] = std::sin(phase);
    }
    float64x2_t zr = vld1q_f64(seed_r);
    float64x2_t zi = vld1q_f64(seed_i);
    const std::size_t end = std::min(n, j0 + kReseedInterval);
    for (std::size_t j = j0; j < end; j += 2) {
      for (std::size_t s = 0; s < ns; ++s) {
        const PlaneWaveSpectrum& c = *spectra[s];
        re[s] = vfmaq_f64(re[s], zr, vld1q_f64(c.sum_re() + j));
        re[s] = vfmaq_f64(re[s], zi, vld1q_f64(c.diff_im() + j));
        im[s] = vfmaq_f64(im[s], zr, vld1q_f64(c.sum_im() + j));
        im[s] = vfmaq_f64(im[s], zi, vld1q_f64(c.diff_re() + j));
      }
      const float64x2_t t = vfmsq_f64(vmulq_f64(zr, wr), zi, wi);
      zi = vfmaq_f64(vmulq_f64(zi, wr), zr, wi);
      zr = t;
    }
  }
  for (std::size_t s = 0; s < ns; ++s) out[s] = {vaddvq_f64(re[s]), vaddvq_f64(im[s])};
}

}  // namespace

void plane_wave_sums(std::span<const PlaneWaveSpectrum* const> spectra, double x,
                     std::span<std::complex<double>> out) {
  for (std::size_t s0 = 0; s0 < spectra.size(); s0 += kGroup) {
    const std::size_t ns = std::min(kGroup, spectra.size() - s0);
    sums_group(spectra.data() + s0, ns, x, out.data() + s0);
  }
}

Moments density_moments(std::span<const std::complex<double>> psi, double x0, double dx) {
  const std::size_t n = psi.size();
  if (n == 0) return {0.0, 0.0};
  const double* p = reinterpret_cast<const double*>(psi.data());
  float64x2_t s0 = vdupq_n_f64(0.0);
  float64x2_t s1 = vdupq_n_f64(0.0);
  double idx_init[2] = {0.0, 1.0};
  float64x2_t idx = vld1q_f64(idx_init);
  const float64x2_t step = vdupq_n_f64(2.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t a = vld1q_f64(p + 2 * i);
    float64x2_t b = vld1q_f64(p + 2 * i + 2);
    float64x2_t d = vpaddq_f64(vmulq_f64(a, a), vmulq_f64(b, b));
    s0 = vaddq_f64(s0, d);
    s1 = vfmaq_f64(s1, idx, d);
    idx = vaddq_f64(idx, step);
  }
  double t0 = vaddvq_f64(s0);
  double t1 = vaddvq_f64(s1);
  for (; i < n; ++i) {
    const double d = std::norm(psi[i]);
    t0 += d;
    t1 += static_cast<double>(i) * d;
  }
  const double d0 = std::norm(psi[0]);
  const double dn = std::norm(psi[n - 1]);
  t0 -= 0.5 * (d0 + dn);
  t1 -= 0.5 * static_cast<double>(n - 1) * dn;
  return {dx * t0, dx * (x0 * t0 + dx * t1)};
}

#else

void plane_wave_sums(std::span<const PlaneWaveSpectrum* const> spectra, double x,
                     std::span<std::complex<double>> out) {
  scalar::plane_wave_sums(spectra, x, out);
}

Moments density_moments(std::span<const std::complex<double>> psi, double x0, double dx) {
  return scalar::density_moments(psi, x0, dx);
}

#endif

}  // namespace tunnelsplit::kernels::neon
