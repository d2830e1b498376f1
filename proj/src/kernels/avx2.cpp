#include <algorithm>
#include <cmath>

#include "tunnelsplit/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>
#define TUNNELSPLIT_HAVE_AVX2 1
#endif

namespace tunnelsplit::kernels::avx2 {

#ifdef TUNNELSPLIT_HAVE_AVX2

namespace {

double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

constexpr std::size_t kGroup = 4;

__m256d cmul_re(__m256d ar, __m256d ai, __m256d br, __m256d bi) {
  return _mm256_fmsub_pd(ar, br, _mm256_mul_pd(ai, bi));
}

__m256d cmul_im(__m256d ar, __m256d ai, __m256d br, __m256d bi) {
  return _mm256_fmadd_pd(ar, bi, _mm256_mul_pd(ai, br));
}

// Two interleaved phasor chains (lanes j..j+3 and j+4..j+7) to hide FMA latency.
void sums_group(const PlaneWaveSpectrum* const* spectra, std::size_t ns, double x,
                std::complex<double>* out) {
  const std::size_t n = spectra[0]->padded_size();
  const double k0 = spectra[0]->k_first();
  const double dk = spectra[0]->dk();
  __m256d re_a[kGroup], im_a[kGroup], re_b[kGroup], im_b[kGroup];
  for (std::size_t s = 0; s < ns; ++s) re_a[s] = im_a[s] = re_b[s] = im_b[s] = _mm256_setzero_pd();

  // Powers of e^{i dk x} for the lane offsets and the two strides.
  const std::complex<double> w1 = std::polar(1.0, dk * x);
  const std::complex<double> w2 = w1 * w1;
  const std::complex<double> w3 = w2 * w1;
  const std::complex<double> w4 = w2 * w2;
  const std::complex<double> w8 = w4 * w4;
  const __m256d lane_r = _mm256_set_pd(w3.real(), w2.real(), w1.real(), 1.0);
  const __m256d lane_i = _mm256_set_pd(w3.imag(), w2.imag(), w1.imag(), 0.0);
  const __m256d w4r = _mm256_set1_pd(w4.real());
  const __m256d w4i = _mm256_set1_pd(w4.imag());
  const __m256d w8r = _mm256_set1_pd(w8.real());
  const __m256d w8i = _mm256_set1_pd(w8.imag());

  for (std::size_t j0 = 0; j0 < n; j0 += kReseedInterval) {
    const std::complex<double> seed = std::polar(1.0, (k0 + static_cast<double>(j0) * dk) * x);
    const __m256d sr = _mm256_set1_pd(seed.real());
    const __m256d si = _mm256_set1_pd(seed.imag());
    __m256d zr_a = cmul_re(sr, si, lane_r, lane_i);
    __m256d zi_a = cmul_im(sr, si, lane_r, lane_i);
    __m256d zr_b = cmul_re(zr_a, zi_a, w4r, w4i);
    __m256d zi_b = cmul_im(zr_a, zi_a, w4r, w4i);
    const std::size_t end = std::min(n, j0 + kReseedInterval);
    std::size_t j = j0;
    for (; j + 8 <= end; j += 8) {
      for (std::size_t s = 0; s < ns; ++s) {
        const PlaneWaveSpectrum& c = *spectra[s];
        re_a[s] = _mm256_fmadd_pd(zr_a, _mm256_loadu_pd(c.sum_re() + j), re_a[s]);
        im_a[s] = _mm256_fmadd_pd(zr_a, _mm256_loadu_pd(c.sum_im() + j), im_a[s]);
        re_b[s] = _mm256_fmadd_pd(zr_b, _mm256_loadu_pd(c.sum_re() + j + 4), re_b[s]);
        im_b[s] = _mm256_fmadd_pd(zr_b, _mm256_loadu_pd(c.sum_im() + j + 4), im_b[s]);
        re_a[s] = _mm256_fmadd_pd(zi_a, _mm256_loadu_pd(c.diff_im() + j), re_a[s]);
        im_a[s] = _mm256_fmadd_pd(zi_a, _mm256_loadu_pd(c.diff_re() + j), im_a[s]);
        re_b[s] = _mm256_fmadd_pd(zi_b, _mm256_loadu_pd(c.diff_im() + j + 4), re_b[s]);
        im_b[s] = _mm256_fmadd_pd(zi_b, _mm256_loadu_pd(c.diff_re() + j + 4), im_b[s]);
      }
      const __m256d ta = cmul_re(zr_a, zi_a, w8r, w8i);
      zi_a = cmul_im(zr_a, zi_a, w8r, w8i);
      zr_a = ta;
      const __m256d tb = cmul_re(zr_b, zi_b, w8r, w8i);
      zi_b = cmul_im(zr_b, zi_b, w8r, w8i);
      zr_b = tb;
    }
    if (j < end) {
      // Remaining four lanes (padded size is a multiple of 4).
      for (std::size_t s = 0; s < ns; ++s) {
        const PlaneWaveSpectrum& c = *spectra[s];
        re_a[s] = _mm256_fmadd_pd(zr_a, _mm256_loadu_pd(c.sum_re() + j), re_a[s]);
        re_a[s] = _mm256_fmadd_pd(zi_a, _mm256_loadu_pd(c.diff_im() + j), re_a[s]);
        im_a[s] = _mm256_fmadd_pd(zr_a, _mm256_loadu_pd(c.sum_im() + j), im_a[s]);
        im_a[s] = _mm256_fmadd_pd(zi_a, _mm256_loadu_pd(c.diff_re() + j), im_a[s]);
      }
    }
  }
  for (std::size_t s = 0; s < ns; ++s)
    out[s] = {hsum(_mm256_add_pd(re_a[s], re_b[s])), hsum(_mm256_add_pd(im_a[s], im_b[s]))};
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
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  // hadd leaves node order (i, i+2, i+1, i+3).
  __m256d idx = _mm256_set_pd(3.0, 1.0, 2.0, 0.0);
  const __m256d step = _mm256_set1_pd(4.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d a = _mm256_loadu_pd(p + 2 * i);
    __m256d b = _mm256_loadu_pd(p + 2 * i + 4);
    __m256d d = _mm256_hadd_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b));
    s0 = _mm256_add_pd(s0, d);
    s1 = _mm256_fmadd_pd(idx, d, s1);
    idx = _mm256_add_pd(idx, step);
  }
  double t0 = hsum(s0);
  double t1 = hsum(s1);
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

}  // namespace tunnelsplit::kernels::avx2
