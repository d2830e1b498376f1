#include <atomic>
#include <cstdlib>
#include <string>

#include "tunnelsplit/errors.hpp"
#include "tunnelsplit/kernels.hpp"

namespace tunnelsplit::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(TUNNELSPLIT_BUILD_AVX2) && defined(__x86_64__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend detect() {
  if (const char* env = std::getenv("TUNNELSPLIT_SIMD")) {
    std::string v(env);
    if (v == "scalar") return Backend::scalar;
    if (v == "avx2" && backend_available(Backend::avx2)) return Backend::avx2;
    if (v == "neon" && backend_available(Backend::neon)) return Backend::neon;
  }
  if (backend_available(Backend::avx2)) return Backend::avx2;
  if (backend_available(Backend::neon)) return Backend::neon;
  return Backend::scalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> b{detect()};
  return b;
}

}  // namespace

std::string_view to_string(Backend b) {
  switch (b) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
    case Backend::neon:
      return "neon";
  }
  return "?";
}

bool backend_available(Backend b) {
  switch (b) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
      return cpu_has_avx2();
    case Backend::neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Backend active_backend() { return current().load(); }

void set_backend(Backend b) {
  if (!backend_available(b))
    throw InvalidInput("SIMD backend not available: " + std::string(to_string(b)));
  current().store(b);
}

void plane_wave_sums(std::span<const PlaneWaveSpectrum* const> spectra, double x,
                     std::span<std::complex<double>> out) {
  switch (active_backend()) {
    case Backend::avx2:
      return avx2::plane_wave_sums(spectra, x, out);
    case Backend::neon:
      return neon::plane_wave_sums(spectra, x, out);
    default:
      return scalar::plane_wave_sums(spectra, x, out);
  }
}

Moments density_moments(std::span<const std::complex<double>> psi, double x0, double dx) {
  switch (active_backend()) {
    case Backend::avx2:
      return avx2::density_moments(psi, x0, dx);
    case Backend::neon:
      return neon::density_moments(psi, x0, dx);
    default:
      return scalar::density_moments(psi, x0, dx);
  }
}

}  // namespace tunnelsplit::kernels
