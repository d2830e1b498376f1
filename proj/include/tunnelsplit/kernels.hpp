#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace tunnelsplit::kernels {

enum class Backend { scalar, avx2, neon };

std::string_view to_string(Backend b);
bool backend_available(Backend b);
// Best available backend, unless TUNNELSPLIT_SIMD names another one.
Backend active_backend();
// Throws InvalidInput if the backend is not available on this machine.
void set_backend(Backend b);

// Coefficients of S(x) = sum_j c+_j e^{i k_j x} + c-_j e^{-i k_j x} on a
// uniform k grid, stored as the sums and differences the kernels consume.
// Length is padded to a multiple of 4 with zeros.
class PlaneWaveSpectrum {
 public:
  PlaneWaveSpectrum() = default;
  PlaneWaveSpectrum(double k_first, double dk, std::span<const std::complex<double>> forward,
                    std::span<const std::complex<double>> backward);

  double k_first() const { return k_first_; }
  double dk() const { return dk_; }
  std::size_t size() const { return n_; }
  std::size_t padded_size() const { return sr_.size(); }

  // Re(c+ + c-), Im(c+ + c-), Re(c+ - c-), Im(c- - c+)
  const double* sum_re() const { return sr_.data(); }
  const double* sum_im() const { return si_.data(); }
  const double* diff_re() const { return dr_.data(); }
  const double* diff_im() const { return di_.data(); }

 private:
  double k_first_ = 0.0;
  double dk_ = 0.0;
  std::size_t n_ = 0;
  std::vector<double> sr_, si_, dr_, di_;
};

// out[s] = S_s(x) for every spectrum s; all spectra must share k grid and size.
void plane_wave_sums(std::span<const PlaneWaveSpectrum* const> spectra, double x,
                     std::span<std::complex<double>> out);

struct Moments {
  double zeroth;
  double first;
};

// Trapezoid sums of |psi|^2 and x|psi|^2 on x_i = x0 + i*dx.
Moments density_moments(std::span<const std::complex<double>> psi, double x0, double dx);

// Per-backend entry points, exposed for equivalence tests.
namespace scalar {
void plane_wave_sums(std::span<const PlaneWaveSpectrum* const> spectra, double x,
                     std::span<std::complex<double>> out);
Moments density_moments(std::span<const std::complex<double>> psi, double x0, double dx);
}  // namespace scalar

namespace avx2 {
void plane_wave_sums(std::span<const PlaneWaveSpectrum* const> spectra, double x,
                     std::span<std::complex<double>> out);
Moments density_moments(std::span<const std::complex<double>> psi, double x0, double dx);
}  // namespace avx2

namespace neon {
void plane_wave_sums(std::span<const PlaneWaveSpectrum* const> spectra, double x,
                     std::span<std::complex<double>> out);
Moments density_moments(std::span<const std::complex<double>> psi, double x0, double dx);
}  // namespace neon

// Phasors are re-seeded from sin/cos every this many k steps.
inline constexpr std::size_t kReseedInterval = 64;

}  // namespace tunnelsplit::kernels
