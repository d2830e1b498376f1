#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace tunnelsplit {

using cplx = std::complex<double>;

// Units: nm, fs, eV. Mass in eV*fs^2/nm^2.
struct Constants {
  static constexpr double hbar = 0.6582119569;
  static constexpr double electron_mass = 5.685630;
};

class Particle {
 public:
  explicit Particle(double mass);
  static Particle from_electron_masses(double ratio);

  double mass() const { return mass_; }
  double energy(double k) const;
  double wavenumber(double energy) const;
  double velocity(double k) const;
  // 2m/hbar^2, converts an energy in eV to a squared wavenumber.
  double energy_to_k2() const { return 2.0 * mass_ / (Constants::hbar * Constants::hbar); }

 private:
  double mass_;
};

class KGrid {
 public:
  KGrid(double k_min, double k_max, std::size_t n_points);

  double k_min() const { return k_min_; }
  double k_max() const { return k_max_; }
  std::size_t size() const { return n_; }
  double spacing() const { return (k_max_ - k_min_) / static_cast<double>(n_ - 1); }
  double at(std::size_t i) const;
  // Trapezoid weight of node i.
  double weight(std::size_t i) const;

 private:
  double k_min_;
  double k_max_;
  std::size_t n_;
};

class XGrid {
 public:
  XGrid(double x_min, double x_max, std::size_t n_points);

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  std::size_t size() const { return n_; }
  double spacing() const { return (x_max_ - x_min_) / static_cast<double>(n_ - 1); }
  double at(std::size_t i) const;
  // Index of the node within 1e-9 spacings of x, if any.
  std::optional<std::size_t> node_at(double x) const;

  friend bool operator==(const XGrid&, const XGrid&) = default;

 private:
  double x_min_;
  double x_max_;
  std::size_t n_;
};

enum class Channel { full, transmission, reflection };

std::string_view to_string(Channel c);

// Derivative discontinuity of psi at a grid node; used to correct the
// trapezoid rule where |psi|^2 has a kink.
struct Kink {
  std::size_t index;
  cplx left_derivative;
  cplx right_derivative;
};

struct WaveField {
  XGrid grid;
  std::vector<cplx> values;
  double time = 0.0;
  Channel channel = Channel::full;
  double mass = 0.067 * Constants::electron_mass;
  std::vector<Kink> kinks;
};

double norm(const WaveField& field);
double flux(const WaveField& field, std::size_t index);
double mean_position(const WaveField& field);

}  // namespace tunnelsplit
