#include "tunnelsplit/model.hpp"

#include <cmath>

#include "tunnelsplit/errors.hpp"
#include "tunnelsplit/kernels.hpp"

namespace tunnelsplit {

Particle::Particle(double mass) : mass_(mass) {
  if (!(mass > 0.0) || !std::isfinite(mass)) throw InvalidInput("particle mass must be positive");
}

Particle Particle::from_electron_masses(double ratio) {
  return Particle(ratio * Constants::electron_mass);
}

double Particle::energy(double k) const {
  return Constants::hbar * Constants::hbar * k * k / (2.0 * mass_);
}

double Particle::wavenumber(double energy) const {
  if (energy < 0.0) throw InvalidInput("kinetic energy must be non-negative");
  return std::sqrt(energy_to_k2() * energy);
}

double Particle::velocity(double k) const { return Constants::hbar * k / mass_; }

KGrid::KGrid(double k_min, double k_max, std::size_t n_points)
    : k_min_(k_min), k_max_(k_max), n_(n_points) {
  if (!(k_min > 0.0)) throw InvalidInput("KGrid: k_min must be positive");
  if (!(k_max > k_min)) throw InvalidInput("KGrid: k_max must exceed k_min");
  if (n_points < 16) throw InvalidInput("KGrid: at least 16 points required");
}

double KGrid::at(std::size_t i) const {
  if (i + 1 == n_) return k_max_;
  return k_min_ + spacing() * static_cast<double>(i);
}

double KGrid::weight(std::size_t i) const {
  double h = spacing();
  return (i == 0 || i + 1 == n_) ? 0.5 * h : h;
}

XGrid::XGrid(double x_min, double x_max, std::size_t n_points)
    : x_min_(x_min), x_max_(x_max), n_(n_points) {
  if (!(x_max > x_min)) throw InvalidInput("XGrid: x_max must exceed x_min");
  if (n_points < 3) throw InvalidInput("XGrid: at least 3 points required");
}

double XGrid::at(std::size_t i) const {
  if (i + 1 == n_) return x_max_;
  return x_min_ + spacing() * static_cast<double>(i);
}

std::optional<std::size_t> XGrid::node_at(double x) const {
  double h = spacing();
  double r = (x - x_min_) / h;
  double i = std::round(r);
  if (i < 0.0 || i > static_cast<double>(n_ - 1)) return std::nullopt;
  if (std::abs(r - i) > 1e-9) return std::nullopt;
  return static_cast<std::size_t>(i);
}

std::string_view to_string(Channel c) {
  switch (c) {
    case Channel::full:
      return "full";
    case Channel::transmission:
      return "tr";
    case Channel::reflection:
      return "ref";
  }
  return "?";
}

namespace {

void require_finite(const WaveField& f) {
  for (const auto& v : f.values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw NumericalError("wave field contains non-finite values");
  if (f.values.size() != f.grid.size()) throw InvalidInput("wave field size does not match grid");
}

// Euler-Maclaurin term for a derivative jump of |psi|^2 at a node.
double kink_term(const WaveField& f, const Kink& k) {
  cplx psi = f.values[k.index];
  double left = 2.0 * (std::conj(psi) * k.left_derivative).real();
  double right = 2.0 * (std::conj(psi) * k.right_derivative).real();
  double h = f.grid.spacing();
  return -h * h / 12.0 * (left - right);
}

}  // namespace

double norm(const WaveField& field) {
  require_finite(field);
  auto m = kernels::density_moments(field.values, field.grid.x_min(), field.grid.spacing());
  double total = m.zeroth;
  for (const auto& k : field.kinks) total += kink_term(field, k);
  return std::max(total, 0.0);
}

double flux(const WaveField& field, std::size_t index) {
  require_finite(field);
  if (index == 0 || index + 1 >= field.values.size())
    throw InvalidInput("flux: boundary node has no central difference");
  double h = field.grid.spacing();
  cplx d = (field.values[index + 1] - field.values[index - 1]) / (2.0 * h);
  return Constants::hbar / field.mass * (std::conj(field.values[index]) * d).imag();
}

double mean_position(const WaveField& field) {
  require_finite(field);
  auto m = kernels::density_moments(field.values, field.grid.x_min(), field.grid.spacing());
  double zeroth = m.zeroth;
  double first = m.first;
  for (const auto& k : field.kinks) {
    double t = kink_term(field, k);
    zeroth += t;
    // d/dx (x|psi|^2) jumps by x times the jump of d|psi|^2/dx.
    first += field.grid.at(k.index) * t;
  }
  if (!(zeroth > 0.0)) throw ZeroNormError("mean_position: field has zero norm");
  return first / zeroth;
}

}  // namespace tunnelsplit
