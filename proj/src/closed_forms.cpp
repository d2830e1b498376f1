#include <cmath>

#include "propagation.hpp"
#include "tunnelsplit/timing.hpp"

namespace tunnelsplit {

namespace {

// Rectangular-layer quantities in the signed K2 = beta*kappa0^2 - k^2 form,
// in which the below- and above-barrier expressions coincide and stay finite
// at K2 = 0.
struct RectQuantities {
  double d_eff;
  double x_start;
  double dT;
};

// (S - d)/K2 and (d C - S)/K2 as power series in K2 d^2.
void small_k2_series(double K2, double d, double& phi, double& psi) {
  phi = 0.0;
  psi = 0.0;
  double term = d * d * d;  // K2^(n-1) d^(2n+1)
  double fact = 6.0;        // (2n+1)!
  for (int n = 1; n <= 14; ++n) {
    phi += term / fact;
    psi += term * (2.0 * n) / fact;
    term *= K2 * d * d;
    fact *= (2.0 * n + 2.0) * (2.0 * n + 3.0);
  }
}

RectQuantities rect_quantities(const Rectangular& r, const Particle& particle, double k) {
  const double d = r.b - r.a;
  if (r.V0 == 0.0) return {d, 0.0, 0.0};
  const double c2 = particle.energy_to_k2();
  const double beta = r.V0 > 0.0 ? 1.0 : -1.0;
  const double k02 = c2 * std::abs(r.V0);
  const double kk = k * k;
  const double K2 = beta * k02 - kk;

  if (K2 > 0.0 && std::sqrt(K2) * d > 20.0) {
    // Opaque layer: everything divided through by S = sinh(kappa d)/kappa.
    const double kap = std::sqrt(K2);
    const double z = kap * d;
    const double invS = z > 700.0 ? 2.0 * kap * std::exp(-z) : kap / std::sinh(z);
    const double c_over_s = kap / std::tanh(z);
    const double h_over_s = 0.5 * kap * std::tanh(0.5 * z);
    const double phi_over_s = (1.0 - d * invS) / K2;
    const double psi_over_s = (d * c_over_s - 1.0) / K2;
    const double den = 4.0 * kk * invS * invS + k02 * k02;
    const double d_eff = 4.0 * (kk * invS + k02 * h_over_s) * (kk * phi_over_s + 1.0) / den;
    const double x_start = -2.0 * k02 * (invS + kk * psi_over_s * invS) / den;
    const double st = invS / (invS * invS + k02 * k02 / (4.0 * kk));
    const double dT = k02 * k02 * (kk * psi_over_s + 1.0) * st * st / (2.0 * kk * k);
    return {d_eff, x_start, dT};
  }

  const auto full = detail::layer_functions(K2, d);
  const auto half = detail::layer_functions(K2, 0.5 * d);
  const double S = full.S;
  const double H = half.KS * half.S;  // sinh^2(kappa d/2) or -sin^2(kappa d/2)
  double phi = 0.0;
  double psi = 0.0;
  if (std::abs(K2) * d * d < 0.5) {
    small_k2_series(K2, d, phi, psi);
  } else {
    phi = (S - d) / K2;
    psi = (d * full.C - S) / K2;
  }
  const double den = 4.0 * kk + k02 * k02 * S * S;
  const double d_eff = 4.0 * (kk + beta * k02 * H) * (kk * phi + S) / den;
  const double x_start = -2.0 * beta * k02 * (S + kk * psi) / den;
  const double T = 4.0 * kk / den;
  const double dT = T * T * k02 * k02 * S * (kk * psi + S) / (2.0 * kk * k);
  return {d_eff, x_start, dT};
}

}  // namespace

ClosedForms rect_closed_forms(const Rectangular& r, const Particle& particle, double k) {
  auto q = rect_quantities(r, particle, k);
  return {q.d_eff, q.x_start};
}

ClosedForms delta_closed_forms(double W, const Particle& particle, double k) {
  const double g = particle.energy_to_k2() * W;
  return {0.0, -2.0 * g / (4.0 * k * k + g * g)};
}

AnalyticDerivatives rect_derivatives(const Rectangular& r, const Particle& particle, double k) {
  auto q = rect_quantities(r, particle, k);
  return {q.dT, q.d_eff - q.x_start, -q.x_start};
}

AnalyticDerivatives delta_derivatives(double W, const Particle& particle, double k) {
  const double g = particle.energy_to_k2() * W;
  const double den = 4.0 * k * k + g * g;
  const double dJ = 2.0 * g / den;
  return {8.0 * k * g * g / (den * den), dJ, dJ};
}

}  // namespace tunnelsplit
