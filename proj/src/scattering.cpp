#include "tunnelsplit/scattering.hpp"

#include <cmath>
#include <numbers>

#include "propagation.hpp"
#include "tunnelsplit/errors.hpp"
#include "tunnelsplit/parallel.hpp"

namespace tunnelsplit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kResonanceR = 1e-14;

void require_positive_k(double k) {
  if (!(k > 0.0) || !std::isfinite(k)) throw InvalidInput("wavenumber must be positive");
}

// q and p from the backward matrix taking (psi, psi')(b) to (psi, psi')(a).
TransferMatrix from_backward(const detail::ScaledMatrix& M, double k, const Geometry& g) {
  const cplx i(0.0, 1.0);
  cplx q = std::exp(i * (k * g.d)) * 0.5 * cplx(M.m00 + M.m11, k * M.m01 - M.m10 / k);
  cplx p = std::exp(-i * (k * g.s)) * 0.5 * cplx(M.m00 - M.m11, -(k * M.m01 + M.m10 / k));
  TransferMatrix tm{q, p, M.log_scale};
  if (tm.log_scale != 0.0 && tm.log_scale < 600.0) {
    double f = std::exp(tm.log_scale);
    tm.q *= f;
    tm.p *= f;
    tm.log_scale = 0.0;
  }
  return tm;
}

double unwrap_near(double value, double reference) {
  return value + 2.0 * kPi * std::round((reference - value) / (2.0 * kPi));
}

}  // namespace

double wrap_angle(double phi) {
  double w = std::remainder(phi, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

double TransferMatrix::transmission() const {
  return std::exp(-2.0 * log_scale) / std::norm(q);
}

double TransferMatrix::flux_residual() const {
  return (std::norm(q) - std::norm(p) - std::exp(-2.0 * log_scale)) / std::norm(q);
}

double AmplitudeSet::flux_balance() const {
  return std::norm(a_in) + std::norm(b_in) - std::norm(a_out) - std::norm(b_out);
}

TransferMatrix transfer_matrix(const ScatteringSystem& sys, double k) {
  require_positive_k(k);
  const auto g = geometry(sys.potential);
  const double c2 = sys.particle.energy_to_k2();
  detail::ScaledMatrix M;
  if (const auto* d = std::get_if<Delta>(&sys.potential.variant())) {
    M.multiply_right(1.0, 0.0, -c2 * d->W, 1.0, 0.0);
  } else {
    const double k2 = k * k;
    for (const auto& l : layers(sys.potential)) append_backward_layer(M, c2 * l.height - k2, l.width);
  }
  return from_backward(M, k, g);
}

TunnelingParams tunneling_params(const TransferMatrix& tm, const Geometry& g, double k) {
  TunnelingParams tp;
  tp.k = k;
  tp.T = tm.transmission();
  tp.R = 1.0 - tp.T;
  tp.J = k * g.d - std::arg(tm.q);
  tp.f_defined = tp.R >= kResonanceR && std::abs(tm.p) > 0.0;
  tp.F = tp.f_defined ? wrap_angle(std::arg(tm.p) - kPi / 2 + k * g.s) : 0.0;
  return tp;
}

TunnelingParams tunneling_params(const ScatteringSystem& sys, double k) {
  return tunneling_params(transfer_matrix(sys, k), geometry(sys.potential), k);
}

AmplitudeSet scattering_amplitudes(const TransferMatrix& tm) {
  if (tm.log_scale != 0.0) {
    // Opaque: 1/q underflows gracefully, p*/q is a ratio of mantissas.
    return {1.0, std::conj(tm.p) / tm.q, std::exp(-tm.log_scale) / tm.q, 0.0};
  }
  return {1.0, std::conj(tm.p) / tm.q, 1.0 / tm.q, 0.0};
}

std::pair<AmplitudeSet, AmplitudeSet> auxiliary_amplitudes(const TransferMatrix& tm) {
  auto full = scattering_amplitudes(tm);
  double T = tm.transmission();
  double R = 1.0 - T;  // R + T == 1 exactly in floating point
  // p*/|q|^2 = b_out * conj(1/q) in physical units.
  cplx pq = full.b_out * std::conj(full.a_out);
  AmplitudeSet first{R, full.b_out, 0.0, pq};
  AmplitudeSet second{T, 0.0, full.a_out, -pq};
  return {first, second};
}

TunnelingParams ode_oracle(const ScatteringSystem& sys, double k, const OdeOptions& opt) {
  require_positive_k(k);
  if (sys.potential.is_delta()) throw Unsupported("ode_oracle: delta potential has no layer ODE");
  const auto g = geometry(sys.potential);
  const auto ls = layers(sys.potential);
  const double c2 = sys.particle.energy_to_k2();
  const double k2 = k * k;

  double scale = k;
  for (const auto& l : ls) scale = std::max(scale, std::sqrt(std::abs(c2 * l.height - k2)));

  auto integrate = [&](double steps_per_nm) {
    const cplx i(0.0, 1.0);
    cplx psi = std::exp(i * (k * g.b));
    cplx dpsi = i * k * psi;
    for (auto it = ls.rbegin(); it != ls.rend(); ++it) {
      const double K2 = c2 * it->height - k2;
      const auto n = static_cast<std::size_t>(std::ceil(it->width * steps_per_nm));
      const double h = -it->width / static_cast<double>(std::max<std::size_t>(n, 1));
      for (std::size_t s = 0; s < std::max<std::size_t>(n, 1); ++s) {
        // y' = (dpsi, K2 psi)
        cplx a1 = dpsi, b1 = K2 * psi;
        cplx a2 = dpsi + 0.5 * h * b1, b2 = K2 * (psi + 0.5 * h * a1);
        cplx a3 = dpsi + 0.5 * h * b2, b3 = K2 * (psi + 0.5 * h * a2);
        cplx a4 = dpsi + h * b3, b4 = K2 * (psi + h * a3);
        psi += h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
        dpsi += h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
      }
    }
    cplx A = std::exp(-i * (k * g.a)) * 0.5 * (psi + dpsi / (i * k));
    cplx B = std::exp(i * (k * g.a)) * 0.5 * (psi - dpsi / (i * k));
    TransferMatrix tm{A, std::conj(B), 0.0};
    return tunneling_params(tm, g, k);
  };

  const bool automatic = opt.steps_per_nm <= 0.0;
  double spn = automatic ? 200.0 * scale : opt.steps_per_nm;
  for (int attempt = 0; attempt < 6; ++attempt) {
    auto coarse = integrate(spn);
    auto fine = integrate(2.0 * spn);
    double err = std::abs(fine.T - coarse.T) / 15.0;
    if (err <= opt.tolerance) return fine;
    if (!automatic)
      throw NumericalError("ode_oracle: step count too small to meet tolerance (estimated |dT| = " +
                           std::to_string(err) + ")");
    spn *= 2.0;
  }
  throw NumericalError("ode_oracle: tolerance not reached");
}

TunnelingTable tabulate(const ScatteringSystem& sys, const KGrid& grid) {
  const auto g = geometry(sys.potential);
  const std::size_t n = grid.size();
  TunnelingTable table{grid, std::vector<TransferMatrix>(n), std::vector<TunnelingParams>(n)};
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      double k = grid.at(j);
      table.matrices[j] = transfer_matrix(sys, k);
      table.params[j] = tunneling_params(table.matrices[j], g, k);
    }
  });

  auto& ps = table.params;
  // J: principal value at the lowest k, then continuity.
  ps[0].J = g.d * ps[0].k + wrap_angle(ps[0].J - g.d * ps[0].k);
  for (std::size_t j = 1; j < n; ++j) ps[j].J = unwrap_near(ps[j].J, ps[j - 1].J);

  // F: unwrap over defined samples, interpolate the rest.
  std::vector<std::size_t> defined;
  for (std::size_t j = 0; j < n; ++j)
    if (ps[j].f_defined) defined.push_back(j);
  for (std::size_t i = 1; i < defined.size(); ++i)
    ps[defined[i]].F = unwrap_near(ps[defined[i]].F, ps[defined[i - 1]].F);
  if (defined.empty()) return table;
  for (std::size_t j = 0; j < n; ++j) {
    if (ps[j].f_defined) continue;
    auto hi = std::lower_bound(defined.begin(), defined.end(), j);
    if (hi == defined.begin()) {
      ps[j].F = ps[*hi].F;
    } else if (hi == defined.end()) {
      ps[j].F = ps[defined.back()].F;
    } else {
      std::size_t a = *(hi - 1), b = *hi;
      double t = (ps[j].k - ps[a].k) / (ps[b].k - ps[a].k);
      ps[j].F = ps[a].F + t * (ps[b].F - ps[a].F);
    }
  }
  return table;
}

}  // namespace tunnelsplit
