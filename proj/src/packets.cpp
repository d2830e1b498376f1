#include "tunnelsplit/packets.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tunnelsplit/errors.hpp"
#include "tunnelsplit/parallel.hpp"
#include "tunnelsplit/timing.hpp"

namespace tunnelsplit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kUndefinedWeight = 1e-12;

}  // namespace

SpectralProfile::SpectralProfile(KGrid grid, std::vector<cplx> amplitude, double k0, double l0)
    : grid_(grid), amplitude_(std::move(amplitude)), k0_(k0), l0_(l0) {
  if (amplitude_.size() != grid_.size()) throw InvalidInput("profile size does not match KGrid");
}

double SpectralProfile::norm() const {
  double s = 0.0;
  for (std::size_t j = 0; j < amplitude_.size(); ++j) s += grid_.weight(j) * std::norm(amplitude_[j]);
  return s;
}

double SpectralProfile::mean_k() const {
  double s = 0.0;
  for (std::size_t j = 0; j < amplitude_.size(); ++j)
    s += grid_.weight(j) * grid_.at(j) * std::norm(amplitude_[j]);
  return s / norm();
}

double SpectralProfile::variance_k() const {
  const double mk = mean_k();
  double s = 0.0;
  for (std::size_t j = 0; j < amplitude_.size(); ++j) {
    double dk = grid_.at(j) - mk;
    s += grid_.weight(j) * dk * dk * std::norm(amplitude_[j]);
  }
  return s / norm();
}

double SpectralProfile::edge_density_ratio() const {
  double peak = 0.0;
  for (const auto& a : amplitude_) peak = std::max(peak, std::norm(a));
  if (peak == 0.0) return 0.0;
  return std::max(std::norm(amplitude_.front()), std::norm(amplitude_.back())) / peak;
}

SpectralProfile gaussian_profile(double k0, double l0, const KGrid& grid) {
  if (!(l0 > 0.0) || !(k0 > 0.0)) throw InvalidInput("gaussian_profile: k0 and l0 must be positive");
  if (k0 * l0 < 3.0)
    throw InvalidInput("gaussian_profile: k0*l0 < 3 violates the completed-scattering setup");
  std::vector<cplx> a(grid.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    double dk = grid.at(j) - k0;
    a[j] = std::exp(-l0 * l0 * dk * dk);
  }
  SpectralProfile raw(grid, a, k0, l0);
  const double scale = 1.0 / std::sqrt(raw.norm());
  for (auto& v : a) v *= scale;
  return SpectralProfile(grid, std::move(a), k0, l0);
}

std::vector<double> five_point_derivative(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  if (n < 5) throw InvalidInput("five_point_derivative: need at least 5 samples");
  std::vector<double> d(n);
  const double c = 1.0 / (12.0 * h);
  d[0] = c * (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]);
  d[1] = c * (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]);
  for (std::size_t i = 2; i + 2 < n; ++i) d[i] = c * (f[i - 2] - 8 * f[i - 1] + 8 * f[i + 1] - f[i + 2]);
  d[n - 2] = -c * (-3 * f[n - 1] - 10 * f[n - 2] + 18 * f[n - 3] - 6 * f[n - 4] + f[n - 5]);
  d[n - 1] = -c * (-25 * f[n - 1] + 48 * f[n - 2] - 36 * f[n - 3] + 16 * f[n - 4] - 3 * f[n - 5]);
  return d;
}

SpectralTables build_tables(const ScatteringSystem& sys, const KGrid& grid, bool use_closed_forms) {
  SpectralTables t{tabulate(sys, grid), false, {}, {}, {}, {}, {}, {}};
  t.symmetric = is_symmetric(sys.potential);
  const std::size_t n = grid.size();
  const auto& ps = t.tunneling.params;
  const auto g = geometry(sys.potential);

  if (t.symmetric) {
    t.split.resize(n);
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
      for (std::size_t j = begin; j < end; ++j) {
        const auto& tm = t.tunneling.matrices[j];
        Branch b = select_odd_branch(sys.potential, ps[j], tm);
        t.split[j] = split_amplitudes(ps[j], tm, g, b);
      }
    });
    t.Lambda.resize(n);
    t.Lambda[0] = t.split[0].Lambda;
    for (std::size_t j = 1; j < n; ++j) {
      double v = t.split[j].Lambda;
      t.Lambda[j] = v + kPi * std::round((t.Lambda[j - 1] - v) / kPi);
    }
  } else {
    t.Lambda.assign(n, 0.0);
  }

  std::vector<double> T(n), J(n), F(n);
  for (std::size_t j = 0; j < n; ++j) {
    T[j] = ps[j].T;
    J[j] = ps[j].J;
    F[j] = ps[j].F;
  }
  const double h = grid.spacing();
  t.dT = five_point_derivative(T, h);
  t.dJ = five_point_derivative(J, h);
  // F is piecewise constant (0 or pi) for symmetric potentials.
  t.dF = t.symmetric ? std::vector<double>(n, 0.0) : five_point_derivative(F, h);
  t.dLambda = t.symmetric ? five_point_derivative(t.Lambda, h) : std::vector<double>(n, 0.0);

  if (use_closed_forms) {
    const auto& v = sys.potential.variant();
    for (std::size_t j = 0; j < n; ++j) {
      AnalyticDerivatives a{};
      if (const auto* r = std::get_if<Rectangular>(&v))
        a = rect_derivatives(*r, sys.particle, grid.at(j));
      else if (const auto* d = std::get_if<Delta>(&v))
        a = delta_derivatives(d->W, sys.particle, grid.at(j));
      else
        continue;
      t.dT[j] = a.dT;
      t.dJ[j] = a.dJ;
      t.dLambda[j] = a.dLambda;
      t.dF[j] = 0.0;
    }
  }
  return t;
}

GridPlan plan_grids(const ScatteringSystem& sys, double k0, double l0, double t_max,
                    const GridOverrides& ov) {
  if (!(l0 > 0.0) || !(k0 > 0.0)) throw InvalidInput("plan_grids: k0 and l0 must be positive");
  if (t_max < 0.0) throw InvalidInput("plan_grids: negative time horizon");
  const auto g = geometry(sys.potential);
  const double sigma_k = 1.0 / (2.0 * l0);
  const double k_lo = ov.k_min.value_or(std::max(1e-4, k0 - 8.0 * sigma_k));
  const double k_hi = ov.k_max.value_or(k0 + 8.0 * sigma_k);

  double dx = 0.1;
  if (ov.dx) {
    dx = *ov.dx;
  } else if (g.d > 0.0) {
    dx = g.d / (2.0 * std::ceil(g.d / 0.2));
  }
  if (!(dx > 0.0)) throw InvalidInput("plan_grids: dx must be positive");

  // Largest phase-derivative shift of any in/out packet over the significant k.
  double shift = 0.0;
  {
    KGrid coarse(k_lo, k_hi, 257);
    auto t = build_tables(sys, coarse);
    const double cut = 3.4 / l0;
    for (std::size_t j = 0; j < coarse.size(); ++j) {
      if (std::abs(coarse.at(j) - k0) > cut) continue;
      shift = std::max({shift, std::abs(g.d - t.dJ[j]), std::abs(t.dJ[j] - t.dF[j]),
                        std::abs(t.dLambda[j])});
    }
  }
  const double margin = shift + 5.0;
  // Large shifts come from resonances. The split incident packets then carry
  // exponential tails to the left with an e-fold length of about shift / 2.
  const double tail = 6.0 * shift;

  const double v_hi = sys.particle.velocity(k0 + 6.0 * sigma_k);
  double x_lo = std::min(-8.0 * l0 - tail, 2.0 * g.a - v_hi * t_max - 8.0 * l0) - margin;
  double x_hi = std::max(g.b + 8.0 * l0, v_hi * t_max + 8.0 * l0) + margin;
  if (ov.x_min) x_lo = *ov.x_min;
  if (ov.x_max) x_hi = *ov.x_max;
  if (!(x_lo < g.a) || !(x_hi > g.b)) throw InvalidInput("plan_grids: x range must contain [a, b]");

  const double x_min = g.a - std::ceil((g.a - x_lo) / dx) * dx;
  const auto nx = static_cast<std::size_t>(std::ceil((x_hi - x_min) / dx)) + 1;
  const double x_max = x_min + static_cast<double>(nx - 1) * dx;

  std::size_t nk = 0;
  if (ov.k_points) {
    nk = *ov.k_points;
  } else {
    const double support = std::max(x_max, 2.0 * g.a + 8.0 * l0 + margin + tail) - x_min;
    const double period = 1.15 * support + 10.0;
    const double dk = 2.0 * kPi / period;
    nk = std::max<std::size_t>(64, static_cast<std::size_t>(std::ceil((k_hi - k_lo) / dk)) + 1);
  }
  return GridPlan{KGrid(k_lo, k_hi, nk), XGrid(x_min, x_max, nx)};
}

Scenario Scenario::build(const ScatteringSystem& sys, double k0, double l0, double t_max,
                         const GridOverrides& overrides) {
  auto plan = plan_grids(sys, k0, l0, t_max, overrides);
  auto profile = gaussian_profile(k0, l0, plan.k);
  auto tables = build_tables(sys, plan.k);
  return Scenario{sys, std::move(profile), std::move(tables), plan.x};
}

OutMoments out_asymptote_moments(const SpectralProfile& profile, const SpectralTables& t) {
  const auto& grid = profile.grid();
  const auto& ps = t.tunneling.params;
  OutMoments m;
  double kT = 0.0, kR = 0.0, jT = 0.0, jfR = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double w = grid.weight(j) * std::norm(profile.amplitude()[j]);
    const double k = grid.at(j);
    m.mean_T += w * ps[j].T;
    m.mean_R += w * ps[j].R;
    m.mean_dT += w * t.dT[j];
    kT += w * ps[j].T * k;
    kR += w * ps[j].R * k;
    jT += w * ps[j].T * t.dJ[j];
    jfR += w * ps[j].R * (t.dJ[j] - t.dF[j]);
  }
  if (m.mean_T >= kUndefinedWeight) {
    m.k_tr = kT / m.mean_T;
    m.dJ_tr = jT / m.mean_T;
  }
  if (m.mean_R >= kUndefinedWeight) {
    m.k_ref = -kR / m.mean_R;
    m.dJF_ref = jfR / m.mean_R;
  }
  return m;
}

InMoments split_in_asymptote_moments(const SpectralProfile& profile, const SpectralTables& t) {
  if (!t.symmetric) throw Unsupported("split in-asymptotes require a symmetric potential");
  const auto& grid = profile.grid();
  const auto& ps = t.tunneling.params;
  double sT = 0.0, sR = 0.0, lT = 0.0, lR = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double w = grid.weight(j) * std::norm(profile.amplitude()[j]);
    sT += w * ps[j].T;
    sR += w * ps[j].R;
    lT += w * ps[j].T * t.dLambda[j];
    lR += w * ps[j].R * t.dLambda[j];
  }
  InMoments m;
  if (sT >= kUndefinedWeight) {
    m.dLambda_tr = lT / sT;
    m.x_start_tr = -*m.dLambda_tr;
  }
  if (sR >= kUndefinedWeight) {
    m.dLambda_ref = lR / sR;
    m.x_start_ref = -*m.dLambda_ref;
  }
  return m;
}

std::vector<double> interference_density(const WaveField& full, const WaveField& tr,
                                         const WaveField& ref) {
  if (!(full.grid == tr.grid) || !(full.grid == ref.grid))
    throw InvalidInput("interference_density: fields on different grids");
  if (full.time != tr.time || full.time != ref.time)
    throw InvalidInput("interference_density: fields at different times");
  std::vector<double> out(full.values.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = std::norm(full.values[i]) - std::norm(tr.values[i]) - std::norm(ref.values[i]);
  return out;
}

}  // namespace tunnelsplit
