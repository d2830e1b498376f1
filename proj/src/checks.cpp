#include "tunnelsplit/checks.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "tunnelsplit/errors.hpp"
#include "tunnelsplit/packets.hpp"

namespace tunnelsplit {

namespace {

CheckResult bounded(std::string name, double residual, double tolerance, std::string detail = {}) {
  CheckResult r;
  r.name = std::move(name);
  r.residual = residual;
  r.tolerance = tolerance;
  r.passed = residual < tolerance;
  r.detail = std::move(detail);
  return r;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

CheckResult skipped(std::string name, std::string why) {
  CheckResult r;
  r.name = std::move(name);
  r.passed = true;
  r.skipped = true;
  r.detail = std::move(why);
  return r;
}

CheckResult guarded(const std::string& name, const std::function<CheckResult()>& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    CheckResult r;
    r.name = name;
    r.passed = false;
    r.residual = std::numeric_limits<double>::infinity();
    r.detail = e.what();
    return r;
  }
}

std::vector<double> sample_ks(const ScenarioConfig& c, std::size_t n) {
  const double k0 = c.k0();
  const double sigma = 1.0 / (2.0 * c.l0_nm);
  const double lo = std::max(0.05 * k0, k0 - 4.0 * sigma);
  const double hi = k0 + 4.0 * sigma;
  std::vector<double> ks(n);
  for (std::size_t i = 0; i < n; ++i)
    ks[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(std::max<std::size_t>(n - 1, 1));
  return ks;
}

// Probe points spanning [a - 2 wavelengths, b + 2 wavelengths], x_mid included.
std::vector<double> probe_xs(const Geometry& g, double k) {
  const double lambda = 2.0 * std::numbers::pi / k;
  const double lo = g.a - 2.0 * lambda;
  const double hi = g.b + 2.0 * lambda;
  std::vector<double> xs;
  for (int i = 0; i <= 200; ++i) xs.push_back(lo + (hi - lo) * i / 200.0);
  xs.push_back(g.x_mid);
  return xs;
}

double stationary_flux(const PointValue& v, double mass) {
  return Constants::hbar / mass * (std::conj(v.value) * v.derivative).imag();
}

}  // namespace

std::vector<CheckResult> run_checks(const ScenarioConfig& c, const CheckOptions& opt) {
  std::vector<CheckResult> out;
  const auto sys = c.system();
  const bool symmetric = is_symmetric(sys.potential);
  const auto g = geometry(sys.potential);
  const double mass = sys.particle.mass();
  const auto ks = sample_ks(c, opt.k_samples);

  out.push_back(guarded("oracle", [&] {
    if (sys.potential.is_delta()) return skipped("oracle", "no ODE oracle for the delta potential");
    double dT = 0.0, dJ = 0.0;
    for (double k : ks) {
      const auto tm = tunneling_params(sys, k);
      const auto ode = ode_oracle(sys, k);
      dT = std::max(dT, std::abs(tm.T - ode.T));
      dJ = std::max(dJ, std::abs(wrap_angle(tm.J - ode.J)));
    }
    auto r = bounded("oracle", std::max(dT / 1e-8, dJ / 1e-7), 1.0,
                     "max |dT| = " + sci(dT) + ", max |dJ| = " + sci(dJ));
    return r;
  }));

  if (!symmetric) {
    for (const char* n : {"flux", "parity", "norms", "tr-norm", "decomposition", "interference",
                          "interference-integral"})
      out.push_back(skipped(n, "potential is not symmetric"));
    return out;
  }

  out.push_back(guarded("flux", [&] {
    double worst = 0.0;
    for (double k : ks) {
      StationaryState st(sys, k);
      const double v = Constants::hbar * k / mass;
      const double T = st.params().T;
      for (double x : probe_xs(g, k)) {
        for (int side : {-1, 1}) {
          const double jr = stationary_flux(st.reflection(x, side), mass) / v;
          const double jt = stationary_flux(st.transmission(x, side), mass) / v;
          worst = std::max({worst, std::abs(jr), std::abs(jt - T)});
        }
      }
    }
    return bounded("flux", worst, 1e-8, "RWF flux and TWF flux - T, in units of hbar k/m");
  }));

  out.push_back(guarded("parity", [&] {
    double worst = 0.0;
    std::size_t used = 0;
    for (double k : ks) {
      const auto tm = transfer_matrix(sys, k);
      auto tp = tunneling_params(tm, g, k);
      if (tp.R < 1e-14) continue;
      const double noise = tm.log_scale > 0.0 ? 1.0 : 100.0 * 2.2e-16 * std::abs(tm.q);
      if (noise > 1e-3) continue;
      const Branch b = select_odd_branch(sys.potential, tp, tm);
      if (opt.corrupt_f_branch) tp.F = wrap_angle(tp.F + std::numbers::pi);
      const auto s = split_amplitudes(tp, tm, g, b);
      worst = std::max(worst, parity_residual(s, g) / std::max(1e-8, noise));
      ++used;
    }
    if (used == 0) return skipped("parity", "no k sample with a resolvable RWF");
    return bounded("parity", worst, 1.0, "odd-RWF residual relative to its tolerance");
  }));

  const auto sc = Scenario::build(sys, c.k0(), c.l0_nm, c.t_max(), c.grids);
  const auto synth = sc.synthesizer();
  std::vector<double> times = c.times_fs;
  if (times.empty()) times = {0.0};
  struct Sample {
    double full, tr, ref, peak, decomposition, beyond_mid;
  };
  std::vector<Sample> samples;
  out.push_back(guarded("norms", [&] {
    const Channel chans[3] = {Channel::full, Channel::transmission, Channel::reflection};
    for (double t : times) {
      auto f = synth.synthesize(t, chans);
      Sample s{norm(f[0]), norm(f[1]), norm(f[2]), 0.0, 0.0, 0.0};
      for (std::size_t i = 0; i < f[0].values.size(); ++i) {
        s.peak = std::max(s.peak, std::abs(f[0].values[i]));
        s.decomposition =
            std::max(s.decomposition, std::abs(f[0].values[i] - f[1].values[i] - f[2].values[i]));
        if (f[0].grid.at(i) >= g.x_mid) {
          const double d = std::norm(f[0].values[i]) - std::norm(f[1].values[i]) -
                           std::norm(f[2].values[i]);
          s.beyond_mid = std::max(s.beyond_mid, std::abs(d));
        }
      }
      samples.push_back(s);
    }
    double drift = 0.0;
    for (const auto& s : samples)
      drift = std::max({drift, std::abs(s.full - samples[0].full), std::abs(s.ref - samples[0].ref)});
    return bounded("norms", drift, 1e-6, "drift of the full and ref norms");
  }));
  if (samples.empty()) return out;

  out.push_back(guarded("tr-norm", [&] {
    double drift = 0.0, sum = 0.0;
    for (const auto& s : samples) {
      drift = std::max(drift, std::abs(s.tr - samples[0].tr));
      sum = std::max(sum, std::abs(s.tr + s.ref - 1.0));
    }
    auto r = bounded("tr-norm", std::max(drift / 1e-6, sum / 1e-8), 1.0,
                     "tr drift " + sci(drift) + ", |N_tr + N_ref - 1| " + sci(sum) + "; nonzero while the packet overlaps x_mid");
    r.gating = false;
    return r;
  }));

  out.push_back(guarded("decomposition", [&] {
    double worst = 0.0;
    for (const auto& s : samples) worst = std::max(worst, s.decomposition / s.peak);
    return bounded("decomposition", worst, 1e-10, "max |full - tr - ref| / peak |full|");
  }));

  out.push_back(guarded("interference", [&] {
    double beyond = 0.0;
    for (const auto& s : samples) beyond = std::max(beyond, s.beyond_mid);
    auto r = bounded("interference", beyond, 0.0, "max |density| for x >= x_mid");
    r.passed = beyond == 0.0;
    return r;
  }));

  out.push_back(guarded("interference-integral", [&] {
    double integral = 0.0;
    for (const auto& s : samples) integral = std::max(integral, std::abs(s.full - s.tr - s.ref));
    auto r = bounded("interference-integral", integral, 1e-8,
                     "max |integral of |full|^2 - |tr|^2 - |ref|^2| over the sampled times");
    r.gating = false;
    return r;
  }));
  return out;
}

}  // namespace tunnelsplit
