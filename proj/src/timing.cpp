#include "tunnelsplit/timing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <iomanip>
#include <sstream>

#include "tunnelsplit/csv.hpp"
#include "tunnelsplit/errors.hpp"

namespace tunnelsplit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kUndefinedWeight = 1e-12;
constexpr int kHorizonExtensions = 3;
constexpr double kHorizonGrowth = 1.5;
constexpr double kBracketDx = 0.5;          // nm
constexpr double kLeakCheckInterval = 20.0;  // fs

// Weighted means over the tr (T|A|^2) and ref (R|A|^2) subensembles.
struct ChannelSums {
  double wT = 0.0, wR = 0.0;
  double kT = 0.0, kR = 0.0;
  double effT = 0.0, effR = 0.0;
};

ChannelSums channel_sums(const SpectralProfile& profile, const SpectralTables& t) {
  const auto& grid = profile.grid();
  const auto& ps = t.tunneling.params;
  ChannelSums s;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double w = grid.weight(j) * std::norm(profile.amplitude()[j]);
    const double k = grid.at(j);
    const double T = ps[j].T;
    const double R = ps[j].R;
    s.wT += w * T;
    s.wR += w * R;
    s.kT += w * T * k;
    s.kR += w * R * k;
    s.effT += w * T * (t.dJ[j] - t.dLambda[j]);
    s.effR += w * R * ((t.dJ[j] - t.dF[j]) - t.dLambda[j]);
  }
  return s;
}

struct Scan {
  std::vector<double> t;
  std::vector<double> tr;
  std::vector<double> ref;
};

struct Cms {
  double tr = 0.0;
  double ref = 0.0;
};

class CmProbe {
 public:
  CmProbe(const Synthesizer& s, bool tr, bool ref) : synth_(s) {
    if (tr) channels_.push_back(Channel::transmission);
    if (ref) channels_.push_back(Channel::reflection);
    tr_ = tr;
    ref_ = ref;
  }

  Cms operator()(double t) const {
    auto fields = synth_.synthesize(t, channels_);
    Cms c;
    std::size_t i = 0;
    if (tr_) c.tr = mean_position(fields[i++]);
    if (ref_) c.ref = mean_position(fields[i]);
    return c;
  }

 private:
  const Synthesizer& synth_;
  std::vector<Channel> channels_;
  bool tr_;
  bool ref_;
};

// Refines a sign change of x(t) - target on [lo, hi].
template <class F>
double bisect(F&& f, double lo, double hi, double flo, double tol) {
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm <= 0.0) == (flo <= 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::optional<std::size_t> first_crossing(const std::vector<double>& x, double target) {
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    if ((x[i] - target) * (x[i + 1] - target) <= 0.0 && x[i] != x[i + 1]) return i;
  return std::nullopt;
}

std::optional<std::size_t> last_crossing(const std::vector<double>& x, double target) {
  for (std::size_t i = x.size() - 1; i-- > 0;)
    if ((x[i] - target) * (x[i + 1] - target) <= 0.0 && x[i] != x[i + 1]) return i;
  return std::nullopt;
}

struct ScanResult {
  ExactTimes times;
  bool complete = true;
  // A coarse bracket did not hold on the full grid.
  bool bracket_lost = false;
};

// Coarser grid for bracketing. |psi|^2 is band limited to 2 k_max, so the
// kink-corrected trapezoid stays accurate to ~1e-4 nm in the CM; a, x_mid
// and b remain nodes.
std::optional<XGrid> bracketing_grid(const XGrid& fine, const Geometry& g, double k_max) {
  const double h_max = std::min(kBracketDx, 0.4 * kPi / k_max);
  const double h = g.d > 0.0 ? g.d / (2.0 * std::ceil(g.d / (2.0 * h_max))) : h_max;
  if (h < 2.0 * fine.spacing()) return std::nullopt;
  const double x_min = g.a - std::floor((g.a - fine.x_min()) / h) * h;
  const auto n = static_cast<std::size_t>(std::floor((fine.x_max() - x_min) / h)) + 1;
  return XGrid(x_min, x_min + static_cast<double>(n - 1) * h, n);
}

ScanResult scan_once(const Synthesizer& coarse, const Synthesizer& synth, double L1, double L2,
                     double horizon, const RootOptions& opt) {
  const auto& g = synth.geometry();
  const double xa = g.a - L1;
  const double xb = g.b + L2;
  const bool has_tr = synth.expected_norm(Channel::transmission) >= kUndefinedWeight;
  const bool has_ref = synth.expected_norm(Channel::reflection) >= kUndefinedWeight;
  ScanResult out;
  if (!has_tr && !has_ref) return out;

  CmProbe probe(synth, has_tr, has_ref);
  CmProbe scan_probe(coarse, has_tr, has_ref);
  const bool same = &coarse == &synth;
  Scan s;
  const auto steps = static_cast<std::size_t>(std::ceil(horizon / opt.bracket_step));
  double next_leak_check = 0.0;
  for (std::size_t i = 0; i <= steps; ++i) {
    const double t = std::min(horizon, static_cast<double>(i) * opt.bracket_step);
    const Cms c = scan_probe(t);
    if (!same && (t >= next_leak_check || i == steps)) {
      probe(t);
      next_leak_check = t + kLeakCheckInterval;
    }
    s.t.push_back(t);
    s.tr.push_back(c.tr);
    s.ref.push_back(c.ref);
  }
  if (has_tr && s.tr.front() >= xa)
    throw InvalidInput("exact_times: transmitted CM starts at or beyond a - L1");
  if (has_ref && s.ref.front() >= xa && L1 > 0.0)
    throw InvalidInput("exact_times: reflected CM starts at or beyond a - L1");

  auto refine = [&](bool tr, std::size_t i, double target) {
    auto f = [&](double t) { return (tr ? probe(t).tr : probe(t).ref) - target; };
    const double flo = same ? (tr ? s.tr[i] : s.ref[i]) - target : f(s.t[i]);
    if (flo == 0.0) return s.t[i];
    if (!same) {
      const double fhi = f(s.t[i + 1]);
      if (fhi == 0.0) return s.t[i + 1];
      if ((flo < 0.0) == (fhi < 0.0)) out.bracket_lost = true;
    }
    return bisect(f, s.t[i], s.t[i + 1], flo, opt.tolerance);
  };

  ExactTimes& e = out.times;
  if (has_tr) {
    // The transmitted CM must end beyond b + L2 for the last root to be final.
    if (s.tr.back() <= xb) out.complete = false;
    auto i1 = first_crossing(s.tr, xa);
    auto i2 = last_crossing(s.tr, xb);
    if (i1) e.t1_tr = refine(true, *i1, xa);
    if (i2) e.t2_tr = refine(true, *i2, xb);
    if (e.t1_tr && e.t2_tr) e.transmission = *e.t2_tr - *e.t1_tr;
  }
  if (has_ref) {
    auto i1 = first_crossing(s.ref, xa);
    if (i1) {
      // Crossed on the way in; the outgoing crossing must have happened too.
      if (s.ref.back() >= xa) out.complete = false;
      auto i2 = last_crossing(s.ref, xa);
      e.reflection_crossed = true;
      e.t1_ref = refine(false, *i1, xa);
      e.t2_ref = refine(false, *i2, xa);
      e.reflection = *e.t2_ref - *e.t1_ref;
    } else if (L1 == 0.0) {
      e.reflection = 0.0;
    }
  }
  return out;
}

// Brackets on the coarse grid, then repeats on the full grid if any coarse
// bracket fails to hold there.
ScanResult scan_times(const Synthesizer& synth, const std::optional<Synthesizer>& coarse,
                      double L1, double L2, double horizon, const RootOptions& opt) {
  if (coarse) {
    ScanResult r = scan_once(*coarse, synth, L1, L2, horizon, opt);
    if (!r.bracket_lost) return r;
  }
  return scan_once(synth, synth, L1, L2, horizon, opt);
}

std::optional<Synthesizer> coarse_synthesizer(const Scenario& sc) {
  const auto grid =
      bracketing_grid(sc.xgrid, geometry(sc.system.potential), sc.profile.grid().k_max());
  if (!grid) return std::nullopt;
  std::optional<Synthesizer> s(std::in_place, sc.system, sc.profile, sc.tables, *grid);
  s->set_leak_check(false);
  return s;
}

void require_symmetric(const SpectralTables& t, const char* what) {
  if (!t.symmetric) throw Unsupported(std::string(what) + " requires a symmetric potential");
}

std::string show(const std::optional<double>& v, const char* unit) {
  if (!v) return "absent";
  std::ostringstream os;
  os << std::setprecision(8) << (*v == 0.0 ? 0.0 : *v) << ' ' << unit;
  return os.str();
}

}  // namespace

std::vector<TrajectorySample> cm_trajectory(const Synthesizer& synth, Channel c,
                                            std::span<const double> times) {
  if (synth.expected_norm(c) < kUndefinedWeight)
    throw ZeroNormError("cm_trajectory: channel " + std::string(to_string(c)) +
                        " carries no probability");
  std::vector<TrajectorySample> out;
  out.reserve(times.size());
  for (double t : times) out.push_back({t, mean_position(synth.synthesize(t, c))});
  return out;
}

double timing_horizon(const ScatteringSystem& sys, const SpectralProfile& profile,
                      const SpectralTables& tables, double L1, double L2) {
  const auto g = geometry(sys.potential);
  const auto m = out_asymptote_moments(profile, tables);
  const double mass = sys.particle.mass();
  const double hbar = Constants::hbar;
  double t_far = 0.0;
  if (m.k_tr && m.dJ_tr) t_far = std::max(t_far, mass * (g.a + L2 + *m.dJ_tr) / (hbar * *m.k_tr));
  if (m.k_ref && m.dJF_ref)
    t_far = std::max(t_far, mass * (g.a + L1 + *m.dJF_ref) / (hbar * -*m.k_ref));
  const double v0 = sys.particle.velocity(profile.k0());
  return 1.25 * t_far + 8.0 * profile.l0() / v0 + 20.0;
}

ExactTimes exact_times(const Scenario& sc, double L1, double L2, const RootOptions& opt) {
  if (L1 < 0.0 || L2 < 0.0) throw InvalidInput("exact_times: L1 and L2 must be non-negative");
  require_symmetric(sc.tables, "exact_times");
  double horizon = opt.horizon > 0.0
                       ? opt.horizon
                       : timing_horizon(sc.system, sc.profile, sc.tables, L1, L2);
  const Synthesizer synth = sc.synthesizer();
  const auto coarse = coarse_synthesizer(sc);
  ScanResult r = scan_times(synth, coarse, L1, L2, horizon, opt);
  for (int i = 0; i < kHorizonExtensions && !r.complete; ++i) {
    horizon *= kHorizonGrowth;
    r = scan_times(synth, coarse, L1, L2, horizon, opt);
  }
  return r.times;
}

ExactTimes exact_times(const ScatteringSystem& sys, double k0, double l0, double L1, double L2,
                       const RootOptions& opt) {
  if (L1 < 0.0 || L2 < 0.0) throw InvalidInput("exact_times: L1 and L2 must be non-negative");
  // Tables on a provisional grid give the horizon; the final grids cover it.
  auto provisional = Scenario::build(sys, k0, l0, 0.0);
  require_symmetric(provisional.tables, "exact_times");
  double horizon = opt.horizon > 0.0 ? opt.horizon
                                     : timing_horizon(sys, provisional.profile,
                                                      provisional.tables, L1, L2);
  ScanResult r;
  for (int i = 0; i <= kHorizonExtensions; ++i) {
    auto sc = Scenario::build(sys, k0, l0, horizon);
    r = scan_times(sc.synthesizer(), coarse_synthesizer(sc), L1, L2, horizon, opt);
    if (r.complete) break;
    horizon *= kHorizonGrowth;
  }
  return r.times;
}

EffectiveWidths effective_widths(const SpectralProfile& profile, const SpectralTables& tables) {
  require_symmetric(tables, "effective_widths");
  const auto s = channel_sums(profile, tables);
  EffectiveWidths w;
  if (s.wT >= kUndefinedWeight) w.tr = s.effT / s.wT;
  if (s.wR >= kUndefinedWeight) w.ref = s.effR / s.wR;
  return w;
}

AsymptoticTimes asymptotic_times(const SpectralProfile& profile, const SpectralTables& tables,
                                 double mass, double L1, double L2) {
  require_symmetric(tables, "asymptotic_times");
  const auto s = channel_sums(profile, tables);
  const double c = mass / Constants::hbar;
  AsymptoticTimes a;
  if (s.wT >= kUndefinedWeight) {
    const double K = s.kT / s.wT;
    const double d_eff = s.effT / s.wT;
    a.tau_tr = c * (d_eff + L1 + L2) / K;
    a.tau_tr_as = c * d_eff / K;
  }
  if (s.wR >= kUndefinedWeight) {
    const double K = s.kR / s.wR;
    const double d_eff = s.effR / s.wR;
    a.tau_ref = c * (d_eff + 2.0 * L1) / K;
    a.tau_ref_as = c * d_eff / K;
  }
  return a;
}

SwpaTimes swpa_phase_times(const SpectralProfile& profile, const SpectralTables& tables,
                           double mass, double L1, double L2, double a) {
  const auto m = out_asymptote_moments(profile, tables);
  const double c = mass / Constants::hbar;
  const double k0 = profile.k0();
  SwpaTimes out;
  if (m.k_tr && m.dJ_tr) {
    const double K = *m.k_tr;
    out.transmission = c * ((*m.dJ_tr + L2) / K + L1 / k0 + a * (1.0 / K - 1.0 / k0));
  }
  if (m.k_ref && m.dJF_ref) {
    const double K = -*m.k_ref;
    out.reflection = c * ((*m.dJF_ref + L1) / K + L1 / k0 + a * (1.0 / K - 1.0 / k0));
  }
  return out;
}

TimingReport timing_report(const ScatteringSystem& sys, double k0, double l0, double L1,
                           double L2, const RootOptions& opt) {
  const auto sc = Scenario::build(sys, k0, l0, 0.0);
  require_symmetric(sc.tables, "timing_report");
  const double mass = sys.particle.mass();
  TimingReport r;
  r.L1 = L1;
  r.L2 = L2;
  r.mean_T = out_asymptote_moments(sc.profile, sc.tables).mean_T;
  r.exact = exact_times(sys, k0, l0, L1, L2, opt);
  r.asymptotic = asymptotic_times(sc.profile, sc.tables, mass, L1, L2);
  r.widths = effective_widths(sc.profile, sc.tables);
  r.starts = split_in_asymptote_moments(sc.profile, sc.tables);
  r.swpa = swpa_phase_times(sc.profile, sc.tables, mass, L1, L2, geometry(sys.potential).a);
  return r;
}

std::string format_report(const TimingReport& r) {
  std::ostringstream os;
  if (!r.scenario.empty()) os << "scenario        " << r.scenario << '\n';
  os << "L1, L2          " << r.L1 << " nm, " << r.L2 << " nm\n";
  os << "<T>_in          " << std::setprecision(8) << r.mean_T << '\n';
  os << "exact tr        " << show(r.exact.transmission, "fs") << '\n';
  os << "exact ref       " << show(r.exact.reflection, "fs")
     << (r.exact.reflection_crossed ? "" : " (ref CM never reaches a - L1)") << '\n';
  os << "tau tr          " << show(r.asymptotic.tau_tr, "fs") << '\n';
  os << "tau ref         " << show(r.asymptotic.tau_ref, "fs") << '\n';
  os << "tau tr (as)     " << show(r.asymptotic.tau_tr_as, "fs") << '\n';
  os << "tau ref (as)    " << show(r.asymptotic.tau_ref_as, "fs") << '\n';
  os << "d_eff tr        " << show(r.widths.tr, "nm") << '\n';
  os << "d_eff ref       " << show(r.widths.ref, "nm") << '\n';
  os << "x_start tr      " << show(r.starts.x_start_tr, "nm") << '\n';
  os << "x_start ref     " << show(r.starts.x_start_ref, "nm") << '\n';
  os << "swpa tr         " << show(r.swpa.transmission, "fs") << '\n';
  os << "swpa ref        " << show(r.swpa.reflection, "fs") << '\n';
  return os.str();
}

void write_report_csv(std::ostream& os, const TimingReport& r) {
  csv::Writer w(os);
  if (!r.scenario.empty()) w.comment("scenario " + r.scenario);
  w.comment("units: times fs, lengths nm; empty cells are absent values");
  os << "quantity,value\n";
  auto line = [&](const char* name, const std::optional<double>& v) {
    os << name << ',' << (v ? csv::format(*v) : std::string()) << '\n';
  };
  line("L1_nm", r.L1);
  line("L2_nm", r.L2);
  line("mean_T", r.mean_T);
  line("exact_tr_fs", r.exact.transmission);
  line("exact_ref_fs", r.exact.reflection);
  line("t1_tr_fs", r.exact.t1_tr);
  line("t2_tr_fs", r.exact.t2_tr);
  line("t1_ref_fs", r.exact.t1_ref);
  line("t2_ref_fs", r.exact.t2_ref);
  line("tau_tr_fs", r.asymptotic.tau_tr);
  line("tau_ref_fs", r.asymptotic.tau_ref);
  line("tau_tr_as_fs", r.asymptotic.tau_tr_as);
  line("tau_ref_as_fs", r.asymptotic.tau_ref_as);
  line("d_eff_tr_nm", r.widths.tr);
  line("d_eff_ref_nm", r.widths.ref);
  line("x_start_tr_nm", r.starts.x_start_tr);
  line("x_start_ref_nm", r.starts.x_start_ref);
  line("swpa_tr_fs", r.swpa.transmission);
  line("swpa_ref_fs", r.swpa.reflection);
}

}  // namespace tunnelsplit
