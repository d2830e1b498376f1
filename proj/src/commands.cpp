#include "tunnelsplit/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "tunnelsplit/csv.hpp"
#include "tunnelsplit/errors.hpp"
#include "tunnelsplit/packets.hpp"
#include "tunnelsplit/timing.hpp"

namespace tunnelsplit {

namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const fs::path& dir, const std::string& file) {
  fs::create_directories(dir);
  std::ofstream os(dir / file, std::ios::binary);
  if (!os) throw InvalidInput("cannot write " + (dir / file).string());
  return os;
}

// Shortest round-trip form, used in file names.
std::string short_number(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string describe(const PotentialSpec& p) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Rectangular>) {
          return "rectangular V0=" + csv::format(v.V0) + " eV, a=" + csv::format(v.a) +
                 " nm, b=" + csv::format(v.b) + " nm";
        } else if constexpr (std::is_same_v<T, Delta>) {
          return "delta W=" + csv::format(v.W) + " eV*nm, a=" + csv::format(v.a) + " nm";
        } else {
          std::string s = "piecewise a=" + csv::format(v.a) + " nm, layers";
          for (const auto& l : v.layers)
            s += " (" + csv::format(l.height) + " eV, " + csv::format(l.width) + " nm)";
          return s;
        }
      },
      p.variant());
}

void metadata(csv::Writer& w, const ScenarioConfig& c) {
  w.comment("scenario " + (c.name.empty() ? std::string("custom") : c.name) + " hash " +
            scenario_hash(c));
  w.comment("potential " + describe(c.potential));
  w.comment("mass " + csv::format(c.mass_me) + " m_e, k0 " + csv::format(c.k0()) + " 1/nm, l0 " +
            csv::format(c.l0_nm) + " nm");
}

}  // namespace

int cmd_params(const ScenarioConfig& c, const fs::path& out, std::ostream& log) {
  const auto sys = c.system();
  const auto plan = plan_grids(sys, c.k0(), c.l0_nm, c.t_max(), c.grids);
  const auto tables = build_tables(sys, plan.k);
  const std::string file = scenario_hash(c) + "_params.csv";
  auto os = open_output(out, file);
  csv::Writer w(os);
  metadata(w, c);
  w.comment("units: k 1/nm; J, F, Lambda rad; J', F', Lambda' nm");
  w.comment("grid: " + std::to_string(plan.k.size()) + " points on [" + csv::format(plan.k.k_min()) +
            ", " + csv::format(plan.k.k_max()) + "] 1/nm");
  w.header({"k", "T", "R", "J", "F", "dJ", "dF", "Lambda", "dLambda"});
  for (std::size_t j = 0; j < plan.k.size(); ++j) {
    const auto& p = tables.tunneling.params[j];
    const double lambda = tables.symmetric ? tables.Lambda[j] : std::nan("");
    const double dlambda = tables.symmetric ? tables.dLambda[j] : std::nan("");
    w.row({p.k, p.T, p.R, p.J, p.F, tables.dJ[j], tables.dF[j], lambda, dlambda});
  }
  log << "wrote " << (out / file).string() << " (" << plan.k.size() << " rows)\n";
  return 0;
}

int cmd_evolve(const ScenarioConfig& c, const fs::path& out, std::ostream& log) {
  if (c.times_fs.empty()) throw InvalidInput("evolve needs at least one entry in times_fs");
  const auto sys = c.system();
  const bool split = is_symmetric(sys.potential);
  const auto sc = Scenario::build(sys, c.k0(), c.l0_nm, c.t_max(), c.grids);
  const auto synth = sc.synthesizer();
  const std::string hash = scenario_hash(c);
  const double x_mid = synth.geometry().x_mid;

  auto summary_os = open_output(out, hash + "_evolve_summary.csv");
  csv::Writer summary(summary_os);
  metadata(summary, c);
  summary.comment("units: t fs, x nm; sum_check = max |full - tr - ref| / peak |full|");
  if (split)
    summary.header({"t", "norm_full", "norm_tr", "norm_ref", "x_full", "x_tr", "x_ref",
                    "sum_check", "interference_integral"});
  else
    summary.header({"t", "norm_full", "x_full"});

  std::vector<Channel> chans = {Channel::full};
  if (split) chans = {Channel::full, Channel::transmission, Channel::reflection};
  for (double t : c.times_fs) {
    const auto fields = synth.synthesize(t, chans);
    const std::string stem = hash + "_t" + short_number(t) + "_";
    for (const auto& f : fields) {
      auto os = open_output(out, stem + std::string(to_string(f.channel)) + ".csv");
      csv::Writer w(os);
      metadata(w, c);
      w.comment("t " + csv::format(t) + " fs, channel " + std::string(to_string(f.channel)));
      w.header({"x", "re", "im", "abs2"});
      for (std::size_t i = 0; i < f.values.size(); ++i)
        w.row({f.grid.at(i), f.values[i].real(), f.values[i].imag(), std::norm(f.values[i])});
    }
    if (!split) {
      summary.row({t, norm(fields[0]), mean_position(fields[0])});
      continue;
    }
    const auto density = interference_density(fields[0], fields[1], fields[2]);
    {
      auto os = open_output(out, stem + "interference.csv");
      csv::Writer w(os);
      metadata(w, c);
      w.comment("t " + csv::format(t) + " fs, |full|^2 - |tr|^2 - |ref|^2, zero for x >= " +
                csv::format(x_mid) + " nm");
      w.header({"x", "density"});
      for (std::size_t i = 0; i < density.size(); ++i) w.row({fields[0].grid.at(i), density[i]});
    }
    double peak = 0.0, residual = 0.0;
    for (std::size_t i = 0; i < density.size(); ++i) {
      peak = std::max(peak, std::abs(fields[0].values[i]));
      residual = std::max(residual,
                          std::abs(fields[0].values[i] - fields[1].values[i] - fields[2].values[i]));
    }
    const double nf = norm(fields[0]), nt = norm(fields[1]), nr = norm(fields[2]);
    auto cm = [](const WaveField& f) {
      try {
        return mean_position(f);
      } catch (const ZeroNormError&) {
        return std::nan("");
      }
    };
    summary.row({t, nf, nt, nr, cm(fields[0]), cm(fields[1]), cm(fields[2]), residual / peak,
                 nf - nt - nr});
  }
  log << "wrote " << c.times_fs.size() << " time slices for scenario " << hash << " to "
      << out.string() << '\n';
  return 0;
}

int cmd_times(const ScenarioConfig& c, const fs::path& out, std::ostream& log) {
  auto report = timing_report(c.system(), c.k0(), c.l0_nm, c.L1_nm, c.L2_nm);
  report.scenario = (c.name.empty() ? std::string("custom") : c.name) + " (" + scenario_hash(c) + ")";
  log << format_report(report);
  const std::string file = scenario_hash(c) + "_times.csv";
  auto os = open_output(out, file);
  write_report_csv(os, report);
  const bool negative = (report.exact.transmission && *report.exact.transmission < 0.0) ||
                        (report.exact.reflection && *report.exact.reflection < 0.0);
  if (negative) {
    log << "error: negative exact time\n";
    return 1;
  }
  return 0;
}

int cmd_check(const ScenarioConfig& c, const CheckOptions& opt, std::ostream& log) {
  const auto results = run_checks(c, opt);
  bool ok = true;
  for (const auto& r : results) {
    const char* tag = r.skipped ? "SKIP " : r.passed ? "PASS " : r.gating ? "FAIL " : "WARN ";
    log << tag << r.name;
    if (!r.skipped) log << "  residual " << r.residual << " (tolerance " << r.tolerance << ")";
    if (!r.detail.empty()) log << "  " << r.detail;
    log << '\n';
    ok = ok && (r.passed || !r.gating);
  }
  return ok ? 0 : 1;
}

}  // namespace tunnelsplit
