#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "tunnelsplit/config.hpp"
#include "tunnelsplit/errors.hpp"
#include "tunnelsplit/timing.hpp"

using namespace tunnelsplit;

namespace {

const Particle kElectron = Particle::from_electron_masses(0.067);
const double kMass = kElectron.mass();
constexpr double kK0 = 0.6630494714593312;
constexpr double kHbar = Constants::hbar;

// All weight on the node at k.
SpectralProfile monochromatic(double k) {
  const KGrid grid(k - 0.008, k + 0.008, 17);
  std::vector<cplx> a(grid.size());
  a[8] = 1.0 / std::sqrt(grid.weight(8));
  return SpectralProfile(grid, std::move(a), k, 1e3);
}

}  // namespace

TEST(CmTrajectory, FreeBallistic) {
  const ScatteringSystem sys{PotentialSpec::free(100.0, 105.0), kElectron};
  const auto sc = Scenario::build(sys, kK0, 7.5, 150.0);
  const std::vector<double> ts = {0.0, 50.0, 100.0, 150.0};
  const auto tr = cm_trajectory(sc.synthesizer(), Channel::transmission, ts);
  const double v = kHbar * kK0 / kMass;
  for (const auto& s : tr) EXPECT_NEAR(s.x, v * s.t, 0.05) << "t = " << s.t;
  EXPECT_THROW(cm_trajectory(sc.synthesizer(), Channel::reflection, ts), ZeroNormError);
}

TEST(CmTrajectory, EarlyAndLateSlopes) {
  const auto c = preset("paper-barrier");
  const auto sc = Scenario::build(c.system(), c.k0(), c.l0_nm, 1000.0);
  const auto m = out_asymptote_moments(sc.profile, sc.tables);
  const auto synth = sc.synthesizer();
  const std::vector<double> early = {0.0, 100.0};
  const auto tr = cm_trajectory(synth, Channel::transmission, early);
  const double slope_tr = (tr[1].x - tr[0].x) / 100.0;
  EXPECT_NEAR(slope_tr, kHbar * *m.k_tr / kMass, 0.01 * kHbar * *m.k_tr / kMass);

  const std::vector<double> late = {900.0, 1000.0};
  const auto ref = cm_trajectory(synth, Channel::reflection, late);
  const double slope_ref = (ref[1].x - ref[0].x) / 100.0;
  EXPECT_LT(slope_ref, 0.0);
  EXPECT_NEAR(slope_ref, kHbar * *m.k_ref / kMass, 0.01 * std::abs(kHbar * *m.k_ref / kMass));
}

TEST(ExactTimes, FreeParticle) {
  const ScatteringSystem sys{PotentialSpec::free(100.0, 105.0), kElectron};
  const auto t = exact_times(sys, kK0, 7.5, 10.0, 10.0);
  ASSERT_TRUE(t.transmission);
  EXPECT_NEAR(*t.transmission, 21.821354506537855, 0.1);
  EXPECT_FALSE(t.reflection);
  EXPECT_FALSE(t.reflection_crossed);
}

TEST(ExactTimes, DeltaIsInstantaneous) {
  const auto c = preset("delta");
  const auto t = exact_times(c.system(), c.k0(), c.l0_nm, 0.0, 0.0);
  ASSERT_TRUE(t.transmission);
  EXPECT_NEAR(*t.transmission, 0.0, 0.02);
  EXPECT_GE(*t.transmission, 0.0);
}

TEST(ExactTimes, PresetScenariosNonNegative) {
  for (const char* name : {"paper-barrier", "paper-well"}) {
    const auto c = preset(name);
    const auto t = exact_times(c.system(), c.k0(), c.l0_nm, 0.0, 0.0);
    ASSERT_TRUE(t.transmission) << name;
    EXPECT_GE(*t.transmission, 0.0) << name;
    ASSERT_TRUE(t.reflection) << name;
    EXPECT_GE(*t.reflection, 0.0) << name;
  }
}

TEST(ExactTimes, RejectsBadInput) {
  const auto c = preset("paper-barrier");
  EXPECT_THROW(exact_times(c.system(), c.k0(), c.l0_nm, -1.0, 0.0), InvalidInput);
  // a - L1 behind the initial packet.
  EXPECT_THROW(exact_times(c.system(), c.k0(), c.l0_nm, 520.0, 0.0), InvalidInput);
  const ScatteringSystem asym{PotentialSpec::piecewise(200.0, {{0.1, 2.0}, {0.2, 3.0}}), kElectron};
  EXPECT_THROW(exact_times(asym, kK0, 7.5, 0.0, 0.0), Unsupported);
}

// Far from the barrier the CM moves with the asymptotic velocities.
TEST(ExactTimes, AgreeWithAsymptoticFarAway) {
  const double l0 = 20.0, a = 300.0;
  const ScatteringSystem sys{PotentialSpec::rectangular(0.3, a, a + 5.0), kElectron};
  const double L = 80.0;
  const auto t = exact_times(sys, kK0, l0, L, L);
  const auto sc = Scenario::build(sys, kK0, l0, 0.0);
  const auto as = asymptotic_times(sc.profile, sc.tables, kMass, L, L);
  ASSERT_TRUE(t.transmission && as.tau_tr);
  EXPECT_NEAR(*t.transmission, *as.tau_tr, 0.02 * *as.tau_tr);
  ASSERT_TRUE(t.reflection && as.tau_ref);
  EXPECT_NEAR(*t.reflection, *as.tau_ref, 0.02 * *as.tau_ref);
}

TEST(AsymptoticTimes, DeltaIsZero) {
  const auto c = preset("delta");
  const auto sc = Scenario::build(c.system(), c.k0(), c.l0_nm, 0.0);
  const auto as = asymptotic_times(sc.profile, sc.tables, kMass, 0.0, 0.0);
  EXPECT_EQ(*as.tau_tr_as, 0.0);
  EXPECT_EQ(*effective_widths(sc.profile, sc.tables).tr, 0.0);
}

TEST(AsymptoticTimes, LinearInL) {
  const auto c = preset("paper-barrier");
  const auto sc = Scenario::build(c.system(), c.k0(), c.l0_nm, 0.0);
  const auto m = out_asymptote_moments(sc.profile, sc.tables);
  const auto as = asymptotic_times(sc.profile, sc.tables, kMass, 12.0, 30.0);
  EXPECT_NEAR(*as.tau_tr - *as.tau_tr_as, kMass * 42.0 / (kHbar * *m.k_tr), 1e-10);
  EXPECT_NEAR(*as.tau_ref - *as.tau_ref_as, kMass * 24.0 / (kHbar * -*m.k_ref), 1e-10);
}

TEST(AsymptoticTimes, MonochromaticLimit) {
  const Rectangular r{0.3, 500.0, 505.0};
  const ScatteringSystem sys{PotentialSpec(r), kElectron};
  const auto prof = monochromatic(kK0);
  const auto tables = build_tables(sys, prof.grid());
  const auto as = asymptotic_times(prof, tables, kMass, 0.0, 0.0);
  const double d_eff = rect_closed_forms(r, kElectron, kK0).d_eff;
  EXPECT_NEAR(*as.tau_tr_as, kMass * d_eff / (kHbar * kK0), 1e-9);
}

TEST(EffectiveWidths, FreeIsD) {
  const ScatteringSystem sys{PotentialSpec::free(100.0, 105.0), kElectron};
  const auto sc = Scenario::build(sys, kK0, 7.5, 0.0);
  EXPECT_NEAR(*effective_widths(sc.profile, sc.tables).tr, 5.0, 1e-9);
}

TEST(EffectiveWidths, MatchFiniteDifferencesAtOneK) {
  for (double V0 : {0.3, -0.3}) {
    const Rectangular r{V0, 500.0, 505.0};
    const ScatteringSystem sys{PotentialSpec(r), kElectron};
    for (double k : {0.2, kK0, 1.0}) {
      const auto prof = monochromatic(k);
      const auto fd = build_tables(sys, KGrid(k - 0.008, k + 0.008, 17), false);
      const double d = *effective_widths(prof, fd).tr;
      const double closed = rect_closed_forms(r, kElectron, k).d_eff;
      EXPECT_NEAR(d, closed, 1e-6 * std::abs(closed)) << "V0 = " << V0 << ", k = " << k;
    }
  }
}

TEST(EffectiveWidths, WellNegativeAtLowK) {
  const Rectangular r{-0.3, 500.0, 505.0};
  const double kappa0 = std::sqrt(kElectron.energy_to_k2() * 0.3);
  ASSERT_LT(std::sin(kappa0 * 5.0), 0.0);
  EXPECT_LT(rect_closed_forms(r, kElectron, 0.05).d_eff, 0.0);
  EXPECT_LT(rect_closed_forms(r, kElectron, 0.3).d_eff, 0.0);
}

TEST(ClosedForms, RectangularReferenceValues) {
  struct Row {
    double V0, k, d_eff, x_start;
  };
  const Row rows[] = {
      {0.3, 0.66305, 3.48959767, -2.01411510},  {0.3, 1.0, 5.28348977, -2.29453618},
      {0.3, 0.2, 2.67470384, -0.19429716},  {-0.3, 0.66305, 2.20972634, -0.99088820},
      {-0.3, 0.3, -0.15369447, -0.93423503},
  };
  for (const auto& row : rows) {
    const auto cf = rect_closed_forms({row.V0, 500.0, 505.0}, kElectron, row.k);
    EXPECT_NEAR(cf.d_eff, row.d_eff, 1e-7) << row.V0 << " " << row.k;
    EXPECT_NEAR(cf.x_start, row.x_start, 1e-7) << row.V0 << " " << row.k;
  }
}

TEST(ClosedForms, ContinuousAtBarrierTop) {
  const Rectangular r{0.3, 500.0, 505.0};
  const double kv = std::sqrt(kElectron.energy_to_k2() * 0.3);
  const auto at = rect_closed_forms(r, kElectron, kv);
  for (double eps : {1e-7, -1e-7}) {
    const auto near = rect_closed_forms(r, kElectron, kv * (1.0 + eps));
    EXPECT_NEAR(near.d_eff, at.d_eff, 1e-5);
    EXPECT_NEAR(near.x_start, at.x_start, 1e-5);
  }
}

TEST(ClosedForms, OpaqueAndThinRegimes) {
  const double V0 = 0.3;
  const double kappa0 = std::sqrt(kElectron.energy_to_k2() * V0);
  const double k = kappa0 / std::sqrt(2.0);
  const double kappa = std::sqrt(kappa0 * kappa0 - k * k);
  const double d_opaque = 20.0 / kappa;
  EXPECT_NEAR(rect_closed_forms({V0, 100.0, 100.0 + d_opaque}, kElectron, k).d_eff, 2.0 / kappa,
              0.01 * 2.0 / kappa);
  const double d_thin = 0.01 / kappa;
  const auto thin = rect_closed_forms({V0, 100.0, 100.0 + d_thin}, kElectron, k);
  EXPECT_NEAR(thin.d_eff, d_thin, 0.01 * d_thin);
  const double xs = -kappa0 * kappa0 * d_thin / (2.0 * k * k);
  EXPECT_NEAR(thin.x_start, xs, 0.01 * std::abs(xs));
}

// d_eff / d - 1 falls off as (kappa0^2 / 2k^2)(1 + cos(kappa d) - 2 sin(kappa d) / (kappa d)).
TEST(ClosedForms, HighEnergyLimit) {
  const Rectangular r{0.3, 500.0, 505.0};
  const double kappa0 = std::sqrt(kElectron.energy_to_k2() * 0.3);
  double prev = INFINITY;
  for (double n : {10.0, 30.0, 100.0, 300.0}) {
    const auto cf = rect_closed_forms(r, kElectron, n * kappa0);
    const double dev = std::abs(cf.d_eff / 5.0 - 1.0);
    EXPECT_LT(dev * n * n, 1.0);
    EXPECT_LT(dev, prev);
    prev = dev;
    EXPECT_LT(std::abs(cf.x_start) * n * n, 3.0);
  }
  EXPECT_NEAR(std::abs(rect_closed_forms(r, kElectron, 100.0 * kappa0).d_eff / 5.0 - 1.0), 6.481e-5,
              1e-8);
}

TEST(ClosedForms, Delta) {
  EXPECT_NEAR(delta_closed_forms(0.2, kElectron, 0.6).x_start, -0.449840845684, 1e-11);
  for (double W : {0.01, 0.2, 3.0})
    for (double k : {0.1, 0.6, 2.0}) EXPECT_EQ(delta_closed_forms(W, kElectron, k).d_eff, 0.0);
  EXPECT_NEAR(delta_closed_forms(1e-12, kElectron, 0.6).x_start, 0.0, 1e-10);
}

// At fixed k the extremum sits at W = hbar^2 k / m.
TEST(ClosedForms, DeltaStartExtremalInW) {
  const double k = 0.6;
  const double w_star = kHbar * kHbar * k / kMass;
  const double at = delta_closed_forms(w_star, kElectron, k).x_start;
  for (double f : {0.9, 0.99, 1.01, 1.1})
    EXPECT_GT(delta_closed_forms(w_star * f, kElectron, k).x_start, at);
}

TEST(ClosedForms, DeltaStartMatchesLambdaDerivative) {
  const ScatteringSystem sys{PotentialSpec::delta(0.2, 50.0), kElectron};
  const double k = 0.6;
  const auto fd = build_tables(sys, KGrid(k - 0.008, k + 0.008, 17), false);
  EXPECT_NEAR(-fd.dLambda[8], delta_closed_forms(0.2, kElectron, k).x_start, 1e-7);
}

TEST(Swpa, DeltaNonZero) {
  const auto c = preset("delta");
  const auto sc = Scenario::build(c.system(), c.k0(), c.l0_nm, 0.0);
  const auto s = swpa_phase_times(sc.profile, sc.tables, kMass, 0.0, 0.0, 200.0);
  ASSERT_TRUE(s.transmission);
  EXPECT_GT(*s.transmission, 0.0);
}

TEST(Swpa, InitialDistanceDependence) {
  const auto c = preset("paper-barrier");
  const auto sc = Scenario::build(c.system(), c.k0(), c.l0_nm, 0.0);
  const auto m = out_asymptote_moments(sc.profile, sc.tables);
  const double a = 500.0;
  const auto s1 = swpa_phase_times(sc.profile, sc.tables, kMass, 0.0, 0.0, a);
  const auto s2 = swpa_phase_times(sc.profile, sc.tables, kMass, 0.0, 0.0, 2.0 * a);
  const double expected = kMass * a * (1.0 / *m.k_tr - 1.0 / c.k0()) / kHbar;
  EXPECT_NEAR(*s2.transmission - *s1.transmission, expected, 1e-9 * std::abs(expected));
}

TEST(Swpa, DistanceTermsVanishForWidePackets) {
  const ScatteringSystem sys{PotentialSpec::rectangular(0.3, 500.0, 505.0), kElectron};
  double first = 0.0, prev = INFINITY;
  for (double l0 : {7.5, 30.0, 120.0}) {
    const auto sc = Scenario::build(sys, kK0, l0, 0.0);
    const double a = 60.0 * l0;
    const auto near = swpa_phase_times(sc.profile, sc.tables, kMass, 0.0, 0.0, 0.0);
    const auto far = swpa_phase_times(sc.profile, sc.tables, kMass, 0.0, 0.0, a);
    const double term = std::abs(*far.transmission - *near.transmission);
    if (first == 0.0) first = term;
    EXPECT_LT(term, prev);
    prev = term;
  }
  EXPECT_LT(prev, 0.1 * first);
}

TEST(Report, AbsentEntriesAndSignedZero) {
  const auto c = preset("free");
  const auto r = timing_report(c.system(), c.k0(), c.l0_nm, c.L1_nm, c.L2_nm);
  EXPECT_FALSE(r.exact.reflection);
  EXPECT_FALSE(r.asymptotic.tau_ref);
  const auto text = format_report(r);
  EXPECT_NE(text.find("absent"), std::string::npos);
  EXPECT_EQ(text.find("-0 "), std::string::npos);
  std::ostringstream csv;
  write_report_csv(csv, r);
  EXPECT_NE(csv.str().find("\nexact_ref_fs,\n"), std::string::npos);
  EXPECT_EQ(csv.str().find(",-0\n"), std::string::npos);
}
