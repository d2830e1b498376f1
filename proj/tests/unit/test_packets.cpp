#include <gtest/gtest.h>

#include <cmath>

#include "tunnelsplit/config.hpp"
#include "tunnelsplit/errors.hpp"
#include "tunnelsplit/packets.hpp"

using namespace tunnelsplit;

namespace {

const Particle kElectron = Particle::from_electron_masses(0.067);
constexpr double kK0 = 0.6630494714593312;

const Scenario& paper_barrier() {
  static const Scenario sc = [] {
    const auto c = preset("paper-barrier");
    return Scenario::build(c.system(), c.k0(), c.l0_nm, 450.0);
  }();
  return sc;
}

double second_moment(const WaveField& f) {
  double s = 0.0, n = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    const double x = f.grid.at(i);
    s += x * x * std::norm(f.values[i]);
    n += std::norm(f.values[i]);
  }
  return s / n;
}

}  // namespace

TEST(GaussianProfile, Moments) {
  const double l0 = 7.5;
  const KGrid grid(kK0 - 8.0 / (2 * l0), kK0 + 8.0 / (2 * l0), 201);
  const auto p = gaussian_profile(kK0, l0, grid);
  EXPECT_NEAR(p.norm(), 1.0, 1e-9);
  EXPECT_NEAR(p.mean_k(), kK0, 1e-6 * kK0);
  EXPECT_NEAR(p.variance_k(), 1.0 / (4.0 * l0 * l0), 1e-6 / (4.0 * l0 * l0));
  EXPECT_LT(p.edge_density_ratio(), 1e-12);
}

TEST(GaussianProfile, ReferencePacket) {
  const auto c = preset("paper-barrier");
  EXPECT_NEAR(c.k0(), 0.663, 5e-4);
  EXPECT_EQ(c.l0_nm, 7.5);
}

TEST(GaussianProfile, RejectsIncompleteScattering) {
  const KGrid grid(0.01, 1.0, 64);
  EXPECT_THROW(gaussian_profile(0.3, 9.9, grid), InvalidInput);
  EXPECT_NO_THROW(gaussian_profile(0.3, 10.0, grid));
}

TEST(FivePoint, Polynomial) {
  std::vector<double> f;
  const double h = 0.1;
  for (int i = 0; i < 20; ++i) {
    const double x = i * h;
    f.push_back(x * x * x - 2.0 * x);
  }
  const auto d = five_point_derivative(f, h);
  for (int i = 0; i < 20; ++i) EXPECT_NEAR(d[i], 3.0 * i * h * i * h - 2.0, 1e-10);
}

TEST(Tables, ClosedFormsMatchFiniteDifferences) {
  const ScatteringSystem sys{PotentialSpec::rectangular(0.3, 500.0, 505.0), kElectron};
  const KGrid grid(0.2, 1.2, 2001);
  const auto exact = build_tables(sys, grid, true);
  const auto fd = build_tables(sys, grid, false);
  for (std::size_t j = 2; j + 2 < grid.size(); ++j) {
    const double a = exact.dJ[j] - exact.dLambda[j];
    const double b = fd.dJ[j] - fd.dLambda[j];
    EXPECT_NEAR(a, b, 1e-6 * std::abs(a)) << "k = " << grid.at(j);
    EXPECT_NEAR(exact.dT[j], fd.dT[j], 1e-6 * std::max(1e-3, std::abs(exact.dT[j])));
    EXPECT_EQ(exact.dF[j], 0.0);
  }
}

TEST(Tables, LambdaDerivativeMagnitude) {
  const ScatteringSystem sys{PotentialSpec::piecewise(20.0, {{0.3, 1.5}, {-0.1, 2.0}, {0.3, 1.5}}),
                             kElectron};
  const KGrid grid(0.2, 1.6, 4001);
  const auto t = build_tables(sys, grid);
  for (std::size_t j = 2; j + 2 < grid.size(); j += 7) {
    const double T = t.tunneling.params[j].T, R = t.tunneling.params[j].R;
    if (R < 1e-6 || T < 1e-6) continue;
    const double expected = std::abs(t.dT[j]) / (2.0 * std::sqrt(R * T));
    EXPECT_NEAR(std::abs(t.dLambda[j]), expected, 1e-6 * std::max(1.0, expected)) << grid.at(j);
  }
}

TEST(Synthesis, InitialMoments) {
  const auto f = paper_barrier().synthesizer().synthesize(0.0, Channel::full);
  EXPECT_NEAR(norm(f), 1.0, 1e-9);
  EXPECT_NEAR(mean_position(f), 0.0, 0.05);
  EXPECT_NEAR(second_moment(f), 7.5 * 7.5, 0.01 * 7.5 * 7.5);
}

TEST(Synthesis, DecompositionAndInterference) {
  const auto synth = paper_barrier().synthesizer();
  const double x_mid = synth.geometry().x_mid;
  const Channel chans[3] = {Channel::full, Channel::transmission, Channel::reflection};
  for (double t : {0.0, 200.0, 400.0, 420.0}) {
    const auto f = synth.synthesize(t, chans);
    double peak = 0.0;
    for (const auto& v : f[0].values) peak = std::max(peak, std::abs(v));
    const auto dens = interference_density(f[0], f[1], f[2]);
    for (std::size_t i = 0; i < f[0].values.size(); ++i) {
      EXPECT_LE(std::abs(f[0].values[i] - f[1].values[i] - f[2].values[i]), 1e-10 * peak);
      if (f[0].grid.at(i) >= x_mid) EXPECT_EQ(dens[i], 0.0);
    }
  }
}

TEST(Synthesis, ChannelNorms) {
  const auto synth = paper_barrier().synthesizer();
  const Channel chans[3] = {Channel::full, Channel::transmission, Channel::reflection};
  const auto f0 = synth.synthesize(0.0, chans);
  EXPECT_NEAR(norm(f0[1]), 0.149, 0.005);
  EXPECT_NEAR(norm(f0[1]) + norm(f0[2]), 1.0, 1e-8);
  for (double t : {200.0, 400.0, 420.0}) {
    const auto f = synth.synthesize(t, chans);
    EXPECT_NEAR(norm(f[0]), 1.0, 1e-6);
    EXPECT_NEAR(norm(f[2]), norm(f0[2]), 1e-6);
  }
}

// The TWF kink at x_mid makes dN_tr/dt equal the flux jump there, so the
// tr norm moves while the packet overlaps the barrier and settles back.
TEST(Synthesis, TransmissionNormDuringCollision) {
  const auto c = preset("paper-barrier");
  const auto sc = Scenario::build(c.system(), c.k0(), c.l0_nm, 800.0);
  const auto synth = sc.synthesizer();
  const double mean_T = synth.expected_norm(Channel::transmission);
  EXPECT_GT(norm(synth.synthesize(400.0, Channel::transmission)) - mean_T, 1e-3);
  EXPECT_NEAR(norm(synth.synthesize(800.0, Channel::transmission)), mean_T, 1e-6);
}

// Slow spectral components (k near k0 - 8 sigma_k) still overlap the
// barrier at twice the transit time; 1e-8 of the peak is reached by 2.5x.
TEST(Synthesis, LateTimeInterferenceVanishes) {
  const auto c = preset("paper-barrier");
  const double transit = 505.0 / kElectron.velocity(c.k0());
  const auto sc = Scenario::build(c.system(), c.k0(), c.l0_nm, 2.5 * transit);
  const auto synth = sc.synthesizer();
  const Channel chans[3] = {Channel::full, Channel::transmission, Channel::reflection};
  for (auto [factor, bound] : {std::pair{2.0, 1e-6}, std::pair{2.5, 1e-8}}) {
    const auto f = synth.synthesize(factor * transit, chans);
    const auto dens = interference_density(f[0], f[1], f[2]);
    double peak = 0.0, worst = 0.0;
    for (std::size_t i = 0; i < dens.size(); ++i) {
      peak = std::max(peak, std::norm(f[0].values[i]));
      worst = std::max(worst, std::abs(dens[i]));
    }
    EXPECT_LT(worst, bound * peak) << factor << " x transit";
  }
}

TEST(Synthesis, MismatchedFieldsRejected) {
  const auto synth = paper_barrier().synthesizer();
  const auto a = synth.synthesize(0.0, Channel::full);
  const auto b = synth.synthesize(10.0, Channel::full);
  EXPECT_THROW(interference_density(a, a, b), InvalidInput);
  auto c = a;
  c.grid = XGrid(0.0, 1.0, a.grid.size());
  EXPECT_THROW(interference_density(a, c, a), InvalidInput);
}

TEST(Synthesis, KGridConvergence) {
  const auto c = preset("paper-barrier");
  const auto& base = paper_barrier();
  GridOverrides fine;
  fine.k_points = 2 * base.profile.grid().size() - 1;
  const auto sc2 = Scenario::build(c.system(), c.k0(), c.l0_nm, 450.0, fine);
  ASSERT_EQ(sc2.xgrid, base.xgrid);
  for (double t : {0.0, 420.0}) {
    const auto a = base.synthesizer().synthesize(t, Channel::transmission);
    const auto b = sc2.synthesizer().synthesize(t, Channel::transmission);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
      worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
    EXPECT_LT(worst, 1e-8);
  }
}

TEST(Synthesis, GridLeakDetected) {
  const auto c = preset("paper-barrier");
  GridOverrides narrow;
  narrow.x_min = -10.0;
  const auto sc = Scenario::build(c.system(), c.k0(), c.l0_nm, 0.0, narrow);
  EXPECT_THROW(sc.synthesizer().synthesize(0.0, Channel::full), GridLeakError);
}

TEST(Synthesis, AsymmetricChannelsUnsupported) {
  const ScatteringSystem sys{PotentialSpec::piecewise(200.0, {{0.1, 2.0}, {0.2, 3.0}}), kElectron};
  const auto sc = Scenario::build(sys, kK0, 7.5, 0.0);
  EXPECT_NO_THROW(sc.synthesizer().synthesize(0.0, Channel::full));
  EXPECT_THROW(sc.synthesizer().synthesize(0.0, Channel::transmission), Unsupported);
}

TEST(Synthesis, EarlyTimeTransmittedCm) {
  const auto& sc = paper_barrier();
  const auto synth = sc.synthesizer();
  const auto out = out_asymptote_moments(sc.profile, sc.tables);
  const auto in = split_in_asymptote_moments(sc.profile, sc.tables);
  const double v = Constants::hbar * *out.k_tr / kElectron.mass();
  for (double t : {0.0, 50.0, 100.0, 150.0}) {
    const double x = mean_position(synth.synthesize(t, Channel::transmission));
    EXPECT_NEAR(x, v * t - *in.dLambda_tr, 0.1) << "t = " << t;
  }
}

TEST(Moments, FreePotential) {
  const ScatteringSystem sys{PotentialSpec::free(100.0, 105.0), kElectron};
  const auto sc = Scenario::build(sys, kK0, 7.5, 0.0);
  const auto m = out_asymptote_moments(sc.profile, sc.tables);
  EXPECT_NEAR(m.mean_T, 1.0, 1e-12);
  EXPECT_NEAR(*m.k_tr, kK0, 1e-6 * kK0);
  EXPECT_NEAR(*m.dJ_tr, 5.0, 1e-9);
  EXPECT_FALSE(m.k_ref.has_value());
}

TEST(Moments, GaussianMomentumShifts) {
  const auto& sc = paper_barrier();
  const auto m = out_asymptote_moments(sc.profile, sc.tables);
  const double target = m.mean_dT / (4.0 * 7.5 * 7.5);
  EXPECT_NEAR(m.mean_T * (*m.k_tr - kK0), target, 1e-6);
  EXPECT_NEAR(-m.mean_R * (-*m.k_ref - kK0), target, 1e-6);
  // Opaque barrier: the transmitted packet is faster.
  EXPECT_GT(*m.k_tr, kK0);
}
