#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "tunnelsplit/errors.hpp"
#include "tunnelsplit/splitting.hpp"

using namespace tunnelsplit;

namespace {

constexpr double kPi = std::numbers::pi;
const Particle kElectron = Particle::from_electron_masses(0.067);
constexpr double kK0 = 0.6630494714593312;

ScatteringSystem rect(double V0, double a = 500.0, double b = 505.0) {
  return {PotentialSpec::rectangular(V0, a, b), kElectron};
}

std::vector<ScatteringSystem> symmetric_zoo() {
  return {
      rect(0.3),
      rect(-0.3),
      rect(0.5, 30.0, 42.0),
      {PotentialSpec::delta(0.2, 50.0), kElectron},
      {PotentialSpec::piecewise(20.0, {{0.3, 1.5}, {-0.1, 2.0}, {0.3, 1.5}}), kElectron},
  };
}

SplitAmplitudes odd_split(const ScatteringSystem& sys, double k) {
  const auto tm = transfer_matrix(sys, k);
  const auto g = geometry(sys.potential);
  const auto tp = tunneling_params(tm, g, k);
  return split_amplitudes(tp, tm, g, select_odd_branch(sys.potential, tp, tm));
}

}  // namespace

TEST(SplitAmplitudes, HalfTransmission) {
  // |q|^2 = 2, |p|^2 = 1.
  const TransferMatrix tm{std::polar(std::sqrt(2.0), 0.4), std::polar(1.0, -1.1)};
  const Geometry g = geometry(PotentialSpec::rectangular(0.1, 10.0, 12.0));
  const auto tp = tunneling_params(tm, g, 0.8);
  ASSERT_NEAR(tp.T, 0.5, 1e-15);
  EXPECT_NEAR(split_amplitudes(tp, tm, g, Branch::plus).lambda, kPi / 4, 1e-14);
  EXPECT_NEAR(split_amplitudes(tp, tm, g, Branch::minus).lambda, -kPi / 4, 1e-14);
}

TEST(SplitAmplitudes, FullReflectionLimit) {
  const auto s = odd_split(rect(1.0, 10.0, 60.0), 0.5);
  EXPECT_NEAR(s.lambda, 0.0, 1e-12);
  EXPECT_NEAR(std::abs(s.A_in_ref - 1.0), 0.0, 1e-12);
}

TEST(SplitAmplitudes, ReferenceBarrierLambda) {
  const auto sys = rect(0.3);
  const auto tm = transfer_matrix(sys, kK0);
  const auto g = geometry(sys.potential);
  const auto tp = tunneling_params(tm, g, kK0);
  EXPECT_NEAR(split_amplitudes(tp, tm, g, Branch::plus).lambda, 0.3427621962905175, 1e-12);
  EXPECT_NEAR(split_amplitudes(tp, tm, g, Branch::minus).lambda, -0.3427621962905175, 1e-12);
}

TEST(SplitAmplitudes, Invariants) {
  for (const auto& sys : symmetric_zoo()) {
    const KGrid grid(0.05, 2.0, 120);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double k = grid.at(j);
      const auto tm = transfer_matrix(sys, k);
      const auto tp = tunneling_params(tm, geometry(sys.potential), k);
      const auto s = odd_split(sys, k);
      const auto amp = scattering_amplitudes(tm);
      if (s.reflection_vanishes) continue;
      EXPECT_NEAR(std::norm(s.A_in_ref), tp.R, 1e-10);
      EXPECT_NEAR(std::norm(s.B_out_ref), tp.R, 1e-10);
      EXPECT_NEAR(s.A_in_ref.real(), tp.R, 1e-10);
      EXPECT_NEAR((s.A_in_ref - s.B_out_ref * std::conj(amp.b_out)).real(), 0.0, 1e-10);
      EXPECT_NEAR(std::abs(s.lambda), std::atan(std::sqrt(tp.T / tp.R)), 1e-12);
      EXPECT_EQ(s.alpha, s.Lambda >= 0.0 ? 1 : -1);
      EXPECT_NEAR(std::norm(s.A_in_ref) + std::norm(s.A_in_tr), 1.0, 1e-12);
      EXPECT_NEAR(std::abs(s.A_in_ref + s.A_in_tr - 1.0), 0.0, 1e-14);
    }
  }
}

TEST(BranchSelection, AgreesWithFRule) {
  for (const auto& sys : symmetric_zoo()) {
    const auto g = geometry(sys.potential);
    const KGrid grid(0.05, 2.0, 120);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const auto tm = transfer_matrix(sys, grid.at(j));
      const auto tp = tunneling_params(tm, g, grid.at(j));
      if (tp.R < 1e-8) continue;
      EXPECT_EQ(select_odd_branch(sys.potential, tp, tm), branch_from_f(tp.F)) << "k = " << tp.k;
    }
  }
}

TEST(BranchSelection, WellWithFEqualPiTakesLowerRoot) {
  const auto sys = rect(-0.3);
  const auto tm = transfer_matrix(sys, 1.1);
  const auto tp = tunneling_params(tm, geometry(sys.potential), 1.1);
  EXPECT_NEAR(std::abs(wrap_angle(tp.F)), kPi, 1e-8);
  EXPECT_EQ(select_odd_branch(sys.potential, tp, tm), Branch::minus);
}

TEST(BranchSelection, BarrierWithFEqualZeroTakesUpperRoot) {
  const auto sys = rect(0.3);
  const auto tm = transfer_matrix(sys, kK0);
  const auto tp = tunneling_params(tm, geometry(sys.potential), kK0);
  EXPECT_NEAR(wrap_angle(tp.F), 0.0, 1e-8);
  EXPECT_EQ(select_odd_branch(sys.potential, tp, tm), Branch::plus);
}

TEST(BranchSelection, ParityResidualSeparatesRoots) {
  for (const auto& sys : symmetric_zoo()) {
    const auto g = geometry(sys.potential);
    const KGrid grid(0.05, 2.0, 60);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const auto tm = transfer_matrix(sys, grid.at(j));
      const auto tp = tunneling_params(tm, g, grid.at(j));
      if (tp.R < 1e-6) continue;
      const auto chosen = select_odd_branch(sys.potential, tp, tm);
      const auto other = chosen == Branch::plus ? Branch::minus : Branch::plus;
      EXPECT_LT(parity_residual(split_amplitudes(tp, tm, g, chosen), g), 1e-8);
      EXPECT_GT(parity_residual(split_amplitudes(tp, tm, g, other), g), 0.1);
    }
  }
}

TEST(BranchSelection, AsymmetricUnsupported) {
  const ScatteringSystem sys{PotentialSpec::piecewise(20.0, {{0.1, 2.0}, {0.2, 3.0}}), kElectron};
  const auto tm = transfer_matrix(sys, 0.5);
  const auto tp = tunneling_params(sys, 0.5);
  EXPECT_THROW(select_odd_branch(sys.potential, tp, tm), Unsupported);
  EXPECT_THROW(StationaryState(sys, 0.5).reflection(10.0), Unsupported);
  EXPECT_THROW(stationary_triple(sys, 0.5, XGrid(0.0, 40.0, 101)), Unsupported);
}

TEST(StationaryState, FluxLaws) {
  for (const auto& sys : symmetric_zoo()) {
    const auto g = geometry(sys.potential);
    const double m = sys.particle.mass();
    for (double k : {0.2, 0.55, kK0, 0.9, 1.4}) {
      const StationaryState st(sys, k);
      const double v = Constants::hbar * k / m;
      for (double x = g.a - 10.0; x <= g.b + 10.0; x += 0.25) {
        for (int side : {-1, 1}) {
          const auto r = st.reflection(x, side);
          const auto t = st.transmission(x, side);
          const double jr = Constants::hbar / m * (std::conj(r.value) * r.derivative).imag();
          const double jt = Constants::hbar / m * (std::conj(t.value) * t.derivative).imag();
          EXPECT_NEAR(jr / v, 0.0, 1e-8);
          EXPECT_NEAR(jt / v, st.params().T, 1e-8);
        }
      }
    }
  }
}

TEST(StationaryState, ReflectionContinuity) {
  for (const auto& sys : symmetric_zoo()) {
    const auto g = geometry(sys.potential);
    for (double k : {0.3, kK0, 1.2}) {
      const StationaryState st(sys, k);
      const auto left = st.reflection(g.a, -1).value;
      const auto right = st.reflection(g.a, 1).value;
      EXPECT_LE(std::abs(left - right), 1e-10 * std::max(1.0, std::abs(left)));
      EXPECT_NEAR(std::abs(st.reflection(g.x_mid, -1).value), 0.0, 1e-12);
      EXPECT_EQ(st.reflection(g.x_mid + 1e-3).value, 0.0);
      EXPECT_EQ(st.reflection(g.b + 4.0).value, 0.0);
    }
  }
}

TEST(StationaryTriple, Decomposition) {
  for (const auto& sys : symmetric_zoo()) {
    const auto g = geometry(sys.potential);
    const XGrid grid(g.a - 30.0, g.b + 30.0, 2401);
    for (double k : {0.3, kK0, 1.2}) {
      const auto tri = stationary_triple(sys, k, grid);
      double peak = 0.0;
      for (const auto& v : tri.phi_full.values) peak = std::max(peak, std::abs(v));
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& f = tri.phi_full.values[i];
        EXPECT_LE(std::abs(f - tri.phi_tr.values[i] - tri.phi_ref.values[i]), 1e-12 * peak);
        if (grid.at(i) >= g.x_mid) EXPECT_EQ(tri.phi_ref.values[i], 0.0);
      }
    }
  }
}

TEST(StationaryTriple, GridFlux) {
  const auto sys = rect(0.3);
  const XGrid grid(480.0, 530.0, 50001);
  const auto tri = stationary_triple(sys, kK0, grid);
  const double v = Constants::hbar * kK0 / sys.particle.mass();
  const double T = tunneling_params(sys, kK0).T;
  for (std::size_t i = 1; i + 1 < grid.size(); i += 997) {
    EXPECT_NEAR(flux(tri.phi_ref, i) / v, 0.0, 1e-8);
    // Second-order differences, dx = 1e-3 nm.
    if (std::abs(grid.at(i) - 502.5) > 0.01) EXPECT_NEAR(flux(tri.phi_tr, i) / v, T, 1e-6);
  }
}

TEST(StationaryTriple, BarrierTopLimit) {
  const auto sys = rect(0.3);
  const double kv = std::sqrt(kElectron.energy_to_k2() * 0.3);
  const XGrid grid(490.0, 515.0, 501);
  const auto at = stationary_triple(sys, kv, grid);
  const auto near = stationary_triple(sys, kv * (1.0 + 1e-10), grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_LE(std::abs(at.phi_full.values[i] - at.phi_tr.values[i] - at.phi_ref.values[i]), 1e-12);
    EXPECT_NEAR(std::abs(at.phi_ref.values[i] - near.phi_ref.values[i]), 0.0, 1e-7);
  }
}
