#pragma once

#include <optional>
#include <span>
#include <vector>

#include "tunnelsplit/model.hpp"
#include "tunnelsplit/potentials.hpp"
#include "tunnelsplit/scattering.hpp"
#include "tunnelsplit/splitting.hpp"

namespace tunnelsplit {

class SpectralProfile {
 public:
  SpectralProfile(KGrid grid, std::vector<cplx> amplitude, double k0, double l0);

  const KGrid& grid() const { return grid_; }
  const std::vector<cplx>& amplitude() const { return amplitude_; }
  double k0() const { return k0_; }
  double l0() const { return l0_; }

  // Trapezoid integrals over the grid.
  double norm() const;
  double mean_k() const;
  double variance_k() const;
  // max(|A|^2 at the two grid ends) / max |A|^2.
  double edge_density_ratio() const;

 private:
  KGrid grid_;
  std::vector<cplx> amplitude_;
  double k0_;
  double l0_;
};

// A(k) proportional to exp(-l0^2 (k - k0)^2), renormalized on the grid.
// Throws InvalidInput when k0*l0 < 3.
SpectralProfile gaussian_profile(double k0, double l0, const KGrid& grid);

// Per-k scattering data shared by synthesis and the moment formulas.
struct SpectralTables {
  TunnelingTable tunneling;
  bool symmetric = false;
  // Populated only for symmetric potentials.
  std::vector<SplitAmplitudes> split;
  // Odd-branch Lambda made continuous modulo pi.
  std::vector<double> Lambda;
  std::vector<double> dT;
  std::vector<double> dJ;
  std::vector<double> dF;
  std::vector<double> dLambda;
};

// Closed-form derivatives replace finite differences for rectangular and
// delta potentials unless disabled.
SpectralTables build_tables(const ScatteringSystem& sys, const KGrid& grid,
                            bool use_closed_forms = true);

// Five-point derivative of samples on a uniform grid (one-sided at the ends).
std::vector<double> five_point_derivative(std::span<const double> f, double h);

struct GridOverrides {
  std::optional<double> k_min;
  std::optional<double> k_max;
  std::optional<std::size_t> k_points;
  std::optional<double> x_min;
  std::optional<double> x_max;
  std::optional<double> dx;
};

struct GridPlan {
  KGrid k;
  XGrid x;
};

// Grids for times in [0, t_max]: k0 +- 8 sigma_k, x range covering the
// incident, transmitted and reflected packets, k spacing fine enough that
// the periodic images of the spectral sums stay off the x range.
GridPlan plan_grids(const ScatteringSystem& sys, double k0, double l0, double t_max,
                    const GridOverrides& overrides = {});

class Synthesizer {
 public:
  Synthesizer(const ScatteringSystem& sys, const SpectralProfile& profile,
              const SpectralTables& tables, XGrid grid);

  const XGrid& grid() const { return grid_; }
  const Geometry& geometry() const { return geom_; }
  double mass() const { return mass_; }

  WaveField synthesize(double t, Channel c) const;
  // One pass over the k grid for several channels.
  std::vector<WaveField> synthesize(double t, std::span<const Channel> channels) const;

  // 1 for full, <T> for transmission, <R> for reflection. The tr value is
  // the norm away from the collision; while the packet overlaps x_mid the
  // kink of the TWF there moves probability between tr and the
  // interference term.
  double expected_norm(Channel c) const;
  // Throws GridLeakError if a full or ref norm misses expected_norm by
  // more than 1e-6. Those two norms are conserved exactly.
  void check_leakage(const WaveField& f) const;
  void set_leak_check(bool on) { leak_check_ = on; }

 private:
  struct KinkSite {
    std::size_t node;
    bool has[3];
    // Per-k one-sided derivatives of phi_c, [c][j].
    std::vector<cplx> left[3];
    std::vector<cplx> right[3];
  };

  XGrid grid_;
  Geometry geom_;
  double mass_;
  bool symmetric_;
  bool leak_check_ = true;
  double mean_T_ = 0.0;
  double mean_R_ = 0.0;
  double k_first_;
  double dk_;
  std::vector<double> omega_;
  std::vector<cplx> base_;  // w_j A_j / sqrt(2 pi)
  // Outer-region coefficients per channel: [0] full, [1] tr, [2] ref.
  std::vector<cplx> left_fwd_[3];
  std::vector<cplx> left_bwd_[3];
  std::vector<cplx> right_fwd_;
  // Node coordinates with a, b and x_mid snapped to their exact values.
  std::vector<double> x_;
  // 0 left, 1 interior, 2 right.
  std::vector<unsigned char> region_;
  // Interior values phi_c(x_i), row per interior node; the row index is
  // interior_row_[i].
  std::vector<std::size_t> interior_row_;
  std::vector<cplx> interior_[3];
  std::vector<KinkSite> kinks_;
};

// Convenience wrapper building a Synthesizer for one call.
WaveField synthesize(const ScatteringSystem& sys, const SpectralProfile& profile, const XGrid& grid,
                     double t, Channel c);

struct OutMoments {
  double mean_T = 0.0;
  double mean_R = 0.0;
  double mean_dT = 0.0;
  std::optional<double> k_tr;
  // Mean wavenumber of the reflected out-asymptote; negative.
  std::optional<double> k_ref;
  std::optional<double> dJ_tr;
  std::optional<double> dJF_ref;
};

struct InMoments {
  std::optional<double> dLambda_tr;
  std::optional<double> dLambda_ref;
  std::optional<double> x_start_tr;
  std::optional<double> x_start_ref;
};

OutMoments out_asymptote_moments(const SpectralProfile& profile, const SpectralTables& tables);
InMoments split_in_asymptote_moments(const SpectralProfile& profile, const SpectralTables& tables);

// |full|^2 - |tr|^2 - |ref|^2 pointwise.
std::vector<double> interference_density(const WaveField& full, const WaveField& tr,
                                         const WaveField& ref);

// Everything needed to evolve one packet through one potential.
struct Scenario {
  ScatteringSystem system;
  SpectralProfile profile;
  SpectralTables tables;
  XGrid xgrid;

  static Scenario build(const ScatteringSystem& sys, double k0, double l0, double t_max,
                        const GridOverrides& overrides = {});
  Synthesizer synthesizer() const { return Synthesizer(system, profile, tables, xgrid); }
};

}  // namespace tunnelsplit
