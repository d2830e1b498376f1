#pragma once

#include <utility>
#include <vector>

#include "tunnelsplit/model.hpp"
#include "tunnelsplit/potentials.hpp"

namespace tunnelsplit {

struct ScatteringSystem {
  PotentialSpec potential;
  Particle particle;
};

// (A_in, B_out) = Y (A_out, B_in) with Y = [[q, p], [p*, q*]].
// For opaque barriers q and p are stored as mantissas: the physical
// values are exp(log_scale) * q and exp(log_scale) * p.
struct TransferMatrix {
  cplx q;
  cplx p;
  double log_scale = 0.0;

  double transmission() const;
  // (|q|^2 - |p|^2 - 1) / |q|^2, in physical units.
  double flux_residual() const;
};

struct TunnelingParams {
  double k = 0.0;
  double T = 1.0;
  double R = 0.0;
  double J = 0.0;
  double F = 0.0;
  // False where R < 1e-14 and arg(p) carries no information.
  bool f_defined = true;
};

struct AmplitudeSet {
  cplx a_in;
  cplx b_out;
  cplx a_out;
  cplx b_in;

  double flux_balance() const;
};

TransferMatrix transfer_matrix(const ScatteringSystem& sys, double k);
TunnelingParams tunneling_params(const ScatteringSystem& sys, double k);
TunnelingParams tunneling_params(const TransferMatrix& tm, const Geometry& g, double k);
AmplitudeSet scattering_amplitudes(const TransferMatrix& tm);
std::pair<AmplitudeSet, AmplitudeSet> auxiliary_amplitudes(const TransferMatrix& tm);

struct OdeOptions {
  // RK4 steps per nm; 0 picks a step from the local wavelength.
  double steps_per_nm = 0.0;
  // Richardson estimate of |dT| that triggers an error.
  double tolerance = 1e-10;
};

// Independent check of transfer_matrix by RK4 integration of the
// stationary equation from x = b to x = a. Rectangular and piecewise only.
TunnelingParams ode_oracle(const ScatteringSystem& sys, double k, const OdeOptions& opt = {});

// T, J, F on a KGrid with J and F unwrapped along k.
struct TunnelingTable {
  KGrid grid;
  std::vector<TransferMatrix> matrices;
  std::vector<TunnelingParams> params;
};

TunnelingTable tabulate(const ScatteringSystem& sys, const KGrid& grid);

// Wraps an angle into (-pi, pi].
double wrap_angle(double phi);

}  // namespace tunnelsplit
