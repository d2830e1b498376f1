#pragma once

#include <utility>
#include <vector>

#include "tunnelsplit/model.hpp"
#include "tunnelsplit/potentials.hpp"
#include "tunnelsplit/scattering.hpp"

namespace tunnelsplit {

enum class Branch { plus, minus };

struct SplitAmplitudes {
  double k = 0.0;
  double lambda = 0.0;
  double Lambda = 0.0;
  int alpha = 1;
  cplx A_in_ref;
  cplx B_out_ref;
  cplx A_out_ref;
  cplx B_in_ref;
  double phi_plus = 0.0;
  double phi_minus = 0.0;
  // Set when R < 1e-14; all ref amplitudes are then zero.
  bool reflection_vanishes = false;

  // 1 - A_in_ref, formed as T - i*sign(lambda)*sqrt(RT) to keep precision when T is small.
  cplx A_in_tr = 1.0;
};

SplitAmplitudes split_amplitudes(const TunnelingParams& tp, const TransferMatrix& tm,
                                 const Geometry& g, Branch branch);

// max |phi(x_mid + x') + phi(x_mid - x')| / max |phi| over probe points,
// using the outer-region RWF forms.
double parity_residual(const SplitAmplitudes& s, const Geometry& g);

Branch select_odd_branch(const PotentialSpec& p, const TunnelingParams& tp,
                         const TransferMatrix& tm);
// The F in {0, pi} rule: F = 0 takes the upper sign.
Branch branch_from_f(double F);

// psi and psi' at a point. `side` picks the one-sided derivative at a
// kink (-1 left, +1 right).
struct PointValue {
  cplx value;
  cplx derivative;
};

// Stationary full / tr / ref solutions at one k with A_in = 1.
class StationaryState {
 public:
  StationaryState(const ScatteringSystem& sys, double k);
  StationaryState(const ScatteringSystem& sys, const TunnelingParams& tp,
                  const TransferMatrix& tm, const SplitAmplitudes& split);

  double k() const { return k_; }
  const TransferMatrix& matrix() const { return tm_; }
  const TunnelingParams& params() const { return tp_; }
  const SplitAmplitudes& split() const { return split_; }
  const AmplitudeSet& amplitudes() const { return amp_; }

  PointValue full(double x, int side = 0) const;
  PointValue reflection(double x, int side = 0) const;
  PointValue transmission(double x, int side = 0) const;
  PointValue evaluate(Channel c, double x, int side = 0) const;

 private:
  enum class Kind { rectangular, delta, stack };

  void prepare(const ScatteringSystem& sys);
  PointValue full_interior(double x) const;
  PointValue reflection_interior(double x) const;

  Kind kind_;
  bool symmetric_;
  Geometry geom_;
  double k_;
  TransferMatrix tm_;
  TunnelingParams tp_;
  SplitAmplitudes split_;
  AmplitudeSet amp_;
  std::vector<double> edges_;  // layer edges, left to right
  std::vector<double> k2_;     // signed K^2 = (2m/hbar^2)(V - E) per layer
  // Full solution (psi, psi') at each layer's right edge.
  std::vector<PointValue> full_right_;
  // Stacks: ref = ref_scale * u on [a, x_mid], u(x_mid) = 0, u'(x_mid) = 1.
  std::vector<double> u_edges_;  // segment edges on [a, x_mid], left to right
  std::vector<double> u_k2_;
  std::vector<std::pair<double, double>> u_right_;
  cplx ref_scale_;
  // Rectangular: ref = ref_prefactor * S(x - x_mid).
  cplx ref_prefactor_;
};

struct StationaryTriple {
  double k;
  WaveField phi_full;
  WaveField phi_tr;
  WaveField phi_ref;
};

StationaryTriple stationary_triple(const ScatteringSystem& sys, double k, const XGrid& grid);

}  // namespace tunnelsplit
