#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "tunnelsplit/packets.hpp"

namespace tunnelsplit {

struct TrajectorySample {
  double t;
  double x;
};

// Mean position of a channel at each time. Throws ZeroNormError when the
// channel carries (almost) no probability.
std::vector<TrajectorySample> cm_trajectory(const Synthesizer& synth, Channel c,
                                            std::span<const double> times);

struct RootOptions {
  double bracket_step = 1.0;  // fs
  double tolerance = 0.01;    // fs
  // 0 derives the horizon from the asymptotic moments.
  double horizon = 0.0;
};

struct ExactTimes {
  std::optional<double> transmission;
  std::optional<double> reflection;
  std::optional<double> t1_tr;
  std::optional<double> t2_tr;
  std::optional<double> t1_ref;
  std::optional<double> t2_ref;
  // False when the reflected CM never reaches a - L1.
  bool reflection_crossed = false;
};

// Roots of <x>_tr(t) = a - L1 (smallest), <x>_tr(t) = b + L2 (largest) and
// of <x>_ref(t) = a - L1 (smallest and largest).
ExactTimes exact_times(const Scenario& sc, double L1, double L2, const RootOptions& opt = {});
// Builds a scenario whose grids cover the predicted horizon.
ExactTimes exact_times(const ScatteringSystem& sys, double k0, double l0, double L1, double L2,
                       const RootOptions& opt = {});

// Time by which both subensembles have passed their far crossing points.
double timing_horizon(const ScatteringSystem& sys, const SpectralProfile& profile,
                      const SpectralTables& tables, double L1, double L2);

struct AsymptoticTimes {
  std::optional<double> tau_tr;
  std::optional<double> tau_ref;
  std::optional<double> tau_tr_as;
  std::optional<double> tau_ref_as;
};

AsymptoticTimes asymptotic_times(const SpectralProfile& profile, const SpectralTables& tables,
                                 double mass, double L1, double L2);

struct EffectiveWidths {
  std::optional<double> tr;
  std::optional<double> ref;
};

EffectiveWidths effective_widths(const SpectralProfile& profile, const SpectralTables& tables);

struct ClosedForms {
  double d_eff;
  double x_start;
};

ClosedForms rect_closed_forms(const Rectangular& r, const Particle& particle, double k);
ClosedForms delta_closed_forms(double W, const Particle& particle, double k);

// Analytic k-derivatives used in place of finite differences.
struct AnalyticDerivatives {
  double dT;
  double dJ;
  double dLambda;
};

AnalyticDerivatives rect_derivatives(const Rectangular& r, const Particle& particle, double k);
AnalyticDerivatives delta_derivatives(double W, const Particle& particle, double k);

struct SwpaTimes {
  std::optional<double> transmission;
  std::optional<double> reflection;
};

SwpaTimes swpa_phase_times(const SpectralProfile& profile, const SpectralTables& tables,
                           double mass, double L1, double L2, double a);

struct TimingReport {
  std::string scenario;
  double L1 = 0.0;
  double L2 = 0.0;
  double mean_T = 0.0;
  ExactTimes exact;
  AsymptoticTimes asymptotic;
  EffectiveWidths widths;
  InMoments starts;
  SwpaTimes swpa;
};

TimingReport timing_report(const ScatteringSystem& sys, double k0, double l0, double L1,
                           double L2, const RootOptions& opt = {});

std::string format_report(const TimingReport& r);
void write_report_csv(std::ostream& os, const TimingReport& r);

}  // namespace tunnelsplit
