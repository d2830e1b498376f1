#include <cmath>
#include <numbers>

#include "tunnelsplit/errors.hpp"
#include "tunnelsplit/kernels.hpp"
#include "tunnelsplit/packets.hpp"
#include "tunnelsplit/parallel.hpp"

namespace tunnelsplit {

namespace {

constexpr std::size_t kFull = 0;
constexpr std::size_t kTr = 1;
constexpr std::size_t kRef = 2;
constexpr double kLeakTolerance = 1e-6;
constexpr unsigned char kLeft = 0;
constexpr unsigned char kInterior = 1;
constexpr unsigned char kRight = 2;

std::size_t slot(Channel c) {
  switch (c) {
    case Channel::full:
      return kFull;
    case Channel::transmission:
      return kTr;
    case Channel::reflection:
      return kRef;
  }
  return kFull;
}

const Channel kChannels[3] = {Channel::full, Channel::transmission, Channel::reflection};

}  // namespace

Synthesizer::Synthesizer(const ScatteringSystem& sys, const SpectralProfile& profile,
                         const SpectralTables& tables, XGrid grid)
    : grid_(grid),
      geom_(tunnelsplit::geometry(sys.potential)),
      mass_(sys.particle.mass()),
      symmetric_(tables.symmetric) {
  const KGrid& kg = profile.grid();
  const std::size_t nk = kg.size();
  if (tables.tunneling.params.size() != nk) throw InvalidInput("tables do not match the profile grid");
  k_first_ = kg.k_min();
  dk_ = kg.spacing();

  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  omega_.resize(nk);
  base_.resize(nk);
  for (auto& v : left_fwd_) v.resize(nk);
  for (auto& v : left_bwd_) v.resize(nk);
  right_fwd_.resize(nk);
  for (std::size_t j = 0; j < nk; ++j) {
    const double k = kg.at(j);
    const auto& tp = tables.tunneling.params[j];
    const double w = kg.weight(j) * std::norm(profile.amplitude()[j]);
    mean_T_ += w * tp.T;
    mean_R_ += w * tp.R;
    omega_[j] = Constants::hbar * k * k / (2.0 * mass_);
    base_[j] = kg.weight(j) * profile.amplitude()[j] * inv_sqrt_2pi;
    const auto amp = scattering_amplitudes(tables.tunneling.matrices[j]);
    left_fwd_[kFull][j] = 1.0;
    left_bwd_[kFull][j] = amp.b_out;
    right_fwd_[j] = amp.a_out;
    if (symmetric_) {
      const auto& s = tables.split[j];
      left_fwd_[kTr][j] = s.A_in_tr;
      left_bwd_[kTr][j] = 0.0;
      left_fwd_[kRef][j] = s.A_in_ref;
      left_bwd_[kRef][j] = s.B_out_ref;
    }
  }

  const std::size_t nx = grid_.size();
  x_.resize(nx);
  for (std::size_t i = 0; i < nx; ++i) x_[i] = grid_.at(i);
  for (double exact : {geom_.a, geom_.b, geom_.x_mid})
    if (auto n = grid_.node_at(exact)) x_[*n] = exact;

  const bool delta = sys.potential.is_delta();
  region_.resize(nx);
  interior_row_.assign(nx, 0);
  std::vector<std::size_t> interior_nodes;
  for (std::size_t i = 0; i < nx; ++i) {
    const double x = x_[i];
    if (delta) {
      region_[i] = x < geom_.a ? kLeft : kRight;
    } else if (x <= geom_.a) {
      region_[i] = kLeft;
    } else if (x >= geom_.b) {
      region_[i] = kRight;
    } else {
      region_[i] = kInterior;
      interior_row_[i] = interior_nodes.size();
      interior_nodes.push_back(i);
    }
  }

  // Kink sites: x_mid for tr and ref, and the delta location for full.
  if (auto n = grid_.node_at(geom_.x_mid)) {
    KinkSite site{*n, {delta, symmetric_, symmetric_}, {}, {}};
    if (site.has[0] || site.has[1] || site.has[2]) {
      for (std::size_t c = 0; c < 3; ++c) {
        if (!site.has[c]) continue;
        site.left[c].resize(nk);
        site.right[c].resize(nk);
      }
      kinks_.push_back(std::move(site));
    }
  }

  const std::size_t ni = interior_nodes.size();
  const std::size_t channels = symmetric_ ? 3 : 1;
  for (std::size_t c = 0; c < channels; ++c) interior_[c].resize(ni * nk);
  if (ni == 0 && kinks_.empty()) return;

  parallel_for(nk, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      const SplitAmplitudes split = symmetric_ ? tables.split[j] : SplitAmplitudes{};
      StationaryState st(sys, tables.tunneling.params[j], tables.tunneling.matrices[j], split);
      for (std::size_t r = 0; r < ni; ++r) {
        const double x = x_[interior_nodes[r]];
        const cplx full = st.full(x).value;
        interior_[kFull][r * nk + j] = full;
        if (symmetric_) {
          const cplx ref = st.reflection(x).value;
          interior_[kRef][r * nk + j] = ref;
          interior_[kTr][r * nk + j] = full - ref;
        }
      }
      for (auto& site : kinks_) {
        const double x = x_[site.node];
        for (std::size_t c = 0; c < 3; ++c) {
          if (!site.has[c]) continue;
          site.left[c][j] = st.evaluate(kChannels[c], x, -1).derivative;
          site.right[c][j] = st.evaluate(kChannels[c], x, +1).derivative;
        }
      }
    }
  }, 8);
}

double Synthesizer::expected_norm(Channel c) const {
  switch (c) {
    case Channel::full:
      return 1.0;
    case Channel::transmission:
      return mean_T_;
    case Channel::reflection:
      return mean_R_;
  }
  return 1.0;
}

void Synthesizer::check_leakage(const WaveField& f) const {
  if (f.channel == Channel::transmission) return;
  const double n = norm(f);
  const double expected = expected_norm(f.channel);
  if (std::abs(n - expected) > kLeakTolerance)
    throw GridLeakError("packet leaves the x grid or aliases at t = " + std::to_string(f.time) +
                        " fs (" + std::string(to_string(f.channel)) + " norm " + std::to_string(n) +
                        ", expected " + std::to_string(expected) + ")");
}

WaveField Synthesizer::synthesize(double t, Channel c) const {
  const Channel cs[1] = {c};
  return std::move(synthesize(t, cs).front());
}

std::vector<WaveField> Synthesizer::synthesize(double t, std::span<const Channel> channels) const {
  bool want[3] = {false, false, false};
  for (Channel c : channels) {
    if (c != Channel::full && !symmetric_)
      throw Unsupported("tr/ref channels require a symmetric potential");
    want[slot(c)] = true;
  }
  const std::size_t nk = omega_.size();
  std::vector<cplx> coef(nk);
  for (std::size_t j = 0; j < nk; ++j) coef[j] = base_[j] * std::polar(1.0, -omega_[j] * t);

  std::vector<std::size_t> active;
  for (std::size_t c = 0; c < 3; ++c)
    if (want[c]) active.push_back(c);

  std::vector<kernels::PlaneWaveSpectrum> left;
  std::vector<cplx> fwd(nk), bwd(nk);
  for (std::size_t c : active) {
    for (std::size_t j = 0; j < nk; ++j) {
      fwd[j] = coef[j] * left_fwd_[c][j];
      bwd[j] = coef[j] * left_bwd_[c][j];
    }
    left.emplace_back(k_first_, dk_, fwd, bwd);
  }
  for (std::size_t j = 0; j < nk; ++j) {
    fwd[j] = coef[j] * right_fwd_[j];
    bwd[j] = 0.0;
  }
  const kernels::PlaneWaveSpectrum right(k_first_, dk_, fwd, bwd);
  std::vector<const kernels::PlaneWaveSpectrum*> left_ptrs;
  for (const auto& s : left) left_ptrs.push_back(&s);
  const kernels::PlaneWaveSpectrum* right_ptr[1] = {&right};

  const std::size_t nx = x_.size();
  std::vector<std::vector<cplx>> values(3);
  for (std::size_t c : active) values[c].resize(nx);

  parallel_for(nx, [&](std::size_t begin, std::size_t end) {
    std::vector<cplx> out(active.size());
    cplx right_out[1];
    for (std::size_t i = begin; i < end; ++i) {
      const double x = x_[i];
      switch (region_[i]) {
        case kLeft:
          kernels::plane_wave_sums(left_ptrs, x, out);
          for (std::size_t s = 0; s < active.size(); ++s) values[active[s]][i] = out[s];
          break;
        case kRight:
          kernels::plane_wave_sums(right_ptr, x, right_out);
          for (std::size_t c : active) values[c][i] = c == kRef ? cplx(0.0) : right_out[0];
          break;
        default: {
          const std::size_t row = interior_row_[i] * nk;
          for (std::size_t c : active) {
            const cplx* phi = interior_[c].data() + row;
            cplx acc = 0.0;
            for (std::size_t j = 0; j < nk; ++j) acc += coef[j] * phi[j];
            values[c][i] = acc;
          }
        }
      }
    }
  }, 256);

  std::vector<WaveField> fields;
  fields.reserve(channels.size());
  for (Channel ch : channels) {
    const std::size_t c = slot(ch);
    WaveField f{grid_, values[c], t, ch, mass_, {}};
    for (const auto& site : kinks_) {
      if (!site.has[c]) continue;
      cplx l = 0.0, r = 0.0;
      for (std::size_t j = 0; j < nk; ++j) {
        l += coef[j] * site.left[c][j];
        r += coef[j] * site.right[c][j];
      }
      f.kinks.push_back({site.node, l, r});
    }
    if (leak_check_) check_leakage(f);
    fields.push_back(std::move(f));
  }
  return fields;
}

WaveField synthesize(const ScatteringSystem& sys, const SpectralProfile& profile, const XGrid& grid,
                     double t, Channel c) {
  const auto tables = build_tables(sys, profile.grid());
  return Synthesizer(sys, profile, tables, grid).synthesize(t, c);
}

}  // namespace tunnelsplit
