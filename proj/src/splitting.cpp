#include "tunnelsplit/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "propagation.hpp"
#include "tunnelsplit/errors.hpp"

namespace tunnelsplit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kResonanceR = 1e-14;
constexpr double kParityTolerance = 1e-8;
constexpr double kSeparation = 1e-3;
const cplx I(0.0, 1.0);

cplx plane(double k, double x) { return std::polar(1.0, k * x); }

}  // namespace

SplitAmplitudes split_amplitudes(const TunnelingParams& tp, const TransferMatrix& tm,
                                 const Geometry& g, Branch branch) {
  SplitAmplitudes s;
  s.k = tp.k;
  const double sigma = branch == Branch::plus ? 1.0 : -1.0;
  if (tp.R < kResonanceR) {
    s.reflection_vanishes = true;
    s.lambda = sigma * kPi / 2;
    s.Lambda = s.lambda;
    s.alpha = s.Lambda >= 0.0 ? 1 : -1;
    s.A_in_ref = s.B_out_ref = s.A_out_ref = s.B_in_ref = 0.0;
    s.A_in_tr = 1.0;
    return s;
  }
  const double R = tp.R;
  const double T = tp.T;
  const double sRT = std::sqrt(R * T);
  s.lambda = sigma * std::atan2(std::sqrt(T), std::sqrt(R));
  s.Lambda = s.lambda;
  s.alpha = s.Lambda >= 0.0 ? 1 : -1;
  s.A_in_ref = cplx(R, sigma * sRT);
  s.A_in_tr = cplx(T, -sigma * sRT);
  s.B_out_ref = std::conj(tm.p) / tm.q;
  const double shift = tp.J - tp.F - kPi / 2 + 2.0 * tp.k * g.a;
  s.phi_plus = 0.5 * (s.lambda + shift);
  s.phi_minus = 0.5 * (s.lambda - shift);
  if (tm.log_scale == 0.0) {
    cplx G = tm.q * std::polar(1.0, -s.phi_minus) - std::conj(tm.p) * std::polar(1.0, s.phi_minus);
    cplx e = std::polar(std::sqrt(R), s.phi_plus);
    s.A_out_ref = std::conj(G) * e;
    s.B_in_ref = G * e;
  } else {
    // Mantissa form of q* A - p B and -p* A + q B.
    const double inv_q = 1.0 / std::abs(tm.q);
    s.A_out_ref = I * sigma * std::sqrt(R) * (std::abs(tm.q) / tm.q);
    s.B_in_ref = std::conj(tm.p) *
                 cplx(std::exp(-tm.log_scale) * inv_q * inv_q, -sigma * std::sqrt(R) * inv_q);
  }
  return s;
}

double parity_residual(const SplitAmplitudes& s, const Geometry& g) {
  if (s.reflection_vanishes) return 0.0;
  const double k = s.k;
  const double probes[] = {0.31, 1.13, 2.27, 4.71};
  double worst = 0.0;
  double scale = 0.0;
  for (double p : probes) {
    double xp = 0.5 * g.d + p / k;
    double xl = g.x_mid - xp;
    double xr = g.x_mid + xp;
    cplx left = s.A_in_ref * plane(k, xl) + s.B_out_ref * plane(k, -xl);
    cplx right = s.A_out_ref * plane(k, xr) + s.B_in_ref * plane(k, -xr);
    worst = std::max(worst, std::abs(left + right));
    scale = std::max(scale, std::max(std::abs(left), std::abs(right)));
  }
  return scale > 0.0 ? worst / scale : 0.0;
}

Branch branch_from_f(double F) {
  return std::abs(wrap_angle(F)) < kPi / 2 ? Branch::plus : Branch::minus;
}

Branch select_odd_branch(const PotentialSpec& p, const TunnelingParams& tp,
                         const TransferMatrix& tm) {
  if (!is_symmetric(p)) throw Unsupported("branch selection requires a symmetric potential");
  if (tp.R < kResonanceR) return Branch::plus;
  const auto g = geometry(p);
  // Rounding in G grows like eps * |q|; past that the probe cannot separate
  // the roots and the F rule decides.
  const double eps = std::numeric_limits<double>::epsilon();
  const double noise = tm.log_scale > 0.0 ? 1.0 : 100.0 * eps * std::abs(tm.q);
  if (noise > 1e-3) return branch_from_f(tp.F);
  const double tol = std::max(kParityTolerance, noise);
  double r_plus = parity_residual(split_amplitudes(tp, tm, g, Branch::plus), g);
  double r_minus = parity_residual(split_amplitudes(tp, tm, g, Branch::minus), g);
  if (r_plus < tol && r_plus <= r_minus) return Branch::plus;
  if (r_minus < tol) return Branch::minus;
  // Near a resonance the RWF is O(sqrt R) and rounding dominates the
  // residual; the wrong root still sits near 2.
  if (std::min(r_plus, r_minus) < kSeparation * std::max(r_plus, r_minus))
    return r_plus < r_minus ? Branch::plus : Branch::minus;
  throw NumericalError("select_odd_branch: neither root gives an odd RWF (residuals " +
                       std::to_string(r_plus) + ", " + std::to_string(r_minus) + ")");
}

StationaryState::StationaryState(const ScatteringSystem& sys, double k) : k_(k) {
  tm_ = transfer_matrix(sys, k);
  geom_ = geometry(sys.potential);
  tp_ = tunneling_params(tm_, geom_, k);
  symmetric_ = is_symmetric(sys.potential);
  if (symmetric_)
    split_ = split_amplitudes(tp_, tm_, geom_, select_odd_branch(sys.potential, tp_, tm_));
  prepare(sys);
}

StationaryState::StationaryState(const ScatteringSystem& sys, const TunnelingParams& tp,
                                 const TransferMatrix& tm, const SplitAmplitudes& split)
    : k_(tp.k), tm_(tm), tp_(tp), split_(split) {
  geom_ = geometry(sys.potential);
  symmetric_ = is_symmetric(sys.potential);
  prepare(sys);
}

void StationaryState::prepare(const ScatteringSystem& sys) {
  amp_ = scattering_amplitudes(tm_);
  const auto& v = sys.potential.variant();
  kind_ = std::holds_alternative<Rectangular>(v) ? Kind::rectangular
          : std::holds_alternative<Delta>(v)     ? Kind::delta
                                                 : Kind::stack;
  if (kind_ == Kind::delta) return;

  const double c2 = sys.particle.energy_to_k2();
  const double k2 = k_ * k_;
  const auto ls = layers(sys.potential);
  edges_.assign(1, geom_.a);
  for (const auto& l : ls) {
    edges_.push_back(edges_.back() + l.width);
    k2_.push_back(c2 * l.height - k2);
    if (k2_.back() > 0.0 && std::sqrt(k2_.back()) * l.width > 700.0)
      throw NumericalError("stationary state: layer too opaque for field evaluation");
  }
  edges_.back() = geom_.b;

  // Full solution backward from b.
  full_right_.resize(ls.size());
  cplx psi = amp_.a_out * plane(k_, geom_.b);
  cplx dpsi = I * k_ * psi;
  for (std::size_t i = ls.size(); i-- > 0;) {
    full_right_[i] = {psi, dpsi};
    auto f = detail::layer_functions(k2_[i], edges_[i + 1] - edges_[i]);
    cplx p0 = f.C * psi - f.S * dpsi;
    cplx d0 = -f.KS * psi + f.C * dpsi;
    psi = p0;
    dpsi = d0;
  }

  if (!symmetric_ || split_.reflection_vanishes) return;

  if (kind_ == Kind::rectangular) {
    const double K2 = k2_[0];
    auto half = detail::layer_functions(K2, 0.5 * geom_.d);
    const double arg = k_ * geom_.a + split_.phi_minus;
    ref_prefactor_ = 2.0 * std::sqrt(tp_.R) * std::polar(1.0, split_.phi_plus) *
                     (half.KS * std::cos(arg) - k_ * half.C * std::sin(arg));
    return;
  }

  // Stack: segments of [a, x_mid], integrated leftward from x_mid.
  u_edges_.assign(1, geom_.a);
  for (std::size_t i = 0; i < ls.size(); ++i) {
    double right = std::min(edges_[i + 1], geom_.x_mid);
    if (right <= u_edges_.back()) break;
    u_edges_.push_back(right);
    u_k2_.push_back(k2_[i]);
    if (right >= geom_.x_mid) break;
  }
  u_edges_.back() = geom_.x_mid;
  u_right_.resize(u_k2_.size());
  double u = 0.0;
  double du = 1.0;
  for (std::size_t i = u_k2_.size(); i-- > 0;) {
    u_right_[i] = {u, du};
    auto f = detail::layer_functions(u_k2_[i], u_edges_[i + 1] - u_edges_[i]);
    double u0 = f.C * u - f.S * du;
    double d0 = -f.KS * u + f.C * du;
    u = u0;
    du = d0;
  }
  const cplx ea = plane(k_, geom_.a);
  const cplx psi_a = split_.A_in_ref * ea + split_.B_out_ref / ea;
  const cplx dpsi_a = I * k_ * (split_.A_in_ref * ea - split_.B_out_ref / ea);
  const double w = 1.0 / (k_ * k_);
  ref_scale_ = (u * psi_a + w * du * dpsi_a) / (u * u + w * du * du);
}

PointValue StationaryState::full_interior(double x) const {
  auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
  std::size_t i = static_cast<std::size_t>(std::distance(edges_.begin(), it));
  i = std::clamp<std::size_t>(i, 1, edges_.size() - 1) - 1;
  auto f = detail::layer_functions(k2_[i], edges_[i + 1] - x);
  const auto& r = full_right_[i];
  return {f.C * r.value - f.S * r.derivative, -f.KS * r.value + f.C * r.derivative};
}

PointValue StationaryState::reflection_interior(double x) const {
  if (kind_ == Kind::rectangular) {
    auto f = detail::layer_functions(k2_[0], x - geom_.x_mid);
    return {ref_prefactor_ * f.S, ref_prefactor_ * f.C};
  }
  auto it = std::upper_bound(u_edges_.begin(), u_edges_.end(), x);
  std::size_t i = static_cast<std::size_t>(std::distance(u_edges_.begin(), it));
  i = std::clamp<std::size_t>(i, 1, u_edges_.size() - 1) - 1;
  auto f = detail::layer_functions(u_k2_[i], u_edges_[i + 1] - x);
  const auto& r = u_right_[i];
  double u = f.C * r.first - f.S * r.second;
  double du = -f.KS * r.first + f.C * r.second;
  return {ref_scale_ * u, ref_scale_ * du};
}

PointValue StationaryState::full(double x, int side) const {
  const double a = geom_.a;
  const double b = geom_.b;
  auto left = [&] {
    cplx e = plane(k_, x);
    cplx r = amp_.b_out / e;
    return PointValue{e + r, I * k_ * (e - r)};
  };
  auto right = [&] {
    cplx v = amp_.a_out * plane(k_, x);
    return PointValue{v, I * k_ * v};
  };
  if (kind_ == Kind::delta) {
    if (x < a) return left();
    if (x > a) return right();
    PointValue l = left();
    PointValue r = right();
    cplx d = side < 0 ? l.derivative : side > 0 ? r.derivative : 0.5 * (l.derivative + r.derivative);
    return {l.value, d};
  }
  if (x <= a) return left();
  if (x >= b) return right();
  return full_interior(x);
}

PointValue StationaryState::reflection(double x, int side) const {
  if (!symmetric_) throw Unsupported("RWF requires a symmetric potential");
  if (split_.reflection_vanishes) return {0.0, 0.0};
  const double xm = geom_.x_mid;
  if (x > xm) return {0.0, 0.0};
  auto outer = [&] {
    cplx e = plane(k_, x);
    cplx r = split_.B_out_ref / e;
    return PointValue{split_.A_in_ref * e + r, I * k_ * (split_.A_in_ref * e - r)};
  };
  PointValue v = (x <= geom_.a) ? outer() : reflection_interior(x);
  if (x == xm) {
    cplx d = side < 0 ? v.derivative : side > 0 ? cplx(0.0) : 0.5 * v.derivative;
    return {0.0, d};
  }
  return v;
}

PointValue StationaryState::transmission(double x, int side) const {
  PointValue f = full(x, side);
  PointValue r = reflection(x, side);
  return {f.value - r.value, f.derivative - r.derivative};
}

PointValue StationaryState::evaluate(Channel c, double x, int side) const {
  switch (c) {
    case Channel::full:
      return full(x, side);
    case Channel::transmission:
      return transmission(x, side);
    case Channel::reflection:
      return reflection(x, side);
  }
  return full(x, side);
}

StationaryTriple stationary_triple(const ScatteringSystem& sys, double k, const XGrid& grid) {
  if (!is_symmetric(sys.potential))
    throw Unsupported("stationary_triple requires a symmetric potential");
  StationaryState st(sys, k);
  const double mass = sys.particle.mass();
  StationaryTriple out{k, WaveField{grid, {}, 0.0, Channel::full, mass, {}},
                       WaveField{grid, {}, 0.0, Channel::transmission, mass, {}},
                       WaveField{grid, {}, 0.0, Channel::reflection, mass, {}}};
  const std::size_t n = grid.size();
  out.phi_full.values.resize(n);
  out.phi_tr.values.resize(n);
  out.phi_ref.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double x = grid.at(i);
    cplx f = st.full(x).value;
    cplx r = st.reflection(x).value;
    out.phi_full.values[i] = f;
    out.phi_ref.values[i] = r;
    out.phi_tr.values[i] = f - r;
  }
  const auto g = geometry(sys.potential);
  if (auto node = grid.node_at(g.x_mid)) {
    double x = grid.at(*node);
    for (WaveField* w : {&out.phi_tr, &out.phi_ref}) {
      auto l = st.evaluate(w->channel, x, -1);
      auto r = st.evaluate(w->channel, x, +1);
      w->kinks.push_back({*node, l.derivative, r.derivative});
    }
    if (sys.potential.is_delta()) {
      auto l = st.full(x, -1);
      auto r = st.full(x, +1);
      out.phi_full.kinks.push_back({*node, l.derivative, r.derivative});
    }
  }
  return out;
}

}  // namespace tunnelsplit
