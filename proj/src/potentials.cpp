#include "tunnelsplit/potentials.hpp"

#include <cmath>

#include "tunnelsplit/errors.hpp"

namespace tunnelsplit {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw InvalidInput(msg);
}

bool finite(double v) { return std::isfinite(v); }

void validate(const PotentialSpec::Variant& v) {
  if (const auto* r = std::get_if<Rectangular>(&v)) {
    require(finite(r->V0) && finite(r->a) && finite(r->b), "rectangular: non-finite parameter");
    require(r->a > 0.0, "rectangular: a must be positive");
    require(r->b > r->a, "rectangular: b must exceed a");
  } else if (const auto* d = std::get_if<Delta>(&v)) {
    require(finite(d->W) && finite(d->a), "delta: non-finite parameter");
    require(d->a > 0.0, "delta: a must be positive");
  } else {
    const auto& p = std::get<PiecewiseConstant>(v);
    require(finite(p.a) && p.a > 0.0, "piecewise: a must be positive");
    require(!p.layers.empty(), "piecewise: at least one layer required");
    for (const auto& l : p.layers) {
      require(finite(l.height) && finite(l.width), "piecewise: non-finite layer");
      require(l.width > 0.0, "piecewise: layer widths must be positive");
    }
  }
}

// Adjacent layers of equal height merged, so symmetry is a property of V(x).
std::vector<Layer> canonical(const std::vector<Layer>& in) {
  std::vector<Layer> out;
  for (const auto& l : in) {
    if (!out.empty() && out.back().height == l.height)
      out.back().width += l.width;
    else
      out.push_back(l);
  }
  return out;
}

}  // namespace

PotentialSpec::PotentialSpec(Variant v) : v_(std::move(v)) { validate(v_); }

PotentialSpec PotentialSpec::rectangular(double V0, double a, double b) {
  return PotentialSpec(Rectangular{V0, a, b});
}

PotentialSpec PotentialSpec::delta(double W, double a) { return PotentialSpec(Delta{W, a}); }

PotentialSpec PotentialSpec::piecewise(double a, std::vector<Layer> layers) {
  return PotentialSpec(PiecewiseConstant{a, std::move(layers)});
}

Geometry geometry(const PotentialSpec& p) {
  double a = 0.0;
  double b = 0.0;
  if (const auto* r = std::get_if<Rectangular>(&p.variant())) {
    a = r->a;
    b = r->b;
  } else if (const auto* d = std::get_if<Delta>(&p.variant())) {
    a = d->a;
    b = d->a;
  } else {
    const auto& pc = std::get<PiecewiseConstant>(p.variant());
    a = pc.a;
    b = pc.a;
    for (const auto& l : pc.layers) b += l.width;
  }
  return Geometry{a, b, b - a, a + b, 0.5 * (a + b)};
}

std::vector<Layer> layers(const PotentialSpec& p) {
  if (const auto* r = std::get_if<Rectangular>(&p.variant())) return {Layer{r->V0, r->b - r->a}};
  if (p.is_delta()) return {};
  return std::get<PiecewiseConstant>(p.variant()).layers;
}

bool is_symmetric(const PotentialSpec& p) {
  if (!std::holds_alternative<PiecewiseConstant>(p.variant())) return true;
  auto ls = canonical(layers(p));
  for (std::size_t i = 0, j = ls.size() - 1; i < j; ++i, --j) {
    if (ls[i].height != ls[j].height || ls[i].width != ls[j].width) return false;
  }
  return true;
}

PotentialSpec reversed(const PotentialSpec& p) {
  if (!std::holds_alternative<PiecewiseConstant>(p.variant())) return p;
  const auto& pc = std::get<PiecewiseConstant>(p.variant());
  return PotentialSpec::piecewise(pc.a, std::vector<Layer>(pc.layers.rbegin(), pc.layers.rend()));
}

double value_at(const PotentialSpec& p, double x) {
  if (p.is_delta()) return 0.0;
  auto g = geometry(p);
  if (x < g.a || x >= g.b) return 0.0;
  double edge = g.a;
  for (const auto& l : layers(p)) {
    edge += l.width;
    if (x < edge) return l.height;
  }
  return 0.0;
}

int barrier_sign(const Rectangular& r) { return r.V0 > 0.0 ? 1 : -1; }

}  // namespace tunnelsplit
