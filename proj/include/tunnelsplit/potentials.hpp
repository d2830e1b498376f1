#pragma once

#include <variant>
#include <vector>

namespace tunnelsplit {

struct Layer {
  double height;  // eV
  double width;   // nm
};

struct Rectangular {
  double V0;
  double a;
  double b;
};

struct Delta {
  double W;  // eV*nm
  double a;
};

struct PiecewiseConstant {
  double a;
  std::vector<Layer> layers;
};

class PotentialSpec {
 public:
  using Variant = std::variant<Rectangular, Delta, PiecewiseConstant>;

  // Throws InvalidInput on a <= 0, b <= a, non-positive widths or non-finite values.
  PotentialSpec(Variant v);
  static PotentialSpec rectangular(double V0, double a, double b);
  static PotentialSpec delta(double W, double a);
  static PotentialSpec piecewise(double a, std::vector<Layer> layers);
  static PotentialSpec free(double a, double b) { return rectangular(0.0, a, b); }

  const Variant& variant() const { return v_; }
  bool is_delta() const { return std::holds_alternative<Delta>(v_); }
  bool is_rectangular() const { return std::holds_alternative<Rectangular>(v_); }

 private:
  Variant v_;
};

struct Geometry {
  double a;
  double b;
  double d;
  double s;
  double x_mid;
};

Geometry geometry(const PotentialSpec& p);
bool is_symmetric(const PotentialSpec& p);
// Mirrors the layer order about x_mid; [a, b] is unchanged.
PotentialSpec reversed(const PotentialSpec& p);
// Layers left to right. Empty for Delta.
std::vector<Layer> layers(const PotentialSpec& p);
// V(x); a Delta contributes nothing pointwise.
double value_at(const PotentialSpec& p, double x);
// sign(V0), the beta of the rectangular above-barrier formulas.
int barrier_sign(const Rectangular& r);

}  // namespace tunnelsplit
