#pragma once

#include <cmath>
#include <vector>

#include "tunnelsplit/potentials.hpp"

namespace tunnelsplit::detail {

// For psi'' = K2 psi over a width w with constant signed K2:
// C = cosh / cos / 1, S = sinh(kw)/k / sin(kw)/k / w, KS = K2 * S.
// Forward:  [psi; psi'](x + w) = [[C, S], [KS, C]] [psi; psi'](x)
// Backward: [psi; psi'](x - w) = [[C, -S], [-KS, C]] [psi; psi'](x)
struct LayerFunctions {
  double C;
  double S;
  double KS;
};

inline LayerFunctions layer_functions(double K2, double w) {
  if (K2 > 0.0) {
    double kap = std::sqrt(K2);
    double sh = std::sinh(kap * w);
    return {std::cosh(kap * w), sh / kap, kap * sh};
  }
  if (K2 < 0.0) {
    double kap = std::sqrt(-K2);
    double sn = std::sin(kap * w);
    return {std::cos(kap * w), sn / kap, -kap * sn};
  }
  return {1.0, w, 0.0};
}

// Real 2x2 matrix with an exponent kept aside: value = exp(log_scale) * m.
struct ScaledMatrix {
  double m00 = 1.0, m01 = 0.0, m10 = 0.0, m11 = 1.0;
  double log_scale = 0.0;

  void multiply_right(double a00, double a01, double a10, double a11, double extra_log) {
    double n00 = m00 * a00 + m01 * a10;
    double n01 = m00 * a01 + m01 * a11;
    double n10 = m10 * a00 + m11 * a10;
    double n11 = m10 * a01 + m11 * a11;
    m00 = n00;
    m01 = n01;
    m10 = n10;
    m11 = n11;
    log_scale += extra_log;
    double big = std::max(std::max(std::abs(m00), std::abs(m01)),
                          std::max(std::abs(m10), std::abs(m11)));
    if (big > 1e100 || (log_scale > 0.0 && big < 1e-100)) {
      m00 /= big;
      m01 /= big;
      m10 /= big;
      m11 /= big;
      log_scale += std::log(big);
    }
  }
};

// Backward propagation matrix across one layer; hyperbolic arguments above
// 700 are carried in scaled form.
inline void append_backward_layer(ScaledMatrix& M, double K2, double w) {
  if (K2 > 0.0) {
    double kap = std::sqrt(K2);
    double z = kap * w;
    if (z > 700.0) {
      double e = std::exp(-2.0 * z);
      double c = 0.5 * (1.0 + e);
      double s = 0.5 * (1.0 - e);
      M.multiply_right(c, -s / kap, -kap * s, c, z);
      return;
    }
  }
  auto f = layer_functions(K2, w);
  M.multiply_right(f.C, -f.S, -f.KS, f.C, 0.0);
}

}  // namespace tunnelsplit::detail
