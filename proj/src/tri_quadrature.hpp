#pragma once

#include <array>
#include <cmath>

namespace dimerbem {
namespace detail {

// Degree-5 symmetric 7-point triangle rule (barycentric points, weights sum to 1).
struct TriRule {
  std::array<std::array<double, 3>, 7> b;
  std::array<double, 7> w;
};

inline const TriRule& tri_rule() {
  static const TriRule rule = [] {
    TriRule r;
    const double s15 = std::sqrt(15.0);
    const double a = (6.0 + s15) / 21.0, wa = (155.0 + s15) / 1200.0;
    const double c = (6.0 - s15) / 21.0, wc = (155.0 - s15) / 1200.0;
    r.b[0] = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    r.w[0] = 9.0 / 40.0;
    const std::array<double, 3> pa = {a, a, 1.0 - 2.0 * a}, pc = {c, c, 1.0 - 2.0 * c};
    for (int k = 0; k < 3; ++k) {
      std::array<double, 3> qa, qc;
      for (int i = 0; i < 3; ++i) {
        qa[(i + k) % 3] = pa[i];
        qc[(i + k) % 3] = pc[i];
      }
      r.b[1 + k] = qa;
      r.w[1 + k] = wa;
      r.b[4 + k] = qc;
      r.w[4 + k] = wc;
    }
    return r;
  }();
  return rule;
}

// 8-point Gauss-Legendre rule on [0,1].
struct GaussLine {
  std::array<double, 8> x, w;
};

inline const GaussLine& gauss8() {
  static const GaussLine g = [] {
    GaussLine g;
    const std::array<double, 4> xr = {0.1834346424956498, 0.5255324099163290,
                                      0.7966664774136267, 0.9602898564975363};
    const std::array<double, 4> wr = {0.3626837833783620, 0.3137066458778873,
                                      0.2223810344533745, 0.1012285362903763};
    for (int i = 0; i < 4; ++i) {
      g.x[i] = 0.5 * (1.0 - xr[i]);
      g.x[4 + i] = 0.5 * (1.0 + xr[i]);
      g.w[i] = 0.5 * wr[i];
      g.w[4 + i] = 0.5 * wr[i];
    }
    return g;
  }();
  return g;
}

}  // namespace detail
}  // namespace dimerbem
