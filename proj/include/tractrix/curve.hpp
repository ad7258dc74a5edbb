#pragma once

#include "tractrix/space.hpp"

#include <functional>

namespace tractrix {

// A curve gamma: [a, b] -> space with a declared Lipschitz constant (<= 1 for
// driving curves of the tractrix flow).
struct DrivingCurve {
  double a = 0.0;
  double b = 0.0;
  std::function<Point(double)> at;
  double lipschitz = 1.0;

  Point operator()(double t) const { return at(t); }
};

// Worst excess d(gamma(t1), gamma(t2)) - L |t1 - t2| over an n-point grid.
inline double lipschitz_excess(const MetricSpace& space, const DrivingCurve& gamma, int n = 64) {
  double worst = -kInf;
  for (int i = 0; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) {
      const double t1 = gamma.a + (gamma.b - gamma.a) * i / n;
      const double t2 = gamma.a + (gamma.b - gamma.a) * j / n;
      worst = std::max(worst, space.distance(gamma(t1), gamma(t2)) - gamma.lipschitz * std::abs(t2 - t1));
    }
  return worst;
}

inline DrivingCurve stationary_curve(const Point& p, double a, double b) {
  return {a, b, [p](double) { return p; }, 1.0};
}

}  // namespace tractrix
