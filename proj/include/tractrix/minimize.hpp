#pragma once

#include "tractrix/point.hpp"

#include <boost/math/tools/minima.hpp>

#include <cstdint>
#include <functional>

namespace tractrix {

struct LocalMin {
  Vector arg;
  double value;
};

using ParamFunction = std::function<double(const Vector&)>;
using ParamClamp = std::function<Vector(const Vector&)>;

// Refines a sampled minimum (x0, f0) inside the window of half-width `step`.
// One parameter: Brent's method on the clamped window. More parameters:
// compass search with step halving down to `tol`. Never returns a value
// worse than f0.
inline LocalMin minimize_local(const ParamFunction& f, const ParamClamp& clamp, const Vector& x0, double f0,
                               double step, double tol) {
  LocalMin best{x0, f0};
  if (x0.size() == 0 || step <= 0.0) return best;

  if (x0.size() == 1) {
    const double lo = clamp(Vector::Constant(1, x0[0] - step))[0];
    const double hi = clamp(Vector::Constant(1, x0[0] + step))[0];
    if (!(hi > lo)) return best;
    std::uintmax_t iters = 200;
    const auto [arg, value] = boost::math::tools::brent_find_minima(
        [&](double s) { return f(Vector::Constant(1, s)); }, lo, hi, std::numeric_limits<double>::digits / 2,
        iters);
    if (value < best.value) best = {Vector::Constant(1, arg), value};
    return best;
  }

  double h = step;
  for (int iter = 0; h > tol && iter < 10000; ++iter) {
    bool improved = false;
    for (Eigen::Index i = 0; i < x0.size() && !improved; ++i) {
      for (double sign : {1.0, -1.0}) {
        Vector trial = best.arg;
        trial[i] += sign * h;
        trial = clamp(trial);
        const double v = f(trial);
        if (v < best.value) {
          best = {std::move(trial), v};
          improved = true;
          break;
        }
      }
    }
    if (!improved) h *= 0.5;
  }
  return best;
}

}  // namespace tractrix
