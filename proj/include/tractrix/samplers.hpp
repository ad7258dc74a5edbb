#pragma once

#include "tractrix/lipschitz.hpp"
#include "tractrix/spaces/sphere.hpp"

namespace tractrix {

// Uniform (area measure) point of the closed cap B(center, rho) of a sphere.
inline Point sample_cap(const SphereSpace& s, const Point& center, double rho, Rng& rng) {
  const Eigen::Index n = center.size();
  const Vector c = center.coords() / s.radius();
  const double a = rho / s.radius();
  for (;;) {
    const Vector v = rng.unit_vector(n);
    if (c.dot(v) >= std::cos(a) - 1e-15) return s.normalized(v);
  }
}

// A point at distance `sep` from x in a uniformly random direction,
// redrawn until it lands in the cap.
inline Point sample_near(const SphereSpace& s, const Point& x, double sep, const Point& center, double rho,
                         Rng& rng) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Vector v = rng.normal_vector(x.size());
    const Vector u = x.coords() / s.radius();
    v -= u.dot(v) * u;
    if (v.norm() < 1e-12) continue;
    const Point y = s.exp_map(x, TangentVector{x, v.normalized(), sep});
    if (s.distance(center, y) <= rho) return y;
  }
  throw UsageError("sample_near: no nearby point inside the cap");
}

// n pairs in the cap: the first `far` pairs independent, the rest at
// separation `sep`.
inline SamplePairs sample_cap_pairs(const SphereSpace& s, const Point& center, double rho, std::size_t n,
                                    std::size_t far, double sep, Rng& rng) {
  SamplePairs out;
  for (std::size_t i = 0; i < n; ++i) {
    Point x = sample_cap(s, center, rho, rng);
    Point y = i < far ? sample_cap(s, center, rho, rng) : sample_near(s, x, sep, center, rho, rng);
    out.x.push_back(std::move(x));
    out.y.push_back(std::move(y));
  }
  return out;
}

}  // namespace tractrix
