#pragma once

#include "tractrix/point.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace tractrix {

// Seeded generator with a fully specified output stream: std::mt19937_64
// (its sequence is fixed by the standard), uniform doubles from the top 53
// bits, normals by Box-Muller. Library distributions are avoided because
// their algorithms are implementation-defined.
class Rng {
 public:
  static constexpr const char* algorithm = "mt19937_64/u53/box-muller";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t below(std::uint64_t n) { return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)); }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    spare_ = mag * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return mag * std::cos(2.0 * std::numbers::pi * u2);
  }

  Vector normal_vector(Eigen::Index n) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

  // Uniform direction in R^n.
  Vector unit_vector(Eigen::Index n) {
    for (;;) {
      Vector v = normal_vector(n);
      const double norm = v.norm();
      if (norm > 1e-12) return v / norm;
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace tractrix
