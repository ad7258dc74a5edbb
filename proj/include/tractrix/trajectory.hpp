#pragma once

#include "tractrix/space.hpp"

#include <cstdio>
#include <optional>
#include <ostream>
#include <vector>

namespace tractrix {

// Formats a double so that it reads back bit-identically.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// A sampled curve t_i -> alpha(t_i). A truncated trajectory stops early and
// says why; an escaped one stopped because it left the domain.
struct Trajectory {
  SpacePtr space;
  std::vector<double> times;
  std::vector<Point> points;
  double step = 0.0;
  bool truncated = false;
  std::string diagnostic;
  std::optional<double> escape_time;

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }
  const Point& back() const { return points.back(); }
  double start() const { return times.front(); }
  double end() const { return times.back(); }

  void push(double t, Point p) {
    times.push_back(t);
    points.push_back(std::move(p));
  }

  // Geodesic interpolation between the bracketing samples.
  Point at(double t) const {
    if (empty()) throw UsageError("Trajectory::at: empty trajectory");
    if (t <= times.front()) return points.front();
    if (t >= times.back()) return points.back();
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const auto i = static_cast<std::size_t>(it - times.begin());
    const double s = (t - times[i - 1]) / (times[i] - times[i - 1]);
    return space->geodesic_point(points[i - 1], points[i], std::clamp(s, 0.0, 1.0));
  }

  // Worst d(alpha_i, alpha_{i+1}) - L (t_{i+1} - t_i).
  double lipschitz_excess(double lipschitz) const {
    double worst = -kInf;
    for (std::size_t i = 0; i + 1 < size(); ++i)
      worst = std::max(worst, space->distance(points[i], points[i + 1]) - lipschitz * (times[i + 1] - times[i]));
    return worst;
  }

  void write_csv(std::ostream& out) const {
    out << 't';
    const Eigen::Index n = empty() ? 0 : points.front().size();
    for (Eigen::Index k = 0; k < n; ++k) out << ",x" << k;
    out << '\n';
    for (std::size_t i = 0; i < size(); ++i) {
      out << format_double(times[i]);
      for (Eigen::Index k = 0; k < n; ++k) out << ',' << format_double(points[i][k]);
      out << '\n';
    }
  }
};

// Uniform partition of [a, b] with gaps at most delta; the last node is b.
inline std::vector<double> uniform_partition(double a, double b, double delta) {
  if (!(delta > 0.0)) throw UsageError("uniform_partition: step must be positive");
  if (b < a) throw UsageError("uniform_partition: empty interval");
  const auto n = static_cast<std::size_t>(std::ceil((b - a) / delta - 1e-9));
  std::vector<double> t(n + 1);
  for (std::size_t i = 0; i <= n; ++i) t[i] = n == 0 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n);
  if (n > 0) t[n] = b;
  return t;
}

// sup_t d(A(t), B(t)) over the nodes of A, evaluating B by interpolation.
inline double sup_deviation(const Trajectory& a, const Trajectory& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, a.space->distance(a.points[i], b.at(a.times[i])));
  return worst;
}

}  // namespace tractrix
