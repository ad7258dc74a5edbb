#pragma once

#include "tractrix/trajectory.hpp"

#include <ostream>

namespace tractrix::harness {

struct Polyline {
  std::vector<std::pair<double, double>> pts;
  std::string color;
};

namespace detail {

inline void write_svg(std::ostream& out, const std::vector<Polyline>& lines, bool unit_disk) {
  double xmin = kInf, xmax = -kInf, ymin = kInf, ymax = -kInf;
  for (const auto& l : lines)
    for (const auto& [x, y] : l.pts) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (unit_disk) {
    xmin = std::min(xmin, -1.0);
    xmax = std::max(xmax, 1.0);
    ymin = std::min(ymin, -1.0);
    ymax = std::max(ymax, 1.0);
  }
  if (!(xmax > xmin)) xmax = xmin + 1.0;
  if (!(ymax > ymin)) ymax = ymin + 1.0;
  const double size = 480.0, pad = 20.0;
  const double sx = size / (xmax - xmin), sy = size / (ymax - ymin);
  auto px = [&](double x) { return pad + (x - xmin) * sx; };
  auto py = [&](double y) { return pad + (ymax - y) * sy; };
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size + 2 * pad << "\" height=\"" << size + 2 * pad
      << "\">\n";
  if (unit_disk)
    out << "<circle cx=\"" << px(0) << "\" cy=\"" << py(0) << "\" r=\"" << sx << "\" fill=\"none\" stroke=\"#999\"/>\n";
  else
    out << "<line x1=\"" << px(xmin) << "\" y1=\"" << py(0) << "\" x2=\"" << px(xmax) << "\" y2=\"" << py(0)
        << "\" stroke=\"#999\"/>\n";
  for (const auto& l : lines) {
    out << "<polyline fill=\"none\" stroke=\"" << l.color << "\" points=\"";
    for (const auto& [x, y] : l.pts) out << format_double(px(x)) << ',' << format_double(py(y)) << ' ';
    out << "\"/>\n";
  }
  out << "</svg>\n";
}

}  // namespace detail

// Trajectory and driving curve. One-dimensional records are drawn as
// (t, x); records on a sphere in R^3 by orthographic projection onto the
// first two coordinates.
inline void write_trajectory_svg(std::ostream& out, const Trajectory& traj, const Trajectory& curve) {
  const bool line = !traj.empty() && traj.points.front().size() == 1;
  auto to_poly = [&](const Trajectory& t, const std::string& color) {
    Polyline p{{}, color};
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (line)
        p.pts.emplace_back(t.times[i], t.points[i][0]);
      else
        p.pts.emplace_back(t.points[i][0], t.points[i].size() > 1 ? t.points[i][1] : 0.0);
    }
    return p;
  };
  detail::write_svg(out, {to_poly(curve, "#d62728"), to_poly(traj, "#1f77b4")}, !line);
}

}  // namespace tractrix::harness
