#pragma once

#include "tractrix/space.hpp"

namespace tractrix {

namespace detail {

struct ConeCoord {
  double radius;
  Point base;
};

// Point at fraction `lambda` of the straight segment between (r1, u1) and
// (r2, u2) in the Euclidean cone over `base`. The segment lives in a planar
// sector of angle min(pi, d(u1, u2)); through the tip when that angle is pi.
inline ConeCoord cone_segment_point(const MetricSpace& base, double r1, const Point& u1, double r2,
                                    const Point& u2, double lambda) {
  const double theta = std::min(kPi, base.distance(u1, u2));
  if (theta >= kPi - base.policy().resolution) {
    const double pos = lambda * (r1 + r2);
    if (pos <= r1) return {r1 - pos, u1};
    return {pos - r1, u2};
  }
  const double zx = (1.0 - lambda) * r1 + lambda * r2 * std::cos(theta);
  const double zy = lambda * r2 * std::sin(theta);
  const double rho = std::hypot(zx, zy);
  if (rho == 0.0 || theta <= base.policy().resolution) return {rho, u1};
  const double phi = std::clamp(std::atan2(zy, zx), 0.0, theta);
  return {rho, base.geodesic_point(u1, u2, phi / theta)};
}

// |(r1,u1) - (r2,u2)| with the cone law of cosines, written in the
// cancellation-free form (r1-r2)^2 + 4 r1 r2 sin^2(theta/2).
inline double cone_chord(double r1, double r2, double theta) {
  const double h = std::sin(0.5 * std::min(kPi, theta));
  return std::sqrt(std::max(0.0, (r1 - r2) * (r1 - r2) + 4.0 * r1 * r2 * h * h));
}

}  // namespace detail

// Euclidean cone over a base of diameter <= pi. Coordinates are
// [t, base coords...] with t >= 0; t = 0 is the tip o.
class EuclideanConeSpace final : public MetricSpace {
 public:
  explicit EuclideanConeSpace(SpacePtr base, NumericPolicy policy = {})
      : MetricSpace(policy), base_(std::move(base)) {
    if (!base_) throw UsageError("EuclideanConeSpace: null base");
  }

  SpaceKind kind() const override { return SpaceKind::cone; }
  std::string name() const override { return "Cone(" + base_->name() + ")"; }
  Eigen::Index coord_size() const override { return 1 + base_->coord_size(); }
  double curvature_bound() const override { return 0.0; }

  const MetricSpace& base() const noexcept { return *base_; }

  void validate(const Vector& c) const override {
    MetricSpace::validate(c);
    if (c[0] < -policy().abs_tol) throw DomainError(name() + ": negative cone radius");
    base_->validate(c.tail(base_->coord_size()));
  }

  Point make(double t, const Point& u) const {
    base_->check(u);
    Vector c(coord_size());
    c[0] = t;
    c.tail(base_->coord_size()) = u.coords();
    return make_point(std::move(c));
  }

  double radius(const Point& x) const { return x[0]; }
  Point base_point(const Point& x) const {
    return Point(base_->id(), x.coords().tail(base_->coord_size()));
  }

 protected:
  double do_distance(const Point& x, const Point& y) const override {
    return detail::cone_chord(x[0], y[0], base_->distance(base_point(x), base_point(y)));
  }

  Point do_geodesic_point(const Point& x, const Point& y, double s) const override {
    auto [rho, u] = detail::cone_segment_point(*base_, x[0], base_point(x), y[0], base_point(y), s);
    return make(rho, u);
  }

 private:
  SpacePtr base_;
};

}  // namespace tractrix
