#pragma once

#include "tractrix/spaces/cone.hpp"
#include "tractrix/spaces/euclidean.hpp"

namespace tractrix {

// Spherical join U * V: the unit sphere, with angle metric, in
// Cone U x Cone V. A point iota(u, v, t) has coordinates [t, u..., v...] and
// sits at (sin t * u, cos t * v) in the cone product, so t = 0 is the
// V-slice and t = pi/2 the U-slice.
class SphericalJoinSpace final : public MetricSpace {
 public:
  SphericalJoinSpace(SpacePtr left, SpacePtr right, NumericPolicy policy = {})
      : MetricSpace(policy), left_(std::move(left)), right_(std::move(right)) {
    if (!left_ || !right_) throw UsageError("SphericalJoinSpace: null factor");
    const double slack = policy.abs_tol;
    if (left_->diameter_bound() > kPi + slack || right_->diameter_bound() > kPi + slack)
      throw DomainError("SphericalJoinSpace: factor diameter exceeds pi");
  }

  SpaceKind kind() const override { return SpaceKind::join; }
  std::string name() const override { return left_->name() + "*" + right_->name(); }
  Eigen::Index coord_size() const override { return 1 + left_->coord_size() + right_->coord_size(); }
  double curvature_bound() const override { return 1.0; }
  double diameter_bound() const override { return kPi; }
  double uniqueness_radius() const override { return kPi; }

  const MetricSpace& left() const noexcept { return *left_; }
  const MetricSpace& right() const noexcept { return *right_; }
  const SpacePtr& left_ptr() const noexcept { return left_; }

  void validate(const Vector& c) const override {
    MetricSpace::validate(c);
    const double tol = policy().abs_tol;
    if (c[0] < -tol || c[0] > 0.5 * kPi + tol)
      throw DomainError(name() + ": join parameter " + std::to_string(c[0]) + " outside [0, pi/2]");
    left_->validate(c.segment(1, left_->coord_size()));
    right_->validate(c.tail(right_->coord_size()));
  }

  // iota(u, v, t).
  Point embed(const Point& u, const Point& v, double t) const {
    left_->check(u);
    right_->check(v);
    Vector c(coord_size());
    c[0] = t;
    c.segment(1, left_->coord_size()) = u.coords();
    c.tail(right_->coord_size()) = v.coords();
    return make_point(std::move(c));
  }

  double parameter(const Point& x) const { return x[0]; }
  Point left_part(const Point& x) const {
    return Point(left_->id(), x.coords().segment(1, left_->coord_size()));
  }
  Point right_part(const Point& x) const {
    return Point(right_->id(), x.coords().tail(right_->coord_size()));
  }

  // Cosine of the join distance, exactly as the defining formula reads:
  // sin t1 sin t2 cos|u1-u2| + cos t1 cos t2 cos|v1-v2|.
  double join_cosine(const Point& x, const Point& y) const {
    check(x);
    check(y);
    const double a = std::min(kPi, left_->distance(left_part(x), left_part(y)));
    const double b = std::min(kPi, right_->distance(right_part(x), right_part(y)));
    return std::sin(x[0]) * std::sin(y[0]) * std::cos(a) + std::cos(x[0]) * std::cos(y[0]) * std::cos(b);
  }

 protected:
  // Same value as arccos(join_cosine), evaluated through the chord in
  // Cone U x Cone V so that nearby points keep full relative accuracy.
  double do_distance(const Point& x, const Point& y) const override {
    const double a = left_->distance(left_part(x), left_part(y));
    const double b = right_->distance(right_part(x), right_part(y));
    const double cu = detail::cone_chord(std::sin(x[0]), std::sin(y[0]), a);
    const double cv = detail::cone_chord(std::cos(x[0]), std::cos(y[0]), b);
    const double half = 0.5 * std::hypot(cu, cv);
    if (half > 1.0 + policy().acos_slack)
      throw ConsistencyError(name() + ": chord " + std::to_string(2 * half) + " exceeds 2");
    return 2.0 * std::asin(std::min(1.0, half));
  }

  // Radial projection of the straight segment in Cone U x Cone V. The
  // segment fraction lambda reaching angle phi of theta from x is
  // sin phi / (sin phi + sin(theta - phi)).
  Point do_geodesic_point(const Point& x, const Point& y, double s) const override {
    const double theta = do_distance(x, y);
    if (theta <= policy().resolution) return x;
    if (theta >= kPi - policy().abs_tol)
      throw NonUniqueGeodesicError(name() + ": points at distance pi");
    const double phi = s * theta;
    const double lambda = std::sin(phi) / (std::sin(phi) + std::sin(theta - phi));
    auto [ru, u] = detail::cone_segment_point(*left_, std::sin(x[0]), left_part(x), std::sin(y[0]),
                                              left_part(y), lambda);
    auto [rv, v] = detail::cone_segment_point(*right_, std::cos(x[0]), right_part(x), std::cos(y[0]),
                                              right_part(y), lambda);
    return embed(u, v, std::atan2(ru, rv));
  }

 private:
  SpacePtr left_;
  SpacePtr right_;
};

inline double join_distance(const SphericalJoinSpace& j, const Point& x, const Point& y) {
  return j.distance(x, y);
}

inline Point join_embed(const SphericalJoinSpace& j, const Point& u, const Point& v, double t) {
  if (t < 0.0 || t > 0.5 * kPi) throw DomainError("join_embed: t outside [0, pi/2]");
  return j.embed(u, v, t);
}

// K * {s}: parameter t is the distance to the tip s, t = pi/2 the copy of K.
class SphericalCone {
 public:
  explicit SphericalCone(SpacePtr base, NumericPolicy policy = {})
      : tip_space_(std::make_shared<PointSpace>(policy)),
        join_(std::make_shared<SphericalJoinSpace>(std::move(base), tip_space_, policy)) {}

  const std::shared_ptr<const SphericalJoinSpace>& space() const noexcept { return join_; }
  const MetricSpace& base() const noexcept { return join_->left(); }

  Point at(const Point& u, double t) const { return join_->embed(u, tip_space_->the_point(), t); }
  Point slice(const Point& u) const { return at(u, 0.5 * kPi); }
  // The tip carries an arbitrary base record; `anchor` supplies one.
  Point tip(const Point& anchor) const { return at(anchor, 0.0); }

 private:
  std::shared_ptr<const PointSpace> tip_space_;
  std::shared_ptr<const SphericalJoinSpace> join_;
};

inline SphericalCone spherical_cone(SpacePtr k, NumericPolicy policy = {}) {
  if (k->diameter_bound() > kPi + policy.abs_tol) throw DomainError("spherical_cone: diam K exceeds pi");
  return SphericalCone(std::move(k), policy);
}

}  // namespace tractrix
