#pragma once

#include "tractrix/space.hpp"

namespace tractrix {

// c * (U x V) with the l2 product metric.
class ScaledProductSpace final : public MetricSpace {
 public:
  ScaledProductSpace(SpacePtr left, SpacePtr right, double scale, NumericPolicy policy = {})
      : MetricSpace(policy), left_(std::move(left)), right_(std::move(right)), scale_(scale) {
    if (!left_ || !right_) throw UsageError("ScaledProductSpace: null factor");
    if (!(scale > 0.0)) throw UsageError("ScaledProductSpace: scale must be positive");
  }

  SpaceKind kind() const override { return SpaceKind::product; }
  std::string name() const override {
    return std::to_string(scale_) + "*(" + left_->name() + " x " + right_->name() + ")";
  }
  Eigen::Index coord_size() const override { return left_->coord_size() + right_->coord_size(); }
  double curvature_bound() const override {
    return std::max({0.0, left_->curvature_bound(), right_->curvature_bound()}) / (scale_ * scale_);
  }
  double diameter_bound() const override {
    return scale_ * std::hypot(left_->diameter_bound(), right_->diameter_bound());
  }
  double uniqueness_radius() const override {
    return scale_ * std::min(left_->uniqueness_radius(), right_->uniqueness_radius());
  }

  double scale() const noexcept { return scale_; }
  const MetricSpace& left() const noexcept { return *left_; }
  const MetricSpace& right() const noexcept { return *right_; }

  void validate(const Vector& c) const override {
    MetricSpace::validate(c);
    left_->validate(c.head(left_->coord_size()));
    right_->validate(c.tail(right_->coord_size()));
  }

  Point pair(const Point& a, const Point& b) const {
    left_->check(a);
    right_->check(b);
    Vector c(coord_size());
    c << a.coords(), b.coords();
    return make_point(std::move(c));
  }
  Point left_part(const Point& x) const { return Point(left_->id(), x.coords().head(left_->coord_size())); }
  Point right_part(const Point& x) const {
    return Point(right_->id(), x.coords().tail(right_->coord_size()));
  }

 protected:
  double do_distance(const Point& x, const Point& y) const override {
    return scale_ * std::hypot(left_->distance(left_part(x), left_part(y)),
                               right_->distance(right_part(x), right_part(y)));
  }

  Point do_geodesic_point(const Point& x, const Point& y, double s) const override {
    return pair(left_->geodesic_point(left_part(x), left_part(y), s),
                right_->geodesic_point(right_part(x), right_part(y), s));
  }

 private:
  SpacePtr left_;
  SpacePtr right_;
  double scale_;
};

}  // namespace tractrix
