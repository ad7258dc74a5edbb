#pragma once

#include "tractrix/space.hpp"

namespace tractrix {

// Round sphere of dimension m and radius R embedded in R^{m+1}; curvature
// 1/R^2. Points are ambient vectors of norm R.
class SphereSpace final : public MetricSpace {
 public:
  SphereSpace(Eigen::Index dim, double radius = 1.0, NumericPolicy policy = {})
      : MetricSpace(policy), dim_(dim), radius_(radius) {
    if (dim < 1) throw UsageError("SphereSpace: dimension must be positive");
    if (!(radius > 0.0)) throw UsageError("SphereSpace: radius must be positive");
  }

  SpaceKind kind() const override { return SpaceKind::sphere; }
  std::string name() const override {
    return "S^" + std::to_string(dim_) + "(R=" + std::to_string(radius_) + ")";
  }
  Eigen::Index coord_size() const override { return dim_ + 1; }
  double curvature_bound() const override { return 1.0 / (radius_ * radius_); }
  double diameter_bound() const override { return kPi * radius_; }
  double uniqueness_radius() const override { return kPi * radius_; }
  bool has_exp_log() const override { return true; }

  double distance_concavity(double r, double collar) const override {
    const double rho = (r + collar) / radius_;
    return std::max(0.0, -std::cos(rho) / (std::sin(rho) * radius_));
  }

  void validate(const Vector& c) const override {
    MetricSpace::validate(c);
    if (std::abs(c.norm() - radius_) > policy().abs_tol * std::max(1.0, radius_))
      throw DomainError(name() + ": point of norm " + std::to_string(c.norm()) + " is off the sphere");
  }

  Eigen::Index dimension() const noexcept { return dim_; }
  double radius() const noexcept { return radius_; }

  // Rescales an arbitrary nonzero ambient vector onto the sphere.
  Point normalized(const Vector& v) const {
    const double n = v.norm();
    if (n == 0.0) throw DomainError(name() + ": cannot normalize the zero vector");
    return wrap(v * (radius_ / n));
  }

 protected:
  double do_distance(const Point& x, const Point& y) const override {
    // 2R atan2(|x-y|, |x+y|) is accurate at both ends of [0, pi R].
    return 2.0 * radius_ * std::atan2((x.coords() - y.coords()).norm(), (x.coords() + y.coords()).norm());
  }

  Point do_geodesic_point(const Point& x, const Point& y, double s) const override {
    return do_exp(x, do_log(x, y).scaled(s));
  }

  TangentVector do_log(const Point& p, const Point& q) const override {
    const double d = do_distance(p, q);
    if (d <= policy().resolution) return TangentVector::zero(p, coord_size());
    const Vector u = p.coords() / radius_;
    const Vector w = q.coords() / radius_;
    Vector v = w - u.dot(w) * u;
    const double n = v.norm();
    if (d >= kPi * radius_ - policy().abs_tol || n <= policy().resolution)
      throw NonUniqueGeodesicError(name() + ": antipodal points " + p.str() + " and " + q.str());
    return {p, v / n, d};
  }

  Point do_exp(const Point& p, const TangentVector& v) const override {
    const double phi = v.magnitude / radius_;
    const Vector u = p.coords() / radius_;
    Vector e = v.direction - u.dot(v.direction) * u;
    const double n = e.norm();
    if (n == 0.0) return p;
    e /= n;
    return normalized(std::cos(phi) * u + std::sin(phi) * e);
  }

 private:
  Eigen::Index dim_;
  double radius_;
};

}  // namespace tractrix
