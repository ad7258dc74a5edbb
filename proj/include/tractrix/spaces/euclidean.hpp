#pragma once

#include "tractrix/space.hpp"

namespace tractrix {

// Flat R^n.
class EuclideanSpace final : public MetricSpace {
 public:
  explicit EuclideanSpace(Eigen::Index dim, NumericPolicy policy = {}) : MetricSpace(policy), dim_(dim) {
    if (dim < 1) throw UsageError("EuclideanSpace: dimension must be positive");
  }

  SpaceKind kind() const override { return SpaceKind::euclidean; }
  std::string name() const override { return "R^" + std::to_string(dim_); }
  Eigen::Index coord_size() const override { return dim_; }
  double curvature_bound() const override { return 0.0; }
  bool has_exp_log() const override { return true; }

  Eigen::Index dimension() const noexcept { return dim_; }

 protected:
  double do_distance(const Point& x, const Point& y) const override {
    return (x.coords() - y.coords()).norm();
  }

  Point do_geodesic_point(const Point& x, const Point& y, double s) const override {
    return wrap((1.0 - s) * x.coords() + s * y.coords());
  }

  TangentVector do_log(const Point& p, const Point& q) const override {
    return TangentVector::from_vector(p, q.coords() - p.coords());
  }

  Point do_exp(const Point& p, const TangentVector& v) const override {
    return wrap(p.coords() + v.vector());
  }

 private:
  Eigen::Index dim_;
};

// Closed real interval [lo, hi] with |a - b|; the intrinsic model of an arc.
class IntervalSpace final : public MetricSpace {
 public:
  IntervalSpace(double lo, double hi, NumericPolicy policy = {}) : MetricSpace(policy), lo_(lo), hi_(hi) {
    if (!(hi >= lo)) throw UsageError("IntervalSpace: empty interval");
  }

  SpaceKind kind() const override { return SpaceKind::interval; }
  std::string name() const override {
    return "[" + std::to_string(lo_) + ", " + std::to_string(hi_) + "]";
  }
  Eigen::Index coord_size() const override { return 1; }
  double curvature_bound() const override { return 0.0; }
  double diameter_bound() const override { return hi_ - lo_; }
  bool has_exp_log() const override { return true; }

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  double length() const noexcept { return hi_ - lo_; }

  void validate(const Vector& c) const override {
    MetricSpace::validate(c);
    if (c[0] < lo_ - policy().abs_tol || c[0] > hi_ + policy().abs_tol)
      throw DomainError(name() + ": coordinate " + std::to_string(c[0]) + " outside interval");
  }

  Point at(double s) const { return make_point(Vector::Constant(1, s)); }

 protected:
  double do_distance(const Point& x, const Point& y) const override { return std::abs(x[0] - y[0]); }

  Point do_geodesic_point(const Point& x, const Point& y, double s) const override {
    return wrap(Vector::Constant(1, (1.0 - s) * x[0] + s * y[0]));
  }

  TangentVector do_log(const Point& p, const Point& q) const override {
    return TangentVector::from_vector(p, Vector::Constant(1, q[0] - p[0]));
  }

  Point do_exp(const Point& p, const TangentVector& v) const override {
    return make_point(Vector::Constant(1, p[0] + v.vector()[0]));
  }

 private:
  double lo_;
  double hi_;
};

// The one-point space {s}; tip factor of spherical cones.
class PointSpace final : public MetricSpace {
 public:
  explicit PointSpace(NumericPolicy policy = {}) : MetricSpace(policy) {}

  SpaceKind kind() const override { return SpaceKind::point; }
  std::string name() const override { return "{s}"; }
  Eigen::Index coord_size() const override { return 0; }
  double curvature_bound() const override { return 0.0; }
  double diameter_bound() const override { return 0.0; }

  Point the_point() const { return wrap(Vector()); }

 protected:
  double do_distance(const Point&, const Point&) const override { return 0.0; }
  Point do_geodesic_point(const Point& x, const Point&, double) const override { return x; }
};

}  // namespace tractrix
