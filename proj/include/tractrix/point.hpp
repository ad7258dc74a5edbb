#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <sstream>
#include <string>

namespace tractrix {

using SpaceId = std::uint64_t;
using Vector = Eigen::VectorXd;

// Tolerances shared by every operation of a space. Refinement studies vary
// these coherently instead of editing call sites.
struct NumericPolicy {
  double abs_tol = 1e-9;      // exact-backend equality / containment slack
  double acos_slack = 1e-8;   // allowed overshoot of cosine-type arguments
  double resolution = 1e-12;  // distances below this are treated as zero
  double refine_tol = 1e-11;  // argument tolerance of local minimizers
};

// A coordinate record tagged with the space it belongs to. The meaning of the
// coordinates is private to the owning backend.
class Point {
 public:
  Point() = default;
  Point(SpaceId space, Vector coords) : space_(space), coords_(std::move(coords)) {}

  SpaceId space() const noexcept { return space_; }
  const Vector& coords() const noexcept { return coords_; }
  Eigen::Index size() const noexcept { return coords_.size(); }
  double operator[](Eigen::Index i) const { return coords_[i]; }

  bool operator==(const Point& other) const {
    return space_ == other.space_ && coords_.size() == other.coords_.size() &&
           coords_ == other.coords_;
  }

  std::string str() const {
    std::ostringstream os;
    os.precision(17);
    os << '(';
    for (Eigen::Index i = 0; i < coords_.size(); ++i) os << (i ? ", " : "") << coords_[i];
    os << ')';
    return os.str();
  }

 private:
  SpaceId space_ = 0;
  Vector coords_;
};

// Element of the tangent cone at `base`: a unit direction (ambient
// representation chosen by the backend) and a nonnegative magnitude.
struct TangentVector {
  Point base;
  Vector direction;  // unit, or all zeros when magnitude == 0
  double magnitude = 0.0;

  static TangentVector zero(const Point& at, Eigen::Index ambient_size) {
    return {at, Vector::Zero(ambient_size), 0.0};
  }

  static TangentVector from_vector(const Point& at, const Vector& v) {
    const double n = v.norm();
    if (n == 0.0) return zero(at, v.size());
    return {at, v / n, n};
  }

  Vector vector() const { return direction * magnitude; }

  TangentVector scaled(double s) const {
    if (s < 0.0) return {base, -direction, -s * magnitude};
    return {base, direction, s * magnitude};
  }
};

}  // namespace tractrix
