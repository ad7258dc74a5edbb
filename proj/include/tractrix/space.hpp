#pragma once

#include "tractrix/errors.hpp"
#include "tractrix/point.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace tractrix {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class SpaceKind { euclidean, interval, point, sphere, cone, join, product, glued };

inline const char* to_string(SpaceKind k) {
  switch (k) {
    case SpaceKind::euclidean: return "euclidean";
    case SpaceKind::interval: return "interval";
    case SpaceKind::point: return "point";
    case SpaceKind::sphere: return "sphere";
    case SpaceKind::cone: return "cone";
    case SpaceKind::join: return "join";
    case SpaceKind::product: return "product";
    case SpaceKind::glued: return "glued";
  }
  return "?";
}

// A distance value together with the backend's bound on its error. Exact
// backends report 0.
struct BoundedDistance {
  double value = 0.0;
  double error_bound = 0.0;
};

// Geometry backend. Public entry points check that points belong to this
// space and forward to the protected virtuals.
class MetricSpace {
 public:
  explicit MetricSpace(NumericPolicy policy = {}) : id_(next_id()), policy_(policy) {}
  MetricSpace(const MetricSpace&) = delete;
  MetricSpace& operator=(const MetricSpace&) = delete;
  virtual ~MetricSpace() = default;

  SpaceId id() const noexcept { return id_; }
  const NumericPolicy& policy() const noexcept { return policy_; }

  virtual SpaceKind kind() const = 0;
  virtual std::string name() const = 0;
  // Length of the coordinate record of a point of this space.
  virtual Eigen::Index coord_size() const = 0;
  // Upper curvature bound kappa of the model.
  virtual double curvature_bound() const = 0;
  virtual double diameter_bound() const { return kInf; }
  // Geodesics between points closer than this are unique.
  virtual double uniqueness_radius() const { return kInf; }
  virtual bool has_exp_log() const { return false; }
  virtual bool has_exact_geodesics() const { return true; }

  // Concavity bound of x -> -max{r, dist_c(x)} on the collar
  // dist_c < r + collar. Zero where the distance function is convex.
  virtual double distance_concavity(double /*r*/, double /*collar*/) const { return 0.0; }

  // Throws DomainError if the record violates the backend constraint.
  virtual void validate(const Vector& coords) const {
    if (coords.size() != coord_size())
      throw DomainError(name() + ": expected " + std::to_string(coord_size()) + " coordinates, got " +
                        std::to_string(coords.size()));
  }

  Point make_point(Vector coords) const {
    validate(coords);
    return Point(id_, std::move(coords));
  }

  bool owns(const Point& x) const noexcept { return x.space() == id_; }

  void check(const Point& x) const {
    if (!owns(x)) throw UsageError(name() + ": point belongs to another space");
  }

  double distance(const Point& x, const Point& y) const {
    check(x);
    check(y);
    return do_distance(x, y);
  }

  virtual BoundedDistance distance_with_bound(const Point& x, const Point& y) const {
    return {distance(x, y), 0.0};
  }

  // Constant-speed minimizing geodesic from x (s = 0) to y (s = 1).
  Point geodesic_point(const Point& x, const Point& y, double s) const {
    check(x);
    check(y);
    if (s < 0.0 || s > 1.0) throw UsageError(name() + ": geodesic parameter outside [0, 1]");
    if (s == 0.0) return x;
    if (s == 1.0) return y;
    return do_geodesic_point(x, y, s);
  }

  // Closest point of the closed ball B(center, r) to x.
  virtual Point project_to_ball(const Point& center, double r, const Point& x) const {
    check(center);
    check(x);
    if (!(r > 0.0)) throw UsageError(name() + ": ball radius must be positive");
    const double d = do_distance(center, x);
    if (d <= r) return x;
    if (d >= uniqueness_radius())
      throw NonUniqueGeodesicError(name() + ": projection target at distance " + std::to_string(d) +
                                   " beyond uniqueness radius");
    return do_geodesic_point(center, x, r / d);
  }

  // Projects every point of xs onto the same ball; backends may share work.
  virtual void project_to_ball_batch(const Point& center, double r, std::span<Point> xs) const {
    for (auto& x : xs) x = project_to_ball(center, r, x);
  }

  TangentVector log_map(const Point& p, const Point& q) const {
    check(p);
    check(q);
    if (!has_exp_log()) throw CapabilityError(name() + ": no exp/log maps");
    return do_log(p, q);
  }

  Point exp_map(const Point& p, const TangentVector& v) const {
    check(p);
    if (!has_exp_log()) throw CapabilityError(name() + ": no exp/log maps");
    if (v.magnitude == 0.0) return p;
    return do_exp(p, v);
  }

 protected:
  virtual double do_distance(const Point& x, const Point& y) const = 0;
  virtual Point do_geodesic_point(const Point& x, const Point& y, double s) const = 0;
  virtual TangentVector do_log(const Point& p, const Point&) const {
    throw CapabilityError(name() + ": no log map at " + p.str());
  }
  virtual Point do_exp(const Point& p, const TangentVector&) const {
    throw CapabilityError(name() + ": no exp map at " + p.str());
  }

  // Point construction for subclasses that already know the record is valid.
  Point wrap(Vector coords) const { return Point(id_, std::move(coords)); }

  // arccos with the policy's clamp rule: rounding is clamped, anything
  // further than acos_slack outside [-1, 1] is a logic error.
  double checked_acos(double c) const {
    if (c > 1.0 + policy_.acos_slack || c < -1.0 - policy_.acos_slack)
      throw ConsistencyError(name() + ": cosine argument " + std::to_string(c) + " outside [-1, 1]");
    return std::acos(std::clamp(c, -1.0, 1.0));
  }

 private:
  static SpaceId next_id() {
    static std::atomic<SpaceId> counter{1};
    return counter.fetch_add(1, std::memory_order_relaxed);
  }

  SpaceId id_;
  NumericPolicy policy_;
};

using SpacePtr = std::shared_ptr<const MetricSpace>;

}  // namespace tractrix
