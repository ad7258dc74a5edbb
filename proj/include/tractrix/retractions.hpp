#pragma once

#include "tractrix/flow.hpp"
#include "tractrix/glued.hpp"
#include "tractrix/lipschitz.hpp"
#include "tractrix/spaces/product.hpp"

#include <variant>

namespace tractrix {

// Retraction onto B(p, pi/2): identity on the ball, the reflection
// d -> pi - d along the geodesic from p through x on pi/2 < d < pi, and p
// beyond.
inline Point radial_retraction(const MetricSpace& space, const Point& p, const Point& x) {
  if (space.curvature_bound() > 1.0 + space.policy().abs_tol)
    throw PreconditionError("radial_retraction: backend curvature bound exceeds 1",
                            space.name() + " has bound " + format_double(space.curvature_bound()));
  const double d = space.distance(p, x);
  if (d <= 0.5 * kPi) return x;
  if (d >= kPi - space.policy().resolution) return p;
  try {
    return space.geodesic_point(p, x, (kPi - d) / d);
  } catch (const NonUniqueGeodesicError&) {
    return p;
  }
}

// Phi = phi_{pi/2} o Theta for a sampled K in U: flows U glued to the
// spherical cone over K, then identifies slice points (k, pi/2) with k.
class PhiRetraction {
 public:
  struct Output {
    Point u;                    // image in U (a point of K)
    Point k;                    // same, intrinsic
    double slice_defect = 0.0;  // distance from the flow's end point to the identified slice point
  };

  PhiRetraction(SubsetPtr k, const Point& p, double delta, CrossingPolicy crossing = {})
      : setup_(build_retraction_setup(std::move(k), p, crossing)), cfg_{0.5 * kPi, delta} {
    cfg_.validate();
  }

  const RetractionSetup& setup() const noexcept { return setup_; }
  const GluedSpace& glued() const noexcept { return *setup_.space; }
  const SampledSubset& subset() const noexcept { return glued().subset(); }
  const MetricSpace& domain() const noexcept { return subset().ambient(); }
  double delta() const noexcept { return cfg_.delta; }
  double mesh() const noexcept { return subset().mesh(); }
  // Allowed displacement of points of K: 2 delta + 2 eps_K.
  double fixed_point_tolerance() const noexcept { return 2.0 * cfg_.delta + 2.0 * mesh(); }

  std::vector<Output> apply_detailed(const std::vector<Point>& xs) const {
    const auto& w = glued();
    std::vector<Point> ws;
    ws.reserve(xs.size());
    for (const auto& x : xs) ws.push_back(w.from_u(radial_retraction(domain(), setup_.base_u, x)));
    ws = tractrix_flow_batch(setup_.space, setup_.gamma, cfg_, std::move(ws));
    std::vector<Output> out(ws.size());
    const auto& join = *setup_.cone.space();
    parallel_for_chunks(ws.size(), [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        const Point inner = w.inner(ws[i]);
        if (w.piece(ws[i]) == Piece::j) {
          Point k = join.left_part(inner);
          out[i] = {subset().embed(k), k, 0.5 * kPi - join.parameter(inner)};
        } else {
          auto near = subset().nearest(inner);
          out[i] = {std::move(near.u), std::move(near.k), near.distance};
        }
      }
    });
    return out;
  }

  std::vector<Point> apply(const std::vector<Point>& xs) const {
    std::vector<Point> out;
    for (auto& o : apply_detailed(xs)) out.push_back(std::move(o.u));
    return out;
  }

  Point operator()(const Point& x) const { return apply({x}).front(); }

 private:
  RetractionSetup setup_;
  TractrixConfig cfg_;
};

// Psi: U x U -> diagonal for a hemisphere-sized cap U of the unit sphere
// S^2. Pairs are embedded in S^5 = S^2 * S^2 by (x, y) -> (x, y)/sqrt(2);
// K is the image of the diagonal, a 2-sphere cap, and Phi is run there.
class PsiRetraction {
 public:
  struct Output {
    Point pair;                 // (z, z) in the scaled product
    double snap_distance = 0.0; // flow end point to its identified K point
  };

  PsiRetraction(std::shared_ptr<const SphereSpace> u, const Point& p, double delta, double mesh,
                CrossingPolicy crossing = {})
      : u_(std::move(u)), p_(p) {
    if (u_->dimension() != 2 || u_->radius() != 1.0)
      throw UsageError("PsiRetraction: U must be a cap of the unit 2-sphere");
    u_->check(p);
    domain_ = std::make_shared<const ScaledProductSpace>(u_, u_, 1.0 / std::sqrt(2.0), u_->policy());
    s5_ = std::make_shared<const SphereSpace>(5, 1.0, u_->policy());
    const auto s5 = s5_;
    Embedding diag = [s5](const Point& z) {
      Vector c(6);
      c << z.coords(), z.coords();
      return s5->normalized(c);
    };
    auto k = cap_subset(s5_, u_, p, 0.5 * kPi, diag, mesh);
    phi_ = std::make_unique<PhiRetraction>(k, diag(p), delta, crossing);
  }

  const ScaledProductSpace& domain() const noexcept { return *domain_; }
  const std::shared_ptr<const ScaledProductSpace>& domain_ptr() const noexcept { return domain_; }
  const PhiRetraction& phi() const noexcept { return *phi_; }
  const Point& base() const noexcept { return p_; }

  // The join point of (x, y) at parameter pi/4.
  Point embed(const Point& pair) const {
    Vector c(6);
    c << domain_->left_part(pair).coords(), domain_->right_part(pair).coords();
    return s5_->normalized(c / std::sqrt(2.0));
  }

  std::vector<Output> apply_detailed(const std::vector<Point>& pairs) const {
    std::vector<Point> xs;
    for (const auto& q : pairs) {
      domain_->check(q);
      for (const Point& part : {domain_->left_part(q), domain_->right_part(q)}) {
        const double d = u_->distance(p_, part);
        if (d > 0.5 * kPi + u_->policy().abs_tol)
          throw PreconditionError("PsiRetraction: point farther than pi/2 from the base point",
                                  part.str() + " at distance " + format_double(d));
      }
      xs.push_back(embed(q));
    }
    std::vector<Output> out;
    for (auto& o : phi_->apply_detailed(xs)) {
      const Point z(u_->id(), o.k.coords());
      out.push_back({domain_->pair(z, z), o.slice_defect});
    }
    return out;
  }

  std::vector<Point> apply(const std::vector<Point>& pairs) const {
    std::vector<Point> out;
    for (auto& o : apply_detailed(pairs)) out.push_back(std::move(o.pair));
    return out;
  }

 private:
  std::shared_ptr<const SphereSpace> u_;
  Point p_;
  std::shared_ptr<const ScaledProductSpace> domain_;
  std::shared_ptr<const SphereSpace> s5_;
  std::unique_ptr<PhiRetraction> phi_;
};

// Convex cones in R^{m+1} = Cone S^m.
namespace cone {

struct Ray {
  Vector direction;  // unit
};
// {alpha a + beta b : alpha, beta >= 0}, a and b unit, angle below pi.
struct Sector {
  Vector a;
  Vector b;
};
// {x : <x, axis> >= |x| cos(half_angle)}.
struct Circular {
  Vector axis;
  double half_angle;
};
// {x : <n_i, x> <= 0 for all i}.
struct Halfspaces {
  std::vector<Vector> normals;
};

using Shape = std::variant<Ray, Sector, Circular, Halfspaces>;

inline Vector project(const Ray& c, const Vector& x) { return std::max(0.0, x.dot(c.direction)) * c.direction; }

inline Vector project(const Sector& c, const Vector& x) {
  // Gram-Schmidt frame of the spanning plane.
  const Vector e1 = c.a;
  Vector e2 = c.b - c.b.dot(e1) * e1;
  e2.normalize();
  const Vector xp = x.dot(e1) * e1 + x.dot(e2) * e2;
  // Coefficients of xp in the (a, b) basis.
  const double ab = c.a.dot(c.b);
  const double xa = xp.dot(c.a), xb = xp.dot(c.b);
  const double den = 1.0 - ab * ab;
  const double alpha = (xa - ab * xb) / den;
  const double beta = (xb - ab * xa) / den;
  if (alpha >= 0.0 && beta >= 0.0) return xp;
  const Vector pa = std::max(0.0, xa) * c.a;
  const Vector pb = std::max(0.0, xb) * c.b;
  return (xp - pa).squaredNorm() <= (xp - pb).squaredNorm() ? pa : pb;
}

inline Vector project(const Circular& c, const Vector& x) {
  const double s = x.dot(c.axis);
  const Vector w = x - s * c.axis;
  const double rho = w.norm();
  const double phi = std::atan2(rho, s);
  if (phi <= c.half_angle) return x;
  if (phi >= c.half_angle + 0.5 * kPi) return Vector::Zero(x.size());
  const Vector e = std::cos(c.half_angle) * c.axis + std::sin(c.half_angle) * (w / rho);
  return x.dot(e) * e;
}

// Dykstra's alternating projections onto the halfspaces.
inline Vector project(const Halfspaces& c, const Vector& x, double tol = 1e-12, int max_iter = 10000) {
  const std::size_t m = c.normals.size();
  std::vector<Vector> corr(m, Vector::Zero(x.size()));
  Vector y = x;
  for (int it = 0; it < max_iter; ++it) {
    const Vector before = y;
    for (std::size_t i = 0; i < m; ++i) {
      const Vector z = y + corr[i];
      const Vector& n = c.normals[i];
      const double v = n.dot(z);
      const Vector pz = v > 0.0 ? Vector(z - v / n.squaredNorm() * n) : z;
      corr[i] = z - pz;
      y = pz;
    }
    if ((y - before).norm() <= tol) break;
  }
  return y;
}

inline Vector project(const Shape& s, const Vector& x) {
  return std::visit([&](const auto& c) -> Vector { return project(c, x); }, s);
}

}  // namespace cone

// x -> x' = x_hat + t p, where x_hat is the nearest point of the Euclidean
// cone over K and t >= 0 solves |x_hat + t p| = 1.
class ConeRetraction {
 public:
  struct Step {
    Vector hat;
    double t;
    Point out;
  };

  ConeRetraction(std::shared_ptr<const SphereSpace> u, const Point& p, cone::Shape shape)
      : u_(std::move(u)), p_(p), shape_(std::move(shape)) {
    if (u_->radius() != 1.0) throw UsageError("ConeRetraction: unit sphere required");
    u_->check(p_);
    check_monotone();
  }

  const SphereSpace& space() const noexcept { return *u_; }
  const Point& base() const noexcept { return p_; }
  const cone::Shape& shape() const noexcept { return shape_; }

  Step step(const Point& x) const {
    u_->check(x);
    const Vector hat = cone::project(shape_, x.coords());
    const double tol = u_->policy().abs_tol;
    const double h2 = hat.squaredNorm();
    if (h2 > 1.0 + tol) throw ConsistencyError("ConeRetraction: projection longer than its argument");
    const double m = hat.dot(p_.coords());
    const double disc = m * m - h2 + 1.0;
    if (m < -tol || disc < 0.0) throw ConsistencyError("ConeRetraction: no nonnegative root");
    const double t = -m + std::sqrt(disc);
    return {hat, t, u_->normalized(hat + t * p_.coords())};
  }

  Point operator()(const Point& x) const { return step(x).out; }

 private:
  void check_monotone() const {
    const double tol = u_->policy().abs_tol;
    const Vector& p = p_.coords();
    auto fail = [&](const std::string& w) {
      throw PreconditionError("ConeRetraction: K has points with <k, p> < 0", w);
    };
    if (const auto* s = std::get_if<cone::Sector>(&shape_)) {
      if (s->a.dot(p) < -tol) fail("generator a");
      if (s->b.dot(p) < -tol) fail("generator b");
    } else if (const auto* c = std::get_if<cone::Circular>(&shape_)) {
      if (std::acos(std::clamp(c->axis.dot(p), -1.0, 1.0)) + c->half_angle > 0.5 * kPi + tol) fail("cone boundary");
    } else if (const auto* r = std::get_if<cone::Ray>(&shape_)) {
      if (r->direction.dot(p) < -tol) fail("ray direction");
    }
  }

  std::shared_ptr<const SphereSpace> u_;
  Point p_;
  cone::Shape shape_;
};

// Sector spanned by the arc of the given length centered at p in the
// direction `dir` (tangent at p).
inline cone::Sector arc_sector(const Point& p, const Vector& dir, double length) {
  const Vector c = p.coords().normalized();
  Vector d = dir - dir.dot(c) * c;
  d.normalize();
  const double h = 0.5 * length;
  return {std::cos(h) * c - std::sin(h) * d, std::cos(h) * c + std::sin(h) * d};
}

enum class RetractionKind { radial, phi, psi, cone };

inline const char* to_string(RetractionKind k) {
  switch (k) {
    case RetractionKind::radial: return "radial";
    case RetractionKind::phi: return "phi";
    case RetractionKind::psi: return "psi";
    case RetractionKind::cone: return "cone";
  }
  return "?";
}

// A retraction as a batch map on its domain, with samples of its target
// set and the tolerance to which it must fix them.
struct RetractionPipeline {
  RetractionKind kind;
  SpacePtr domain;
  BatchMap map;
  std::vector<Point> target_samples;
  double tolerance;
  std::string tolerance_formula;
};

// max d(f k, k) over the target samples.
inline double retraction_error(const RetractionPipeline& pl) {
  const auto img = pl.map(pl.target_samples);
  double worst = 0.0;
  for (std::size_t i = 0; i < img.size(); ++i)
    worst = std::max(worst, pl.domain->distance(img[i], pl.target_samples[i]));
  return worst;
}

struct ComparisonReport {
  std::vector<double> difference;
  double max_difference = 0.0;
};

// d(Phi x, Phi_cone x) probe by probe; no equality is expected.
inline ComparisonReport compare_retractions(const PhiRetraction& phi, const ConeRetraction& cone,
                                            const std::vector<Point>& probes) {
  const auto a = phi.apply(probes);
  ComparisonReport rep;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const double d = cone.space().distance(a[i], cone(probes[i]));
    rep.difference.push_back(d);
    rep.max_difference = std::max(rep.max_difference, d);
  }
  return rep;
}

}  // namespace tractrix
