#pragma once

#include "tractrix/minimize.hpp"
#include "tractrix/spaces/euclidean.hpp"
#include "tractrix/spaces/sphere.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace tractrix {

// Parametrization of a subset K by a box or disk of real parameters.
struct SubsetChart {
  Eigen::Index dim = 0;
  ParamClamp clamp;                             // projects onto the parameter domain
  std::function<Point(const Vector&)> to_k;     // parameter -> intrinsic point of K
};

using Embedding = std::function<Point(const Point&)>;

// A closed weakly convex subset K of an ambient space U, carried as an
// intrinsic space, an isometric embedding into U, a chart, and a finite
// sampling ("gates") whose consecutive spacing is at most `mesh`.
class SampledSubset {
 public:
  struct Gate {
    Vector param;
    Point k;  // intrinsic
    Point u;  // in the ambient space
  };

  struct Nearest {
    Vector param;
    Point k;
    Point u;
    double distance;
  };

  SampledSubset(SpacePtr ambient, SpacePtr intrinsic, Embedding embed, SubsetChart chart,
                const std::vector<Vector>& gate_params, double mesh, std::string label)
      : ambient_(std::move(ambient)),
        intrinsic_(std::move(intrinsic)),
        embed_(std::move(embed)),
        chart_(std::move(chart)),
        mesh_(mesh),
        label_(std::move(label)) {
    if (gate_params.empty()) throw UsageError("SampledSubset: no gate samples");
    gates_.reserve(gate_params.size());
    for (const auto& p : gate_params) {
      Point k = chart_.to_k(p);
      Point u = embed_(k);
      gates_.push_back({p, std::move(k), std::move(u)});
    }
  }

  const MetricSpace& ambient() const noexcept { return *ambient_; }
  const SpacePtr& ambient_ptr() const noexcept { return ambient_; }
  const MetricSpace& intrinsic() const noexcept { return *intrinsic_; }
  const SpacePtr& intrinsic_ptr() const noexcept { return intrinsic_; }
  const SubsetChart& chart() const noexcept { return chart_; }
  const std::vector<Gate>& gates() const noexcept { return gates_; }
  double mesh() const noexcept { return mesh_; }
  const std::string& label() const noexcept { return label_; }

  Point embed(const Point& k) const { return embed_(k); }
  Point at(const Vector& param) const { return chart_.to_k(chart_.clamp(param)); }

  // Closest point of K to an ambient point: best gate, then local refinement.
  Nearest nearest(const Point& x) const {
    std::size_t best = 0;
    double best_d = kInf;
    for (std::size_t i = 0; i < gates_.size(); ++i) {
      const double d = ambient_->distance(x, gates_[i].u);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    const auto refined = minimize_local(
        [&](const Vector& p) { return ambient_->distance(x, embed_(chart_.to_k(p))); }, chart_.clamp,
        gates_[best].param, best_d, mesh_, ambient_->policy().refine_tol);
    Point k = chart_.to_k(refined.arg);
    Point u = embed_(k);
    return {refined.arg, std::move(k), std::move(u), refined.value};
  }

 private:
  SpacePtr ambient_;
  SpacePtr intrinsic_;
  Embedding embed_;
  SubsetChart chart_;
  double mesh_;
  std::string label_;
  std::vector<Gate> gates_;
};

using SubsetPtr = std::shared_ptr<const SampledSubset>;

namespace detail {

inline std::vector<Vector> uniform_params(double lo, double hi, double mesh) {
  const double len = hi - lo;
  const auto n = static_cast<std::size_t>(std::ceil(len / mesh - 1e-12));
  std::vector<Vector> out;
  if (n == 0) {
    out.push_back(Vector::Constant(1, lo));
    return out;
  }
  for (std::size_t i = 0; i <= n; ++i)
    out.push_back(Vector::Constant(1, lo + len * static_cast<double>(i) / static_cast<double>(n)));
  return out;
}

inline SubsetChart interval_chart(const std::shared_ptr<const IntervalSpace>& k) {
  return {1,
          [lo = k->lo(), hi = k->hi()](const Vector& p) { return Vector::Constant(1, std::clamp(p[0], lo, hi)); },
          [k](const Vector& p) { return k->at(std::clamp(p[0], k->lo(), k->hi())); }};
}

// Orthonormal basis of the tangent space of a sphere at `center`.
inline std::vector<Vector> tangent_basis(const SphereSpace& s, const Point& center) {
  const Vector u = center.coords() / s.radius();
  std::vector<Vector> basis;
  for (Eigen::Index i = 0; i < u.size() && static_cast<Eigen::Index>(basis.size()) < s.dimension(); ++i) {
    Vector e = Vector::Unit(u.size(), i);
    e -= u.dot(e) * u;
    for (const auto& b : basis) e -= b.dot(e) * b;
    const double n = e.norm();
    if (n > 1e-6) basis.push_back(e / n);
  }
  return basis;
}

}  // namespace detail

// Geodesic arc through `center` of a sphere: points exp_center(theta * dir)
// for theta in [lo, hi] (arc length, signed). K is an interval intrinsically.
inline SubsetPtr arc_subset(std::shared_ptr<const SphereSpace> u, const Point& center, const Vector& direction,
                            double lo, double hi, double mesh) {
  u->check(center);
  if (hi - lo > kPi * u->radius() + u->policy().abs_tol)
    throw DomainError("arc_subset: arc longer than half a great circle");
  if (!(mesh > 0.0)) throw UsageError("arc_subset: mesh must be positive");
  const Vector c = center.coords() / u->radius();
  Vector dir = direction - c.dot(direction) * c;
  if (dir.norm() < 1e-12) throw UsageError("arc_subset: direction is not tangent");
  dir.normalize();
  auto k = std::make_shared<const IntervalSpace>(lo, hi, u->policy());
  Embedding embed = [u, center, dir](const Point& kp) {
    return u->exp_map(center, TangentVector::from_vector(center, kp[0] * dir));
  };
  return std::make_shared<const SampledSubset>(u, k, std::move(embed), detail::interval_chart(k),
                                               detail::uniform_params(lo, hi, mesh), mesh,
                                               "arc[" + std::to_string(lo) + "," + std::to_string(hi) + "]");
}

// K = {p}.
inline SubsetPtr singleton_subset(SpacePtr u, const Point& p) {
  u->check(p);
  auto k = std::make_shared<const PointSpace>(u->policy());
  SubsetChart chart{0, [](const Vector& v) { return v; }, [k](const Vector&) { return k->the_point(); }};
  return std::make_shared<const SampledSubset>(u, k, [p](const Point&) { return p; }, std::move(chart),
                                               std::vector<Vector>{Vector()}, 0.0, "singleton");
}

// Closed geodesic ball of radius `rho` about `center` in a sphere `k`
// (rho <= pi/2 keeps it convex), embedded into an ambient space by `embed`.
// Charted by azimuthal-equidistant coordinates; gates on a square grid of
// spacing `mesh` plus a boundary ring.
inline SubsetPtr cap_subset(SpacePtr ambient, std::shared_ptr<const SphereSpace> k, const Point& center,
                            double rho, Embedding embed, double mesh) {
  k->check(center);
  if (!(mesh > 0.0)) throw UsageError("cap_subset: mesh must be positive");
  const auto basis = detail::tangent_basis(*k, center);
  const auto dim = static_cast<Eigen::Index>(basis.size());
  SubsetChart chart{dim,
                    [rho](const Vector& p) {
                      const double n = p.norm();
                      return n > rho ? Vector(p * (rho / n)) : p;
                    },
                    [k, center, basis](const Vector& p) {
                      Vector v = Vector::Zero(center.size());
                      for (std::size_t i = 0; i < basis.size(); ++i) v += p[static_cast<Eigen::Index>(i)] * basis[i];
                      return k->exp_map(center, TangentVector::from_vector(center, v));
                    }};
  std::vector<Vector> params;
  const auto steps = static_cast<int>(std::floor(rho / mesh));
  if (dim != 2) throw UsageError("cap_subset: only two-dimensional caps are gated");
  for (int i = -steps; i <= steps; ++i)
    for (int j = -steps; j <= steps; ++j) {
      Vector p(2);
      p << i * mesh, j * mesh;
      if (p.norm() <= rho) params.push_back(std::move(p));
    }
  const auto ring = static_cast<int>(std::ceil(2.0 * kPi * rho / mesh));
  for (int i = 0; i < ring; ++i) {
    const double a = 2.0 * kPi * i / ring;
    Vector p(2);
    p << rho * std::cos(a), rho * std::sin(a);
    params.push_back(std::move(p));
  }
  return std::make_shared<const SampledSubset>(std::move(ambient), k, std::move(embed), std::move(chart), params,
                                               mesh, "cap");
}

// Geodesic polyline through given ambient points (e.g. read from a gate
// CSV). K is parametrized by arc length; the vertices are the gates.
inline SubsetPtr polyline_subset(SpacePtr u, const std::vector<Point>& vertices) {
  if (vertices.empty()) throw UsageError("polyline_subset: no vertices");
  std::vector<double> cumulative{0.0};
  double mesh = 0.0;
  for (std::size_t i = 1; i < vertices.size(); ++i) {
    const double d = u->distance(vertices[i - 1], vertices[i]);
    mesh = std::max(mesh, d);
    cumulative.push_back(cumulative.back() + d);
  }
  auto k = std::make_shared<const IntervalSpace>(0.0, cumulative.back(), u->policy());
  Embedding embed = [u, vertices, cumulative](const Point& kp) {
    const double s = kp[0];
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), s);
    std::size_t i = it == cumulative.begin() ? 0 : static_cast<std::size_t>(it - cumulative.begin()) - 1;
    if (i + 1 >= vertices.size()) return vertices.back();
    const double len = cumulative[i + 1] - cumulative[i];
    if (len <= 0.0) return vertices[i];
    return u->geodesic_point(vertices[i], vertices[i + 1], std::clamp((s - cumulative[i]) / len, 0.0, 1.0));
  };
  std::vector<Vector> params;
  for (double c : cumulative) params.push_back(Vector::Constant(1, c));
  return std::make_shared<const SampledSubset>(u, k, std::move(embed), detail::interval_chart(k), params, mesh,
                                               "polyline");
}

}  // namespace tractrix
