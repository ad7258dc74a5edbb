#pragma once

#include "tractrix/curve.hpp"
#include "tractrix/spaces/join.hpp"
#include "tractrix/subset.hpp"

#include <atomic>
#include <queue>

namespace tractrix {

enum class Piece : int { u = 0, j = 1 };

// How cross-piece shortest paths are searched.
struct CrossingPolicy {
  int max_alternations = 1;  // crossings of K a single route may make
  bool relax = false;        // add gate-to-gate shortest paths (multi-crossing)
  bool refine = true;        // refine the best gate continuously through K's chart
};

// W = U glued to J along K. K is known through its gate sampling (mesh
// eps_K); every cross-piece distance is a minimum over crossing points of K
// and carries eps_K as its error bound.
//
// Points are [piece tag, piece coordinates..., zero padding].
class GluedSpace final : public MetricSpace {
 public:
  // One way of getting from x to y: either directly inside a piece or
  // through the crossing point `k` of K.
  struct Route {
    double length = kInf;
    bool direct = false;
    Point k;
    Point gate_x;  // crossing point in x's piece
    Point gate_y;  // crossing point in y's piece
    double leg_x = 0.0;
    double leg_y = 0.0;
    bool ambiguous = false;
  };

  GluedSpace(SpacePtr u, SpacePtr j, SubsetPtr k, Embedding k_to_j, CrossingPolicy crossing = {},
             NumericPolicy policy = {})
      : MetricSpace(policy),
        u_(std::move(u)),
        j_(std::move(j)),
        k_(std::move(k)),
        k_to_j_(std::move(k_to_j)),
        crossing_(crossing) {
    if (!u_ || !j_ || !k_) throw UsageError("GluedSpace: null piece");
    if (k_->ambient().id() != u_->id()) throw UsageError("GluedSpace: K is not a subset of U");
    for (const auto& g : k_->gates()) {
      gate_u_.push_back(g.u);
      gate_j_.push_back(k_to_j_(g.k));
    }
    build_gate_matrices();
  }

  SpaceKind kind() const override { return SpaceKind::glued; }
  std::string name() const override { return "(" + u_->name() + ") U_K (" + j_->name() + ")"; }
  Eigen::Index coord_size() const override { return 1 + std::max(u_->coord_size(), j_->coord_size()); }
  double curvature_bound() const override { return std::max(u_->curvature_bound(), j_->curvature_bound()); }
  double uniqueness_radius() const override { return std::min(u_->uniqueness_radius(), j_->uniqueness_radius()); }
  bool has_exact_geodesics() const override { return false; }

  const MetricSpace& piece_space(Piece p) const { return p == Piece::u ? *u_ : *j_; }
  const SampledSubset& subset() const noexcept { return *k_; }
  const CrossingPolicy& crossing() const noexcept { return crossing_; }
  std::size_t gate_count() const noexcept { return gate_u_.size(); }
  const Point& gate(Piece p, std::size_t i) const { return p == Piece::u ? gate_u_[i] : gate_j_[i]; }
  double mesh() const noexcept { return k_->mesh(); }
  std::size_t ambiguity_count() const noexcept { return ambiguities_.load(); }
  // Largest |d_U - d_J| over gate pairs; the isometry defect of the sampling.
  double isometry_defect() const noexcept { return isometry_defect_; }

  void validate(const Vector& c) const override {
    MetricSpace::validate(c);
    if (c[0] != 0.0 && c[0] != 1.0) throw DomainError(name() + ": invalid piece tag");
    const auto& s = piece_space(c[0] == 0.0 ? Piece::u : Piece::j);
    s.validate(c.segment(1, s.coord_size()));
  }

  Point from_u(const Point& x) const { return lift(Piece::u, x); }
  Point from_j(const Point& x) const { return lift(Piece::j, x); }
  Point lift(Piece p, const Point& x) const {
    const auto& s = piece_space(p);
    s.check(x);
    Vector c = Vector::Zero(coord_size());
    c[0] = static_cast<double>(static_cast<int>(p));
    c.segment(1, s.coord_size()) = x.coords();
    return wrap(std::move(c));
  }
  Piece piece(const Point& x) const {
    check(x);
    return x[0] == 0.0 ? Piece::u : Piece::j;
  }
  Point inner(const Point& x) const {
    const auto& s = piece_space(piece(x));
    return Point(s.id(), x.coords().segment(1, s.coord_size()));
  }

  BoundedDistance distance_with_bound(const Point& x, const Point& y) const override {
    check(x);
    check(y);
    return bounded(x, y, crossing_.relax);
  }

  // Distance with routes crossing K at most once between pieces (twice
  // for a same-piece detour), whatever the construction policy.
  double single_crossing_distance(const Point& x, const Point& y) const {
    check(x);
    check(y);
    return bounded(x, y, false).value;
  }

  // Best route under the single-crossing policy.
  Route route(const Point& x, const Point& y) const {
    const Piece px = piece(x), py = piece(y);
    const Point xi = inner(x), yi = inner(y);
    if (px == py) {
      Route r;
      r.direct = true;
      r.length = piece_space(px).distance(xi, yi);
      return r;
    }
    return cross_route(px, xi, gate_costs(px, xi), py, yi, gate_costs(py, yi));
  }

  Point project_to_ball(const Point& center, double r, const Point& x) const override {
    Point out = x;
    project_to_ball_batch(center, r, std::span<Point>(&out, 1));
    return out;
  }

  // Walks back from the center along the best route to distance r. The
  // center-side gate costs are shared by the whole batch.
  void project_to_ball_batch(const Point& center, double r, std::span<Point> xs) const override {
    check(center);
    if (!(r > 0.0)) throw UsageError(name() + ": ball radius must be positive");
    const Piece pc = piece(center);
    const Point ci = inner(center);
    const auto& sc = piece_space(pc);
    std::vector<double> center_costs;
    const double tol = policy().abs_tol;
    for (auto& x : xs) {
      const Piece px = piece(x);
      const Point xi = inner(x);
      if (px == pc) {
        if (sc.distance(ci, xi) > r + tol) x = lift(pc, sc.project_to_ball(ci, r, xi));
        continue;
      }
      if (center_costs.empty()) center_costs = gate_costs(pc, ci);
      const auto x_costs = gate_costs(px, xi);
      double gate_min = kInf;
      for (std::size_t i = 0; i < x_costs.size(); ++i) gate_min = std::min(gate_min, x_costs[i] + center_costs[i]);
      if (gate_min <= r + tol) continue;
      const Route rt = cross_route(px, xi, x_costs, pc, ci, center_costs);
      if (rt.ambiguous) ambiguities_.fetch_add(1, std::memory_order_relaxed);
      if (rt.length <= r + tol) continue;
      if (r < rt.leg_y) {
        x = lift(pc, sc.geodesic_point(ci, rt.gate_y, r / rt.leg_y));
      } else if (rt.leg_x > 0.0) {
        const double overshoot = rt.length - r;
        x = lift(px, piece_space(px).geodesic_point(xi, rt.gate_x, std::min(1.0, overshoot / rt.leg_x)));
      }
    }
  }

 protected:
  double do_distance(const Point& x, const Point& y) const override { return bounded(x, y, crossing_.relax).value; }

  Point do_geodesic_point(const Point& x, const Point& y, double s) const override {
    const Route rt = route(x, y);
    const Piece px = piece(x), py = piece(y);
    if (rt.direct) return lift(px, piece_space(px).geodesic_point(inner(x), inner(y), s));
    const double pos = s * rt.length;
    if (pos <= rt.leg_x) {
      if (rt.leg_x <= 0.0) return lift(px, rt.gate_x);
      return lift(px, piece_space(px).geodesic_point(inner(x), rt.gate_x, pos / rt.leg_x));
    }
    if (rt.leg_y <= 0.0) return y;
    return lift(py, piece_space(py).geodesic_point(rt.gate_y, inner(y), (pos - rt.leg_x) / rt.leg_y));
  }

 private:
  Point embed_in(Piece p, const Point& k) const { return p == Piece::u ? k_->embed(k) : k_to_j_(k); }

  std::vector<double> gate_costs(Piece p, const Point& x) const {
    const auto& s = piece_space(p);
    const auto& gates = p == Piece::u ? gate_u_ : gate_j_;
    std::vector<double> out(gates.size());
    for (std::size_t i = 0; i < gates.size(); ++i) out[i] = s.distance(x, gates[i]);
    return out;
  }

  // Best single crossing: lowest-index best gate, refined through the chart.
  // A competing basin (a gate more than two meshes away in parameter space
  // whose sampled value could still win) is refined as well; equal values
  // with crossing points more than eps_K apart mark the route ambiguous.
  Route cross_route(Piece px, const Point& x, const std::vector<double>& x_costs, Piece py, const Point& y,
                    const std::vector<double>& y_costs) const {
    const auto& gates = k_->gates();
    std::size_t best = 0;
    double best_v = kInf;
    for (std::size_t i = 0; i < gates.size(); ++i) {
      const double v = x_costs[i] + y_costs[i];
      if (v < best_v) {
        best_v = v;
        best = i;
      }
    }
    Vector arg = gates[best].param;
    double value = best_v;
    bool ambiguous = false;
    const auto& chart = k_->chart();
    if (crossing_.refine && chart.dim > 0) {
      const auto& sx = piece_space(px);
      const auto& sy = piece_space(py);
      const ParamFunction f = [&](const Vector& p) {
        const Point k = chart.to_k(p);
        return sx.distance(x, embed_in(px, k)) + sy.distance(embed_in(py, k), y);
      };
      const double tol = policy().refine_tol;
      auto first = minimize_local(f, chart.clamp, arg, value, k_->mesh(), tol);
      std::size_t rival = gates.size();
      double rival_v = kInf;
      for (std::size_t i = 0; i < gates.size(); ++i) {
        if ((gates[i].param - gates[best].param).norm() <= 2.0 * k_->mesh()) continue;
        const double v = x_costs[i] + y_costs[i];
        if (v < rival_v) {
          rival_v = v;
          rival = i;
        }
      }
      if (rival < gates.size() && rival_v <= first.value + k_->mesh()) {
        auto second = minimize_local(f, chart.clamp, gates[rival].param, rival_v, k_->mesh(), tol);
        const double tie = policy().abs_tol;
        if (std::abs(second.value - first.value) <= tie) {
          ambiguous = k_->intrinsic().distance(chart.to_k(first.arg), chart.to_k(second.arg)) > k_->mesh();
        } else if (second.value < first.value) {
          first = std::move(second);
        }
      }
      arg = std::move(first.arg);
      value = first.value;
    }
    Route r;
    r.k = chart.to_k(arg);
    r.gate_x = embed_in(px, r.k);
    r.gate_y = embed_in(py, r.k);
    r.leg_x = piece_space(px).distance(x, r.gate_x);
    r.leg_y = piece_space(py).distance(r.gate_y, y);
    r.length = r.leg_x + r.leg_y;
    r.ambiguous = ambiguous;
    return r;
  }

  BoundedDistance bounded(const Point& x, const Point& y, bool relax) const {
    const Piece px = piece(x), py = piece(y);
    const Point xi = inner(x), yi = inner(y);
    const auto a = gate_costs(px, xi);
    const auto b = gate_costs(py, yi);
    double value;
    if (px == py) {
      value = piece_space(px).distance(xi, yi);
      // Detour: leave through K, travel in the other piece (or along the
      // relaxed gate graph), come back through K.
      const auto& m = relax ? relaxed_ : (px == Piece::u ? gj_ : gu_);
      if (!m.empty()) value = std::min(value, through_gates(a, m, b));
    } else {
      value = cross_route(px, xi, a, py, yi, b).length;
      if (relax && !relaxed_.empty()) value = std::min(value, through_gates(a, relaxed_, b));
    }
    return {value, k_->mesh()};
  }

  double through_gates(const std::vector<double>& a, const std::vector<double>& m, const std::vector<double>& b) const {
    const std::size_t n = a.size();
    double best = kInf;
    for (std::size_t i = 0; i < n; ++i) {
      const double* row = &m[i * n];
      double inner_best = kInf;
      for (std::size_t j = 0; j < n; ++j) inner_best = std::min(inner_best, row[j] + b[j]);
      best = std::min(best, a[i] + inner_best);
    }
    return best;
  }

  void build_gate_matrices() {
    const std::size_t n = gate_u_.size();
    if (n > kMaxMatrixGates) return;
    gu_.assign(n * n, 0.0);
    gj_.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        gu_[i * n + j] = gu_[j * n + i] = u_->distance(gate_u_[i], gate_u_[j]);
        gj_[i * n + j] = gj_[j * n + i] = j_->distance(gate_j_[i], gate_j_[j]);
        isometry_defect_ = std::max(isometry_defect_, std::abs(gu_[i * n + j] - gj_[i * n + j]));
      }
    if (isometry_defect_ > policy().abs_tol)
      throw PreconditionError("GluedSpace: gate copies are not isometric",
                              "defect " + std::to_string(isometry_defect_));
    if (!crossing_.relax) return;
    relaxed_.resize(n * n);
    for (std::size_t i = 0; i < n * n; ++i) relaxed_[i] = std::min(gu_[i], gj_[i]);
    for (std::size_t m = 0; m < n; ++m)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          relaxed_[i * n + j] = std::min(relaxed_[i * n + j], relaxed_[i * n + m] + relaxed_[m * n + j]);
  }

  static constexpr std::size_t kMaxMatrixGates = 2048;

  SpacePtr u_;
  SpacePtr j_;
  SubsetPtr k_;
  Embedding k_to_j_;
  CrossingPolicy crossing_;
  std::vector<Point> gate_u_;
  std::vector<Point> gate_j_;
  std::vector<double> gu_;
  std::vector<double> gj_;
  std::vector<double> relaxed_;
  double isometry_defect_ = 0.0;
  mutable std::atomic<std::size_t> ambiguities_{0};
};

// Shortest path through an explicit sample net of W: nodes are x, y, the
// gates (one node per identified pair) and `nodes`; an edge joins two nodes
// sharing a piece when their piece distance is at most `radius`.
inline double net_distance(const GluedSpace& w, const Point& x, const Point& y, std::span<const Point> nodes,
                           double radius) {
  struct Node {
    bool in_u;
    bool in_j;
    Point pu;
    Point pj;
  };
  std::vector<Node> graph;
  auto add = [&](const Point& p) {
    const Piece pc = w.piece(p);
    Node n{pc == Piece::u, pc == Piece::j, {}, {}};
    (pc == Piece::u ? n.pu : n.pj) = w.inner(p);
    graph.push_back(std::move(n));
  };
  add(x);
  add(y);
  for (const auto& p : nodes) add(p);
  for (std::size_t i = 0; i < w.gate_count(); ++i) graph.push_back({true, true, w.gate(Piece::u, i), w.gate(Piece::j, i)});

  const std::size_t n = graph.size();
  std::vector<double> dist(n, kInf);
  std::vector<bool> done(n, false);
  dist[0] = 0.0;
  for (std::size_t iter = 0; iter < n; ++iter) {
    std::size_t v = n;
    for (std::size_t i = 0; i < n; ++i)
      if (!done[i] && (v == n || dist[i] < dist[v])) v = i;
    if (v == n || dist[v] == kInf) break;
    done[v] = true;
    if (v == 1) break;
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i]) continue;
      double e = kInf;
      if (graph[v].in_u && graph[i].in_u) e = std::min(e, w.piece_space(Piece::u).distance(graph[v].pu, graph[i].pu));
      if (graph[v].in_j && graph[i].in_j) e = std::min(e, w.piece_space(Piece::j).distance(graph[v].pj, graph[i].pj));
      if (e <= radius) dist[i] = std::min(dist[i], dist[v] + e);
    }
  }
  return dist[1];
}

// The configuration used to retract U onto K: W = U glued to K * {s}, and
// the unit-speed geodesic gamma from the base point to the tip s.
struct RetractionSetup {
  std::shared_ptr<const GluedSpace> space;
  SphericalCone cone;
  DrivingCurve gamma;
  Point base_k;            // base point as an intrinsic point of K
  Point base_u;            // same, in U
  bool base_replaced;      // true when p was outside K and replaced by its closest point
};

inline RetractionSetup build_retraction_setup(SubsetPtr k, const Point& p, CrossingPolicy crossing = {}) {
  const auto& u = k->ambient();
  u.check(p);
  const double tol = u.policy().abs_tol;
  for (std::size_t i = 0; i < k->gates().size(); ++i) {
    const double d = u.distance(p, k->gates()[i].u);
    if (d > 0.5 * kPi + tol)
      throw PreconditionError("build_retraction_setup: K is not within pi/2 of p",
                              "gate " + std::to_string(i) + " " + k->gates()[i].u.str() + " at distance " +
                                  std::to_string(d));
  }
  auto nearest = k->nearest(p);
  bool replaced = false;
  if (nearest.distance > 1e3 * tol) {
    if (!(u.curvature_bound() < 1.0))
      throw PreconditionError("build_retraction_setup: p must lie in K when kappa >= 1", p.str());
    replaced = true;
  }
  SphericalCone cone = spherical_cone(k->intrinsic_ptr(), u.policy());
  Embedding to_slice = [cone](const Point& kp) { return cone.slice(kp); };
  auto w = std::make_shared<const GluedSpace>(k->ambient_ptr(), cone.space(), k, to_slice, crossing, u.policy());
  const Point base = nearest.k;
  DrivingCurve gamma{0.0, 0.5 * kPi,
                     [w, cone, base](double t) {
                       return w->from_j(cone.at(base, std::clamp(0.5 * kPi - t, 0.0, 0.5 * kPi)));
                     },
                     1.0};
  return {w, cone, std::move(gamma), nearest.k, replaced ? nearest.u : p, replaced};
}

}  // namespace tractrix
