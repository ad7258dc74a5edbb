#pragma once

#include "tractrix/curve.hpp"
#include "tractrix/trajectory.hpp"

#include <functional>

namespace tractrix {

// t -> f_t with each f_t lambda-concave in the signed convention
//   f(geo(s)) >= (1-s) f(x) + s f(y) - (lambda/2) s (1-s) d(x,y)^2,
// so lambda < 0 is strictly concave (f = -|x|^2/2 has lambda = -1).
struct TimeDependentFamily {
  std::function<double(double, const Point&)> evaluate;
  std::function<TangentVector(double, const Point&)> gradient;  // may be empty
  std::function<bool(double, const Point&)> in_domain;          // empty: whole space
  double lambda = 0.0;
  double lipschitz = 1.0;
  std::string label;
};

inline TangentVector gradient(const TimeDependentFamily& f, double t, const Point& p) {
  if (!f.gradient) throw CapabilityError("gradient: family '" + f.label + "' has no gradient oracle");
  return f.gradient(t, p);
}

// f_t = -max{r, dist_gamma(t)}. The gradient is zero on the closed ball,
// including the kink d = r, and the unit vector toward gamma(t) outside.
inline TimeDependentFamily tractrix_family(SpacePtr space, DrivingCurve gamma, double r, double lambda) {
  TimeDependentFamily f;
  f.label = "tractrix";
  f.lambda = lambda;
  f.lipschitz = 1.0;
  f.evaluate = [space, gamma, r](double t, const Point& x) { return -std::max(r, space->distance(x, gamma(t))); };
  f.gradient = [space, gamma, r](double t, const Point& x) {
    const Point c = gamma(t);
    if (space->distance(x, c) <= r) return TangentVector::zero(x, x.size());
    const TangentVector v = space->log_map(x, c);
    return TangentVector{x, v.direction, 1.0};
  };
  return f;
}

// f = -|x - c|^2 / 2 + shift on a Euclidean space; lambda = -1.
inline TimeDependentFamily quadratic_family(SpacePtr space, Vector center, double shift = 0.0) {
  TimeDependentFamily f;
  f.label = "quadratic";
  f.lambda = -1.0;
  f.lipschitz = kInf;
  f.evaluate = [center, shift](double, const Point& x) { return -0.5 * (x.coords() - center).squaredNorm() + shift; };
  f.gradient = [space, center](double, const Point& x) {
    return TangentVector::from_vector(x, Vector(center - x.coords()));
  };
  return f;
}

// Restricts a family to the ball B(center, radius) for escape detection.
inline TimeDependentFamily restricted_to_ball(TimeDependentFamily f, SpacePtr space, Point center, double radius) {
  f.in_domain = [space, center, radius](double, const Point& x) { return space->distance(center, x) <= radius; };
  return f;
}

// Frozen-time explicit scheme: p_{i+1} = exp(p_i, (t_{i+1} - t_i) grad f_{t_i}(p_i)).
inline Trajectory evolve(SpacePtr space, const TimeDependentFamily& f, const Point& p0, double a, double b,
                         double delta) {
  space->check(p0);
  if (!space->has_exp_log()) throw CapabilityError("evolve: " + space->name() + " has no exp/log maps");
  Trajectory traj;
  traj.space = space;
  const auto t = uniform_partition(a, b, delta);
  traj.step = t.size() > 1 ? t[1] - t[0] : 0.0;
  traj.times.reserve(t.size());
  traj.points.reserve(t.size());
  Point p = p0;
  traj.push(t[0], p);
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    if (f.in_domain && !f.in_domain(t[i], p)) {
      traj.escape_time = t[i];
      traj.diagnostic = "left the domain at t = " + format_double(t[i]);
      return traj;
    }
    try {
      p = space->exp_map(p, gradient(f, t[i], p).scaled(t[i + 1] - t[i]));
    } catch (const NonUniqueGeodesicError& e) {
      traj.truncated = true;
      traj.diagnostic = e.what();
      return traj;
    }
    traj.push(t[i + 1], p);
  }
  return traj;
}

struct EviReport {
  double worst_slack = kInf;  // min over (step, witness) of the normalized slack
  std::size_t worst_step = 0;
  std::size_t worst_witness = 0;
  std::size_t checked = 0;
  std::size_t skipped = 0;
  double tol = 0.0;
  bool pass = true;
};

// Discrete evolution variational inequality: for each step of length eps
// and witness w with d0 = d(w, alpha_i) > 0, d1 = d(w, alpha_{i+1}),
//   slack = (d0 - d1)/eps - [(f(w) - f(alpha_i))/d0 - (lambda/2) d0]
// must be >= -tol. Pairs with d0 below `min_distance` (at least the
// space's resolution) are skipped: the scheme's per-step error in this
// form grows like eps / d0, so witnesses within eps / tol of the curve
// cannot be resolved at tolerance tol.
inline EviReport check_evi(const Trajectory& traj, const TimeDependentFamily& f, std::span<const Point> witnesses,
                           double tol, double min_distance = 0.0) {
  EviReport rep;
  rep.tol = tol;
  const auto& s = *traj.space;
  const double res = std::max(s.policy().resolution, min_distance);
  for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
    const double eps = traj.times[i + 1] - traj.times[i];
    const double fa = f.evaluate(traj.times[i], traj.points[i]);
    for (std::size_t w = 0; w < witnesses.size(); ++w) {
      const double d0 = s.distance(witnesses[w], traj.points[i]);
      if (d0 < res) {
        ++rep.skipped;
        continue;
      }
      const double d1 = s.distance(witnesses[w], traj.points[i + 1]);
      const double bracket = (f.evaluate(traj.times[i], witnesses[w]) - fa) / d0 - 0.5 * f.lambda * d0;
      const double slack = (d0 - d1) / eps - bracket;
      ++rep.checked;
      if (slack < rep.worst_slack) {
        rep.worst_slack = slack;
        rep.worst_step = i;
        rep.worst_witness = w;
      }
    }
  }
  rep.pass = rep.worst_slack >= -tol;
  return rep;
}

struct DistanceBound {
  double value;
  bool extension;  // lambda = 0 with s > 0, outside the stated estimate
};

// Bound on l(a + dt) = d(alpha, beta) for gradient curves of families that
// are lambda-concave and differ by at most s:
//   s = 0:  l(a) e^{lambda dt}
//   s > 0:  sqrt(max(0, (l(a)^2 + 2s/lambda) e^{2 lambda dt} - 2s/lambda))
//   lambda = 0, s > 0:  sqrt(l(a)^2 + 4 s dt), from integrating l' <= 2s/l.
inline DistanceBound distance_estimate_bound(double lambda, double s, double ell_a, double dt) {
  if (s < 0.0 || ell_a < 0.0 || dt < 0.0) throw UsageError("distance_estimate_bound: negative argument");
  if (s == 0.0) return {ell_a * std::exp(lambda * dt), false};
  if (lambda == 0.0) return {std::sqrt(ell_a * ell_a + 4.0 * s * dt), true};
  const double c = 2.0 * s / lambda;
  return {std::sqrt(std::max(0.0, (ell_a * ell_a + c) * std::exp(2.0 * lambda * dt) - c)), false};
}

struct DistanceEstimateReport {
  double worst_excess = -kInf;  // max_i l(t_i) - bound(t_i)
  std::size_t worst_index = 0;
  double allowed = 0.0;
  bool extension = false;
  bool pass = true;
  std::vector<double> ell;
  std::vector<double> bound;
};

// Checks l(t_i) <= bound(t_i) + allowed along a's partition; b is
// resampled by geodesic interpolation when the partitions differ.
inline DistanceEstimateReport verify_distance_estimate(const Trajectory& a, const Trajectory& b, double lambda,
                                                       double s, double allowed) {
  if (a.empty() || b.empty()) throw UsageError("verify_distance_estimate: empty trajectory");
  DistanceEstimateReport rep;
  rep.allowed = allowed;
  const bool same = a.times == b.times;
  const auto& sp = *a.space;
  const double ell0 = sp.distance(a.points[0], same ? b.points[0] : b.at(a.times[0]));
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ell = sp.distance(a.points[i], same ? b.points[i] : b.at(a.times[i]));
    const auto bd = distance_estimate_bound(lambda, s, ell0, a.times[i] - a.times[0]);
    rep.extension = rep.extension || bd.extension;
    rep.ell.push_back(ell);
    rep.bound.push_back(bd.value);
    if (ell - bd.value > rep.worst_excess) {
      rep.worst_excess = ell - bd.value;
      rep.worst_index = i;
    }
  }
  rep.pass = rep.worst_excess <= allowed;
  return rep;
}

}  // namespace tractrix
