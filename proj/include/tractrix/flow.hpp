#pragma once

#include "tractrix/gradient_flow.hpp"
#include "tractrix/parallel.hpp"

namespace tractrix {

struct TractrixConfig {
  double r = 0.5 * kPi;  // thread length
  double delta = 1e-3;   // partition step

  void validate() const {
    if (!(r > 0.0 && r < kPi)) throw UsageError("tractrix: thread length must lie in (0, pi)");
    if (!(delta > 0.0)) throw UsageError("tractrix: step must be positive");
  }
};

namespace detail {

inline void require_in_start_ball(const MetricSpace& space, const DrivingCurve& gamma, double r, const Point& p) {
  const Point c = gamma(gamma.a);
  const double d = space.distance(p, c);
  if (d > r + space.policy().abs_tol)
    throw PreconditionError("tractrix_flow: start point outside the initial ball",
                            p.str() + " at distance " + format_double(d) + " > r = " + format_double(r));
}

inline std::vector<double> flow_partition(const DrivingCurve& gamma, double delta, double t_end) {
  if (t_end < gamma.a || t_end > gamma.b) throw UsageError("tractrix_flow: end time outside the curve's interval");
  return uniform_partition(gamma.a, t_end, delta);
}

}  // namespace detail

// p_i = closest point of B(gamma(t_i), r) to p_{i-1} over the uniform
// partition of [a, t_end] with step <= delta.
inline Trajectory tractrix_flow(SpacePtr space, const DrivingCurve& gamma, const TractrixConfig& cfg, const Point& p,
                                std::optional<double> t_end = std::nullopt) {
  cfg.validate();
  space->check(p);
  detail::require_in_start_ball(*space, gamma, cfg.r, p);
  const auto t = detail::flow_partition(gamma, cfg.delta, t_end.value_or(gamma.b));
  Trajectory traj;
  traj.space = space;
  traj.step = t.size() > 1 ? t[1] - t[0] : 0.0;
  traj.times.reserve(t.size());
  traj.points.reserve(t.size());
  Point x = space->project_to_ball(gamma(t[0]), cfg.r, p);
  traj.push(t[0], x);
  for (std::size_t i = 1; i < t.size(); ++i) {
    try {
      x = space->project_to_ball(gamma(t[i]), cfg.r, x);
    } catch (const NonUniqueGeodesicError& e) {
      traj.truncated = true;
      traj.diagnostic = e.what();
      return traj;
    }
    traj.push(t[i], x);
  }
  return traj;
}

// Terminal points of the flow for many starts, sharing each step's ball
// (the glued backend amortizes its gate costs across the batch).
inline std::vector<Point> tractrix_flow_batch(SpacePtr space, const DrivingCurve& gamma, const TractrixConfig& cfg,
                                              std::vector<Point> ps, std::optional<double> t_end = std::nullopt) {
  cfg.validate();
  for (const auto& p : ps) {
    space->check(p);
    detail::require_in_start_ball(*space, gamma, cfg.r, p);
  }
  const auto t = detail::flow_partition(gamma, cfg.delta, t_end.value_or(gamma.b));
  for (double ti : t) {
    const Point c = gamma(ti);
    parallel_for_chunks(ps.size(), [&](std::size_t lo, std::size_t hi) {
      space->project_to_ball_batch(c, cfg.r, std::span<Point>(ps.data() + lo, hi - lo));
    });
  }
  return ps;
}

// The same flow realized as a gradient curve of f_t = -max{r, dist_gamma(t)}.
inline Trajectory tractrix_flow_gradient(SpacePtr space, const DrivingCurve& gamma, const TractrixConfig& cfg,
                                         const Point& p, double lambda = 0.0) {
  cfg.validate();
  if (!space->has_exp_log())
    throw CapabilityError("tractrix_flow_gradient: " + space->name() + " has no exp/log maps");
  detail::require_in_start_ball(*space, gamma, cfg.r, p);
  return evolve(space, tractrix_family(space, gamma, cfg.r, lambda), p, gamma.a, gamma.b, cfg.delta);
}

// phi_t: B(gamma(a), r) -> B(gamma(t), r).
class FlowMap {
 public:
  FlowMap(SpacePtr space, DrivingCurve gamma, TractrixConfig cfg, double t)
      : space_(std::move(space)), gamma_(std::move(gamma)), cfg_(cfg), t_(t) {
    cfg_.validate();
    if (t < gamma_.a || t > gamma_.b) throw UsageError("flow_map: time outside the curve's interval");
  }

  Point operator()(const Point& p) const {
    if (t_ == gamma_.a) {
      detail::require_in_start_ball(*space_, gamma_, cfg_.r, p);
      return p;
    }
    return tractrix_flow(space_, gamma_, cfg_, p, t_).back();
  }

  std::vector<Point> apply(std::vector<Point> ps) const {
    if (t_ == gamma_.a) {
      for (const auto& p : ps) detail::require_in_start_ball(*space_, gamma_, cfg_.r, p);
      return ps;
    }
    return tractrix_flow_batch(space_, gamma_, cfg_, std::move(ps), t_);
  }

  Trajectory trajectory(const Point& p) const { return tractrix_flow(space_, gamma_, cfg_, p, t_); }

  const SpacePtr& space() const noexcept { return space_; }
  const DrivingCurve& gamma() const noexcept { return gamma_; }
  const TractrixConfig& config() const noexcept { return cfg_; }
  double time() const noexcept { return t_; }

 private:
  SpacePtr space_;
  DrivingCurve gamma_;
  TractrixConfig cfg_;
  double t_;
};

inline FlowMap flow_map(SpacePtr space, DrivingCurve gamma, TractrixConfig cfg, double t) {
  return FlowMap(std::move(space), std::move(gamma), cfg, t);
}

}  // namespace tractrix
