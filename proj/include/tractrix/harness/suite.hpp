#pragma once

#include "tractrix/all.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>

namespace tractrix::harness {

inline constexpr const char* kToolVersion = "1.0.0";

struct SuiteOptions {
  std::uint64_t seed = 20240601;
  double tolerance_scale = 1.0;  // multiplies every additive tolerance
  double samples_scale = 1.0;    // multiplies Monte-Carlo sample counts
  std::optional<std::filesystem::path> out;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double value = 0.0;
  std::string comparison;  // how value is judged against threshold
  double threshold = 0.0;
  std::string detail;
  double seconds = 0.0;
  double budget = 0.0;  // wall-clock limit in seconds
};

namespace suite {

using Clock = std::chrono::steady_clock;

inline double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

inline std::size_t scaled(const SuiteOptions& o, std::size_t n) {
  return std::max<std::size_t>(10, static_cast<std::size_t>(std::llround(static_cast<double>(n) * o.samples_scale)));
}

inline Rng rng_for(const SuiteOptions& o, int id) { return Rng(o.seed + 7919ULL * static_cast<std::uint64_t>(id)); }

inline void write(const SuiteOptions& o, const std::string& name, const std::function<void(std::ostream&)>& body) {
  if (!o.out) return;
  std::filesystem::create_directories(*o.out);
  std::ofstream f(*o.out / name, std::ios::binary);
  body(f);
}

// value <= threshold (or >= for "at least") and within the time budget.
inline CriterionResult finish(CriterionResult r, bool value_ok, Clock::time_point t0) {
  r.seconds = since(t0);
  r.pass = value_ok && r.seconds <= r.budget;
  return r;
}

inline std::string kv(const std::string& k, double v) { return k + "=" + format_double(v); }

inline std::shared_ptr<const SphereSpace> unit_s2() { return std::make_shared<const SphereSpace>(2); }

inline Point north(const SphereSpace& s) {
  Vector v(3);
  v << 0, 0, s.radius();
  return s.make_point(v);
}

// Unit-speed meridian from the north pole toward (R, 0, 0).
inline DrivingCurve meridian(std::shared_ptr<const SphereSpace> s, double length) {
  const double R = s->radius();
  return {0.0, length,
          [s, R](double t) {
            Vector v(3);
            v << R * std::sin(t / R), 0.0, R * std::cos(t / R);
            return s->normalized(v);
          },
          1.0};
}

inline Vector x_axis() {
  Vector d(3);
  d << 1, 0, 0;
  return d;
}

}  // namespace suite

inline CriterionResult criterion_line_oracle(const SuiteOptions& o) {
  const auto t0 = suite::Clock::now();
  CriterionResult r{1, "1-D tractrix oracle", false, 0, "<=", 2e-3 * o.tolerance_scale, "", 0, 1.0};
  auto line = std::make_shared<const EuclideanSpace>(1);
  DrivingCurve gamma{0.0, 5.0, [line](double t) { return line->make_point(Vector::Constant(1, t)); }, 1.0};
  const auto traj = tractrix_flow(line, gamma, {1.0, 1e-3}, line->make_point(Vector::Zero(1)));
  r.value = std::abs(traj.back()[0] - 4.0);
  r.detail = suite::kv("terminal", traj.back()[0]);
  suite::write(o, "c1_trajectory.csv", [&](std::ostream& f) { traj.write_csv(f); });
  return suite::finish(r, r.value <= r.threshold, t0);
}

inline CriterionResult criterion_partition_convergence(const SuiteOptions& o) {
  const auto t0 = suite::Clock::now();
  CriterionResult r{2, "partition refinement order on S2", false, 0, ">=", 0.5, "", 0, 30.0};
  auto s2 = suite::unit_s2();
  const auto gamma = suite::meridian(s2, 0.5 * kPi);
  auto rng = suite::rng_for(o, 2);
  std::vector<Point> probes;
  for (int i = 0; i < 16; ++i) probes.push_back(sample_cap(*s2, gamma(0.0), 0.5 * kPi, rng));
  const std::vector<double> deltas{1e-2, 5e-3, 2.5e-3, 1.25e-3, 6.25e-4};
  std::vector<std::vector<Trajectory>> runs(deltas.size());
  for (std::size_t k = 0; k < deltas.size(); ++k)
    for (const auto& p : probes) runs[k].push_back(tractrix_flow(s2, gamma, {0.5 * kPi, deltas[k]}, p));
  std::vector<double> fit_delta, dev;
  for (std::size_t k = 0; k + 1 < deltas.size(); ++k) {
    double worst = 0.0;
    for (std::size_t i = 0; i < probes.size(); ++i) worst = std::max(worst, sup_deviation(runs[k][i], runs[k + 1][i]));
    fit_delta.push_back(deltas[k]);
    dev.push_back(worst);
  }
  r.value = fit_order(fit_delta, dev);
  r.detail = suite::kv("dev_coarsest", dev.front()) + " " + suite::kv("dev_finest", dev.back());
  suite::write(o, "c2_convergence.csv", [&](std::ostream& f) {
    f << "delta,sup_deviation\n";
    for (std::size_t k = 0; k < dev.size(); ++k) f << format_double(fit_delta[k]) << ',' << format_double(dev[k]) << '\n';
  });
  return suite::finish(r, r.value >= r.threshold, t0);
}

inline CriterionResult criterion_hemisphere_shortness(const SuiteOptions& o) {
  const auto t0 = suite::Clock::now();
  CriterionResult r{3, "flow shortness on the hemisphere", false, 0, "<=", 1.0 + 5e-3 * o.tolerance_scale, "", 0, 60.0};
  auto s2 = suite::unit_s2();
  const auto gamma = suite::meridian(s2, 0.5 * kPi);
  const TractrixConfig cfg{0.5 * kPi, 1e-3};
  auto rng = suite::rng_for(o, 3);
  const std::size_t n = suite::scaled(o, 1000);
  const auto pairs = sample_cap_pairs(*s2, gamma(0.0), 0.5 * kPi, n, n / 2, 1e-2, rng);
  double containment = 0.0;
  const BatchMap phi = [&](const std::vector<Point>& xs) {
    auto out = tractrix_flow_batch(s2, gamma, cfg, xs);
    for (const auto& y : out) containment = std::max(containment, s2->distance(y, gamma(gamma.b)) - cfg.r);
    return out;
  };
  const auto rep = estimate_lipschitz(*s2, phi, pairs);
  r.value = rep.max_ratio;
  r.detail = suite::kv("ball_excess", containment) + " " + suite::kv("pairs", static_cast<double>(rep.rows.size()));
  suite::write(o, "c3_lipschitz.csv", [&](std::ostream& f) { rep.write_csv(f); });
  return suite::finish(r, r.value <= r.threshold && containment <= 1e-9, t0);
}

inline CriterionResult criterion_strict_contraction(const SuiteOptions& o) {
  const auto t0 = suite::Clock::now();
  CriterionResult r{4, "strict contraction trend for kappa < 1", false, 0, ">", 0.0, "", 0, 60.0};
  auto s = std::make_shared<const SphereSpace>(2, 1.2);
  const auto gamma = suite::meridian(s, 1.2 * 0.5 * kPi);
  const TractrixConfig cfg{0.5 * kPi, 1e-3};
  auto rng = suite::rng_for(o, 4);
  const std::size_t n = suite::scaled(o, 1000);
  const auto pairs = sample_cap_pairs(*s, gamma(0.0), cfg.r, n, 0, 1e-3, rng);
  const BatchMap phi = [&](const std::vector<Point>& xs) { return tractrix_flow_batch(s, gamma, cfg, xs); };
  const auto rep = estimate_lipschitz(*s, phi, pairs, {8, 1000, o.seed});
  const bool monotone = rep.bins_nonincreasing(0.0);
  r.value = rep.ci_low;
  r.detail = suite::kv("epsilon", rep.fitted_epsilon) + " " + suite::kv("ci_high", rep.ci_high) + " " +
             suite::kv("max_ratio", rep.max_ratio) + " bins_nonincreasing=" + (monotone ? "true" : "false");
  suite::write(o, "c4_lipschitz.csv", [&](std::ostream& f) { rep.write_csv(f); });
  suite::write(o, "c4_summary.json", [&](std::ostream& f) { f << rep.summary().dump(2) << '\n'; });
  return suite::finish(r, monotone && r.value > r.threshold, t0);
}

inline CriterionResult criterion_distance_estimate(const SuiteOptions& o) {
  const auto t0 = suite::Clock::now();
  CriterionResult r{5, "distance estimate", false, 0, "<=", 1e-4 * o.tolerance_scale, "", 0, 30.0};
  auto r3 = std::make_shared<const EuclideanSpace>(3);
  Vector a(3), b(3), c(3);
  a << 1.0, 0.5, -0.3;
  b << -0.4, 0.2, 0.7;
  c << 0.04, 0.0, 0.0;

  // (i) exact exponential decay for f = -|x|^2/2.
  const auto f = quadratic_family(r3, Vector::Zero(3));
  const double fine = 1e-4;
  const auto ta = evolve(r3, f, r3->make_point(a), 0.0, 1.0, fine);
  const auto tb = evolve(r3, f, r3->make_point(b), 0.0, 1.0, fine);
  const double ell0 = r3->distance(ta.points[0], tb.points[0]);
  double worst = 0.0;
  for (std::size_t i = 0; i < ta.size(); ++i) {
    const double ell = r3->distance(ta.points[i], tb.points[i]);
    worst = std::max(worst, std::abs(ell - distance_estimate_bound(-1.0, 0.0, ell0, ta.times[i]).value));
  }
  r.value = worst;

  // (ii) f against h = -|x - c|^2/2 on the ball of radius 2, where
  // |f - h| <= 2|c| + |c|^2/2 <= s.
  const double s = 0.1, coarse = 1e-3;
  const Point origin = r3->make_point(Vector::Zero(3));
  const auto fb = restricted_to_ball(f, r3, origin, 2.0);
  const auto hb = restricted_to_ball(quadratic_family(r3, c), r3, origin, 2.0);
  const auto xa = evolve(r3, fb, r3->make_point(a), 0.0, 2.0, coarse);
  const auto xb = evolve(r3, hb, r3->make_point(b), 0.0, 2.0, coarse);
  const auto est = verify_distance_estimate(xa, xb, -1.0, s, 1.0 * coarse * o.tolerance_scale);
  const bool escaped = xa.escape_time.has_value() || xb.escape_time.has_value();
  r.detail = suite::kv("shifted_worst_excess", est.worst_excess) + " " + suite::kv("shifted_allowed", est.allowed);
  suite::write(o, "c5_estimate.csv", [&](std::ostream& out) {
    out << "t,ell,bound\n";
    for (std::size_t i = 0; i < xa.size(); ++i)
      out << format_double(xa.times[i]) << ',' << format_double(est.ell[i]) << ',' << format_double(est.bound[i])
          << '\n';
  });
  return suite::finish(r, r.value <= r.threshold && est.pass && !escaped, t0);
}

inline CriterionResult criterion_evi_control(const SuiteOptions& o) {
  const auto t0 = suite::Clock::now();
  const double delta = 1e-3;
  CriterionResult r{6, "EVI negative control", false, 0, ">=", -10.0 * delta * o.tolerance_scale, "", 0, 10.0};
  auto line = std::make_shared<const EuclideanSpace>(1);
  DrivingCurve gamma{0.0, 5.0, [line](double t) { return line->make_point(Vector::Constant(1, t)); }, 1.0};
  const auto fam = tractrix_family(line, gamma, 1.0, 0.0);
  const auto clean = evolve(line, fam, line->make_point(Vector::Zero(1)), 0.0, 5.0, delta);
  std::vector<Point> witnesses;
  for (double w : {-1.0, 2.0, 5.0}) witnesses.push_back(line->make_point(Vector::Constant(1, w)));
  const double tol = -r.threshold;
  const auto good = check_evi(clean, fam, witnesses, tol);
  auto corrupted = clean;
  const std::size_t mid = corrupted.size() / 2;
  corrupted.points[mid] = line->make_point(corrupted.points[mid].coords() + Vector::Constant(1, 10.0 * delta));
  const auto bad = check_evi(corrupted, fam, witnesses, tol);
  r.value = good.worst_slack;
  r.detail = suite::kv("corrupted_slack", bad.worst_slack) + " corrupted_flagged=" + (bad.pass ? "false" : "true");
  return suite::finish(r, good.pass && !bad.pass, t0);
}

inline CriterionResult criterion_phi_pipeline(const SuiteOptions& o) {
  const auto t0 = suite::Clock::now();
  CriterionResult r{7, "short retraction onto a quarter-meridian", false, 0, "<=", 1.0 + 1e-2 * o.tolerance_scale, "", 0,
                    120.0};
  auto s2 = suite::unit_s2();
  const Point p = suite::north(*s2);
  const double delta = 1e-3, mesh = kPi / 200;
  auto k = arc_subset(s2, p, suite::x_axis(), -0.25 * kPi, 0.25 * kPi, mesh);
  const PhiRetraction phi(k, p, delta);
  auto rng = suite::rng_for(o, 7);

  std::vector<Point> targets;
  for (const auto& g : k->gates()) targets.push_back(g.u);
  for (int i = 0; i < 50; ++i) targets.push_back(k->embed(k->at(Vector::Constant(1, rng.uniform(-0.25, 0.25) * kPi))));
  const auto fixed = phi.apply(targets);
  double fix_err = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) fix_err = std::max(fix_err, s2->distance(fixed[i], targets[i]));
  const double fix_tol = phi.fixed_point_tolerance() * o.tolerance_scale;

  const std::size_t n = suite::scaled(o, 1000);
  const auto pairs = sample_cap_pairs(*s2, p, 0.5 * kPi, n, n / 2, 1e-2, rng);
  double slice = 0.0;
  const BatchMap map = [&](const std::vector<Point>& xs) {
    std::vector<Point> out;
    for (auto& d : phi.apply_detailed(xs)) {
      slice = std::max(slice, d.slice_defect);
      out.push_back(std::move(d.u));
    }
    return out;
  };
  const auto rep = estimate_lipschitz(*s2, map, pairs);
  r.value = rep.max_ratio;
  r.detail = suite::kv("retraction_error", fix_err) + " " + suite::kv("retraction_tol", fix_tol) + " " +
             suite::kv("slice_defect", slice) + " ambiguous_ties=" + std::to_string(phi.glued().ambiguity_count());
  suite::write(o, "c7_lipschitz.csv", [&](std::ostream& f) { rep.write_csv(f); });
  return suite::finish(r, r.value <= r.threshold && fix_err <= fix_tol, t0);
}

inline CriterionResult criterion_psi_pipeline(const SuiteOptions& o) {
  const auto t0 = suite::Clock::now();
  CriterionResult r{8, "short retraction onto the diagonal", false, 0, "<=", 1.0 + 1e-2 * o.tolerance_scale, "", 0,
                    120.0};
  auto s2 = suite::unit_s2();
  const Point p = suite::north(*s2);
  const PsiRetraction psi(s2, p, 1e-2, kPi / 24);
  const auto& prod = psi.domain();
  auto rng = suite::rng_for(o, 8);

  std::vector<Point> diag;
  for (int i = 0; i < 100; ++i) {
    const Point x = sample_cap(*s2, p, 0.5 * kPi, rng);
    diag.push_back(prod.pair(x, x));
  }
  double fix_err = 0.0;
  const auto fixed = psi.apply(diag);
  for (std::size_t i = 0; i < diag.size(); ++i) fix_err = std::max(fix_err, prod.distance(fixed[i], diag[i]));
  const double fix_tol = 1e-9 * o.tolerance_scale;

  const std::size_t n = suite::scaled(o, 1000);
  SamplePairs pairs;
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = sample_cap(*s2, p, 0.5 * kPi, rng);
    const Point b = sample_cap(*s2, p, 0.5 * kPi, rng);
    const bool close = i >= n / 2;
    const Point c = close ? sample_near(*s2, a, 1e-2, p, 0.5 * kPi, rng) : sample_cap(*s2, p, 0.5 * kPi, rng);
    const Point d = close ? sample_near(*s2, b, 1e-2, p, 0.5 * kPi, rng) : sample_cap(*s2, p, 0.5 * kPi, rng);
    pairs.x.push_back(prod.pair(a, b));
    pairs.y.push_back(prod.pair(c, d));
  }
  double snap = 0.0;
  const BatchMap map = [&](const std::vector<Point>& xs) {
    std::vector<Point> out;
    for (auto& d : psi.apply_detailed(xs)) {
      snap = std::max(snap, d.snap_distance);
      out.push_back(std::move(d.pair));
    }
    return out;
  };
  const auto rep = estimate_lipschitz(prod, map, pairs);
  r.value = rep.max_ratio;
  r.detail = suite::kv("diagonal_error", fix_err) + " " + suite::kv("diagonal_tol", fix_tol) + " " +
             suite::kv("max_snap", snap);
  suite::write(o, "c8_lipschitz.csv", [&](std::ostream& f) { rep.write_csv(f); });
  return suite::finish(r, r.value <= r.threshold && fix_err <= fix_tol, t0);
}

inline CriterionResult criterion_cone_pipeline(const SuiteOptions& o) {
  const auto t0 = suite::Clock::now();
  CriterionResult r{9, "cone retraction onto an arc", false, 0, "<=", 1.0 + 1e-6 * o.tolerance_scale, "", 0, 30.0};
  auto s2 = suite::unit_s2();
  const Point p = suite::north(*s2);
  const ConeRetraction cone(s2, p, arc_sector(p, suite::x_axis(), 0.5 * kPi));
  auto k = arc_subset(s2, p, suite::x_axis(), -0.25 * kPi, 0.25 * kPi, kPi / 2000);
  double fix_err = 0.0;
  for (const auto& g : k->gates()) fix_err = std::max(fix_err, s2->distance(cone(g.u), g.u));
  const double fix_tol = 1e-9 * o.tolerance_scale;

  auto rng = suite::rng_for(o, 9);
  const std::size_t n = suite::scaled(o, 10000);
  const auto pairs = sample_cap_pairs(*s2, p, kPi, n, n / 2, 1e-3, rng);
  const auto rep = estimate_lipschitz(*s2, batched([&](const Point& x) { return cone(x); }), pairs);
  r.value = rep.max_ratio;
  r.detail = suite::kv("retraction_error", fix_err) + " " + suite::kv("retraction_tol", fix_tol);
  suite::write(o, "c9_lipschitz.csv", [&](std::ostream& f) { rep.write_csv(f); });
  return suite::finish(r, r.value <= r.threshold && fix_err <= fix_tol, t0);
}

namespace suite {

// Probe description independent of a particular gate sampling: U points
// and J points given by (K parameter, cone parameter).
struct GluedProbe {
  bool in_j;
  Vector u;
  double k_param;
  double t;
};

inline Point realize(const RetractionSetup& w, const GluedProbe& g) {
  if (!g.in_j) return w.space->from_u(w.space->piece_space(Piece::u).make_point(g.u));
  const auto& k = w.space->subset();
  return w.space->from_j(w.cone.at(k.chart().to_k(k.chart().clamp(Vector::Constant(1, g.k_param))), g.t));
}

}  // namespace suite

inline CriterionResult criterion_glued_engine(const SuiteOptions& o) {
  const auto t0 = suite::Clock::now();
  CriterionResult r{10, "glued-space gate convergence and crossing stability", false, 0, "<=", 2.0 * o.tolerance_scale,
                    "", 0, 60.0};
  auto s2 = suite::unit_s2();
  const Point p = suite::north(*s2);
  auto rng = suite::rng_for(o, 10);
  std::vector<suite::GluedProbe> probes;
  for (int i = 0; i < 24; ++i) {
    const bool j = i % 3 == 2;
    probes.push_back({j, sample_cap(*s2, p, 0.5 * kPi, rng).coords(), rng.uniform(-0.25, 0.25) * kPi,
                      rng.uniform(0.0, 0.5 * kPi)});
  }

  // (a) pure-gate distances under mesh halving.
  const std::vector<double> meshes{kPi / 50, kPi / 100, kPi / 200, kPi / 400};
  std::vector<std::vector<double>> dist(meshes.size());
  for (std::size_t m = 0; m < meshes.size(); ++m) {
    const auto w = build_retraction_setup(arc_subset(s2, p, suite::x_axis(), -0.25 * kPi, 0.25 * kPi, meshes[m]), p,
                                        {1, false, false});
    for (std::size_t i = 0; i < probes.size(); ++i)
      dist[m].push_back(w.space->distance(suite::realize(w, probes[i]), suite::realize(w, probes[(i + 1) % probes.size()])));
  }
  double c = 0.0;
  for (std::size_t m = 0; m + 1 < meshes.size(); ++m)
    for (std::size_t i = 0; i < probes.size(); ++i) c = std::max(c, std::abs(dist[m][i] - dist[m + 1][i]) / meshes[m]);
  r.value = c;

  // (b) relaxed multi-crossing distances against single crossing, on the
  // quarter-meridian configuration and on the diagonal cap in S^5.
  double worst_gap = 0.0;  // (single - relaxed) / eps_K
  {
    auto k = arc_subset(s2, p, suite::x_axis(), -0.25 * kPi, 0.25 * kPi, kPi / 200);
    const auto w = build_retraction_setup(k, p, {1, true, true});
    for (std::size_t i = 0; i < probes.size(); ++i) {
      const Point x = suite::realize(w, probes[i]);
      const Point y = suite::realize(w, probes[(i + 5) % probes.size()]);
      const double gap = w.space->single_crossing_distance(x, y) - w.space->distance(x, y);
      worst_gap = std::max(worst_gap, gap / k->mesh());
    }
  }
  {
    const PsiRetraction psi(s2, p, 1e-2, kPi / 24, {1, true, true});
    const auto& w = psi.phi().glued();
    const auto& setup = psi.phi().setup();
    for (int i = 0; i < 12; ++i) {
      const Point a = sample_cap(*s2, p, 0.5 * kPi, rng), b = sample_cap(*s2, p, 0.5 * kPi, rng);
      const Point x = w.from_u(psi.embed(psi.domain().pair(a, b)));
      const Point kz(w.subset().intrinsic().id(), sample_cap(*s2, p, 0.5 * kPi, rng).coords());
      const Point y = w.from_j(setup.cone.at(kz, rng.uniform(0.0, 0.5 * kPi)));
      const double gap = w.single_crossing_distance(x, y) - w.distance(x, y);
      worst_gap = std::max(worst_gap, gap / w.mesh());
    }
  }
  r.detail = suite::kv("relaxation_gap_over_mesh", worst_gap) + " " + suite::kv("relaxation_limit", 10.0 * o.tolerance_scale);
  suite::write(o, "c10_mesh.csv", [&](std::ostream& f) {
    f << "mesh,probe,distance\n";
    for (std::size_t m = 0; m < meshes.size(); ++m)
      for (std::size_t i = 0; i < probes.size(); ++i)
        f << format_double(meshes[m]) << ',' << i << ',' << format_double(dist[m][i]) << '\n';
  });
  return suite::finish(r, r.value <= r.threshold && worst_gap <= 10.0 * o.tolerance_scale, t0);
}

using Criterion = std::function<CriterionResult(const SuiteOptions&)>;

inline const std::vector<Criterion>& property_criteria() {
  static const std::vector<Criterion> all{criterion_line_oracle,         criterion_partition_convergence,
                                          criterion_hemisphere_shortness, criterion_strict_contraction,
                                          criterion_distance_estimate,   criterion_evi_control,
                                          criterion_phi_pipeline,        criterion_psi_pipeline,
                                          criterion_cone_pipeline,       criterion_glued_engine};
  return all;
}

inline nlohmann::ordered_json make_manifest(const std::vector<CriterionResult>& results, const SuiteOptions& o,
                                            const std::string& config_hash) {
  nlohmann::ordered_json m;
  m["tool"] = "tractrix";
  m["version"] = kToolVersion;
  m["config_hash"] = config_hash;
  m["seed"] = o.seed;
  m["rng"] = Rng::algorithm;
  m["tolerance_scale"] = o.tolerance_scale;
  m["samples_scale"] = o.samples_scale;
  bool all = true;
  auto& checks = m["checks"] = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    all = all && r.pass;
    checks.push_back({{"id", r.id},
                      {"name", r.name},
                      {"pass", r.pass},
                      {"value", r.value},
                      {"comparison", r.comparison},
                      {"threshold", r.threshold},
                      {"detail", r.detail},
                      {"time_budget_s", r.budget}});
  }
  m["all_pass"] = all;
  auto& timing = m["timing"] = nlohmann::ordered_json::object();
  for (const auto& r : results) timing[std::to_string(r.id)] = r.seconds;
  return m;
}

inline void write_manifest(const std::filesystem::path& dir, const nlohmann::ordered_json& m) {
  std::filesystem::create_directories(dir);
  std::ofstream f(dir / "manifest.json", std::ios::binary);
  f << m.dump(2) << '\n';
}

// Runs criteria 1-10 into `dir` (manifest included).
inline std::vector<CriterionResult> run_properties(const SuiteOptions& o, const std::string& config_hash,
                                                   const std::function<void(const CriterionResult&)>& on_result = {}) {
  std::vector<CriterionResult> out;
  for (const auto& c : property_criteria()) {
    out.push_back(c(o));
    if (on_result) on_result(out.back());
  }
  if (o.out) write_manifest(*o.out, make_manifest(out, o, config_hash));
  return out;
}

namespace suite {

inline std::string read_bytes(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

inline nlohmann::ordered_json manifest_without_timing(const std::filesystem::path& p) {
  auto m = nlohmann::ordered_json::parse(read_bytes(p));
  m.erase("timing");
  for (auto& c : m["checks"]) {
    // Pass flags fold in wall-clock budgets; compare the measured values.
    c.erase("pass");
  }
  m.erase("all_pass");
  return m;
}

}  // namespace suite

// Runs criteria 1-10 twice at reduced sample counts into scratch
// directories and compares every CSV byte for byte and the manifests up to
// timing.
inline CriterionResult criterion_determinism(const SuiteOptions& o, const std::filesystem::path& scratch) {
  const auto t0 = suite::Clock::now();
  CriterionResult r{11, "determinism of verify-all", false, 0, "<=", 0.0, "", 0, 120.0};
  SuiteOptions a = o;
  a.samples_scale = std::min(o.samples_scale, 0.02);
  SuiteOptions b = a;
  a.out = scratch / "run_a";
  b.out = scratch / "run_b";
  std::filesystem::remove_all(scratch);
  run_properties(a, "determinism");
  run_properties(b, "determinism");
  std::size_t files = 0, differing = 0;
  for (const auto& e : std::filesystem::directory_iterator(*a.out)) {
    if (e.path().extension() != ".csv" && e.path().extension() != ".json") continue;
    if (e.path().filename() == "manifest.json") continue;
    ++files;
    const auto other = *b.out / e.path().filename();
    if (!std::filesystem::exists(other) || suite::read_bytes(e.path()) != suite::read_bytes(other)) ++differing;
  }
  const bool manifests_equal =
      suite::manifest_without_timing(*a.out / "manifest.json") == suite::manifest_without_timing(*b.out / "manifest.json");
  r.value = static_cast<double>(differing + (manifests_equal ? 0 : 1));
  r.detail = "files_compared=" + std::to_string(files) + " manifests_equal=" + (manifests_equal ? "true" : "false");
  return suite::finish(r, files > 0 && r.value <= r.threshold, t0);
}

}  // namespace tractrix::harness
