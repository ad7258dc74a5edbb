#pragma once

#include "tractrix/harness/config.hpp"
#include "tractrix/harness/suite.hpp"
#include "tractrix/harness/svg.hpp"

#include <cstdlib>
#include <iostream>

namespace tractrix::harness {

enum ExitCode : int { kPass = 0, kUsage = 1, kPrecondition = 2, kCheckFailed = 3 };

// TRACTRIX_VERBOSE: 0 prints nothing but errors, 1 (default) one line per
// check, 2 adds configuration and timing.
inline int verbosity() {
  const char* v = std::getenv("TRACTRIX_VERBOSE");
  if (!v || !*v) return 1;
  return std::atoi(v);
}

struct Check {
  std::string name;
  bool pass;
  double value;
  std::string comparison;
  double threshold;
};

// Accumulates checks and writes the run manifest.
class RunContext {
 public:
  RunContext(std::string command, const Config& cfg)
      : command_(std::move(command)),
        cfg_(cfg),
        out_(cfg.str("out", "out")),
        seed_(cfg.integer("seed", 20240601)),
        start_(suite::Clock::now()) {
    std::filesystem::create_directories(out_);
    if (verbosity() >= 2) std::cerr << "config:\n" << cfg.canonical();
  }

  const std::filesystem::path& out() const noexcept { return out_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const Config& config() const noexcept { return cfg_; }

  void write(const std::string& name, const std::function<void(std::ostream&)>& body) const {
    std::ofstream f(out_ / name, std::ios::binary);
    body(f);
  }

  void check(const std::string& name, double value, const std::string& cmp, double threshold) {
    bool pass = false;
    if (cmp == "<=") pass = value <= threshold;
    else if (cmp == ">=") pass = value >= threshold;
    else if (cmp == ">") pass = value > threshold;
    else if (cmp == "==") pass = value == threshold;
    checks_.push_back({name, pass, value, cmp, threshold});
    if (verbosity() >= 1)
      std::cout << (pass ? "[PASS] " : "[FAIL] ") << name << ": " << format_double(value) << ' ' << cmp << ' '
                << format_double(threshold) << '\n';
  }

  void note(const std::string& key, nlohmann::ordered_json value) { notes_[key] = std::move(value); }

  int finish() const {
    nlohmann::ordered_json m;
    m["tool"] = "tractrix";
    m["version"] = kToolVersion;
    m["command"] = command_;
    m["config_hash"] = hex64(fnv1a(cfg_.canonical()));
    m["seed"] = seed_;
    m["rng"] = Rng::algorithm;
    bool all = true;
    auto& checks = m["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : checks_) {
      all = all && c.pass;
      checks.push_back({{"name", c.name},
                        {"pass", c.pass},
                        {"value", c.value},
                        {"comparison", c.comparison},
                        {"threshold", c.threshold}});
    }
    m["all_pass"] = all;
    if (!notes_.empty()) m["results"] = notes_;
    m["timing"] = {{"wall_seconds", suite::since(start_)}};
    write("manifest.json", [&](std::ostream& f) { f << m.dump(2) << '\n'; });
    if (verbosity() >= 2) std::cerr << "wall time " << suite::since(start_) << " s\n";
    return all ? kPass : kCheckFailed;
  }

 private:
  std::string command_;
  Config cfg_;
  std::filesystem::path out_;
  std::uint64_t seed_;
  suite::Clock::time_point start_;
  std::vector<Check> checks_;
  nlohmann::ordered_json notes_ = nlohmann::ordered_json::object();
};

namespace cli {

inline double positive(const Config& c, const std::string& key, double fallback) {
  const double v = c.num(key, fallback);
  if (!(v > 0.0)) throw ConfigError("config key '" + key + "' must be positive");
  return v;
}

inline SpacePtr backend(const Config& c) {
  const auto kind = c.str("backend", "sphere");
  if (kind == "line" || kind == "euclidean")
    return std::make_shared<const EuclideanSpace>(static_cast<Eigen::Index>(c.integer("dim", kind == "line" ? 1 : 3)));
  if (kind == "sphere")
    return std::make_shared<const SphereSpace>(static_cast<Eigen::Index>(c.integer("dim", 2)), positive(c, "radius", 1.0));
  throw ConfigError("backend must be line, euclidean or sphere");
}

inline std::shared_ptr<const SphereSpace> sphere_backend(const Config& c) {
  auto s = std::dynamic_pointer_cast<const SphereSpace>(backend(c));
  if (!s) throw ConfigError("this command needs backend = sphere");
  return s;
}

// Default base point: origin for Euclidean backends, north pole (last axis)
// for spheres.
inline Point base_point(const MetricSpace& s, const Config& c) {
  Vector fallback = Vector::Zero(s.coord_size());
  if (const auto* sp = dynamic_cast<const SphereSpace*>(&s)) fallback[s.coord_size() - 1] = sp->radius();
  const Vector v = c.vec("p", fallback);
  if (v.size() != s.coord_size()) throw ConfigError("p has the wrong number of coordinates");
  return s.make_point(v);
}

inline Point point_from(const MetricSpace& s, const Config& c, const std::string& key, const Point& fallback) {
  if (!c.has(key)) return fallback;
  const Vector v = c.vec(key, Vector());
  if (v.size() != s.coord_size()) throw ConfigError(key + " has the wrong number of coordinates");
  return s.make_point(v);
}

// Unit-speed curve: line t e_0, meridian from the base point toward e_0,
// or stationary at the base point.
inline DrivingCurve curve(SpacePtr s, const Config& c) {
  const double a = c.num("curve_a", 0.0);
  const double b = c.num("curve_b", c.str("backend", "sphere") == "sphere" ? 0.5 * kPi : 5.0);
  if (!(b >= a)) throw ConfigError("curve_b must not be smaller than curve_a");
  const auto kind = c.str("curve", c.str("backend", "sphere") == "sphere" ? "meridian" : "line");
  const Point p = base_point(*s, c);
  if (kind == "stationary") return stationary_curve(p, a, b);
  if (kind == "line") {
    if (s->kind() != SpaceKind::euclidean) throw ConfigError("curve = line needs a Euclidean backend");
    return {a, b,
            [s, p](double t) {
              Vector v = p.coords();
              v[0] += t;
              return s->make_point(v);
            },
            1.0};
  }
  if (kind == "meridian") {
    auto sp = std::dynamic_pointer_cast<const SphereSpace>(s);
    if (!sp) throw ConfigError("curve = meridian needs a sphere backend");
    const Vector dir = Vector::Unit(sp->coord_size(), 0);
    if (std::abs(p.coords().normalized().dot(dir)) > 1.0 - 1e-9) throw ConfigError("meridian: base point on the x0 axis");
    return {a, b,
            [sp, p, dir, a](double t) {
              return sp->exp_map(p, TangentVector{p, (dir - dir.dot(p.coords()) / p.coords().squaredNorm() * p.coords()).normalized(), t - a});
            },
            1.0};
  }
  throw ConfigError("curve must be line, meridian or stationary");
}

inline Trajectory sample_curve(SpacePtr s, const DrivingCurve& g, std::size_t n = 200) {
  Trajectory t;
  t.space = std::move(s);
  for (std::size_t i = 0; i <= n; ++i) {
    const double ti = g.a + (g.b - g.a) * static_cast<double>(i) / static_cast<double>(n);
    t.push(ti, g(ti));
  }
  return t;
}

inline SubsetPtr subset(std::shared_ptr<const SphereSpace> u, const Point& p, const Config& c) {
  const auto kind = c.str("k", "arc");
  if (kind == "arc") {
    const double len = positive(c, "k_length", 0.5 * kPi);
    const Vector dir = c.vec("k_direction", Vector::Unit(u->coord_size(), 0));
    if (dir.size() != u->coord_size()) throw ConfigError("k_direction has the wrong number of coordinates");
    return arc_subset(u, p, dir, -0.5 * len, 0.5 * len, positive(c, "mesh", kPi / 200));
  }
  if (kind == "singleton") return singleton_subset(u, p);
  if (kind == "csv") {
    const auto path = c.str("k_file", "");
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open k_file '" + path + "'");
    std::vector<Point> vertices;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      Config row;
      row.set("p", line);
      vertices.push_back(point_from(*u, row, "p", p));
    }
    return polyline_subset(u, vertices);
  }
  throw ConfigError("k must be arc, singleton or csv");
}

}  // namespace cli

inline int cmd_run(const Config& cfg) {
  RunContext ctx("run", cfg);
  auto space = cli::backend(cfg);
  const auto gamma = cli::curve(space, cfg);
  const TractrixConfig tc{cli::positive(cfg, "r", space->kind() == SpaceKind::sphere ? 0.5 * kPi : 1.0),
                          cli::positive(cfg, "delta", 1e-3)};
  tc.validate();
  const Point start = cli::point_from(*space, cfg, "start", gamma(gamma.a));
  const auto traj = tractrix_flow(space, gamma, tc, start);
  ctx.write("trajectory.csv", [&](std::ostream& f) { traj.write_csv(f); });
  ctx.write("plot.svg", [&](std::ostream& f) { write_trajectory_svg(f, traj, cli::sample_curve(space, gamma)); });

  double excess = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i)
    excess = std::max(excess, space->distance(traj.points[i], gamma(traj.times[i])) - tc.r);
  ctx.check("ball containment excess", excess, "<=", 1e-9);
  ctx.check("truncated", traj.truncated ? 1.0 : 0.0, "==", 0.0);
  nlohmann::ordered_json terminal = nlohmann::ordered_json::array();
  for (Eigen::Index k = 0; k < traj.back().size(); ++k) terminal.push_back(traj.back()[k]);
  ctx.note("terminal", terminal);
  ctx.note("terminal_distance_to_curve", space->distance(traj.back(), gamma(gamma.b)));

  if (cfg.has("deltas")) {
    auto deltas = cfg.list("deltas");
    std::sort(deltas.rbegin(), deltas.rend());
    std::vector<double> dev;
    for (double d : deltas) {
      const auto coarse = tractrix_flow(space, gamma, {tc.r, d}, start);
      const auto fine = tractrix_flow(space, gamma, {tc.r, 0.5 * d}, start);
      dev.push_back(sup_deviation(coarse, fine));
    }
    ctx.write("convergence.csv", [&](std::ostream& f) {
      f << "delta,sup_deviation\n";
      for (std::size_t i = 0; i < deltas.size(); ++i) f << format_double(deltas[i]) << ',' << format_double(dev[i]) << '\n';
    });
    if (deltas.size() >= 2) {
      bool resolved = true;
      for (double d : dev) resolved = resolved && d > 1e-14;
      if (resolved)
        ctx.check("fitted convergence order", fit_order(deltas, dev), ">=", 0.5);
      else
        ctx.check("sup deviation at finest step", dev.back(), "<=", 1e-12);
    }
  }
  return ctx.finish();
}

inline int cmd_retract(const Config& cfg) {
  RunContext ctx("retract", cfg);
  const auto pipeline = cfg.str("pipeline", "cone");
  auto u = cli::sphere_backend(cfg);
  const Point p = cli::base_point(*u, cfg);
  const double ts = cli::positive(cfg, "tolerance_scale", 1.0);
  const std::size_t n = cfg.integer("samples", 1000);
  const double close = cfg.num("close_fraction", 0.5);
  const double sep = cli::positive(cfg, "separation", 1e-2);
  if (close < 0.0 || close > 1.0) throw ConfigError("close_fraction must lie in [0, 1]");
  Rng rng(ctx.seed());
  const auto far = static_cast<std::size_t>(std::llround(static_cast<double>(n) * (1.0 - close)));
  const double delta = cli::positive(cfg, "delta", pipeline == "psi" ? 1e-2 : 1e-3);

  RetractionPipeline pl;
  SamplePairs pairs;
  std::string ratio_formula;
  double ratio_tol = 0.0;
  std::shared_ptr<const PhiRetraction> phi;
  std::shared_ptr<const PsiRetraction> psi;
  std::shared_ptr<const ConeRetraction> cone_map;

  if (pipeline == "cone") {
    const double len = cli::positive(cfg, "k_length", 0.5 * kPi);
    const Vector dir = cfg.vec("k_direction", Vector::Unit(u->coord_size(), 0));
    cone_map = std::make_shared<const ConeRetraction>(u, p, arc_sector(p, dir, len));
    auto k = arc_subset(u, p, dir, -0.5 * len, 0.5 * len, len / 1000);
    pl = {RetractionKind::cone, u, batched([cone_map](const Point& x) { return (*cone_map)(x); }), {}, 1e-9 * ts,
          "1e-9"};
    for (const auto& g : k->gates()) pl.target_samples.push_back(g.u);
    pairs = sample_cap_pairs(*u, p, kPi * u->radius(), n, far, sep, rng);
    ratio_tol = 1e-6 * ts;
    ratio_formula = "1e-6";
  } else if (pipeline == "radial") {
    pl = {RetractionKind::radial, u, batched([u, p](const Point& x) { return radial_retraction(*u, p, x); }), {},
          1e-12 * ts, "1e-12"};
    for (int i = 0; i < 100; ++i) pl.target_samples.push_back(sample_cap(*u, p, 0.5 * kPi, rng));
    pairs = sample_cap_pairs(*u, p, kPi * u->radius(), n, far, sep, rng);
    ratio_tol = 1e-9 * ts;
    ratio_formula = "1e-9";
  } else if (pipeline == "phi") {
    auto k = cli::subset(u, p, cfg);
    phi = std::make_shared<const PhiRetraction>(
        k, p, delta, CrossingPolicy{1, cfg.flag("relax", false), cfg.flag("refine", true)});
    pl = {RetractionKind::phi, u, [phi](const std::vector<Point>& xs) { return phi->apply(xs); }, {},
          phi->fixed_point_tolerance() * ts, "2*delta + 2*eps_K"};
    for (const auto& g : k->gates()) pl.target_samples.push_back(g.u);
    pairs = sample_cap_pairs(*u, p, 0.5 * kPi, n, far, sep, rng);
    ratio_tol = 1e-2 * ts;
    ratio_formula = "1e-2";
  } else if (pipeline == "psi") {
    psi = std::make_shared<const PsiRetraction>(u, p, delta, cli::positive(cfg, "mesh", kPi / 24));
    pl = {RetractionKind::psi, psi->domain_ptr(), [psi](const std::vector<Point>& xs) { return psi->apply(xs); }, {},
          1e-9 * ts, "1e-9 (diagonal fixed after snapping)"};
    const auto& prod = psi->domain();
    for (int i = 0; i < 100; ++i) {
      const Point x = sample_cap(*u, p, 0.5 * kPi, rng);
      pl.target_samples.push_back(prod.pair(x, x));
    }
    for (std::size_t i = 0; i < n; ++i) {
      const Point a = sample_cap(*u, p, 0.5 * kPi, rng), b = sample_cap(*u, p, 0.5 * kPi, rng);
      const bool near = i >= far;
      const Point c = near ? sample_near(*u, a, sep, p, 0.5 * kPi, rng) : sample_cap(*u, p, 0.5 * kPi, rng);
      const Point d = near ? sample_near(*u, b, sep, p, 0.5 * kPi, rng) : sample_cap(*u, p, 0.5 * kPi, rng);
      pairs.x.push_back(prod.pair(a, b));
      pairs.y.push_back(prod.pair(c, d));
    }
    ratio_tol = 1e-2 * ts;
    ratio_formula = "1e-2";
  } else {
    throw ConfigError("pipeline must be cone, radial, phi or psi");
  }

  const auto fixed = pl.map(pl.target_samples);
  double fix_err = 0.0;
  ctx.write("fixed_points.csv", [&](std::ostream& f) {
    f << "sample,displacement\n";
    for (std::size_t i = 0; i < fixed.size(); ++i) {
      const double d = pl.domain->distance(fixed[i], pl.target_samples[i]);
      fix_err = std::max(fix_err, d);
      f << i << ',' << format_double(d) << '\n';
    }
  });
  const auto rep = estimate_lipschitz(*pl.domain, pl.map, pairs,
                                      {static_cast<int>(cfg.integer("bins", 8)), static_cast<int>(cfg.integer("bootstrap", 0)), ctx.seed()});
  ctx.write("lipschitz.csv", [&](std::ostream& f) { rep.write_csv(f); });
  auto summary = rep.summary();
  summary["pipeline"] = to_string(pl.kind);
  summary["ratio_tol"] = ratio_tol;
  summary["ratio_tol_formula"] = "1 + " + ratio_formula;
  summary["retraction_error"] = fix_err;
  summary["retraction_tol"] = pl.tolerance;
  summary["retraction_tol_formula"] = pl.tolerance_formula;
  if (phi) summary["ambiguous_ties"] = phi->glued().ambiguity_count();
  ctx.write("summary.json", [&](std::ostream& f) { f << summary.dump(2) << '\n'; });
  ctx.check("max Lipschitz ratio", rep.max_ratio, "<=", 1.0 + ratio_tol);
  ctx.check("retraction error", fix_err, "<=", pl.tolerance);
  return ctx.finish();
}

inline int cmd_flow(const Config& cfg) {
  RunContext ctx("flow", cfg);
  const auto family = cfg.str("family", "quadratic");
  const double delta = cli::positive(cfg, "delta", 1e-3);
  const bool corrupt = cfg.flag("corrupt", false);
  auto space = cli::backend(cfg);
  TimeDependentFamily f, h;
  double s = 0.0, a = cfg.num("curve_a", 0.0), b = cfg.num("curve_b", 1.0);
  Point start_a, start_b;
  std::vector<Point> witnesses;

  if (family == "quadratic") {
    if (space->kind() != SpaceKind::euclidean) throw ConfigError("family = quadratic needs a Euclidean backend");
    const double radius = cli::positive(cfg, "r", 2.0);
    const Vector c = cfg.vec("center", Vector::Zero(space->coord_size()));
    if (c.size() != space->coord_size()) throw ConfigError("center has the wrong number of coordinates");
    const double shift = cfg.num("shift", 0.0);
    const Point origin = space->make_point(Vector::Zero(space->coord_size()));
    f = restricted_to_ball(quadratic_family(space, Vector::Zero(space->coord_size())), space, origin, radius);
    h = restricted_to_ball(quadratic_family(space, c, shift), space, origin, radius);
    // sup |f - h| over the ball.
    s = std::abs(shift) + radius * c.norm() + 0.5 * c.squaredNorm();
    Vector da = Vector::Zero(space->coord_size()), db = Vector::Zero(space->coord_size());
    da[0] = 1.0;
    db[0] = -0.5;
    start_a = cli::point_from(*space, cfg, "start", space->make_point(da));
    start_b = cli::point_from(*space, cfg, "start_b", space->make_point(db));
    for (double w : {-1.5, 0.5, 1.5}) {
      Vector v = Vector::Zero(space->coord_size());
      v[0] = w;
      witnesses.push_back(space->make_point(v));
    }
  } else if (family == "tractrix") {
    const auto gamma = cli::curve(space, cfg);
    const double r = cli::positive(cfg, "r", space->kind() == SpaceKind::sphere ? 0.5 * kPi : 1.0);
    const double lambda = cfg.num("lambda", space->distance_concavity(r, 1e-2));
    f = h = tractrix_family(space, gamma, r, lambda);
    a = gamma.a;
    b = gamma.b;
    Rng rng(ctx.seed());
    auto sp = std::dynamic_pointer_cast<const SphereSpace>(space);
    auto draw = [&] {
      if (sp) return sample_cap(*sp, gamma(a), r, rng);
      Vector v = gamma(a).coords();
      v[0] += rng.uniform(-r, r);
      return space->make_point(v);
    };
    start_a = cli::point_from(*space, cfg, "start", draw());
    start_b = cli::point_from(*space, cfg, "start_b", draw());
    for (int i = 0; i < 8; ++i) witnesses.push_back(draw());
  } else {
    throw ConfigError("family must be quadratic or tractrix");
  }

  auto ta = evolve(space, f, start_a, a, b, delta);
  const auto tb = evolve(space, h, start_b, a, b, delta);
  if (corrupt) {
    const std::size_t mid = ta.size() / 2;
    const Point x = ta.points[mid];
    if (space->has_exp_log() && space->kind() == SpaceKind::sphere) {
      Vector v = Vector::Unit(x.size(), 0);
      v -= v.dot(x.coords()) / x.coords().squaredNorm() * x.coords();
      ta.points[mid] = space->exp_map(x, TangentVector{x, v.normalized(), 10.0 * delta});
    } else {
      ta.points[mid] = space->make_point(x.coords() + 10.0 * delta * Vector::Unit(x.size(), 0));
    }
  }
  ctx.write("trajectory_a.csv", [&](std::ostream& o) { ta.write_csv(o); });
  ctx.write("trajectory_b.csv", [&](std::ostream& o) { tb.write_csv(o); });

  const double tol = 10.0 * delta * cli::positive(cfg, "tolerance_scale", 1.0);
  const auto evi = check_evi(ta, f, witnesses, tol, delta / tol);
  const auto est = verify_distance_estimate(ta, tb, f.lambda, s, delta * cli::positive(cfg, "tolerance_scale", 1.0));
  ctx.write("evi.json", [&](std::ostream& o) {
    o << nlohmann::ordered_json{{"worst_slack", evi.worst_slack}, {"worst_step", evi.worst_step},
                                {"worst_witness", evi.worst_witness}, {"checked", evi.checked},
                                {"skipped", evi.skipped}, {"tol", evi.tol}, {"pass", evi.pass}}
             .dump(2)
      << '\n';
  });
  ctx.write("estimate.csv", [&](std::ostream& o) {
    o << "t,ell,bound\n";
    for (std::size_t i = 0; i < est.ell.size(); ++i)
      o << format_double(ta.times[i]) << ',' << format_double(est.ell[i]) << ',' << format_double(est.bound[i]) << '\n';
  });
  ctx.write("estimate.json", [&](std::ostream& o) {
    o << nlohmann::ordered_json{{"lambda", f.lambda}, {"s", s}, {"worst_excess", est.worst_excess},
                                {"allowed", est.allowed}, {"extension", est.extension}, {"pass", est.pass}}
             .dump(2)
      << '\n';
  });
  ctx.check("EVI worst slack", evi.worst_slack, ">=", -tol);
  ctx.check("distance estimate worst excess", est.worst_excess, "<=", est.allowed);
  ctx.check("escaped", (ta.escape_time || tb.escape_time) ? 1.0 : 0.0, "==", 0.0);
  return ctx.finish();
}

inline int cmd_verify_all(const Config& cfg) {
  SuiteOptions opt;
  opt.seed = cfg.integer("seed", opt.seed);
  opt.tolerance_scale = cli::positive(cfg, "tolerance_scale", 1.0);
  opt.samples_scale = cli::positive(cfg, "samples_scale", 1.0);
  const std::filesystem::path out = cfg.str("out", "out");
  opt.out = out;
  const auto hash = hex64(fnv1a(cfg.canonical()));
  auto print = [](const CriterionResult& r) {
    if (verbosity() < 1) return;
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << "criterion " << r.id << ": " << r.name << " | value "
              << format_double(r.value) << ' ' << r.comparison << ' ' << format_double(r.threshold) << " | "
              << r.detail << '\n'
              << std::flush;
    if (verbosity() >= 2) std::cerr << "  " << r.seconds << " s of " << r.budget << " s\n";
  };
  auto results = run_properties(opt, hash, print);
  results.push_back(criterion_determinism(opt, out / ".determinism"));
  std::filesystem::remove_all(out / ".determinism");
  print(results.back());
  write_manifest(out, make_manifest(results, opt, hash));
  bool all = true;
  for (const auto& r : results) all = all && r.pass;
  if (!all && verbosity() >= 1) {
    std::cout << "failed:";
    for (const auto& r : results)
      if (!r.pass) std::cout << ' ' << r.id;
    std::cout << '\n';
  }
  return all ? kPass : kCheckFailed;
}

}  // namespace tractrix::harness
