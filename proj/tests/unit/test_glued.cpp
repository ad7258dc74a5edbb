#include "tractrix/all.hpp"

#include <gtest/gtest.h>

using namespace tractrix;

namespace {

struct Fixture {
  std::shared_ptr<const SphereSpace> s2 = std::make_shared<const SphereSpace>(2);
  Point p;
  Vector ex = Vector::Unit(3, 0);

  Fixture() {
    Vector v(3);
    v << 0, 0, 1;
    p = s2->make_point(v);
  }

  // Quarter-meridian through p in the xz-plane.
  SubsetPtr arc(double mesh) const { return arc_subset(s2, p, ex, -kPi / 4, kPi / 4, mesh); }
};

// Distance from x to the arc {(sin s, 0, cos s) : |s| <= a}: the closest
// point of the great circle is at s = atan2(x0, x2), clamped to the arc.
double distance_to_arc(const Vector& x, double a) {
  const double rho = std::hypot(x[0], x[2]);
  const double phi = std::atan2(x[0], x[2]);
  const double s = std::clamp(phi, -a, a);
  return std::acos(std::clamp(rho * std::cos(s - phi), -1.0, 1.0));
}

// min over the arc of d(x, k(s)) + arccos(cos t cos |s|), by dense scan.
double brute_distance_to_curve(const Vector& x, double a, double t) {
  double best = kInf;
  const int n = 200000;
  for (int i = 0; i <= n; ++i) {
    const double s = -a + 2 * a * i / n;
    const double dk = std::acos(std::clamp(x[0] * std::sin(s) + x[2] * std::cos(s), -1.0, 1.0));
    best = std::min(best, dk + std::acos(std::cos(t) * std::cos(s)));
  }
  return best;
}

}  // namespace

TEST(Glued, TipDistanceIsDistanceToKPlusQuarterTurn) {
  Fixture f;
  const auto w = build_retraction_setup(f.arc(kPi / 50), f.p);
  Rng rng(1);
  for (int i = 0; i < 50; ++i) {
    const Point x = sample_cap(*f.s2, f.p, kPi / 2, rng);
    const Point tip = w.gamma(kPi / 2);
    EXPECT_NEAR(w.space->distance(w.space->from_u(x), tip), distance_to_arc(x.coords(), kPi / 4) + kPi / 2, 1e-9);
  }
}

TEST(Glued, DistanceToDrivingCurveMatchesCrossingFormula) {
  Fixture f;
  const auto w = build_retraction_setup(f.arc(kPi / 50), f.p);
  Rng rng(2);
  for (int i = 0; i < 12; ++i) {
    const Point x = sample_cap(*f.s2, f.p, kPi / 2, rng);
    const double t = rng.uniform(0, kPi / 2);
    EXPECT_NEAR(w.space->distance(w.space->from_u(x), w.gamma(t)), brute_distance_to_curve(x.coords(), kPi / 4, t),
                1e-8);
  }
}

TEST(Glued, PureGateDistanceWithinMeshOfRefined) {
  Fixture f;
  const double mesh = kPi / 50;
  const auto refined = build_retraction_setup(f.arc(mesh), f.p);
  const auto gates = build_retraction_setup(f.arc(mesh), f.p, {1, false, false});
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const Point x = sample_cap(*f.s2, f.p, kPi / 2, rng);
    const double t = rng.uniform(0, kPi / 2);
    const double a = refined.space->distance(refined.space->from_u(x), refined.gamma(t));
    const double b = gates.space->distance(gates.space->from_u(x), gates.gamma(t));
    EXPECT_GE(b, a - 1e-12);
    EXPECT_LE(b, a + mesh);
    EXPECT_EQ(gates.space->distance_with_bound(gates.space->from_u(x), gates.gamma(t)).error_bound, mesh);
  }
}

TEST(Glued, SamePieceDistanceIsIntrinsicWhenNoShortcut) {
  Fixture f;
  const auto w = build_retraction_setup(f.arc(kPi / 50), f.p);
  Rng rng(4);
  for (int i = 0; i < 30; ++i) {
    const Point x = sample_cap(*f.s2, f.p, kPi / 2, rng), y = sample_cap(*f.s2, f.p, kPi / 2, rng);
    EXPECT_NEAR(w.space->distance(w.space->from_u(x), w.space->from_u(y)), f.s2->distance(x, y), 1e-12);
  }
}

TEST(Glued, SingletonKReducesToDistanceToP) {
  Fixture f;
  const auto w = build_retraction_setup(singleton_subset(f.s2, f.p), f.p);
  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    const Point x = sample_cap(*f.s2, f.p, kPi / 2, rng);
    const double t = rng.uniform(0, kPi / 2);
    // Only one crossing point: d(x, p) + d(p-slice, gamma(t)) = d(x, p) + t.
    EXPECT_NEAR(w.space->distance(w.space->from_u(x), w.gamma(t)), f.s2->distance(x, f.p) + t, 1e-12);
  }
}

TEST(Glued, GeodesicPointsLieOnAShortestPath) {
  Fixture f;
  const auto w = build_retraction_setup(f.arc(kPi / 50), f.p);
  const auto& g = *w.space;
  Rng rng(6);
  for (int i = 0; i < 20; ++i) {
    const Point x = g.from_u(sample_cap(*f.s2, f.p, kPi / 2, rng));
    const Point y = w.gamma(rng.uniform(0, kPi / 2));
    const double d = g.distance(x, y);
    for (double s : {0.2, 0.5, 0.9}) {
      const Point m = g.geodesic_point(x, y, s);
      EXPECT_NEAR(g.distance(x, m), s * d, 1e-8);
      EXPECT_NEAR(g.distance(m, y), (1 - s) * d, 1e-8);
    }
  }
}

TEST(Glued, BallProjectionLandsOnTheSphereOfRadiusR) {
  Fixture f;
  const auto w = build_retraction_setup(f.arc(kPi / 50), f.p);
  const auto& g = *w.space;
  Rng rng(7);
  for (int i = 0; i < 30; ++i) {
    const Point x = g.from_u(sample_cap(*f.s2, f.p, kPi / 2, rng));
    const Point c = w.gamma(rng.uniform(0, kPi / 2));
    const double r = rng.uniform(0.3, kPi / 2);
    const Point q = g.project_to_ball(c, r, x);
    const double d = g.distance(x, c);
    if (d <= r) {
      EXPECT_EQ(q, x);
    } else {
      EXPECT_NEAR(g.distance(q, c), r, 1e-8);
      EXPECT_NEAR(g.distance(x, q), d - r, 1e-8);
    }
  }
}

TEST(Glued, BatchProjectionMatchesSingle) {
  Fixture f;
  const auto w = build_retraction_setup(f.arc(kPi / 50), f.p);
  const auto& g = *w.space;
  Rng rng(8);
  std::vector<Point> xs;
  for (int i = 0; i < 20; ++i) xs.push_back(g.from_u(sample_cap(*f.s2, f.p, kPi / 2, rng)));
  const Point c = w.gamma(0.7);
  auto batch = xs;
  g.project_to_ball_batch(c, kPi / 2, batch);
  for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_EQ(batch[i], g.project_to_ball(c, kPi / 2, xs[i]));
}

TEST(Glued, BallsAlongTheCurveDecrease) {
  Fixture f;
  const double mesh = kPi / 50;
  const auto w = build_retraction_setup(f.arc(mesh), f.p);
  Rng rng(9);
  for (int i = 0; i < 30; ++i) {
    const Point x = w.space->from_u(sample_cap(*f.s2, f.p, kPi / 2, rng));
    const double t1 = rng.uniform(0, kPi / 2), t2 = rng.uniform(t1, kPi / 2);
    if (w.space->distance(x, w.gamma(t2)) <= kPi / 2)
      EXPECT_LE(w.space->distance(x, w.gamma(t1)), kPi / 2 + 2 * mesh);
  }
}

TEST(Glued, RelaxationNeverExceedsSingleCrossing) {
  Fixture f;
  const auto w = build_retraction_setup(f.arc(kPi / 50), f.p, {1, true, true});
  Rng rng(10);
  for (int i = 0; i < 30; ++i) {
    const Point x = w.space->from_u(sample_cap(*f.s2, f.p, kPi, rng));
    const Point y = w.gamma(rng.uniform(0, kPi / 2));
    const double relaxed = w.space->distance(x, y), single = w.space->single_crossing_distance(x, y);
    EXPECT_LE(relaxed, single + 1e-12);
    EXPECT_LE(single - relaxed, 10 * w.space->mesh());
  }
}

TEST(Glued, NetDistanceBracketsEngineDistance) {
  Fixture f;
  const double mesh = kPi / 50;
  const auto w = build_retraction_setup(f.arc(mesh), f.p);
  Rng rng(11);
  for (int i = 0; i < 10; ++i) {
    const Point x = w.space->from_u(sample_cap(*f.s2, f.p, kPi / 2, rng));
    const Point y = w.gamma(rng.uniform(0, kPi / 2));
    const double d = w.space->distance(x, y);
    const double net = net_distance(*w.space, x, y, {}, kPi);
    EXPECT_GE(net, d - 1e-9);
    EXPECT_LE(net, d + mesh);
  }
}

TEST(Glued, TiesAreBrokenByLowestGateAndCounted) {
  Fixture f;
  const auto w = build_retraction_setup(f.arc(kPi / 50), f.p);
  Vector south(3);
  south << 0, 0, -1;
  // The south pole is equidistant from both ends of the arc.
  const Point x = w.space->from_u(f.s2->make_point(south));
  const Point q = w.space->project_to_ball(w.gamma(kPi / 2), kPi / 2 + 0.1, x);
  EXPECT_GE(w.space->ambiguity_count(), 1u);
  ASSERT_EQ(w.space->piece(q), Piece::u);
  EXPECT_LT(w.space->inner(q)[0], 0.0);  // the s = -pi/4 end has the lowest gate index
}

TEST(Glued, KFartherThanQuarterTurnIsRejectedWithWitness) {
  Fixture f;
  auto k = arc_subset(f.s2, f.p, f.ex, -kPi / 4, 2.0, kPi / 50);
  try {
    build_retraction_setup(k, f.p);
    FAIL() << "expected a precondition error";
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.witness()).find("gate"), std::string::npos);
  }
}

TEST(Glued, PointOutsideKRejectedAtCurvatureOne) {
  Fixture f;
  auto k = arc_subset(f.s2, f.s2->normalized(Vector::Unit(3, 0) + Vector::Unit(3, 2) * 3), Vector::Unit(3, 1),
                      -0.2, 0.2, kPi / 100);
  EXPECT_THROW(build_retraction_setup(k, f.p), PreconditionError);
}

TEST(Glued, PointOutsideKReplacedByClosestPointBelowCurvatureOne) {
  auto s = std::make_shared<const SphereSpace>(2, 1.2);
  Vector pv(3), cv(3);
  pv << 0, 0, 1.2;
  cv << 0.3, 0, 1.0;
  const Point p = s->make_point(pv);
  auto k = arc_subset(s, s->normalized(cv), Vector::Unit(3, 1), -0.2, 0.2, kPi / 100);
  const auto w = build_retraction_setup(k, p);
  EXPECT_TRUE(w.base_replaced);
  EXPECT_NEAR(s->distance(w.base_u, s->normalized(cv)), 0.0, 1e-6);
}

TEST(Glued, NonIsometricGateCopiesAreRejected) {
  Fixture f;
  auto k = f.arc(kPi / 20);
  const auto cone = spherical_cone(k->intrinsic_ptr());
  // Squeezing the slice parameter breaks the isometry between the copies of K.
  Embedding squeeze = [cone, k](const Point& kp) {
    return cone.slice(std::static_pointer_cast<const IntervalSpace>(k->intrinsic_ptr())->at(0.5 * kp[0]));
  };
  EXPECT_THROW(GluedSpace(k->ambient_ptr(), cone.space(), k, squeeze), PreconditionError);
}

TEST(Glued, PieceTagsAndPaddingRoundTrip) {
  Fixture f;
  const auto w = build_retraction_setup(f.arc(kPi / 50), f.p);
  const Point x = w.space->from_u(f.p);
  EXPECT_EQ(w.space->piece(x), Piece::u);
  EXPECT_EQ(w.space->inner(x), f.p);
  const Point y = w.gamma(0.3);
  EXPECT_EQ(w.space->piece(y), Piece::j);
  EXPECT_EQ(w.space->coord_size(), 1 + std::max<Eigen::Index>(3, y.size() - 1));
}
