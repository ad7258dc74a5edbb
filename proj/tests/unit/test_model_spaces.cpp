#include "tractrix/all.hpp"

#include <gtest/gtest.h>

using namespace tractrix;

namespace {

Point on_sphere(const SphereSpace& s, double x, double y, double z) {
  Vector v(3);
  v << x, y, z;
  return s.normalized(v);
}

// Triangle inequality, symmetry and zero self-distance over random triples.
template <class Draw>
void expect_metric_axioms(const MetricSpace& s, Draw draw, int n = 300) {
  for (int i = 0; i < n; ++i) {
    const Point x = draw(), y = draw(), z = draw();
    const double dxy = s.distance(x, y), dyz = s.distance(y, z), dxz = s.distance(x, z);
    EXPECT_NEAR(s.distance(x, x), 0.0, 1e-12);
    EXPECT_DOUBLE_EQ(dxy, s.distance(y, x));
    EXPECT_LE(dxz, dxy + dyz + 1e-12);
    EXPECT_GE(dxy, 0.0);
  }
}

}  // namespace

TEST(Sphere, DistanceMatchesArccosOracle) {
  SphereSpace s(2);
  Rng rng(1);
  for (int i = 0; i < 500; ++i) {
    const Point x = s.normalized(rng.unit_vector(3)), y = s.normalized(rng.unit_vector(3));
    const double oracle = std::acos(std::clamp(x.coords().dot(y.coords()), -1.0, 1.0));
    EXPECT_NEAR(s.distance(x, y), oracle, 1e-12);
  }
}

TEST(Sphere, SmallAndNearAntipodalDistancesAreAccurate) {
  SphereSpace s(2);
  const Point p = on_sphere(s, 0, 0, 1);
  for (double a : {1e-9, 1e-6, kPi - 1e-6}) {
    EXPECT_NEAR(s.distance(p, on_sphere(s, std::sin(a), 0, std::cos(a))), a, 1e-15 + 1e-9 * a);
  }
}

TEST(Sphere, RadiusScalesDistance) {
  SphereSpace s(2, 1.2);
  Vector a(3), b(3);
  a << 0, 0, 1.2;
  b << 1.2, 0, 0;
  EXPECT_NEAR(s.distance(s.make_point(a), s.make_point(b)), 1.2 * kPi / 2, 1e-14);
  EXPECT_NEAR(s.curvature_bound(), 1.0 / 1.44, 1e-15);
}

TEST(Sphere, ExpLogRoundTrip) {
  SphereSpace s(3);
  Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    const Point p = s.normalized(rng.unit_vector(4)), q = s.normalized(rng.unit_vector(4));
    const auto v = s.log_map(p, q);
    EXPECT_NEAR(v.magnitude, s.distance(p, q), 1e-12);
    EXPECT_NEAR(s.distance(s.exp_map(p, v), q), 0.0, 1e-10);
  }
}

TEST(Sphere, GeodesicMidpointSplitsDistance) {
  SphereSpace s(2);
  const Point x = on_sphere(s, 1, 0, 0.2), y = on_sphere(s, -0.3, 1, 0.5);
  const Point m = s.geodesic_point(x, y, 0.5);
  const double d = s.distance(x, y);
  EXPECT_NEAR(s.distance(x, m), d / 2, 1e-12);
  EXPECT_NEAR(s.distance(m, y), d / 2, 1e-12);
}

TEST(Sphere, ConcavityOfDistanceAtCollar) {
  SphereSpace s(2);
  // -cos(rho) / sin(rho) at rho = pi/2 + collar; vanishes as the collar shrinks.
  EXPECT_NEAR(s.distance_concavity(kPi / 2, 1e-2), std::tan(1e-2), 1e-15);
  EXPECT_EQ(s.distance_concavity(1.0, 0.0), 0.0);
}

TEST(Sphere, MetricAxioms) {
  SphereSpace s(2);
  Rng rng(3);
  expect_metric_axioms(s, [&] { return s.normalized(rng.unit_vector(3)); });
}

TEST(EuclideanCone, LawOfCosinesWithTruncatedAngle) {
  auto base = std::make_shared<const SphereSpace>(1, 2.0);  // circle of length 4 pi: angles reach beyond pi
  EuclideanConeSpace cone(base);
  Rng rng(4);
  for (int i = 0; i < 300; ++i) {
    const Point u = base->normalized(rng.unit_vector(2)), v = base->normalized(rng.unit_vector(2));
    const double r1 = rng.uniform(0, 2), r2 = rng.uniform(0, 2);
    const double theta = std::min(kPi, base->distance(u, v));
    const double oracle = std::sqrt(std::max(0.0, r1 * r1 + r2 * r2 - 2 * r1 * r2 * std::cos(theta)));
    EXPECT_NEAR(cone.distance(cone.make(r1, u), cone.make(r2, v)), oracle, 1e-12);
  }
}

TEST(EuclideanCone, MetricAxioms) {
  auto base = std::make_shared<const SphereSpace>(2);
  EuclideanConeSpace cone(base);
  Rng rng(5);
  expect_metric_axioms(cone, [&] { return cone.make(rng.uniform(0, 3), base->normalized(rng.unit_vector(3))); });
}

TEST(Join, UnitSphereJoinIsTheBigSphere) {
  // S^1 * S^2 = S^4 via (u, v, t) -> (sin t u, cos t v).
  auto a = std::make_shared<const SphereSpace>(1);
  auto b = std::make_shared<const SphereSpace>(2);
  SphericalJoinSpace j(a, b);
  SphereSpace big(4);
  Rng rng(6);
  auto lift = [&](const Point& x) {
    Vector c(5);
    c << std::sin(x[0]) * j.left_part(x).coords(), std::cos(x[0]) * j.right_part(x).coords();
    return big.normalized(c);
  };
  for (int i = 0; i < 500; ++i) {
    const Point x = j.embed(a->normalized(rng.unit_vector(2)), b->normalized(rng.unit_vector(3)), rng.uniform(0, kPi / 2));
    const Point y = j.embed(a->normalized(rng.unit_vector(2)), b->normalized(rng.unit_vector(3)), rng.uniform(0, kPi / 2));
    EXPECT_NEAR(j.distance(x, y), big.distance(lift(x), lift(y)), 1e-12);
    const Point m = j.geodesic_point(x, y, 0.3);
    EXPECT_NEAR(big.distance(lift(m), big.geodesic_point(lift(x), lift(y), 0.3)), 0.0, 1e-10);
  }
}

TEST(Join, ChordFormAgreesWithCosineFormula) {
  auto a = std::make_shared<const SphereSpace>(2);
  auto b = std::make_shared<const IntervalSpace>(0.0, 2.0);
  SphericalJoinSpace j(a, b);
  Rng rng(7);
  for (int i = 0; i < 300; ++i) {
    const Point x = j.embed(a->normalized(rng.unit_vector(3)), b->at(rng.uniform(0, 2)), rng.uniform(0, kPi / 2));
    const Point y = j.embed(a->normalized(rng.unit_vector(3)), b->at(rng.uniform(0, 2)), rng.uniform(0, kPi / 2));
    const double c = j.join_cosine(x, y);
    if (std::abs(c) > 1.0 - 1e-6) continue;
    EXPECT_NEAR(join_distance(j, x, y), std::acos(c), 1e-10);
  }
}

TEST(Join, EmbedRejectsParameterOutsideRange) {
  auto a = std::make_shared<const SphereSpace>(1);
  SphericalJoinSpace j(a, a);
  const Point u = a->normalized(Vector::Unit(2, 0));
  EXPECT_THROW(join_embed(j, u, u, -0.1), DomainError);
  EXPECT_THROW(join_embed(j, u, u, 2.0), DomainError);
  EXPECT_NO_THROW(join_embed(j, u, u, kPi / 2));
}

TEST(Join, RejectsFactorsWithLargeDiameter) {
  auto big = std::make_shared<const SphereSpace>(2, 2.0);
  auto a = std::make_shared<const SphereSpace>(1);
  EXPECT_THROW(SphericalJoinSpace(big, a), DomainError);
}

TEST(Join, MetricAxioms) {
  auto a = std::make_shared<const SphereSpace>(2);
  auto b = std::make_shared<const IntervalSpace>(-1.0, 1.0);
  SphericalJoinSpace j(a, b);
  Rng rng(8);
  expect_metric_axioms(j, [&] {
    return j.embed(a->normalized(rng.unit_vector(3)), b->at(rng.uniform(-1, 1)), rng.uniform(0, kPi / 2));
  });
}

TEST(SphericalCone, TipDistanceIsParameterAndSliceIsIsometric) {
  auto k = std::make_shared<const IntervalSpace>(-1.0, 1.0);
  const auto cone = spherical_cone(k);
  const auto& j = *cone.space();
  for (double t : {0.0, 0.4, 1.2, kPi / 2}) EXPECT_NEAR(j.distance(cone.at(k->at(0.3), t), cone.tip(k->at(0.0))), t, 1e-12);
  for (double u : {-1.0, -0.2, 0.5})
    for (double v : {-0.7, 0.1, 1.0}) EXPECT_NEAR(j.distance(cone.slice(k->at(u)), cone.slice(k->at(v))), std::abs(u - v), 1e-12);
}

TEST(SphericalCone, RejectsBaseWiderThanPi) {
  auto k = std::make_shared<const IntervalSpace>(0.0, 4.0);
  EXPECT_THROW(spherical_cone(k), DomainError);
}

TEST(Product, ScaledEuclideanCombination) {
  auto s = std::make_shared<const SphereSpace>(2);
  ScaledProductSpace prod(s, s, 1.0 / std::sqrt(2.0));
  Rng rng(9);
  for (int i = 0; i < 100; ++i) {
    const Point a = s->normalized(rng.unit_vector(3)), b = s->normalized(rng.unit_vector(3));
    const Point c = s->normalized(rng.unit_vector(3)), d = s->normalized(rng.unit_vector(3));
    const double oracle = std::hypot(s->distance(a, c), s->distance(b, d)) / std::sqrt(2.0);
    EXPECT_NEAR(prod.distance(prod.pair(a, b), prod.pair(c, d)), oracle, 1e-12);
  }
  const Point a = s->normalized(rng.unit_vector(3)), c = s->normalized(rng.unit_vector(3));
  // Diagonal pairs keep the factor distance.
  EXPECT_NEAR(prod.distance(prod.pair(a, a), prod.pair(c, c)), s->distance(a, c), 1e-12);
}

TEST(Interval, DistanceAndGeodesic) {
  IntervalSpace k(-2.0, 3.0);
  EXPECT_DOUBLE_EQ(k.distance(k.at(-2.0), k.at(3.0)), 5.0);
  EXPECT_DOUBLE_EQ(k.geodesic_point(k.at(0.0), k.at(2.0), 0.25)[0], 0.5);
  EXPECT_DOUBLE_EQ(k.diameter_bound(), 5.0);
}
