#include "tractrix/all.hpp"

#include <gtest/gtest.h>

using namespace tractrix;

namespace {

std::shared_ptr<const EuclideanSpace> line() { return std::make_shared<const EuclideanSpace>(1); }

Point at(const EuclideanSpace& e, double x) { return e.make_point(Vector::Constant(1, x)); }

DrivingCurve identity_curve(std::shared_ptr<const EuclideanSpace> e, double b) {
  return {0.0, b, [e](double t) { return at(*e, t); }, 1.0};
}

std::shared_ptr<const SphereSpace> s2() { return std::make_shared<const SphereSpace>(2); }

DrivingCurve meridian(std::shared_ptr<const SphereSpace> s, double b) {
  return {0.0, b,
          [s](double t) {
            Vector v(3);
            v << std::sin(t), 0, std::cos(t);
            return s->normalized(v);
          },
          1.0};
}

Point pole(const SphereSpace& s) { return s.normalized(Vector::Unit(3, 2)); }

}  // namespace

TEST(TractrixFlow, OneDimensionalDragIsExact) {
  auto e = line();
  const auto traj = tractrix_flow(e, identity_curve(e, 5.0), {1.0, 1e-2}, at(*e, 0.0));
  for (std::size_t i = 0; i < traj.size(); ++i)
    EXPECT_NEAR(traj.points[i][0], std::max(0.0, traj.times[i] - 1.0), 1e-12) << traj.times[i];
}

TEST(TractrixFlow, StationaryCurveFixesTheStart) {
  auto s = s2();
  Vector v(3);
  v << 0.3, 0.2, 1.0;
  const Point x = s->normalized(v);
  const auto traj = tractrix_flow(s, stationary_curve(pole(*s), 0.0, 1.0), {1.0, 1e-2}, x);
  for (const auto& y : traj.points) EXPECT_EQ(y, x);
}

TEST(TractrixFlow, StartOutsideTheBallIsAPreconditionError) {
  auto e = line();
  try {
    tractrix_flow(e, identity_curve(e, 1.0), {0.5, 1e-2}, at(*e, 2.0));
    FAIL();
  } catch (const PreconditionError& err) {
    EXPECT_NE(err.witness().find("distance"), std::string::npos);
  }
}

TEST(TractrixFlow, RejectsBadConfiguration) {
  auto e = line();
  EXPECT_THROW(tractrix_flow(e, identity_curve(e, 1.0), {0.0, 1e-2}, at(*e, 0.0)), UsageError);
  EXPECT_THROW(tractrix_flow(e, identity_curve(e, 1.0), {kPi, 1e-2}, at(*e, 0.0)), UsageError);
  EXPECT_THROW(tractrix_flow(e, identity_curve(e, 1.0), {1.0, 0.0}, at(*e, 0.0)), UsageError);
  EXPECT_THROW(tractrix_flow(e, identity_curve(e, 1.0), {1.0, 1e-2}, at(*e, 0.0), 2.0), UsageError);
}

TEST(TractrixFlow, StaysInTheMovingBallAndIsOneLipschitz) {
  auto s = s2();
  const auto g = meridian(s, kPi / 2);
  Rng rng(11);
  for (int i = 0; i < 10; ++i) {
    const Point x = sample_cap(*s, pole(*s), kPi / 2, rng);
    const auto traj = tractrix_flow(s, g, {kPi / 2, 1e-3}, x);
    for (std::size_t j = 0; j < traj.size(); ++j)
      EXPECT_LE(s->distance(traj.points[j], g(traj.times[j])), kPi / 2 + 1e-12);
    EXPECT_LE(traj.lipschitz_excess(1.0), 1e-12);
  }
}

TEST(TractrixFlow, GradientSchemeAgreesOnTheLine) {
  auto e = line();
  const double delta = 1e-3;
  const auto g = identity_curve(e, 3.0);
  const auto a = tractrix_flow(e, g, {1.0, delta}, at(*e, -0.5));
  const auto b = tractrix_flow_gradient(e, g, {1.0, delta}, at(*e, -0.5));
  EXPECT_LE(sup_deviation(a, b), 4 * delta);
}

TEST(TractrixFlow, GradientSchemeConvergesToTheSameCurveOnTheSphere) {
  auto s = s2();
  const auto g = meridian(s, kPi / 2);
  Vector v(3);
  v << -0.5, 0.6, 0.6;  // dragged from the first step
  const Point x = s->normalized(v);
  std::vector<double> dev;
  for (double delta : {4e-3, 2e-3, 1e-3}) {
    const auto a = tractrix_flow(s, g, {kPi / 2, delta}, x);
    const auto b = tractrix_flow_gradient(s, g, {kPi / 2, delta}, x);
    dev.push_back(sup_deviation(a, b));
    EXPECT_LE(dev.back(), 10 * delta);
  }
  EXPECT_LT(dev.back(), dev.front());
}

TEST(TractrixFlow, GradientSchemeNeedsExpLog) {
  auto k = std::make_shared<const IntervalSpace>(0.0, 1.0);
  const auto cone = spherical_cone(k);
  const Point x = cone.at(k->at(0.5), 0.3);
  EXPECT_THROW(tractrix_flow_gradient(cone.space(), stationary_curve(x, 0, 1), {1.0, 1e-2}, x), CapabilityError);
}

TEST(FlowMap, AtTheStartTimeIsTheIdentityOnTheBall) {
  auto s = s2();
  const auto m = flow_map(s, meridian(s, 1.0), {1.0, 1e-2}, 0.0);
  Vector v(3);
  v << 0.2, 0.1, 1.0;
  const Point x = s->normalized(v);
  EXPECT_EQ(m(x), x);
  EXPECT_THROW(m(s->normalized(Vector::Unit(3, 0))), PreconditionError);
  EXPECT_THROW(flow_map(s, meridian(s, 1.0), {1.0, 1e-2}, 1.5), UsageError);
}

TEST(FlowMap, BatchMatchesPointwiseBitwise) {
  auto s = s2();
  const auto m = flow_map(s, meridian(s, kPi / 2), {kPi / 2, 1e-2}, kPi / 2);
  Rng rng(12);
  std::vector<Point> xs;
  for (int i = 0; i < 20; ++i) xs.push_back(sample_cap(*s, pole(*s), kPi / 2, rng));
  const auto batch = m.apply(xs);
  for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_EQ(batch[i].coords(), m(xs[i]).coords());
}

TEST(FlowMap, ImageLiesInTheFinalBall) {
  auto s = s2();
  const auto g = meridian(s, 1.2);
  const auto m = flow_map(s, g, {0.8, 1e-2}, 1.2);
  Rng rng(13);
  for (int i = 0; i < 50; ++i)
    EXPECT_LE(s->distance(m(sample_cap(*s, pole(*s), 0.8, rng)), g(1.2)), 0.8 + 1e-12);
}

// The discrete flow is short up to an O(delta) excess.
TEST(FlowMap, SampledLipschitzRatioNearOne) {
  auto s = s2();
  const auto m = flow_map(s, meridian(s, kPi / 2), {kPi / 2, 1e-2}, kPi / 2);
  Rng rng(14);
  const auto pairs = sample_cap_pairs(*s, pole(*s), kPi / 2, 200, 100, 1e-2, rng);
  const auto rep = estimate_lipschitz(*s, [&](const std::vector<Point>& xs) { return m.apply(xs); }, pairs);
  EXPECT_LE(rep.max_ratio, 1.0 + 1e-2);
}

TEST(EstimateLipschitz, IdentityHasRatioOneAndZeroDisplacement) {
  auto s = s2();
  Rng rng(15);
  const auto pairs = sample_cap_pairs(*s, pole(*s), 1.0, 50, 25, 1e-3, rng);
  const auto rep = estimate_lipschitz(*s, batched([](const Point& x) { return x; }), pairs);
  ASSERT_EQ(rep.rows.size(), 50u);
  for (const auto& r : rep.rows) {
    EXPECT_DOUBLE_EQ(r.ratio, 1.0);
    EXPECT_EQ(r.displacement, 0.0);
  }
  EXPECT_EQ(rep.fitted_epsilon, 0.0);
  EXPECT_TRUE(rep.bins_nonincreasing(0.0));
}

TEST(EstimateLipschitz, HalvingMapHasRatioOneHalf) {
  auto r3 = std::make_shared<const EuclideanSpace>(3);
  Rng rng(16);
  SamplePairs pairs;
  for (int i = 0; i < 40; ++i) {
    pairs.x.push_back(r3->make_point(rng.normal_vector(3)));
    pairs.y.push_back(r3->make_point(rng.normal_vector(3)));
  }
  const auto rep =
      estimate_lipschitz(*r3, batched([r3](const Point& x) { return r3->make_point(0.5 * x.coords()); }), pairs);
  for (const auto& r : rep.rows) EXPECT_NEAR(r.ratio, 0.5, 1e-14);
  EXPECT_NEAR(rep.max_ratio, 0.5, 1e-14);
}

TEST(EstimateLipschitz, SkipsCoincidentPairsAndRejectsUnpaired) {
  auto r3 = std::make_shared<const EuclideanSpace>(3);
  const Point x = r3->make_point(Vector::Ones(3));
  SamplePairs pairs{{x, x}, {x, r3->make_point(Vector::Zero(3))}};
  const auto rep = estimate_lipschitz(*r3, batched([](const Point& p) { return p; }), pairs);
  EXPECT_EQ(rep.skipped, 1u);
  EXPECT_EQ(rep.rows.size(), 1u);
  pairs.y.pop_back();
  EXPECT_THROW(estimate_lipschitz(*r3, batched([](const Point& p) { return p; }), pairs), UsageError);
}

TEST(EstimateLipschitz, BootstrapIsSeededAndBracketsTheFit) {
  auto s = s2();
  // Pulling toward the pole contracts every pair.
  const Point c = pole(*s);
  auto pull = batched([s, c](const Point& x) { return s->geodesic_point(c, x, 0.9); });
  Rng rng(17);
  const auto pairs = sample_cap_pairs(*s, c, 1.0, 200, 0, 1e-3, rng);
  LipschitzOptions opt{8, 200, 99};
  const auto a = estimate_lipschitz(*s, pull, pairs, opt);
  const auto b = estimate_lipschitz(*s, pull, pairs, opt);
  EXPECT_EQ(a.ci_low, b.ci_low);
  EXPECT_EQ(a.ci_high, b.ci_high);
  EXPECT_LE(a.ci_low, a.fitted_epsilon);
  EXPECT_GE(a.ci_high, a.fitted_epsilon);
  EXPECT_GT(a.fitted_epsilon, 0.0);
}

TEST(EstimateLipschitz, CsvHasOneRowPerPair) {
  auto r3 = std::make_shared<const EuclideanSpace>(3);
  SamplePairs pairs{{r3->make_point(Vector::Zero(3))}, {r3->make_point(Vector::Ones(3))}};
  std::ostringstream out;
  estimate_lipschitz(*r3, batched([](const Point& p) { return p; }), pairs).write_csv(out);
  EXPECT_EQ(out.str(), "pair,d_before,d_after,ratio,displacement\n0,1.7320508075688772,1.7320508075688772,1,0\n");
}
