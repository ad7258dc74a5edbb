#include "tractrix/all.hpp"
#include "tractrix/harness/commands.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>

using namespace tractrix;
using namespace tractrix::harness;

namespace {

namespace fs = std::filesystem;

Config parse(const std::string& text) {
  std::istringstream in(text);
  return Config::parse(in);
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("tractrix_unit_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class Quiet : public ::testing::Test {
 protected:
  void SetUp() override { setenv("TRACTRIX_VERBOSE", "0", 1); }
};

}  // namespace

TEST(Config, ParsesNumbersListsAndSymbols) {
  const auto c = parse("# comment\n r = pi/2 \ndeltas = 1e-2, 5e-3\n\nmesh = pi/200\ncorrupt = yes\nseed=12\n");
  EXPECT_DOUBLE_EQ(c.num("r", 0), kPi / 2);
  EXPECT_DOUBLE_EQ(c.num("mesh", 0), kPi / 200);
  EXPECT_EQ(c.list("deltas"), (std::vector<double>{1e-2, 5e-3}));
  EXPECT_TRUE(c.flag("corrupt", false));
  EXPECT_EQ(c.integer("seed", 0), 12u);
  EXPECT_EQ(c.num("delta", 0.25), 0.25);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(parse("radious = 2\n"), ConfigError);
  EXPECT_THROW(parse("just words\n"), ConfigError);
  EXPECT_THROW(parse("r = fast\n").num("r", 0), ConfigError);
  EXPECT_THROW(parse("seed = -3\n").integer("seed", 0), ConfigError);
  EXPECT_THROW(parse("relax = maybe\n").flag("relax", false), ConfigError);
}

TEST(Config, CanonicalFormIsOrderIndependent) {
  EXPECT_EQ(parse("r = 1\ndelta = 2\n").canonical(), parse("delta = 2\nr = 1\n").canonical());
  auto c = parse("delta = 2\n");
  c.set("delta", "3");
  EXPECT_EQ(c.canonical(), "delta=3\n");
  c.set("out", "/tmp/elsewhere");
  EXPECT_EQ(c.canonical(), "delta=3\n");
}

TEST(Hash, KnownFnv1aValues) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(hex64(0xabcULL), "0000000000000abc");
}

TEST(Svg, ContainsBothPolylines) {
  auto e = std::make_shared<const EuclideanSpace>(2);
  Trajectory a, b;
  a.space = b.space = e;
  for (int i = 0; i < 5; ++i) {
    a.push(i, e->make_point(Vector::Constant(2, i)));
    b.push(i, e->make_point(Vector::Constant(2, -i)));
  }
  std::ostringstream out;
  write_trajectory_svg(out, a, b);
  const auto svg = out.str();
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  std::size_t count = 0;
  for (auto pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1)) ++count;
  EXPECT_EQ(count, 2u);
}

TEST_F(Quiet, RunCommandWritesArtifactsAndPasses) {
  const auto dir = scratch("run");
  auto c = parse("backend = line\ncurve = line\ncurve_b = 5\nr = 1\ndelta = 1e-3\nstart = 0\ndeltas = 1e-2, 5e-3\n");
  c.set("out", dir.string());
  EXPECT_EQ(cmd_run(c), kPass);
  for (const char* f : {"trajectory.csv", "plot.svg", "convergence.csv", "manifest.json"}) EXPECT_TRUE(fs::exists(dir / f)) << f;
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  EXPECT_TRUE(manifest["all_pass"].get<bool>());
  EXPECT_EQ(manifest["rng"], Rng::algorithm);
  EXPECT_NEAR(manifest["results"]["terminal"][0].get<double>(), 4.0, 1e-9);
  fs::remove_all(dir);
}

TEST_F(Quiet, RunCommandRejectsStartOutsideTheBall) {
  auto c = parse("backend = line\ncurve = line\nr = 1\nstart = 3\n");
  c.set("out", scratch("outside").string());
  EXPECT_THROW(cmd_run(c), PreconditionError);
}

TEST_F(Quiet, RunCommandIsDeterministic) {
  const auto a = scratch("det_a"), b = scratch("det_b");
  for (const auto& dir : {a, b}) {
    auto c = parse("backend = sphere\ndelta = 1e-2\nstart = 0.3, 0.4, 0.8660254037844386\n");
    c.set("out", dir.string());
    ASSERT_EQ(cmd_run(c), kPass);
  }
  EXPECT_EQ(slurp(a / "trajectory.csv"), slurp(b / "trajectory.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_F(Quiet, FlowCommandFlagsCorruptedTrajectories) {
  const std::string base =
      "backend = line\ndim = 1\nfamily = tractrix\ncurve = line\ncurve_b = 5\nr = 1\ndelta = 1e-3\nstart = 0\n"
      "start_b = 0.5\n";
  auto clean = parse(base);
  clean.set("out", scratch("flow_clean").string());
  EXPECT_EQ(cmd_flow(clean), kPass);
  auto bad = parse(base + "corrupt = true\n");
  bad.set("out", scratch("flow_bad").string());
  EXPECT_EQ(cmd_flow(bad), kCheckFailed);
}

TEST_F(Quiet, RetractCommandConePipeline) {
  const auto dir = scratch("retract");
  auto c = parse("pipeline = cone\nsamples = 200\nmesh = pi/200\n");
  c.set("out", dir.string());
  EXPECT_EQ(cmd_retract(c), kPass);
  const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  EXPECT_EQ(summary["retraction_tol_formula"], "1e-9");
  EXPECT_LE(summary["max_ratio"].get<double>(), 1.0 + 1e-6);
  fs::remove_all(dir);
}

TEST(Suite, LineOracleCriterionPasses) {
  SuiteOptions o;
  o.out = scratch("c1");
  const auto r = criterion_line_oracle(o);
  EXPECT_TRUE(r.pass) << r.detail;
  fs::remove_all(*o.out);
}

TEST(Suite, TighterToleranceScaleFailsTheDistanceEstimate) {
  SuiteOptions o;
  o.out = scratch("c5");
  o.tolerance_scale = 0.1;
  EXPECT_FALSE(criterion_distance_estimate(o).pass);
  o.tolerance_scale = 1.0;
  EXPECT_TRUE(criterion_distance_estimate(o).pass);
  fs::remove_all(*o.out);
}

TEST(Suite, ManifestKeysAreOrderedAndTimingSeparate) {
  SuiteOptions o;
  CriterionResult r{1, "x", true, 0.0, "<=", 1.0, "", 0.5, 1.0};
  const auto m = make_manifest({r}, o, "abc");
  std::vector<std::string> keys;
  for (const auto& [k, v] : m.items()) keys.push_back(k);
  EXPECT_EQ(keys.front(), "tool");
  EXPECT_TRUE(m.contains("timing"));
  EXPECT_TRUE(m["all_pass"].get<bool>());
  EXPECT_FALSE(m["checks"][0].contains("seconds"));
}
