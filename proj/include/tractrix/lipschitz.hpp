#pragma once

#include "tractrix/parallel.hpp"
#include "tractrix/random.hpp"
#include "tractrix/space.hpp"
#include "tractrix/stats.hpp"
#include "tractrix/trajectory.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <ostream>

namespace tractrix {

using PointMap = std::function<Point(const Point&)>;
using BatchMap = std::function<std::vector<Point>(const std::vector<Point>&)>;

// Applies a pointwise map over a batch in parallel chunks.
inline BatchMap batched(PointMap f) {
  return [f = std::move(f)](const std::vector<Point>& xs) {
    std::vector<Point> out(xs.size());
    parallel_for_chunks(xs.size(), [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) out[i] = f(xs[i]);
    });
    return out;
  };
}

struct SamplePairs {
  std::vector<Point> x;
  std::vector<Point> y;
};

struct LipschitzRow {
  std::size_t pair;
  double d_before;
  double d_after;
  double ratio;
  double displacement;  // smaller of d(x, f x) and d(y, f y)
};

struct RatioBin {
  double lo;
  double hi;
  std::size_t count = 0;
  double max_ratio = 0.0;
};

struct LipschitzReport {
  std::vector<LipschitzRow> rows;
  std::vector<RatioBin> bins;
  std::size_t skipped = 0;
  double max_ratio = 0.0;
  std::size_t worst_pair = 0;
  double fitted_epsilon = 0.0;  // least squares log(ratio) ~ -eps * displacement
  double ci_low = 0.0;
  double ci_high = 0.0;

  void write_csv(std::ostream& out) const {
    out << "pair,d_before,d_after,ratio,displacement\n";
    for (const auto& r : rows)
      out << r.pair << ',' << format_double(r.d_before) << ',' << format_double(r.d_after) << ','
          << format_double(r.ratio) << ',' << format_double(r.displacement) << '\n';
  }

  nlohmann::ordered_json summary() const {
    nlohmann::ordered_json j;
    j["pairs"] = rows.size();
    j["skipped"] = skipped;
    j["max_ratio"] = max_ratio;
    j["worst_pair"] = worst_pair;
    j["fitted_epsilon"] = fitted_epsilon;
    j["ci_low"] = ci_low;
    j["ci_high"] = ci_high;
    auto& b = j["bins"] = nlohmann::ordered_json::array();
    for (const auto& bin : bins)
      b.push_back({{"lo", bin.lo}, {"hi", bin.hi}, {"count", bin.count}, {"max_ratio", bin.max_ratio}});
    return j;
  }

  // Bin maxima never rise by more than `slack` from one nonempty bin to the next.
  bool bins_nonincreasing(double slack) const {
    double prev = kInf;
    for (const auto& b : bins) {
      if (b.count == 0) continue;
      if (b.max_ratio > prev + slack) return false;
      prev = b.max_ratio;
    }
    return true;
  }
};

struct LipschitzOptions {
  int bins = 8;
  int bootstrap = 0;  // resamples for the confidence interval of epsilon
  std::uint64_t seed = 0;
};

namespace detail {

inline double through_origin_slope(const std::vector<LipschitzRow>& rows, const std::vector<std::size_t>& idx) {
  double num = 0.0, den = 0.0;
  for (std::size_t i : idx) {
    num += rows[i].displacement * std::log(rows[i].ratio);
    den += rows[i].displacement * rows[i].displacement;
  }
  return den > 0.0 ? -num / den : 0.0;
}

}  // namespace detail

// Ratios d(f x, f y) / d(x, y) over sampled pairs. Pairs closer than the
// space's resolution are skipped and counted.
inline LipschitzReport estimate_lipschitz(const MetricSpace& space, const BatchMap& f, const SamplePairs& pairs,
                                          LipschitzOptions opt = {}) {
  if (pairs.x.size() != pairs.y.size()) throw UsageError("estimate_lipschitz: unpaired samples");
  const auto fx = f(pairs.x);
  const auto fy = f(pairs.y);
  LipschitzReport rep;
  const double res = space.policy().resolution;
  for (std::size_t i = 0; i < pairs.x.size(); ++i) {
    const double d0 = space.distance(pairs.x[i], pairs.y[i]);
    if (d0 < res) {
      ++rep.skipped;
      continue;
    }
    const double d1 = space.distance(fx[i], fy[i]);
    const double disp = std::min(space.distance(pairs.x[i], fx[i]), space.distance(pairs.y[i], fy[i]));
    rep.rows.push_back({i, d0, d1, d1 / d0, disp});
    if (d1 / d0 > rep.max_ratio) {
      rep.max_ratio = d1 / d0;
      rep.worst_pair = i;
    }
  }
  if (rep.rows.empty()) return rep;

  double top = 0.0;
  for (const auto& r : rep.rows) top = std::max(top, r.displacement);
  const int nb = std::max(1, opt.bins);
  for (int b = 0; b < nb; ++b) rep.bins.push_back({top * b / nb, top * (b + 1) / nb});
  for (const auto& r : rep.rows) {
    auto b = top > 0.0 ? static_cast<int>(r.displacement / top * nb) : 0;
    b = std::clamp(b, 0, nb - 1);
    rep.bins[b].count++;
    rep.bins[b].max_ratio = std::max(rep.bins[b].max_ratio, r.ratio);
  }

  std::vector<std::size_t> all(rep.rows.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  rep.fitted_epsilon = detail::through_origin_slope(rep.rows, all);
  rep.ci_low = rep.ci_high = rep.fitted_epsilon;
  if (opt.bootstrap > 0) {
    Rng rng(opt.seed);
    std::vector<double> est;
    std::vector<std::size_t> idx(all.size());
    for (int b = 0; b < opt.bootstrap; ++b) {
      for (auto& k : idx) k = rng.below(all.size());
      est.push_back(detail::through_origin_slope(rep.rows, idx));
    }
    rep.ci_low = quantile(est, 0.025);
    rep.ci_high = quantile(est, 0.975);
  }
  return rep;
}

}  // namespace tractrix
