#pragma once

// Seeded percentile bootstrap for arm1 - arm0 differences of the summary
// measures. Arms are resampled independently with replacement; resample r
// draws from RNG stream (seed, r, attempt), so results do not depend on the
// worker count.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "survmed/composite.hpp"
#include "survmed/error.hpp"
#include "survmed/parallel.hpp"
#include "survmed/rng.hpp"

namespace survmed {

struct Statistic {
  enum class Kind { SimMedian, SurvivorMedian, SurvivalProb, ProbAliveAbove };
  Kind kind = Kind::SurvivalProb;
  double threshold = 0.0; // ProbAliveAbove only

  static Statistic sim_median() { return {Kind::SimMedian}; }
  static Statistic survivor_median() { return {Kind::SurvivorMedian}; }
  static Statistic survival_prob() { return {Kind::SurvivalProb}; }
  static Statistic prob_alive_above(double t) { return {Kind::ProbAliveAbove, t}; }

  std::string_view name() const noexcept {
    switch (kind) {
    case Kind::SimMedian: return "sim_median";
    case Kind::SurvivorMedian: return "survivor_median";
    case Kind::SurvivalProb: return "survival_prob";
    case Kind::ProbAliveAbove: return "prob_alive_above";
    }
    return "";
  }

  static std::optional<Kind> parse(std::string_view s) {
    for (auto k : {Kind::SimMedian, Kind::SurvivorMedian, Kind::SurvivalProb,
                   Kind::ProbAliveAbove})
      if (Statistic{k}.name() == s) return k;
    return std::nullopt;
  }
};

struct BootstrapResult {
  double point_estimate = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  double level = 0.95;
  std::size_t n_resamples = 0;
  std::size_t n_death_median_resamples = 0;
  std::uint64_t seed = 0;
  double sentinel = 0.0;
  std::size_t n_redraws = 0;
};

struct BootstrapOptions {
  std::size_t n_resamples = 2000;
  double level = 0.95;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  /// Death code for median statistics; defaults to (min survivor score) - 1.
  std::optional<double> sentinel;
  /// Cap on zero-survivor redraws for survivor_median; 0 means 10 * n_resamples.
  std::size_t redraw_budget = 0;
};

namespace detail {

// One arm, sorted ascending under the composite order and sentinel-encoded.
struct EncodedArm {
  std::vector<double> values;
  std::vector<char> dead;
  std::size_t deaths = 0;

  EncodedArm(const ArmSample& s, double sentinel)
      : values(sentinel_encode(s, sentinel)) {
    std::sort(values.begin(), values.end());
    dead.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      // Sentinel sits strictly below every survivor score.
      dead[i] = values[i] == sentinel && i < s.deaths();
      deaths += static_cast<std::size_t>(dead[i]);
    }
  }
  std::size_t size() const noexcept { return values.size(); }
};

struct ArmStat {
  double value = 0.0;
  bool death_median = false;
  bool no_survivors = false;
};

// Evaluates the statistic from per-position multiplicities `counts`
// (which sum to the arm size).
inline ArmStat arm_statistic(const EncodedArm& arm,
                             const std::vector<std::uint32_t>& counts,
                             const Statistic& stat) {
  const std::size_t n = arm.size();
  ArmStat out;
  std::size_t survivors = 0;
  for (std::size_t i = arm.deaths; i < n; ++i) survivors += counts[i];
  switch (stat.kind) {
  case Statistic::Kind::SurvivalProb:
    out.value = static_cast<double>(survivors) / static_cast<double>(n);
    break;
  case Statistic::Kind::ProbAliveAbove: {
    std::size_t above = 0;
    for (std::size_t i = arm.deaths; i < n; ++i)
      if (arm.values[i] > stat.threshold) above += counts[i];
    out.value = static_cast<double>(above) / static_cast<double>(n);
    break;
  }
  case Statistic::Kind::SimMedian: {
    const std::size_t k = type1_index(0.5, n);
    std::size_t cum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      cum += counts[i];
      if (cum >= k) {
        out.value = arm.values[i];
        out.death_median = arm.dead[i] != 0;
        break;
      }
    }
    break;
  }
  case Statistic::Kind::SurvivorMedian: {
    if (survivors == 0) {
      out.no_survivors = true;
      break;
    }
    const std::size_t k = type1_index(0.5, survivors);
    std::size_t cum = 0;
    for (std::size_t i = arm.deaths; i < n; ++i) {
      cum += counts[i];
      if (cum >= k) {
        out.value = arm.values[i];
        break;
      }
    }
    break;
  }
  }
  return out;
}

inline void resample_counts(const EncodedArm& arm, Xoshiro256& rng,
                            std::vector<std::uint32_t>& counts) {
  counts.assign(arm.size(), 0);
  for (std::size_t i = 0; i < arm.size(); ++i) ++counts[rng.below(arm.size())];
}

} // namespace detail

inline BootstrapResult bootstrap_diff_ci(const ArmSample& sample0,
                                         const ArmSample& sample1,
                                         const Statistic& stat,
                                         const BootstrapOptions& opt) {
  if (opt.n_resamples < 1) throw ValidationError("n_resamples must be >= 1");
  if (!(opt.level > 0.0 && opt.level < 1.0))
    throw ValidationError("level must lie in (0, 1)");
  if (stat.kind == Statistic::Kind::ProbAliveAbove && !std::isfinite(stat.threshold))
    throw ValidationError("threshold must be finite");
  if (stat.kind == Statistic::Kind::SurvivorMedian &&
      (sample0.survivors() == 0 || sample1.survivors() == 0))
    throw ValidationError("no survivors in sample");

  double sentinel = -1.0;
  if (opt.sentinel) {
    sentinel = *opt.sentinel;
  } else {
    auto m0 = sample0.min_survivor_score(), m1 = sample1.min_survivor_score();
    if (m0 || m1)
      sentinel = std::min(m0.value_or(*m1), m1.value_or(*m0)) - 1.0;
  }
  const detail::EncodedArm arm0(sample0, sentinel), arm1(sample1, sentinel);

  BootstrapResult res;
  res.level = opt.level;
  res.n_resamples = opt.n_resamples;
  res.seed = opt.seed;
  res.sentinel = sentinel;
  {
    std::vector<std::uint32_t> c0(arm0.size(), 1), c1(arm1.size(), 1);
    res.point_estimate = detail::arm_statistic(arm1, c1, stat).value -
                         detail::arm_statistic(arm0, c0, stat).value;
  }

  const std::size_t budget =
      opt.redraw_budget > 0 ? opt.redraw_budget : 10 * opt.n_resamples;
  std::vector<double> diffs(opt.n_resamples);
  std::vector<char> death_median(opt.n_resamples, 0);
  std::vector<std::size_t> redraws(opt.n_resamples, 0);

  parallel_for_ranges(opt.n_resamples, opt.workers, [&](std::size_t b, std::size_t e) {
    std::vector<std::uint32_t> c0, c1;
    for (std::size_t r = b; r < e; ++r) {
      for (std::uint64_t attempt = 0;; ++attempt) {
        auto rng = Xoshiro256::stream(opt.seed, r, attempt);
        detail::resample_counts(arm0, rng, c0);
        detail::resample_counts(arm1, rng, c1);
        const auto s0 = detail::arm_statistic(arm0, c0, stat);
        const auto s1 = detail::arm_statistic(arm1, c1, stat);
        if (s0.no_survivors || s1.no_survivors) {
          if (++redraws[r] > budget) break;
          continue;
        }
        diffs[r] = s1.value - s0.value;
        death_median[r] = s0.death_median || s1.death_median;
        break;
      }
    }
  });

  for (auto r : redraws) res.n_redraws += r;
  if (res.n_redraws > budget)
    throw ValidationError("redraw budget exhausted: too many resamples without survivors");
  for (char d : death_median) res.n_death_median_resamples += d != 0;

  std::sort(diffs.begin(), diffs.end());
  const double alpha = 1.0 - opt.level;
  res.ci_lower = diffs[type1_index(alpha / 2.0, diffs.size()) - 1];
  res.ci_upper = diffs[type1_index(1.0 - alpha / 2.0, diffs.size()) - 1];
  return res;
}

} // namespace survmed
