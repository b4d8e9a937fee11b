#pragma once

// Direction-of-effects classification and the brute-force search for
// "trade-off illusions": one arm is better on survival and on survival with
// a good outcome, yet its median in the survivors is worse.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "survmed/composite.hpp"
#include "survmed/discrete.hpp"
#include "survmed/parallel.hpp"
#include "survmed/strata.hpp"

namespace survmed {

/// Score codes for two-category outcomes.
inline constexpr double kBadScore = 0.0;
inline constexpr double kGoodScore = 1.0;

struct ArmSummary {
  double p_survival = 0.0;
  double p_alive_above_threshold = 0.0;
  CompositeOutcome survival_incorporated_median = CompositeOutcome::death();
  std::optional<double> median_in_survivors;
  std::optional<double> median_in_always_survivors;
  /// Extra requested survival-incorporated quantiles as (q, value).
  std::vector<std::pair<double, CompositeOutcome>> quantiles;
  /// Sample size; 0 for population (scenario) summaries.
  std::size_t n = 0;
};

enum class DirectionClassification { Same, Opposite, Indeterminate };

inline const char* to_string(DirectionClassification d) noexcept {
  switch (d) {
  case DirectionClassification::Same: return "same";
  case DirectionClassification::Opposite: return "opposite";
  case DirectionClassification::Indeterminate: return "indeterminate";
  }
  return "";
}

struct ComparisonReport {
  ArmSummary arm0;
  ArmSummary arm1;
  DirectionClassification direction_survivor_median =
      DirectionClassification::Indeterminate;
  std::optional<DirectionClassification> direction_always_survivor_median;
  bool tradeoff_illusion_flag = false;
};

constexpr int sign(double x) noexcept { return (x > 0.0) - (x < 0.0); }

constexpr DirectionClassification classify_direction(double delta_survival,
                                                     double delta_measure) {
  const int a = sign(delta_survival);
  const int b = sign(delta_measure);
  if (a == 0 || b == 0) return DirectionClassification::Indeterminate;
  return a == b ? DirectionClassification::Same
                : DirectionClassification::Opposite;
}

/// Differences of probabilities within this band count as ties.
inline constexpr double kTieTolerance = 1e-12;

constexpr double snap(double delta) noexcept {
  return (delta > -kTieTolerance && delta < kTieTolerance) ? 0.0 : delta;
}

inline ComparisonReport compare_arms(ArmSummary arm0, ArmSummary arm1) {
  ComparisonReport r;
  const double d_surv = snap(arm1.p_survival - arm0.p_survival);
  const double d_good =
      snap(arm1.p_alive_above_threshold - arm0.p_alive_above_threshold);
  if (arm0.median_in_survivors && arm1.median_in_survivors)
    r.direction_survivor_median = classify_direction(
        d_surv, *arm1.median_in_survivors - *arm0.median_in_survivors);
  if (arm0.median_in_always_survivors && arm1.median_in_always_survivors)
    r.direction_always_survivor_median = classify_direction(
        d_surv,
        *arm1.median_in_always_survivors - *arm0.median_in_always_survivors);
  const bool dominates = sign(d_surv) != 0 && sign(d_surv) == sign(d_good);
  r.tradeoff_illusion_flag =
      dominates &&
      r.direction_survivor_median == DirectionClassification::Opposite;
  r.arm0 = std::move(arm0);
  r.arm1 = std::move(arm1);
  return r;
}

inline ArmSummary summarize_sample(const ArmSample& sample, double threshold,
                                   const std::vector<double>& levels = {}) {
  ArmSummary s;
  s.n = sample.size();
  s.p_survival = survival_probability(sample);
  s.p_alive_above_threshold = prob_alive_above(sample, threshold);
  s.survival_incorporated_median = survival_incorporated_median(sample);
  if (sample.survivors() > 0) s.median_in_survivors = median_in_survivors(sample);
  for (double q : levels)
    s.quantiles.emplace_back(
        q, survival_incorporated_quantile(sample, QuantileLevel(q)));
  return s;
}

inline ArmSummary summarize_population(const ObservedMarginals& m,
                                       double threshold,
                                       const std::vector<double>& levels = {}) {
  if (!std::isfinite(threshold))
    throw ValidationError("threshold must be finite");
  ArmSummary s;
  s.p_survival = m.p_survival;
  s.p_alive_above_threshold = m.survivor_mass.mass_above(threshold);
  s.survival_incorporated_median = population_quantile(m, 0.5);
  if (!m.survivors_empty()) s.median_in_survivors = type1_median(m.survivor_mass);
  for (double q : levels)
    s.quantiles.emplace_back(q, population_quantile(m, QuantileLevel(q).value()));
  return s;
}

inline ComparisonReport evaluate_scenario(const ScenarioSpec& raw,
                                          double good_threshold,
                                          const std::vector<double>& levels = {}) {
  const ScenarioSpec spec = checked_scenario(raw);
  std::array<ArmSummary, 2> arms;
  for (auto a : kArms) {
    auto& s = arms[static_cast<std::size_t>(arm_index(a))];
    s = summarize_population(observed_marginals(spec, a), good_threshold, levels);
    if (spec.proportion(StratumLabel::AlwaysSurvivor) > 0.0)
      s.median_in_always_survivors = always_survivor_median_oracle(spec, a);
  }
  return compare_arms(std::move(arms[0]), std::move(arms[1]));
}

struct TwoCategoryMarginals {
  double p_death = 0.0;
  double p_bad = 0.0;
  double p_good = 0.0;
  double p_survival() const noexcept { return p_bad + p_good; }
};

/// Principal-strata spec reproducing the given observed arms: always-survivors
/// take min(survival), the surplus survivors form the protected (or harmed)
/// stratum, and every surviving stratum under an arm shares that arm's
/// observed survivor distribution.
inline ScenarioSpec observed_pair_to_spec(const TwoCategoryMarginals& arm0,
                                          const TwoCategoryMarginals& arm1) {
  ScenarioSpec spec;
  const double s0 = arm0.p_survival(), s1 = arm1.p_survival();
  const double as = std::min(s0, s1);
  spec.set_proportion(StratumLabel::AlwaysSurvivor, as);
  spec.set_proportion(StratumLabel::Protected, std::max(0.0, s1 - s0));
  spec.set_proportion(StratumLabel::Harmed, std::max(0.0, s0 - s1));
  spec.set_proportion(StratumLabel::NeverSurvivor, 1.0 - std::max(s0, s1));
  spec.monotonicity_asserted = !(s0 > s1);
  auto dist = [](const TwoCategoryMarginals& m) {
    const double s = m.p_survival();
    return DiscreteDistribution{{{kBadScore, m.p_bad / s}, {kGoodScore, m.p_good / s}}};
  };
  for (auto st : kStrata)
    for (auto a : kArms) {
      const auto& m = a == Arm::Control ? arm0 : arm1;
      if (survives(st, a) && spec.proportion(st) > 0.0)
        spec.scores[{st, a}] = dist(m);
    }
  return spec;
}

/// Feasible range of P(always-survivor, good under arm 1) when the arms are
/// extended to a monotone strata spec.
inline std::pair<double, double>
monotone_good_allocation_range(const TwoCategoryMarginals& arm0,
                               const TwoCategoryMarginals& arm1) {
  const double s0 = arm0.p_survival(), s1 = arm1.p_survival();
  return {std::max(0.0, arm1.p_good - std::max(0.0, snap(s1 - s0))),
          std::min(arm1.p_good, s0)};
}

/// Monotone extension: always-survivors = survivors under arm 0; under arm 1
/// the always-survivors carry `as_good_arm1` of the good mass and the
/// protected carry the rest.
inline ScenarioSpec extend_to_monotone(const TwoCategoryMarginals& arm0,
                                       const TwoCategoryMarginals& arm1,
                                       double as_good_arm1) {
  const double s0 = arm0.p_survival(), s1 = arm1.p_survival();
  if (s1 < s0 - kSumTolerance)
    throw ValidationError("monotone extension needs survival(1) >= survival(0)");
  const auto [lo, hi] = monotone_good_allocation_range(arm0, arm1);
  if (as_good_arm1 < lo - kSumTolerance || as_good_arm1 > hi + kSumTolerance)
    throw ValidationError("always-survivor good allocation outside feasible range");
  // Clamp rounding residue so no cell probability goes negative.
  auto nonneg = [](double x) { return std::max(0.0, x); };
  ScenarioSpec spec;
  spec.monotonicity_asserted = true;
  const double prot = nonneg(snap(s1 - s0));
  const double g = std::clamp(as_good_arm1, lo, hi);
  spec.set_proportion(StratumLabel::AlwaysSurvivor, s0);
  spec.set_proportion(StratumLabel::Protected, prot);
  spec.set_proportion(StratumLabel::NeverSurvivor, nonneg(1.0 - s0 - prot));
  if (s0 > 0.0) {
    spec.scores[{StratumLabel::AlwaysSurvivor, Arm::Control}] = {
        {{kGoodScore, arm0.p_good / s0}, {kBadScore, arm0.p_bad / s0}}};
    spec.scores[{StratumLabel::AlwaysSurvivor, Arm::Treated}] = {
        {{kGoodScore, g / s0}, {kBadScore, nonneg(s0 - g) / s0}}};
  }
  if (prot > 0.0) {
    const double pg = nonneg(arm1.p_good - g);
    spec.scores[{StratumLabel::Protected, Arm::Treated}] = {
        {{kGoodScore, pg / prot}, {kBadScore, nonneg(prot - pg) / prot}}};
  }
  return spec;
}

// ---------------------------------------------------------------------------
// Grid search

/// One arm of a grid point, in integer grid units summing to `units`.
struct GridArm {
  int deaths = 0;
  int bad = 0;
  int good = 0;
  friend bool operator==(const GridArm&, const GridArm&) = default;
  friend auto operator<=>(const GridArm&, const GridArm&) = default;
};

struct GridScenario {
  int units = 1;
  GridArm arm0;
  GridArm arm1;

  TwoCategoryMarginals marginals(Arm a) const noexcept {
    const GridArm& g = a == Arm::Control ? arm0 : arm1;
    const double k = units;
    return {g.deaths / k, g.bad / k, g.good / k};
  }
  ScenarioSpec to_spec() const {
    return observed_pair_to_spec(marginals(Arm::Control), marginals(Arm::Treated));
  }
  friend bool operator==(const GridScenario&, const GridScenario&) = default;
};

/// How many sampled monotone allocations of arm 1's good survivors make the
/// always-survivor median point opposite to survival.
struct MonotoneSweep {
  int opposite = 0;
  int total = 0;
};

struct TradeoffHit {
  GridScenario scenario;
  ComparisonReport report;
  std::optional<MonotoneSweep> always_survivor_sweep;
};

struct SearchOptions {
  double grid_step = 0.01;
  double good_threshold = 0.5;
  std::optional<double> min_survival;
  unsigned workers = 1;
  /// Evenly spaced points on the feasible monotone allocation segment.
  int sweep_points = 11;
};

/// Number of grid units per unit mass; throws unless 0 < step <= 0.5 and
/// 1/step is an integer.
inline int grid_units(double step) {
  if (!(step > 0.0 && step <= 0.5))
    throw ValidationError("grid_step must lie in (0, 0.5]");
  const double k = std::round(1.0 / step);
  if (std::fabs(k * step - 1.0) > 1e-9)
    throw ValidationError("grid_step must divide 1 evenly");
  return static_cast<int>(k);
}

/// All arm compositions of the grid in lexicographic (deaths, bad) order.
inline std::vector<GridArm> grid_arms(int units) {
  std::vector<GridArm> v;
  for (int d = 0; d <= units; ++d)
    for (int b = 0; b <= units - d; ++b) v.push_back({d, b, units - d - b});
  return v;
}

inline ArmSummary summarize_two_category(const TwoCategoryMarginals& m,
                                         double threshold) {
  ObservedMarginals om;
  om.p_death = m.p_death;
  om.p_survival = m.p_survival();
  if (m.p_bad > 0.0) om.survivor_mass.atoms.push_back({kBadScore, m.p_bad});
  if (m.p_good > 0.0) om.survivor_mass.atoms.push_back({kGoodScore, m.p_good});
  return summarize_population(om, threshold);
}

inline std::optional<MonotoneSweep>
sweep_monotone_extensions(const TwoCategoryMarginals& arm0,
                          const TwoCategoryMarginals& arm1,
                          const ComparisonReport& observed, int points) {
  const double s0 = arm0.p_survival(), s1 = arm1.p_survival();
  if (!(s0 > 0.0) || snap(s1 - s0) < 0.0 || points < 1 || !observed.arm0.median_in_survivors)
    return std::nullopt;
  const auto [lo, hi] = monotone_good_allocation_range(arm0, arm1);
  const double d_surv = snap(s1 - s0);
  // Under monotonicity arm 0's always-survivors are all of its survivors.
  const double as_median0 = *observed.arm0.median_in_survivors;
  MonotoneSweep sweep;
  for (int i = 0; i < points; ++i) {
    const double g = points == 1 ? lo : lo + (hi - lo) * i / (points - 1);
    const double bad_share = (s0 - g) / s0;
    const double as_median1 = bad_share >= 0.5 - kCdfTolerance ? kBadScore : kGoodScore;
    ++sweep.total;
    if (classify_direction(d_surv, as_median1 - as_median0) ==
        DirectionClassification::Opposite)
      ++sweep.opposite;
  }
  return sweep;
}

/// Streams every flagged grid point to `visit` in lexicographic order of
/// (arm0, arm1) compositions. Work is split across workers in blocks of arm-0
/// compositions and merged in order, so output is worker-independent.
inline void for_each_tradeoff_illusion(
    const SearchOptions& opt, const std::function<void(const TradeoffHit&)>& visit) {
  const int units = grid_units(opt.grid_step);
  if (!std::isfinite(opt.good_threshold))
    throw ValidationError("threshold must be finite");
  if (opt.min_survival && !(*opt.min_survival >= 0.0 && *opt.min_survival <= 1.0))
    throw ValidationError("min_survival must lie in [0, 1]");

  std::vector<GridArm> arms;
  std::vector<ArmSummary> summaries;
  for (const auto& g : grid_arms(units)) {
    const TwoCategoryMarginals m{g.deaths / double(units), g.bad / double(units),
                                 g.good / double(units)};
    if (opt.min_survival && m.p_survival() < *opt.min_survival - kTieTolerance)
      continue;
    arms.push_back(g);
    summaries.push_back(summarize_two_category(m, opt.good_threshold));
  }

  const std::size_t n = arms.size();
  const std::size_t block = std::max<std::size_t>(1, 8 * std::max(1u, opt.workers));
  for (std::size_t start = 0; start < n; start += block) {
    const std::size_t stop = std::min(n, start + block);
    std::vector<std::vector<TradeoffHit>> per_row(stop - start);
    parallel_for_ranges(stop - start, opt.workers, [&](std::size_t b, std::size_t e) {
      for (std::size_t r = b; r < e; ++r) {
        const std::size_t i = start + r;
        for (std::size_t j = 0; j < n; ++j) {
          auto rep = compare_arms(summaries[i], summaries[j]);
          if (!rep.tradeoff_illusion_flag) continue;
          TradeoffHit hit{GridScenario{units, arms[i], arms[j]}, std::move(rep), {}};
          hit.always_survivor_sweep = sweep_monotone_extensions(
              hit.scenario.marginals(Arm::Control),
              hit.scenario.marginals(Arm::Treated), hit.report, opt.sweep_points);
          per_row[r].push_back(std::move(hit));
        }
      }
    });
    for (const auto& row : per_row)
      for (const auto& h : row) visit(h);
  }
}

inline std::vector<TradeoffHit> search_tradeoff_illusions(const SearchOptions& opt) {
  std::vector<TradeoffHit> out;
  for_each_tradeoff_illusion(opt, [&](const TradeoffHit& h) { out.push_back(h); });
  return out;
}

} // namespace survmed
