#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <tuple>

#include "survmed/figures.hpp"
#include "survmed/paradox.hpp"

using namespace survmed;
using D = DirectionClassification;

namespace {

using Key = std::tuple<int, int, int, int, int, int>;

Key key_of(const GridScenario& g) {
  return {g.arm0.deaths, g.arm0.bad, g.arm0.good, g.arm1.deaths, g.arm1.bad, g.arm1.good};
}

// Exhaustive integer-arithmetic enumeration for threshold between the codes.
std::vector<Key> brute_force_illusions(int units, int min_survivors = 0) {
  std::vector<Key> out;
  auto median_bad = [](int bad, int good) { return 2 * bad >= bad + good; };
  for (int d0 = 0; d0 <= units; ++d0)
    for (int b0 = 0; b0 <= units - d0; ++b0)
      for (int d1 = 0; d1 <= units; ++d1)
        for (int b1 = 0; b1 <= units - d1; ++b1) {
          const int g0 = units - d0 - b0, g1 = units - d1 - b1;
          const int s0 = b0 + g0, s1 = b1 + g1;
          if (s0 < min_survivors || s1 < min_survivors || s0 == 0 || s1 == 0) continue;
          const int m0 = median_bad(b0, g0) ? 0 : 1, m1 = median_bad(b1, g1) ? 0 : 1;
          const bool arm1_better = s1 > s0 && g1 > g0 && m1 < m0;
          const bool arm0_better = s0 > s1 && g0 > g1 && m0 < m1;
          if (arm1_better || arm0_better) out.emplace_back(d0, b0, g0, d1, b1, g1);
        }
  return out;
}

std::vector<Key> keys(const std::vector<TradeoffHit>& hits) {
  std::vector<Key> k;
  for (const auto& h : hits) k.push_back(key_of(h.scenario));
  return k;
}

} // namespace

TEST(ClassifyDirection, Examples) {
  EXPECT_EQ(classify_direction(0.24, -1.0), D::Opposite);
  EXPECT_EQ(classify_direction(0.1, 0.1), D::Same);
  EXPECT_EQ(classify_direction(-0.1, -2.0), D::Same);
  EXPECT_EQ(classify_direction(0.0, 5.0), D::Indeterminate);
  EXPECT_EQ(classify_direction(0.3, 0.0), D::Indeterminate);
}

TEST(EvaluateScenario, FigureThree) {
  const auto r = evaluate_scenario(figures::figure3_spec(), 0.5);
  EXPECT_NEAR(r.arm0.p_survival, 0.56, 1e-12);
  EXPECT_NEAR(r.arm0.p_alive_above_threshold, 0.30, 1e-12);
  EXPECT_EQ(r.arm0.survival_incorporated_median, CompositeOutcome::survived(kBadScore));
  EXPECT_EQ(r.arm0.median_in_survivors, kGoodScore);
  EXPECT_EQ(r.arm0.median_in_always_survivors, kGoodScore);
  EXPECT_NEAR(r.arm1.p_survival, 0.80, 1e-12);
  EXPECT_NEAR(r.arm1.p_alive_above_threshold, 0.35, 1e-12);
  EXPECT_EQ(r.arm1.survival_incorporated_median, CompositeOutcome::survived(kBadScore));
  EXPECT_EQ(r.arm1.median_in_survivors, kBadScore);
  EXPECT_EQ(r.arm1.median_in_always_survivors, kBadScore);
  EXPECT_EQ(r.direction_survivor_median, D::Opposite);
  EXPECT_EQ(r.direction_always_survivor_median, D::Opposite);
  EXPECT_TRUE(r.tradeoff_illusion_flag);
}

TEST(EvaluateScenario, IdenticalArmsAreIndeterminate) {
  ScenarioSpec s;
  s.set_proportion(StratumLabel::AlwaysSurvivor, 0.7);
  s.set_proportion(StratumLabel::NeverSurvivor, 0.3);
  s.scores[{StratumLabel::AlwaysSurvivor, Arm::Control}] = {{{0.0, 0.4}, {1.0, 0.6}}};
  s.scores[{StratumLabel::AlwaysSurvivor, Arm::Treated}] = {{{0.0, 0.4}, {1.0, 0.6}}};
  const auto r = evaluate_scenario(s, 0.5);
  EXPECT_EQ(r.direction_survivor_median, D::Indeterminate);
  EXPECT_EQ(r.direction_always_survivor_median, D::Indeterminate);
  EXPECT_FALSE(r.tradeoff_illusion_flag);
}

TEST(EvaluateScenario, DominatingArmIsSame) {
  const TwoCategoryMarginals a0{0.30, 0.40, 0.30}, a1{0.10, 0.30, 0.60};
  const auto r = evaluate_scenario(observed_pair_to_spec(a0, a1), 0.5);
  // brute force: materialize 100 subjects per arm, read survivor medians off
  // the sorted survivor scores directly
  auto median_of = [](int bad, int good) {
    std::vector<double> v(bad, 0.0);
    v.insert(v.end(), good, 1.0);
    return v[(v.size() + 1) / 2 - 1];
  };
  const double delta = median_of(30, 60) - median_of(40, 30);
  ASSERT_GT(delta, 0.0);
  EXPECT_EQ(*r.arm1.median_in_survivors - *r.arm0.median_in_survivors, delta);
  EXPECT_EQ(r.direction_survivor_median, D::Same);
  EXPECT_FALSE(r.tradeoff_illusion_flag);
}

TEST(EvaluateScenario, PopulationQuantilesAndInvalidInput) {
  const auto r = evaluate_scenario(figures::figure3_spec(), 0.5, {0.75, 0.9});
  ASSERT_EQ(r.arm0.quantiles.size(), 2u);
  EXPECT_EQ(r.arm0.quantiles[0].second, CompositeOutcome::survived(kGoodScore));
  EXPECT_EQ(r.arm1.quantiles[1].second, CompositeOutcome::survived(kGoodScore));
  auto bad = figures::figure3_spec();
  bad.set_proportion(StratumLabel::Harmed, 0.1);
  EXPECT_THROW(evaluate_scenario(bad, 0.5), ValidationError);
}

TEST(ObservedPairToSpec, HarmedWhenControlSurvivesMore) {
  const TwoCategoryMarginals a0{0.10, 0.50, 0.40}, a1{0.30, 0.20, 0.50};
  const auto spec = observed_pair_to_spec(a0, a1);
  EXPECT_TRUE(validate_scenario(spec).empty());
  EXPECT_FALSE(spec.monotonicity_asserted);
  EXPECT_NEAR(spec.proportion(StratumLabel::Harmed), 0.2, 1e-12);
  const auto m1 = observed_marginals(spec, Arm::Treated);
  EXPECT_NEAR(m1.p_death, 0.30, 1e-12);
  EXPECT_NEAR(m1.survivor_mass.mass_above(0.5), 0.50, 1e-12);
}

TEST(Search, CoarseGridMatchesEnumeration) {
  for (double step : {0.5, 0.25, 0.1, 0.05}) {
    SearchOptions o;
    o.grid_step = step;
    EXPECT_EQ(keys(search_tradeoff_illusions(o)),
              brute_force_illusions(static_cast<int>(std::round(1 / step))))
        << step;
  }
}

TEST(Search, FindsFigureTwoConfiguration) {
  SearchOptions o;
  o.grid_step = 0.01;
  bool found = false;
  for_each_tradeoff_illusion(o, [&](const TradeoffHit& h) {
    found = found || key_of(h.scenario) == Key{44, 26, 30, 20, 45, 35};
  });
  EXPECT_TRUE(found);
}

TEST(Search, HitsReverifyAndAreSound) {
  SearchOptions o;
  o.grid_step = 0.05;
  const auto hits = search_tradeoff_illusions(o);
  ASSERT_FALSE(hits.empty());
  for (const auto& h : hits) {
    const auto re = evaluate_scenario(h.scenario.to_spec(), o.good_threshold);
    EXPECT_TRUE(re.tradeoff_illusion_flag);
    EXPECT_NEAR(re.arm0.p_survival, h.report.arm0.p_survival, 1e-12);
    EXPECT_NEAR(re.arm1.p_alive_above_threshold, h.report.arm1.p_alive_above_threshold, 1e-12);
    EXPECT_EQ(re.arm0.median_in_survivors, h.report.arm0.median_in_survivors);
    EXPECT_EQ(re.arm1.median_in_survivors, h.report.arm1.median_in_survivors);
    const auto& a = h.scenario.arm0;
    const auto& b = h.scenario.arm1;
    const int s0 = a.bad + a.good, s1 = b.bad + b.good;
    const auto m0 = *h.report.arm0.median_in_survivors, m1 = *h.report.arm1.median_in_survivors;
    EXPECT_TRUE((s1 > s0 && b.good > a.good && m1 < m0) ||
                (s0 > s1 && a.good > b.good && m0 < m1));
  }
}

TEST(Search, MinSurvivalFilter) {
  SearchOptions o;
  o.grid_step = 0.01;
  o.min_survival = 0.9;
  const auto hits = search_tradeoff_illusions(o);
  EXPECT_EQ(keys(hits), brute_force_illusions(100, 90));
  for (const auto& h : hits) {
    EXPECT_GE(h.report.arm0.p_survival, 0.9 - 1e-12);
    EXPECT_GE(h.report.arm1.p_survival, 0.9 - 1e-12);
  }
}

TEST(Search, WorkerCountDoesNotChangeOutput) {
  SearchOptions o;
  o.grid_step = 0.05;
  const auto one = search_tradeoff_illusions(o);
  o.workers = 4;
  const auto four = search_tradeoff_illusions(o);
  ASSERT_EQ(keys(one), keys(four));
  for (std::size_t i = 0; i < one.size(); ++i) {
    ASSERT_EQ(one[i].always_survivor_sweep.has_value(), four[i].always_survivor_sweep.has_value());
    if (one[i].always_survivor_sweep)
      EXPECT_EQ(one[i].always_survivor_sweep->opposite, four[i].always_survivor_sweep->opposite);
  }
}

TEST(Search, RejectsBadSteps) {
  for (double step : {0.0, -0.1, 0.6, 0.3, 0.07}) {
    SearchOptions o;
    o.grid_step = step;
    EXPECT_THROW(search_tradeoff_illusions(o), ValidationError) << step;
  }
}

TEST(MonotoneExtension, ReproducesFigureThree) {
  const auto spec = extend_to_monotone(figures::figure2_marginals(Arm::Control),
                                       figures::figure2_marginals(Arm::Treated),
                                       figures::kFigure3AlwaysSurvivorGood);
  ASSERT_TRUE(validate_scenario(spec).empty());
  const auto fig3 = figures::figure3_spec();
  for (auto s : kStrata) EXPECT_NEAR(spec.proportion(s), fig3.proportion(s), 1e-12);
  for (const auto& [cell, dist] : fig3.scores) {
    const auto* d = spec.score_dist(cell.first, cell.second);
    ASSERT_NE(d, nullptr);
    EXPECT_NEAR(d->mass_above(0.5), dist.mass_above(0.5), 1e-12);
  }
  const auto r = evaluate_scenario(spec, 0.5);
  EXPECT_EQ(r.direction_always_survivor_median, D::Opposite);
  EXPECT_EQ(r.direction_survivor_median, D::Opposite);
  EXPECT_THROW(extend_to_monotone(figures::figure2_marginals(Arm::Treated),
                                  figures::figure2_marginals(Arm::Control), 0.2),
               ValidationError);
  EXPECT_THROW(extend_to_monotone(figures::figure2_marginals(Arm::Control),
                                  figures::figure2_marginals(Arm::Treated), 0.05),
               ValidationError);
}

TEST(MonotoneExtension, SweepAgreesWithOracle) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> cell(0, 20);
  int checked = 0;
  while (checked < 300) {
    const int d1 = cell(rng), d0 = d1 + cell(rng) % (21 - d1);
    const int b0 = cell(rng) % (21 - d0), b1 = cell(rng) % (21 - d1);
    const TwoCategoryMarginals a0{d0 / 20.0, b0 / 20.0, (20 - d0 - b0) / 20.0};
    const TwoCategoryMarginals a1{d1 / 20.0, b1 / 20.0, (20 - d1 - b1) / 20.0};
    if (!(a0.p_survival() > 0.0)) continue;
    const auto obs = compare_arms(summarize_two_category(a0, 0.5),
                                  summarize_two_category(a1, 0.5));
    const int points = 5;
    const auto sweep = sweep_monotone_extensions(a0, a1, obs, points);
    ASSERT_TRUE(sweep.has_value());
    const auto [lo, hi] = monotone_good_allocation_range(a0, a1);
    int opposite = 0;
    for (int i = 0; i < points; ++i) {
      const auto r =
          evaluate_scenario(extend_to_monotone(a0, a1, lo + (hi - lo) * i / (points - 1)), 0.5);
      opposite += r.direction_always_survivor_median == D::Opposite;
    }
    EXPECT_EQ(sweep->opposite, opposite);
    EXPECT_EQ(sweep->total, points);
    ++checked;
  }
}
