#pragma once

// The illustrative populations: 100 subjects per arm with bad = 0 and
// good = 1 score codes.

#include "survmed/composite.hpp"
#include "survmed/paradox.hpp"
#include "survmed/strata.hpp"

namespace survmed::figures {

inline constexpr double kThreshold = 0.5;

/// 20% death, 45% alive bad, 35% alive good.
inline ArmSample figure1_sample() {
  return materialize_sample(20, {{kBadScore, 45}, {kGoodScore, 35}});
}

inline ArmSample figure2_arm0() {
  return materialize_sample(44, {{kBadScore, 26}, {kGoodScore, 30}});
}

inline ArmSample figure2_arm1() {
  return materialize_sample(20, {{kBadScore, 45}, {kGoodScore, 35}});
}

inline TwoCategoryMarginals figure2_marginals(Arm a) {
  return a == Arm::Control ? TwoCategoryMarginals{0.44, 0.26, 0.30}
                           : TwoCategoryMarginals{0.20, 0.45, 0.35};
}

/// Always-survivors 56% (arm 0: 30 good / 26 bad; arm 1: 24 good / 32 bad),
/// protected 24% (arm 1: 11 good / 13 bad), never-survivors 20%.
inline ScenarioSpec figure3_spec() {
  ScenarioSpec s;
  s.monotonicity_asserted = true;
  s.set_proportion(StratumLabel::AlwaysSurvivor, 0.56);
  s.set_proportion(StratumLabel::Protected, 0.24);
  s.set_proportion(StratumLabel::Harmed, 0.0);
  s.set_proportion(StratumLabel::NeverSurvivor, 0.20);
  s.scores[{StratumLabel::AlwaysSurvivor, Arm::Control}] = {
      {{kBadScore, 26.0 / 56.0}, {kGoodScore, 30.0 / 56.0}}};
  s.scores[{StratumLabel::AlwaysSurvivor, Arm::Treated}] = {
      {{kBadScore, 32.0 / 56.0}, {kGoodScore, 24.0 / 56.0}}};
  s.scores[{StratumLabel::Protected, Arm::Treated}] = {
      {{kBadScore, 13.0 / 24.0}, {kGoodScore, 11.0 / 24.0}}};
  return s;
}

/// P(always-survivor, good | arm 1) in the figure-3 allocation.
inline constexpr double kFigure3AlwaysSurvivorGood = 0.24;

} // namespace survmed::figures
