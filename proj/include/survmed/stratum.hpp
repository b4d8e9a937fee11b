#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace survmed {

/// Treatment indicator. Only 0 and 1 exist.
enum class Arm : int { Control = 0, Treated = 1 };

inline constexpr std::array<Arm, 2> kArms{Arm::Control, Arm::Treated};

constexpr int arm_index(Arm a) noexcept { return static_cast<int>(a); }

inline std::optional<Arm> arm_from_int(int v) noexcept {
  if (v == 0) return Arm::Control;
  if (v == 1) return Arm::Treated;
  return std::nullopt;
}

/// Principal stratum by joint potential survival (S(0), S(1)).
enum class StratumLabel : int {
  AlwaysSurvivor = 0, // (1, 1)
  Protected = 1,      // (0, 1)
  Harmed = 2,         // (1, 0)
  NeverSurvivor = 3,  // (0, 0)
};

inline constexpr std::array<StratumLabel, 4> kStrata{
    StratumLabel::AlwaysSurvivor, StratumLabel::Protected,
    StratumLabel::Harmed, StratumLabel::NeverSurvivor};

constexpr int stratum_index(StratumLabel s) noexcept {
  return static_cast<int>(s);
}

struct PotentialSurvival {
  bool under_control;
  bool under_treatment;

  constexpr bool under(Arm a) const noexcept {
    return a == Arm::Control ? under_control : under_treatment;
  }
  friend constexpr bool operator==(PotentialSurvival,
                                   PotentialSurvival) = default;
};

constexpr PotentialSurvival potential_survival(StratumLabel s) noexcept {
  switch (s) {
  case StratumLabel::AlwaysSurvivor: return {true, true};
  case StratumLabel::Protected: return {false, true};
  case StratumLabel::Harmed: return {true, false};
  case StratumLabel::NeverSurvivor: return {false, false};
  }
  return {false, false};
}

constexpr StratumLabel stratum_from_survival(PotentialSurvival p) noexcept {
  if (p.under_control)
    return p.under_treatment ? StratumLabel::AlwaysSurvivor
                             : StratumLabel::Harmed;
  return p.under_treatment ? StratumLabel::Protected
                           : StratumLabel::NeverSurvivor;
}

constexpr bool survives(StratumLabel s, Arm a) noexcept {
  return potential_survival(s).under(a);
}

inline std::string_view stratum_name(StratumLabel s) noexcept {
  switch (s) {
  case StratumLabel::AlwaysSurvivor: return "always_survivor";
  case StratumLabel::Protected: return "protected";
  case StratumLabel::Harmed: return "harmed";
  case StratumLabel::NeverSurvivor: return "never_survivor";
  }
  return "";
}

inline std::optional<StratumLabel> stratum_from_name(std::string_view name) {
  for (auto s : kStrata)
    if (stratum_name(s) == name) return s;
  return std::nullopt;
}

} // namespace survmed
