#pragma once

// Fully specified principal-stratification populations: validation, observed
// marginals per arm, synthetic subject-level data, and the always-survivor
// (oracle) medians that use the latent strata directly.

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "survmed/composite.hpp"
#include "survmed/discrete.hpp"
#include "survmed/error.hpp"
#include "survmed/parallel.hpp"
#include "survmed/rng.hpp"
#include "survmed/stratum.hpp"

namespace survmed {

using StratumArm = std::pair<StratumLabel, Arm>;

inline std::string cell_name(StratumArm cell) {
  return std::string(stratum_name(cell.first)) + "/" +
         std::to_string(arm_index(cell.second));
}

struct ScenarioSpec {
  std::array<double, 4> proportions{};
  std::map<StratumArm, DiscreteDistribution> scores;
  bool monotonicity_asserted = false;

  double proportion(StratumLabel s) const noexcept {
    return proportions[static_cast<std::size_t>(stratum_index(s))];
  }
  void set_proportion(StratumLabel s, double p) noexcept {
    proportions[static_cast<std::size_t>(stratum_index(s))] = p;
  }

  const DiscreteDistribution* score_dist(StratumLabel s, Arm a) const {
    auto it = scores.find({s, a});
    return it == scores.end() ? nullptr : &it->second;
  }

  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

/// Every violated invariant, in a fixed order; empty means valid.
///
/// A score distribution is required for each (stratum, arm) where the
/// stratum survives under that arm and has positive proportion; it may be
/// omitted when the proportion is zero and is forbidden where the stratum
/// dies under that arm.
inline std::vector<std::string> validate_scenario(const ScenarioSpec& spec) {
  std::vector<std::string> errs;
  double sum = 0.0;
  for (auto s : kStrata) {
    const double p = spec.proportion(s);
    if (!std::isfinite(p) || p < 0.0 || p > 1.0)
      errs.push_back("proportion for " + std::string(stratum_name(s)) +
                     " outside [0, 1]");
    sum += p;
  }
  if (!(std::fabs(sum - 1.0) <= kSumTolerance))
    errs.push_back("proportions do not sum to 1");
  if (spec.monotonicity_asserted &&
      spec.proportion(StratumLabel::Harmed) != 0.0)
    errs.push_back("monotonicity violated: harmed proportion must be 0");

  for (const auto& [cell, dist] : spec.scores) {
    const auto name = cell_name(cell);
    if (!survives(cell.first, cell.second)) {
      errs.push_back("score distribution supplied for " + name +
                     " where the stratum dies");
      continue;
    }
    if (dist.atoms.empty()) {
      errs.push_back("score distribution for " + name + " is empty");
      continue;
    }
    bool bad_atom = false;
    for (std::size_t i = 0; i < dist.atoms.size(); ++i) {
      const auto& a = dist.atoms[i];
      if (!std::isfinite(a.score) || !std::isfinite(a.prob) || a.prob < 0.0)
        bad_atom = true;
      for (std::size_t j = 0; j < i; ++j)
        if (dist.atoms[j].score == a.score) bad_atom = true;
    }
    if (bad_atom)
      errs.push_back("score distribution for " + name +
                     " has a non-finite, negative or duplicate entry");
    else if (!(std::fabs(dist.total() - 1.0) <= kSumTolerance))
      errs.push_back("score distribution for " + name + " does not sum to 1");
  }
  for (auto s : kStrata)
    for (auto a : kArms)
      if (survives(s, a) && spec.proportion(s) > 0.0 &&
          spec.score_dist(s, a) == nullptr)
        errs.push_back("missing score distribution for " + cell_name({s, a}));
  return errs;
}

/// Validates and returns a copy with sums renormalized to exactly 1 (they are
/// already within tolerance). Throws ValidationError listing all violations.
inline ScenarioSpec checked_scenario(const ScenarioSpec& spec) {
  if (auto errs = validate_scenario(spec); !errs.empty())
    throw ValidationError("invalid scenario", std::move(errs));
  ScenarioSpec out = spec;
  double sum = 0.0;
  for (double p : out.proportions) sum += p;
  for (double& p : out.proportions) p /= sum;
  for (auto& [cell, dist] : out.scores) {
    const double t = dist.total();
    for (auto& a : dist.atoms) a.prob /= t;
  }
  return out;
}

struct ObservedMarginals {
  double p_death = 0.0;
  double p_survival = 0.0;
  /// Joint mass P(alive, score), sorted by score; sums to p_survival.
  DiscreteDistribution survivor_mass;

  bool survivors_empty() const noexcept { return survivor_mass.atoms.empty(); }

  /// Survivor score distribution conditional on survival.
  DiscreteDistribution survivor_dist() const {
    DiscreteDistribution d = survivor_mass;
    const double t = d.total();
    for (auto& a : d.atoms) a.prob /= t;
    return d;
  }
};

inline ObservedMarginals observed_marginals(const ScenarioSpec& raw, Arm arm) {
  const ScenarioSpec spec = checked_scenario(raw);
  ObservedMarginals m;
  std::map<double, double> mix;
  for (auto s : kStrata) {
    const double w = spec.proportion(s);
    if (!survives(s, arm)) {
      m.p_death += w;
      continue;
    }
    if (w <= 0.0) continue;
    for (const auto& a : spec.score_dist(s, arm)->atoms)
      if (a.prob > 0.0) mix[a.score] += w * a.prob;
  }
  for (auto [score, mass] : mix) {
    m.survivor_mass.atoms.push_back({score, mass});
    m.p_survival += mass;
  }
  return m;
}

/// Population composite type-1 quantile from observed marginals.
inline CompositeOutcome population_quantile(const ObservedMarginals& m,
                                            double q) {
  if (m.survivors_empty() || m.p_death >= q - kCdfTolerance)
    return CompositeOutcome::death();
  double cum = m.p_death;
  const auto atoms = m.survivor_mass.sorted();
  for (const auto& a : atoms) {
    cum += a.prob;
    if (cum >= q - kCdfTolerance) return CompositeOutcome::survived(a.score);
  }
  return CompositeOutcome::survived(atoms.back().score);
}

struct Assignment {
  enum class Kind { Randomized, Arm0Only, Arm1Only };
  Kind kind = Kind::Randomized;
  double p_treat = 0.5;

  static Assignment randomized(double p_treat = 0.5) {
    if (!(p_treat >= 0.0 && p_treat <= 1.0))
      throw ValidationError("p_treat must lie in [0, 1]");
    return {Kind::Randomized, p_treat};
  }
  static Assignment arm0_only() { return {Kind::Arm0Only, 0.0}; }
  static Assignment arm1_only() { return {Kind::Arm1Only, 1.0}; }
};

namespace detail {

// Index of the first cumulative bin exceeding u; falls back to the last bin
// with positive weight when rounding leaves u beyond the final sum.
template <class Weights>
std::size_t draw_categorical(const Weights& w, double u) {
  double cum = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] <= 0.0) continue;
    cum += w[i];
    last_positive = i;
    if (u < cum) return i;
  }
  return last_positive;
}

} // namespace detail

/// Subject i uses RNG stream (seed, i) and draws, in order, a stratum, an
/// arm, and (if alive under that arm) a score. Output is independent of
/// `workers`.
inline std::vector<SubjectRecord>
generate_population(const ScenarioSpec& raw, std::size_t n, std::uint64_t seed,
                    Assignment assignment, unsigned workers = 1) {
  if (n == 0) throw ValidationError("population size must be positive");
  const ScenarioSpec spec = checked_scenario(raw);

  std::array<std::vector<double>, 8> probs;
  for (auto s : kStrata)
    for (auto a : kArms)
      if (const auto* d = spec.score_dist(s, a))
        for (const auto& atom : d->atoms)
          probs[static_cast<std::size_t>(stratum_index(s) * 2 + arm_index(a))]
              .push_back(atom.prob);

  std::vector<SubjectRecord> out(n);
  parallel_for_ranges(n, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto rng = Xoshiro256::stream(seed, i);
      const double u_stratum = rng.uniform();
      const double u_arm = rng.uniform();
      const double u_score = rng.uniform();

      const auto stratum =
          kStrata[detail::draw_categorical(spec.proportions, u_stratum)];
      Arm arm = Arm::Control;
      switch (assignment.kind) {
      case Assignment::Kind::Randomized:
        arm = u_arm < assignment.p_treat ? Arm::Treated : Arm::Control;
        break;
      case Assignment::Kind::Arm0Only: arm = Arm::Control; break;
      case Assignment::Kind::Arm1Only: arm = Arm::Treated; break;
      }

      SubjectRecord& r = out[i];
      r.id = "s" + std::to_string(i + 1);
      r.arm = arm;
      r.stratum = stratum;
      if (survives(stratum, arm)) {
        const auto& d = *spec.score_dist(stratum, arm);
        const auto& w = probs[static_cast<std::size_t>(
            stratum_index(stratum) * 2 + arm_index(arm))];
        r.outcome = CompositeOutcome::survived(
            d.atoms[detail::draw_categorical(w, u_score)].score);
      }
    }
  });
  return out;
}

/// Splits records into per-arm samples; returns nullopt for an empty arm.
inline std::array<std::optional<ArmSample>, 2>
split_by_arm(const std::vector<SubjectRecord>& records) {
  std::array<std::vector<CompositeOutcome>, 2> parts;
  for (const auto& r : records)
    parts[static_cast<std::size_t>(arm_index(r.arm))].push_back(r.outcome);
  std::array<std::optional<ArmSample>, 2> out;
  for (std::size_t a = 0; a < 2; ++a)
    if (!parts[a].empty()) out[a].emplace(std::move(parts[a]));
  return out;
}

/// Type-1 median of the always-survivors' scores under `arm`, read straight
/// from the latent strata.
inline double always_survivor_median_oracle(const ScenarioSpec& raw, Arm arm) {
  const ScenarioSpec spec = checked_scenario(raw);
  if (!(spec.proportion(StratumLabel::AlwaysSurvivor) > 0.0))
    throw ValidationError("no always-survivors in scenario");
  return *type1_median(*spec.score_dist(StratumLabel::AlwaysSurvivor, arm));
}

/// Under monotonicity the always-survivor share equals survival under control.
inline double always_survivor_fraction_identified(double p_survive_arm0,
                                                  bool monotonicity) {
  if (!monotonicity)
    throw ValidationError("not identified without monotonicity");
  if (!(p_survive_arm0 >= 0.0 && p_survive_arm0 <= 1.0))
    throw ValidationError("survival probability must lie in [0, 1]");
  return p_survive_arm0;
}

} // namespace survmed
