#pragma once

// Ranked composite outcomes: death merged with a clinical score, with death
// ranked below every survivor score. Survival-incorporated quantiles are
// type-1 empirical quantiles of this order.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "survmed/error.hpp"
#include "survmed/stratum.hpp"

namespace survmed {

class CompositeOutcome {
public:
  static constexpr CompositeOutcome death() noexcept { return {}; }

  static CompositeOutcome survived(double score) {
    if (!std::isfinite(score))
      throw ValidationError("survivor score must be finite");
    return CompositeOutcome(score);
  }

  constexpr bool is_death() const noexcept { return !alive_; }
  constexpr bool is_survived() const noexcept { return alive_; }

  /// Only meaningful for survivors.
  double score() const {
    if (!alive_) throw std::logic_error("death has no score");
    return score_;
  }

  friend constexpr std::strong_ordering
  operator<=>(const CompositeOutcome& a, const CompositeOutcome& b) noexcept {
    if (a.alive_ != b.alive_)
      return a.alive_ ? std::strong_ordering::greater
                      : std::strong_ordering::less;
    if (!a.alive_ || a.score_ == b.score_) return std::strong_ordering::equal;
    return a.score_ < b.score_ ? std::strong_ordering::less
                               : std::strong_ordering::greater;
  }

  friend constexpr bool operator==(const CompositeOutcome& a,
                                   const CompositeOutcome& b) noexcept {
    return (a <=> b) == 0;
  }

private:
  constexpr CompositeOutcome() noexcept = default;
  explicit constexpr CompositeOutcome(double s) noexcept
      : alive_(true), score_(s) {}

  bool alive_ = false;
  double score_ = 0.0;
};

enum class Ordering { Less, Equal, Greater };

constexpr Ordering compare(const CompositeOutcome& a,
                           const CompositeOutcome& b) noexcept {
  auto c = a <=> b;
  if (c < 0) return Ordering::Less;
  if (c > 0) return Ordering::Greater;
  return Ordering::Equal;
}

inline std::string to_string(const CompositeOutcome& o) {
  if (o.is_death()) return "death";
  std::string s(32, '\0');
  auto r = std::to_chars(s.data(), s.data() + s.size(), o.score());
  s.resize(static_cast<std::size_t>(r.ptr - s.data()));
  return s;
}

struct SubjectRecord {
  std::string id;
  Arm arm = Arm::Control;
  CompositeOutcome outcome = CompositeOutcome::death();
  std::optional<StratumLabel> stratum;

  /// Throws if the latent stratum contradicts the observed survival status.
  void check() const {
    if (stratum && survives(*stratum, arm) != outcome.is_survived())
      throw ValidationError("subject " + id +
                            ": outcome contradicts latent stratum");
  }
};

/// Non-empty collection of composite outcomes for one arm.
class ArmSample {
public:
  explicit ArmSample(std::vector<CompositeOutcome> outcomes)
      : outcomes_(std::move(outcomes)) {
    if (outcomes_.empty()) throw ValidationError("empty sample");
  }

  std::span<const CompositeOutcome> outcomes() const noexcept {
    return outcomes_;
  }
  std::size_t size() const noexcept { return outcomes_.size(); }

  std::size_t deaths() const noexcept {
    return static_cast<std::size_t>(std::count_if(
        outcomes_.begin(), outcomes_.end(),
        [](const CompositeOutcome& o) { return o.is_death(); }));
  }
  std::size_t survivors() const noexcept { return size() - deaths(); }

  std::optional<double> min_survivor_score() const {
    std::optional<double> m;
    for (const auto& o : outcomes_)
      if (o.is_survived() && (!m || o.score() < *m)) m = o.score();
    return m;
  }

private:
  std::vector<CompositeOutcome> outcomes_;
};

/// Builds a sample of `deaths` deaths followed by survivors with the given
/// (score, count) cells.
inline ArmSample
materialize_sample(std::size_t deaths,
                   std::initializer_list<std::pair<double, std::size_t>> cells) {
  std::vector<CompositeOutcome> v(deaths, CompositeOutcome::death());
  for (auto [score, count] : cells)
    v.insert(v.end(), count, CompositeOutcome::survived(score));
  return ArmSample(std::move(v));
}

class QuantileLevel {
public:
  explicit QuantileLevel(double q) : q_(q) {
    if (!(q > 0.0 && q < 1.0))
      throw ValidationError("quantile level must lie in (0, 1)");
  }
  double value() const noexcept { return q_; }

private:
  double q_;
};

/// 1-based type-1 order statistic index ceil(q*n), clamped to [1, n]. The
/// small guard keeps products like 0.7*10 from rounding up past an integer.
inline std::size_t type1_index(double q, std::size_t n) noexcept {
  const double raw = std::ceil(q * static_cast<double>(n) - 1e-9);
  if (raw < 1.0) return 1;
  if (raw > static_cast<double>(n)) return n;
  return static_cast<std::size_t>(raw);
}

/// Type-1 quantile of an arbitrary totally ordered range.
template <class T>
T type1_quantile(std::vector<T> values, double q) {
  if (values.empty()) throw ValidationError("empty sample");
  const std::size_t k = type1_index(q, values.size());
  std::nth_element(values.begin(), values.begin() + (k - 1), values.end());
  return values[k - 1];
}

inline CompositeOutcome survival_incorporated_quantile(const ArmSample& sample,
                                                       QuantileLevel level) {
  auto o = sample.outcomes();
  return type1_quantile(std::vector<CompositeOutcome>(o.begin(), o.end()),
                        level.value());
}

inline CompositeOutcome survival_incorporated_median(const ArmSample& sample) {
  return survival_incorporated_quantile(sample, QuantileLevel(0.5));
}

inline std::vector<double> survivor_scores(const ArmSample& sample) {
  std::vector<double> s;
  s.reserve(sample.size());
  for (const auto& o : sample.outcomes())
    if (o.is_survived()) s.push_back(o.score());
  return s;
}

inline double median_in_survivors(const ArmSample& sample) {
  auto s = survivor_scores(sample);
  if (s.empty()) throw ValidationError("no survivors in sample");
  return type1_quantile(std::move(s), 0.5);
}

inline double survival_probability(const ArmSample& sample) noexcept {
  return static_cast<double>(sample.survivors()) /
         static_cast<double>(sample.size());
}

/// Fraction of subjects alive with a score strictly above `threshold`.
inline double prob_alive_above(const ArmSample& sample, double threshold) {
  if (!std::isfinite(threshold))
    throw ValidationError("threshold must be finite");
  std::size_t hits = 0;
  for (const auto& o : sample.outcomes())
    if (o.is_survived() && o.score() > threshold) ++hits;
  return static_cast<double>(hits) / static_cast<double>(sample.size());
}

/// Maps Death to `sentinel` and survivors to their score.
inline std::vector<double> sentinel_encode(const ArmSample& sample,
                                           double sentinel) {
  if (auto m = sample.min_survivor_score(); m && !(sentinel < *m))
    throw ValidationError("sentinel not below all survivor scores");
  std::vector<double> out;
  out.reserve(sample.size());
  for (const auto& o : sample.outcomes())
    out.push_back(o.is_death() ? sentinel : o.score());
  return out;
}

} // namespace survmed
