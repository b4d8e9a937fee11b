#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "survmed/composite.hpp"

namespace survmed {

/// Tolerance on probability sums (scenario validation).
inline constexpr double kSumTolerance = 1e-9;
/// Slack for cumulative-probability comparisons in population quantiles, so
/// e.g. 0.3 + 0.2 counts as reaching 0.5.
inline constexpr double kCdfTolerance = 1e-12;

struct Atom {
  double score = 0.0;
  double prob = 0.0;
  friend bool operator==(const Atom&, const Atom&) = default;
};

/// Finite-support distribution over survivor scores. Atoms are kept in the
/// order given; computations work on score-sorted copies.
struct DiscreteDistribution {
  std::vector<Atom> atoms;

  double total() const noexcept {
    double t = 0.0;
    for (const auto& a : atoms) t += a.prob;
    return t;
  }

  std::vector<Atom> sorted() const {
    auto s = atoms;
    std::stable_sort(s.begin(), s.end(), [](const Atom& x, const Atom& y) {
      return x.score < y.score;
    });
    return s;
  }

  double mass_above(double threshold) const noexcept {
    double m = 0.0;
    for (const auto& a : atoms)
      if (a.score > threshold) m += a.prob;
    return m;
  }

  friend bool operator==(const DiscreteDistribution&,
                         const DiscreteDistribution&) = default;
};

/// Population type-1 quantile: smallest support point whose cumulative mass
/// reaches q. Masses need not be normalized; q is applied to their total.
inline std::optional<double> type1_quantile(const DiscreteDistribution& dist,
                                            double q) {
  const auto s = dist.sorted();
  const double total = dist.total();
  if (s.empty() || !(total > 0.0)) return std::nullopt;
  double cum = 0.0;
  for (const auto& a : s) {
    cum += a.prob;
    if (cum >= q * total - kCdfTolerance) return a.score;
  }
  return s.back().score;
}

inline std::optional<double> type1_median(const DiscreteDistribution& dist) {
  return type1_quantile(dist, 0.5);
}

} // namespace survmed
