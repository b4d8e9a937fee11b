#pragma once

// Random generators and naive oracles shared by the test suites. Oracles are
// written independently of the library's code paths.

#include <algorithm>
#include <cstdint>
#include <random>
#include <tuple>
#include <utility>
#include <vector>

#include "survmed/composite.hpp"

namespace survmed::oracle {

/// A composite value as (alive, score); deaths carry score 0.
using NaiveOutcome = std::pair<int, double>;

inline NaiveOutcome naive(const CompositeOutcome& o) {
  return o.is_death() ? NaiveOutcome{0, 0.0} : NaiveOutcome{1, o.score()};
}

/// Rational quantile level num/den, so the order-statistic index is exact.
struct Level {
  long num;
  long den;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

inline const std::vector<Level> kLevels{{1, 10}, {1, 4}, {1, 2}, {3, 4}, {9, 10}};

/// Sort lexicographically by (alive, score) and index at ceil(num*n/den).
inline NaiveOutcome naive_quantile(std::vector<NaiveOutcome> v, Level q) {
  std::sort(v.begin(), v.end());
  const long n = static_cast<long>(v.size());
  long k = (q.num * n + q.den - 1) / q.den;
  if (k < 1) k = 1;
  return v[static_cast<std::size_t>(k - 1)];
}

/// Random sample of size 1..max_n; scores drawn from a small integer support
/// so ties are common, death with probability p_death.
inline ArmSample random_sample(std::mt19937_64& rng, int max_n, double p_death = -1.0,
                               int support = 5) {
  std::uniform_int_distribution<int> size(1, max_n);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> score(-support, support);
  const double pd = p_death < 0.0 ? unit(rng) : p_death;
  const int n = size(rng);
  std::vector<CompositeOutcome> v;
  for (int i = 0; i < n; ++i)
    v.push_back(unit(rng) < pd ? CompositeOutcome::death()
                               : CompositeOutcome::survived(score(rng) * 0.5));
  return ArmSample(std::move(v));
}

inline CompositeOutcome random_outcome(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, 6);
  const int k = pick(rng);
  return k == 0 ? CompositeOutcome::death() : CompositeOutcome::survived(k - 3.0);
}

} // namespace survmed::oracle
