#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>

#include "survmed/composite.hpp"

namespace survmed {

/// Shortest round-trip decimal.
inline std::string fmt_num(double x) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

/// Six significant digits, for human-facing tables.
inline std::string fmt_short(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

inline std::string fmt_opt(const std::optional<double>& x) {
  return x ? fmt_num(*x) : std::string();
}

inline std::string fmt_outcome(const CompositeOutcome& o) { return to_string(o); }

inline constexpr const char* kQuantileNote =
    "quantiles are type-1 empirical: the order statistic at index ceil(q*n) "
    "under the composite order (death below every survivor score)";

} // namespace survmed
