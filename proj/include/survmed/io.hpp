#pragma once

// Dataset CSV ingestion and scenario JSON (de)serialization.
//
// Dataset grammar: header `subject_id,arm,survived,outcome`; arm and
// survived are 0/1; outcome is a decimal present exactly when survived=1.
// Fields are plain comma-separated (no quoting).

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "survmed/composite.hpp"
#include "survmed/error.hpp"
#include "survmed/format.hpp"
#include "survmed/strata.hpp"

namespace survmed {

inline constexpr std::string_view kDatasetHeader = "subject_id,arm,survived,outcome";

struct Dataset {
  std::vector<SubjectRecord> records;
  ArmSample arm0;
  ArmSample arm1;

  const ArmSample& sample(Arm a) const { return a == Arm::Control ? arm0 : arm1; }
};

namespace detail {

inline std::optional<double> parse_decimal(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v))
    return std::nullopt;
  return v;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

} // namespace detail

inline Dataset parse_dataset(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  auto at = [&](const std::string& msg) {
    return ValidationError(msg + " at line " + std::to_string(lineno));
  };
  auto strip_cr = [](std::string& s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
  };

  if (!std::getline(in, line)) throw ValidationError("empty dataset file");
  ++lineno;
  strip_cr(line);
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  if (line != kDatasetHeader)
    throw at("expected header '" + std::string(kDatasetHeader) + "'");

  std::vector<SubjectRecord> records;
  std::set<std::string, std::less<>> ids;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) continue;
    const auto f = detail::split_commas(line);
    if (f.size() != 4) throw at("expected 4 fields, found " + std::to_string(f.size()));
    SubjectRecord r;
    if (f[0].empty()) throw at("empty subject_id");
    r.id = std::string(f[0]);
    if (!ids.insert(r.id).second) throw at("duplicate subject_id '" + r.id + "'");
    if (f[1] != "0" && f[1] != "1") throw at("arm must be 0 or 1");
    r.arm = f[1] == "1" ? Arm::Treated : Arm::Control;
    if (f[2] != "0" && f[2] != "1") throw at("survived must be 0 or 1");
    const bool alive = f[2] == "1";
    if (!alive) {
      if (!f[3].empty()) throw at("outcome present for non-survivor");
      r.outcome = CompositeOutcome::death();
    } else {
      if (f[3].empty()) throw at("missing outcome for survivor");
      auto v = detail::parse_decimal(f[3]);
      if (!v) throw at("outcome is not a finite decimal");
      r.outcome = CompositeOutcome::survived(*v);
    }
    records.push_back(std::move(r));
  }

  auto parts = split_by_arm(records);
  for (std::size_t a = 0; a < 2; ++a)
    if (!parts[a]) throw ValidationError("arm " + std::to_string(a) + " has no subjects");
  return Dataset{std::move(records), std::move(*parts[0]), std::move(*parts[1])};
}

inline Dataset ingest_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open dataset '" + path + "'");
  return parse_dataset(in);
}

inline void write_dataset(std::ostream& out, const std::vector<SubjectRecord>& records) {
  out << kDatasetHeader << '\n';
  for (const auto& r : records) {
    out << r.id << ',' << arm_index(r.arm) << ',' << (r.outcome.is_survived() ? 1 : 0)
        << ',';
    if (r.outcome.is_survived()) out << fmt_num(r.outcome.score());
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Scenario JSON:
//   {"strata": {"always_survivor": 0.56, ...},
//    "scores": {"always_survivor/0": [{"score": 1, "prob": 0.5}, ...], ...},
//    "monotonicity": true}

inline ScenarioSpec scenario_from_json(const nlohmann::json& j) {
  using nlohmann::json;
  std::vector<std::string> errs;
  auto number = [&](const json& v, const std::string& where) -> std::optional<double> {
    if (!v.is_number()) {
      errs.push_back(where + " must be a number");
      return std::nullopt;
    }
    return v.get<double>();
  };

  ScenarioSpec spec;
  if (!j.is_object()) throw ValidationError("scenario must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "strata") {
      if (!value.is_object()) {
        errs.push_back("strata must be an object");
        continue;
      }
      for (const auto& [name, p] : value.items()) {
        auto s = stratum_from_name(name);
        if (!s) {
          errs.push_back("unknown stratum '" + name + "'");
          continue;
        }
        if (auto v = number(p, "strata." + name)) spec.set_proportion(*s, *v);
      }
    } else if (key == "scores") {
      if (!value.is_object()) {
        errs.push_back("scores must be an object");
        continue;
      }
      for (const auto& [cell, atoms] : value.items()) {
        const auto slash = cell.find('/');
        std::optional<StratumLabel> s;
        std::optional<Arm> arm;
        if (slash != std::string::npos) {
          s = stratum_from_name(std::string_view(cell).substr(0, slash));
          const auto a = cell.substr(slash + 1);
          if (a == "0") arm = Arm::Control;
          if (a == "1") arm = Arm::Treated;
        }
        if (!s || !arm) {
          errs.push_back("unknown score cell '" + cell + "'");
          continue;
        }
        if (!atoms.is_array()) {
          errs.push_back("scores." + cell + " must be an array");
          continue;
        }
        DiscreteDistribution d;
        for (const auto& atom : atoms) {
          if (!atom.is_object()) {
            errs.push_back("scores." + cell + " entries must be objects");
            continue;
          }
          Atom a;
          bool have_score = false, have_prob = false;
          for (const auto& [k, v] : atom.items()) {
            if (k == "score") {
              if (auto x = number(v, "scores." + cell + ".score")) a.score = *x, have_score = true;
            } else if (k == "prob") {
              if (auto x = number(v, "scores." + cell + ".prob")) a.prob = *x, have_prob = true;
            } else {
              errs.push_back("unknown key '" + k + "' in scores." + cell);
            }
          }
          if (!have_score || !have_prob)
            errs.push_back("scores." + cell + " entries need score and prob");
          d.atoms.push_back(a);
        }
        spec.scores[{*s, *arm}] = std::move(d);
      }
    } else if (key == "monotonicity") {
      if (!value.is_boolean())
        errs.push_back("monotonicity must be a boolean");
      else
        spec.monotonicity_asserted = value.get<bool>();
    } else {
      errs.push_back("unknown key '" + key + "'");
    }
  }
  if (!j.contains("strata")) errs.push_back("missing key 'strata'");
  if (!errs.empty()) throw ValidationError("malformed scenario", std::move(errs));
  return spec;
}

inline nlohmann::ordered_json scenario_to_json(const ScenarioSpec& spec) {
  nlohmann::ordered_json j;
  j["strata"] = nlohmann::ordered_json::object();
  for (auto s : kStrata) j["strata"][std::string(stratum_name(s))] = spec.proportion(s);
  j["scores"] = nlohmann::ordered_json::object();
  for (const auto& [cell, dist] : spec.scores) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& a : dist.atoms) arr.push_back({{"score", a.score}, {"prob", a.prob}});
    j["scores"][cell_name(cell)] = std::move(arr);
  }
  j["monotonicity"] = spec.monotonicity_asserted;
  return j;
}

inline ScenarioSpec parse_scenario(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("scenario is not valid JSON: ") + e.what());
  }
  return scenario_from_json(j);
}

inline ScenarioSpec load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

} // namespace survmed
