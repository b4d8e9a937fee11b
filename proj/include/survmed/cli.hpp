#pragma once

// Command-line surface: estimate, scenario, search, reproduce.
// Exit codes: 0 success, 1 internal error, 2 usage or validation error.

#include <charconv>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "survmed/figures.hpp"
#include "survmed/format.hpp"
#include "survmed/inference.hpp"
#include "survmed/io.hpp"
#include "survmed/paradox.hpp"
#include "survmed/report.hpp"
#include "survmed/strata.hpp"

namespace survmed::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInvalid = 2;

inline constexpr std::uint64_t kDefaultSeed = 20240101;
inline constexpr const char* kSeedEnv = "SURVMED_SEED";

struct EstimateOptions {
  std::string input;
  std::vector<double> quantiles{0.5};
  double threshold = 0.5;
  std::size_t bootstrap = 2000;
  double level = 0.95;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> statistics;
  unsigned workers = 1;
  std::string format = "md";
};

inline std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv(kSeedEnv); env && *env) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(env, env + std::strlen(env), v);
    if (ec != std::errc{} || *p != '\0')
      throw ValidationError(std::string(kSeedEnv) + " is not an unsigned integer");
    return v;
  }
  return kDefaultSeed;
}

inline ReportFormat require_format(const std::string& s) {
  auto f = parse_format(s);
  if (!f) throw ValidationError("unknown format '" + s + "'");
  return *f;
}

inline void run_estimate(const EstimateOptions& o, std::ostream& out) {
  const auto fmt = require_format(o.format);
  for (double q : o.quantiles) (void)QuantileLevel(q);
  const Dataset data = ingest_dataset(o.input);
  auto report = compare_arms(summarize_sample(data.arm0, o.threshold, o.quantiles),
                             summarize_sample(data.arm1, o.threshold, o.quantiles));

  std::vector<std::pair<Statistic, BootstrapResult>> boot;
  if (o.bootstrap > 0) {
    std::vector<std::string> names = o.statistics;
    if (names.empty())
      names = {"sim_median", "survivor_median", "survival_prob", "prob_alive_above"};
    BootstrapOptions bo;
    bo.n_resamples = o.bootstrap;
    bo.level = o.level;
    bo.seed = resolve_seed(o.seed);
    bo.workers = o.workers;
    for (const auto& name : names) {
      auto kind = Statistic::parse(name);
      if (!kind) throw ValidationError("unknown statistic '" + name + "'");
      Statistic st{*kind, *kind == Statistic::Kind::ProbAliveAbove ? o.threshold : 0.0};
      if (st.kind == Statistic::Kind::SurvivorMedian &&
          (data.arm0.survivors() == 0 || data.arm1.survivors() == 0))
        continue; // no survivor median exists in one arm
      boot.emplace_back(st, bootstrap_diff_ci(data.arm0, data.arm1, st, bo));
    }
  }
  render(out, comparison_document(report, o.threshold, boot), fmt, "Estimate");
}

inline void run_scenario(const std::string& file, double threshold,
                         const std::vector<double>& quantiles, const std::string& format,
                         std::ostream& out) {
  const auto fmt = require_format(format);
  const ScenarioSpec spec = load_scenario(file);
  if (auto errs = validate_scenario(spec); !errs.empty())
    throw ValidationError("invalid scenario", std::move(errs));
  auto report = evaluate_scenario(spec, threshold, quantiles);
  render(out, comparison_document(report, threshold), fmt, "Scenario");
}

inline void run_search(const SearchOptions& opt, std::ostream& out) {
  (void)grid_units(opt.grid_step);
  out << kSearchHeader << '\n';
  for_each_tradeoff_illusion(opt, [&](const TradeoffHit& h) { write_search_row(out, h); });
}

// ---------------------------------------------------------------------------
// reproduce

inline std::string score_label(double s) {
  if (s == kBadScore) return "bad";
  if (s == kGoodScore) return "good";
  return fmt_num(s);
}

inline std::string outcome_label(const CompositeOutcome& o) {
  return o.is_death() ? "death" : score_label(o.score());
}

inline std::string pct(double p) { return fmt_short(p * 100.0) + "%"; }

inline const char* kDeathColor = "#6e6e6e";
inline const char* kBadColor = "#d9534f";
inline const char* kGoodColor = "#3c9d5d";

inline Bar composite_bar(std::string label, double death, double bad, double good) {
  return Bar{std::move(label),
             {{"death", death, kDeathColor},
              {"alive, bad score", bad, kBadColor},
              {"alive, good score", good, kGoodColor}}};
}

struct FigureOutput {
  std::string table; // markdown
  std::string svg;
};

inline FigureOutput reproduce_figure1() {
  const auto s = figures::figure1_sample();
  const auto sum = summarize_sample(s, figures::kThreshold);
  const double p_good = sum.p_alive_above_threshold;
  std::ostringstream t;
  t << "# Figure 1: survival-incorporated median\n\n"
    << kQuantileNote << "\n\n| quantity | value |\n|---|---|\n"
    << "| P(death) | " << pct(1.0 - sum.p_survival) << " |\n"
    << "| P(alive, bad score) | " << pct(sum.p_survival - p_good) << " |\n"
    << "| P(alive, good score) | " << pct(p_good) << " |\n"
    << "| survival-incorporated median | " << outcome_label(sum.survival_incorporated_median)
    << " |\n"
    << "| bad/good boundary quantile | " << pct(1.0 - p_good) << " |\n";
  return {t.str(), stacked_bar_svg("Ranked composite outcomes",
                                   {composite_bar("population", 1.0 - sum.p_survival,
                                                  sum.p_survival - p_good, p_good)})};
}

inline void comparison_rows(std::ostream& t, const ComparisonReport& r,
                            std::string_view survivor_label) {
  auto row = [&](std::string_view name, const std::string& a, const std::string& b) {
    t << "| " << name << " | " << a << " | " << b << " |\n";
  };
  const auto& a = r.arm0;
  const auto& b = r.arm1;
  t << "| quantity | A=0 | A=1 |\n|---|---|---|\n";
  row("P(death)", pct(1.0 - a.p_survival), pct(1.0 - b.p_survival));
  row("P(alive, bad score)", pct(a.p_survival - a.p_alive_above_threshold),
      pct(b.p_survival - b.p_alive_above_threshold));
  row("P(alive, good score)", pct(a.p_alive_above_threshold), pct(b.p_alive_above_threshold));
  row("P(survival)", pct(a.p_survival), pct(b.p_survival));
  row("bad/good boundary quantile", pct(1.0 - a.p_alive_above_threshold),
      pct(1.0 - b.p_alive_above_threshold));
  row("survival-incorporated median", outcome_label(a.survival_incorporated_median),
      outcome_label(b.survival_incorporated_median));
  row(survivor_label == "survivors" ? "median in the survivors" : survivor_label,
      score_label(*a.median_in_survivors), score_label(*b.median_in_survivors));
  if (a.median_in_always_survivors && b.median_in_always_survivors)
    row("median in the always-survivors", score_label(*a.median_in_always_survivors),
        score_label(*b.median_in_always_survivors));
  t << "\n| comparison | value |\n|---|---|\n"
    << "| direction (survival vs median in survivors) | "
    << to_string(r.direction_survivor_median) << " |\n";
  if (r.direction_always_survivor_median)
    t << "| direction (survival vs median in always-survivors) | "
      << to_string(*r.direction_always_survivor_median) << " |\n";
  t << "| trade-off illusion flag | " << (r.tradeoff_illusion_flag ? "true" : "false")
    << " |\n";
}

inline FigureOutput reproduce_figure2() {
  const auto r = compare_arms(summarize_sample(figures::figure2_arm0(), figures::kThreshold),
                              summarize_sample(figures::figure2_arm1(), figures::kThreshold));
  std::ostringstream t;
  t << "# Figure 2: survival-incorporated median vs median in the survivors\n\n"
    << kQuantileNote << "\n\n";
  comparison_rows(t, r, "survivors");
  std::vector<Bar> bars;
  for (auto* s : {&r.arm0, &r.arm1})
    bars.push_back(composite_bar(s == &r.arm0 ? "A=0" : "A=1", 1.0 - s->p_survival,
                                 s->p_survival - s->p_alive_above_threshold,
                                 s->p_alive_above_threshold));
  return {t.str(), stacked_bar_svg("Ranked composite outcomes by arm", bars)};
}

inline FigureOutput reproduce_figure3() {
  const auto spec = figures::figure3_spec();
  const auto r = evaluate_scenario(spec, figures::kThreshold);
  const auto m1 = observed_marginals(spec, Arm::Treated);
  const double as_fraction = always_survivor_fraction_identified(r.arm0.p_survival, true);
  std::ostringstream t;
  t << "# Figure 3: survival-incorporated median vs median in the always-survivors\n\n"
    << kQuantileNote << "\n\n";
  t << "| stratum | proportion |\n|---|---|\n";
  for (auto s : kStrata)
    t << "| " << stratum_name(s) << " | " << pct(spec.proportion(s)) << " |\n";
  t << "\n| stratum cell | P(alive, bad) | P(alive, good) |\n|---|---|---|\n";
  for (const auto& [cell, dist] : spec.scores) {
    const double w = spec.proportion(cell.first);
    t << "| " << cell_name(cell) << " | " << pct(w * (1.0 - dist.mass_above(0.5))) << " | "
      << pct(w * dist.mass_above(0.5)) << " |\n";
  }
  t << "\n";
  comparison_rows(t, r, "survivors");
  t << "\n| check | value |\n|---|---|\n"
    << "| always-survivor fraction identified under monotonicity | " << pct(as_fraction)
    << " |\n"
    << "| A=1 recomposed: death / bad / good | " << pct(m1.p_death) << " / "
    << pct(m1.p_survival - m1.survivor_mass.mass_above(0.5)) << " / "
    << pct(m1.survivor_mass.mass_above(0.5)) << " |\n";

  auto cell = [&](StratumLabel s, Arm a, bool good) {
    const auto* d = spec.score_dist(s, a);
    if (!d) return 0.0;
    const double g = d->mass_above(0.5);
    return spec.proportion(s) * (good ? g : 1.0 - g);
  };
  using S = StratumLabel;
  std::vector<Bar> bars;
  bars.push_back(Bar{"A=0",
                     {{"death", 1.0 - r.arm0.p_survival, kDeathColor},
                      {"always-survivor, bad", cell(S::AlwaysSurvivor, Arm::Control, false), kBadColor},
                      {"always-survivor, good", cell(S::AlwaysSurvivor, Arm::Control, true), kGoodColor}}});
  bars.push_back(Bar{"A=1",
                     {{"death", 1.0 - r.arm1.p_survival, kDeathColor},
                      {"always-survivor, bad", cell(S::AlwaysSurvivor, Arm::Treated, false), kBadColor},
                      {"protected, bad", cell(S::Protected, Arm::Treated, false), "#f0a09c"},
                      {"always-survivor, good", cell(S::AlwaysSurvivor, Arm::Treated, true), kGoodColor},
                      {"protected, good", cell(S::Protected, Arm::Treated, true), "#93cfa6"}}});
  return {t.str(), stacked_bar_svg("Ranked composite outcomes by arm and stratum", bars)};
}

inline FigureOutput reproduce_figure(int figure) {
  switch (figure) {
  case 1: return reproduce_figure1();
  case 2: return reproduce_figure2();
  case 3: return reproduce_figure3();
  }
  throw ValidationError("unknown figure id " + std::to_string(figure));
}

inline void run_reproduce(int figure, const std::string& dir, std::ostream& out) {
  const auto fig = reproduce_figure(figure);
  std::filesystem::create_directories(dir);
  const auto base = std::filesystem::path(dir) / ("figure" + std::to_string(figure));
  for (auto [ext, body] : {std::pair{".md", &fig.table}, std::pair{".svg", &fig.svg}}) {
    const auto p = base.string() + ext;
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p);
    f << *body;
    out << "wrote " << p << '\n';
  }
}

// ---------------------------------------------------------------------------

/// Runs the CLI. `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Survival-incorporated quantiles for outcomes truncated by death"};
  app.require_subcommand(1);

  EstimateOptions est;
  std::string est_out;
  auto* estimate = app.add_subcommand("estimate", "Summaries, comparison and bootstrap CIs for a dataset");
  estimate->add_option("--input", est.input, "Dataset CSV")->required();
  estimate->add_option("--quantile", est.quantiles, "Survival-incorporated quantile level (repeatable)");
  estimate->add_option("--threshold", est.threshold, "Good-outcome threshold (alive with score above)");
  estimate->add_option("--bootstrap", est.bootstrap, "Bootstrap resamples (0 disables)");
  auto* level_opt = estimate->add_option("--level", est.level, "Confidence level");
  estimate->add_option("--seed", est.seed, "RNG seed (overrides $SURVMED_SEED)");
  auto* stat_opt = estimate->add_option("--statistic", est.statistics,
                                        "sim_median|survivor_median|survival_prob|prob_alive_above");
  estimate->add_option("--workers", est.workers, "Worker threads");
  estimate->add_option("--out", est_out, "Output file (default stdout)");
  estimate->add_option("--format", est.format, "csv|md|json");

  std::string sc_file, sc_out, sc_format = "md";
  double sc_threshold = 0.5;
  std::vector<double> sc_quantiles;
  auto* scenario = app.add_subcommand("scenario", "Evaluate a principal-stratification scenario file");
  scenario->add_option("--file", sc_file, "Scenario JSON")->required();
  scenario->add_option("--threshold", sc_threshold, "Good-outcome threshold");
  scenario->add_option("--quantile", sc_quantiles, "Extra quantile levels");
  scenario->add_option("--out", sc_out, "Output file (default stdout)");
  scenario->add_option("--format", sc_format, "csv|md|json");

  SearchOptions so;
  double min_survival = 0.0;
  std::string se_out;
  auto* search = app.add_subcommand("search", "Grid search for trade-off illusions (CSV)");
  search->add_option("--grid-step", so.grid_step, "Grid step dividing 1");
  search->add_option("--threshold", so.good_threshold, "Good-outcome threshold");
  auto* min_opt = search->add_option("--min-survival", min_survival, "Minimum survival in both arms");
  search->add_option("--workers", so.workers, "Worker threads");
  search->add_option("--sweep-points", so.sweep_points, "Monotone allocations swept per hit");
  search->add_option("--out", se_out, "Output file (default stdout)");

  int figure = 0;
  std::string rp_dir;
  auto* reproduce = app.add_subcommand("reproduce", "Write a figure's table (md) and chart (svg)");
  reproduce->add_option("--figure", figure, "1, 2 or 3")->required();
  reproduce->add_option("--out", rp_dir, "Output directory")->required();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitInvalid;
  }

  auto with_output = [&](const std::string& path, auto&& body) {
    if (path.empty()) {
      body(out);
      return;
    }
    std::ostringstream buf;
    body(buf);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << buf.str();
  };

  try {
    if (estimate->parsed()) {
      if (est.bootstrap == 0 && (stat_opt->count() > 0 || level_opt->count() > 0)) {
        err << "usage error: --statistic/--level require bootstrap resamples (--bootstrap > 0)\n";
        return kExitInvalid;
      }
      with_output(est_out, [&](std::ostream& o) { run_estimate(est, o); });
    } else if (scenario->parsed()) {
      with_output(sc_out, [&](std::ostream& o) {
        run_scenario(sc_file, sc_threshold, sc_quantiles, sc_format, o);
      });
    } else if (search->parsed()) {
      if (min_opt->count() > 0) so.min_survival = min_survival;
      with_output(se_out, [&](std::ostream& o) { run_search(so, o); });
    } else if (reproduce->parsed()) {
      run_reproduce(figure, rp_dir, out);
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    for (const auto& d : e.details()) err << "  - " << d << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitOk;
}

} // namespace survmed::cli
