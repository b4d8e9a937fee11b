// Acceptance suite: one line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "survmed/cli.hpp"
#include "survmed/figures.hpp"
#include "survmed/survmed.hpp"
#include "test_support.hpp"

using namespace survmed;
namespace fs = std::filesystem;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) detail = what;
    ok = ok && cond;
  }
};

int failures = 0;

void criterion(const char* id, const char* name, double limit_s, const std::function<Check()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Check c;
  try {
    c = body();
  } catch (const std::exception& e) {
    c.ok = false;
    c.detail = std::string("exception: ") + e.what();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs >= limit_s) {
    if (c.ok) c.detail = "time limit exceeded";
    c.ok = false;
  }
  if (!c.ok) ++failures;
  std::printf("[%s] %s %s (%.3f s, limit %.0f s)%s%s\n", c.ok ? "PASS" : "FAIL", id, name, secs,
              limit_s, c.ok ? "" : ": ", c.detail.c_str());
  std::fflush(stdout);
}

const auto kBad = CompositeOutcome::survived(kBadScore);

using Key = std::tuple<int, int, int, int, int, int>;

std::set<Key> enumerate_illusions(int units) {
  std::set<Key> out;
  for (int d0 = 0; d0 <= units; ++d0)
    for (int b0 = 0; b0 <= units - d0; ++b0)
      for (int d1 = 0; d1 <= units; ++d1)
        for (int b1 = 0; b1 <= units - d1; ++b1) {
          const int g0 = units - d0 - b0, g1 = units - d1 - b1;
          const int s0 = b0 + g0, s1 = b1 + g1;
          if (s0 == 0 || s1 == 0) continue;
          const int m0 = 2 * b0 >= s0 ? 0 : 1, m1 = 2 * b1 >= s1 ? 0 : 1;
          if ((s1 > s0 && g1 > g0 && m1 < m0) || (s0 > s1 && g0 > g1 && m0 < m1))
            out.emplace(d0, b0, g0, d1, b1, g1);
        }
  return out;
}

std::string run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  if (cli::run(args, out, err) != 0) throw std::runtime_error("cli failed: " + err.str());
  return out.str();
}

} // namespace

int main() {
  criterion("AC1", "Figure 1 reproduction", 1, [] {
    Check c;
    c.expect(survival_incorporated_median(figures::figure1_sample()) == kBad, "SIM is not bad");
    return c;
  });

  criterion("AC2", "Figure 2 reproduction", 1, [] {
    Check c;
    const auto r = compare_arms(summarize_sample(figures::figure2_arm0(), figures::kThreshold),
                                summarize_sample(figures::figure2_arm1(), figures::kThreshold));
    c.expect(r.arm0.survival_incorporated_median == kBad, "SIM(A=0) not bad");
    c.expect(r.arm1.survival_incorporated_median == kBad, "SIM(A=1) not bad");
    c.expect(r.arm0.median_in_survivors == kGoodScore, "survivor median(A=0) not good");
    c.expect(r.arm1.median_in_survivors == kBadScore, "survivor median(A=1) not bad");
    c.expect(r.arm0.p_survival == 0.56 && r.arm1.p_survival == 0.80, "P(survival)");
    c.expect(r.arm0.p_alive_above_threshold == 0.30 && r.arm1.p_alive_above_threshold == 0.35,
             "P(alive & good)");
    c.expect(r.direction_survivor_median == DirectionClassification::Opposite, "direction");
    c.expect(r.tradeoff_illusion_flag, "flag");
    return c;
  });

  criterion("AC3", "Figure 3 reproduction", 1, [] {
    Check c;
    const auto spec = figures::figure3_spec();
    c.expect(always_survivor_median_oracle(spec, Arm::Control) == kGoodScore, "AS median(A=0)");
    c.expect(always_survivor_median_oracle(spec, Arm::Treated) == kBadScore, "AS median(A=1)");
    const auto m0 = observed_marginals(spec, Arm::Control);
    const double as = always_survivor_fraction_identified(m0.p_survival, spec.monotonicity_asserted);
    // exact up to double rounding of the stratum mixture
    c.expect(std::fabs(as - 0.56) <= 1e-12, "always-survivor fraction");
    const auto m1 = observed_marginals(spec, Arm::Treated);
    c.expect(std::fabs(m1.p_death - 0.20) <= 1e-12, "A=1 death");
    c.expect(std::fabs(m1.p_survival - m1.survivor_mass.mass_above(0.5) - 0.45) <= 1e-12, "A=1 bad");
    c.expect(std::fabs(m1.survivor_mass.mass_above(0.5) - 0.35) <= 1e-12, "A=1 good");
    return c;
  });

  criterion("AC4", "high-mortality quantiles", 1, [] {
    Check c;
    const auto s = materialize_sample(60, {{kGoodScore, 40}});
    c.expect(survival_incorporated_quantile(s, QuantileLevel(0.5)).is_death(), "median not Death");
    c.expect(survival_incorporated_quantile(s, QuantileLevel(0.75)).is_survived(),
             "75th quantile not Survived");
    return c;
  });

  criterion("AC5", "oracle equivalence (10,000 samples x 5 levels)", 30, [] {
    Check c;
    std::mt19937_64 rng(5);
    std::size_t agree = 0, total = 0;
    for (int i = 0; i < 10000; ++i) {
      const auto s = oracle::random_sample(rng, 12);
      std::vector<oracle::NaiveOutcome> naive;
      for (const auto& o : s.outcomes()) naive.push_back(oracle::naive(o));
      for (const auto& q : oracle::kLevels) {
        ++total;
        agree += oracle::naive(survival_incorporated_quantile(s, QuantileLevel(q.value()))) ==
                 oracle::naive_quantile(naive, q);
      }
    }
    c.expect(agree == total, std::to_string(total - agree) + " disagreements");
    return c;
  });

  criterion("AC6", "sentinel equivalence and equivariance (1,000 cases each)", 30, [] {
    Check c;
    std::mt19937_64 rng(6);
    std::size_t violations = 0;
    for (int i = 0; i < 1000; ++i) {
      const auto s = oracle::random_sample(rng, 25);
      const double sentinel = s.min_survivor_score().value_or(0.0) - 0.5 - i % 7;
      const auto enc = sentinel_encode(s, sentinel);
      for (const auto& q : oracle::kLevels) {
        const auto v = survival_incorporated_quantile(s, QuantileLevel(q.value()));
        const double e = type1_quantile(enc, q.value());
        violations += v.is_death() ? e != sentinel : e != v.score();
      }
    }
    auto g = [](double x) { return x * x * x + 2.0 * x; };
    for (int i = 0; i < 1000; ++i) {
      const auto s = oracle::random_sample(rng, 25);
      std::vector<CompositeOutcome> mapped;
      for (const auto& o : s.outcomes())
        mapped.push_back(o.is_death() ? o : CompositeOutcome::survived(g(o.score())));
      const ArmSample t(std::move(mapped));
      for (const auto& q : oracle::kLevels) {
        const auto a = survival_incorporated_quantile(s, QuantileLevel(q.value()));
        const auto b = survival_incorporated_quantile(t, QuantileLevel(q.value()));
        violations += a.is_death() ? !b.is_death() : !(b.is_survived() && b.score() == g(a.score()));
      }
      if (s.survivors() > 0) violations += median_in_survivors(t) != g(median_in_survivors(s));
    }
    c.expect(violations == 0, std::to_string(violations) + " violations");
    return c;
  });

  criterion("AC7", "search soundness (0.05 set equality, 0.01 contains Figure 2)", 300, [] {
    Check c;
    SearchOptions o;
    o.grid_step = 0.05;
    std::set<Key> found;
    for (const auto& h : search_tradeoff_illusions(o)) {
      const auto& a = h.scenario.arm0;
      const auto& b = h.scenario.arm1;
      found.emplace(a.deaths, a.bad, a.good, b.deaths, b.bad, b.good);
    }
    c.expect(found == enumerate_illusions(20), "0.05 grid differs from enumeration");
    o.grid_step = 0.01;
    bool fig2 = false;
    for_each_tradeoff_illusion(o, [&](const TradeoffHit& h) {
      fig2 = fig2 || (h.scenario.arm0 == GridArm{44, 26, 30} && h.scenario.arm1 == GridArm{20, 45, 35});
    });
    c.expect(fig2, "Figure 2 configuration missing");
    return c;
  });

  criterion("AC8", "simulation consistency (n=1e5, 3 SE per cell)", 30, [] {
    Check c;
    const auto spec = figures::figure3_spec();
    const std::size_t n = 100000;
    auto within = [&](std::size_t hits, double p) {
      return std::fabs(hits / double(n) - p) <= 3.0 * std::sqrt(p * (1 - p) / n);
    };
    // observed cells per arm: death, bad, good
    for (auto [arm, assignment] : {std::pair{Arm::Control, Assignment::arm0_only()},
                                   std::pair{Arm::Treated, Assignment::arm1_only()}}) {
      const auto m = observed_marginals(spec, arm);
      const auto pop = generate_population(spec, n, 8, assignment);
      std::map<double, std::size_t> counts;
      std::size_t deaths = 0;
      for (const auto& r : pop) r.outcome.is_death() ? ++deaths : ++counts[r.outcome.score()];
      c.expect(within(deaths, m.p_death), "death fraction arm " + std::to_string(arm_index(arm)));
      for (const auto& a : m.survivor_mass.atoms)
        c.expect(within(counts[a.score], a.prob), "score cell arm " + std::to_string(arm_index(arm)));
    }
    // latent (stratum, arm, outcome) cells under randomized assignment
    const auto pop = generate_population(spec, n, 8, Assignment::randomized());
    std::map<std::tuple<int, int, int>, std::size_t> latent;
    for (const auto& r : pop)
      ++latent[{stratum_index(*r.stratum), arm_index(r.arm),
                r.outcome.is_death() ? -1 : static_cast<int>(r.outcome.score())}];
    for (auto s : kStrata)
      for (auto a : kArms) {
        const double w = spec.proportion(s) * 0.5;
        if (!survives(s, a)) {
          c.expect(within(latent[{stratum_index(s), arm_index(a), -1}], w), "latent death cell");
          continue;
        }
        if (const auto* d = spec.score_dist(s, a))
          for (const auto& atom : d->atoms)
            c.expect(within(latent[{stratum_index(s), arm_index(a), static_cast<int>(atom.score)}],
                            w * atom.prob),
                     "latent cell " + cell_name({s, a}));
      }
    const auto again = generate_population(spec, n, 8, Assignment::randomized());
    bool same = true;
    for (std::size_t i = 0; i < n; ++i)
      same = same && again[i].arm == pop[i].arm && again[i].outcome == pop[i].outcome &&
             again[i].stratum == pop[i].stratum;
    c.expect(same, "not deterministic under fixed seed");
    return c;
  });

  criterion("AC9", "bootstrap coverage (500 replications, n=500/arm, 95%)", 300, [] {
    Check c;
    const auto spec = figures::figure3_spec();
    const double truth = observed_marginals(spec, Arm::Treated).p_survival -
                         observed_marginals(spec, Arm::Control).p_survival;
    int covered = 0;
    const int reps = 500;
    for (int rep = 0; rep < reps; ++rep) {
      const auto p0 = generate_population(spec, 500, 1000 + 2 * rep, Assignment::arm0_only());
      const auto p1 = generate_population(spec, 500, 1001 + 2 * rep, Assignment::arm1_only());
      const auto s0 = split_by_arm(p0)[0], s1 = split_by_arm(p1)[1];
      BootstrapOptions o;
      o.seed = 50000 + rep;
      const auto r = bootstrap_diff_ci(*s0, *s1, Statistic::survival_prob(), o);
      covered += r.ci_lower <= truth && truth <= r.ci_upper;
    }
    const double coverage = covered / double(reps);
    c.expect(coverage >= 0.92 && coverage <= 0.975,
             "coverage " + std::to_string(coverage) + " outside [0.92, 0.975]");
    std::printf("      empirical coverage %.3f\n", coverage);
    return c;
  });

  criterion("AC10", "byte-identical estimate/search across runs and workers {1,4}", 60, [] {
    Check c;
    const auto dir = fs::temp_directory_path() / "survmed_acceptance";
    fs::create_directories(dir);
    const auto data = (dir / "figure2.csv").string();
    {
      std::ofstream f(data);
      f << kDatasetHeader << '\n';
      int id = 0;
      auto arm = [&](int a, int d, int b, int g) {
        for (int i = 0; i < d; ++i) f << "s" << id++ << ',' << a << ",0,\n";
        for (int i = 0; i < b; ++i) f << "s" << id++ << ',' << a << ",1,0\n";
        for (int i = 0; i < g; ++i) f << "s" << id++ << ',' << a << ",1,1\n";
      };
      arm(0, 44, 26, 30);
      arm(1, 20, 45, 35);
    }
    for (const char* fmt : {"csv", "md", "json"}) {
      const std::vector<std::string> est{"estimate", "--input", data, "--quantile", "0.5",
                                         "--quantile", "0.75", "--seed", "11", "--format", fmt};
      auto w1 = est, w4 = est;
      w1.insert(w1.end(), {"--workers", "1"});
      w4.insert(w4.end(), {"--workers", "4"});
      const auto a = run_cli(w1);
      c.expect(a == run_cli(w1), std::string("estimate differs across runs (") + fmt + ")");
      c.expect(a == run_cli(w4), std::string("estimate differs across workers (") + fmt + ")");
    }
    for (const char* step : {"0.05", "0.02"}) {
      const auto a = run_cli({"search", "--grid-step", step, "--workers", "1"});
      c.expect(a == run_cli({"search", "--grid-step", step, "--workers", "1"}), "search across runs");
      c.expect(a == run_cli({"search", "--grid-step", step, "--workers", "4"}), "search across workers");
    }
    return c;
  });

  std::printf("%s: %d criterion(s) failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
