#pragma once

// Report emission. Each report is first built as an ordered JSON document;
// the csv and md renderings are derived from it, so all three formats carry
// the same fields in the same order.

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "survmed/format.hpp"
#include "survmed/inference.hpp"
#include "survmed/paradox.hpp"

namespace survmed {

using ojson = nlohmann::ordered_json;

enum class ReportFormat { Csv, Markdown, Json };

inline std::optional<ReportFormat> parse_format(std::string_view s) {
  if (s == "csv") return ReportFormat::Csv;
  if (s == "md") return ReportFormat::Markdown;
  if (s == "json") return ReportFormat::Json;
  return std::nullopt;
}

inline ojson outcome_json(const CompositeOutcome& o) {
  return o.is_death() ? ojson("death") : ojson(o.score());
}

inline ojson opt_json(const std::optional<double>& x) {
  return x ? ojson(*x) : ojson(nullptr);
}

inline ojson arm_json(int arm, const ArmSummary& s) {
  ojson j;
  j["arm"] = arm;
  if (s.n > 0) j["n"] = s.n;
  j["p_survival"] = s.p_survival;
  j["p_alive_above_threshold"] = s.p_alive_above_threshold;
  j["survival_incorporated_median"] = outcome_json(s.survival_incorporated_median);
  for (const auto& [q, v] : s.quantiles) j["quantile_" + fmt_num(q)] = outcome_json(v);
  j["median_in_survivors"] = opt_json(s.median_in_survivors);
  if (s.median_in_always_survivors)
    j["median_in_always_survivors"] = *s.median_in_always_survivors;
  return j;
}

inline ojson comparison_json(const ComparisonReport& r) {
  ojson j;
  j["direction_survivor_median"] = to_string(r.direction_survivor_median);
  if (r.direction_always_survivor_median)
    j["direction_always_survivor_median"] = to_string(*r.direction_always_survivor_median);
  j["tradeoff_illusion_flag"] = r.tradeoff_illusion_flag;
  return j;
}

inline ojson bootstrap_json(const Statistic& stat, const BootstrapResult& b) {
  ojson j;
  j["statistic"] = std::string(stat.name());
  if (stat.kind == Statistic::Kind::ProbAliveAbove) j["threshold"] = stat.threshold;
  j["point_estimate"] = b.point_estimate;
  j["ci_lower"] = b.ci_lower;
  j["ci_upper"] = b.ci_upper;
  j["level"] = b.level;
  j["n_resamples"] = b.n_resamples;
  j["n_death_median_resamples"] = b.n_death_median_resamples;
  j["seed"] = b.seed;
  if (stat.kind == Statistic::Kind::SimMedian || stat.kind == Statistic::Kind::SurvivorMedian)
    j["sentinel"] = b.sentinel;
  return j;
}

inline ojson comparison_document(const ComparisonReport& r, double threshold,
                                 const std::vector<std::pair<Statistic, BootstrapResult>>&
                                     bootstrap = {}) {
  ojson doc;
  doc["note"] = kQuantileNote;
  doc["threshold"] = threshold;
  doc["arms"] = ojson::array({arm_json(0, r.arm0), arm_json(1, r.arm1)});
  doc["comparison"] = comparison_json(r);
  if (!bootstrap.empty()) {
    doc["bootstrap"] = ojson::array();
    for (const auto& [s, b] : bootstrap) doc["bootstrap"].push_back(bootstrap_json(s, b));
  }
  return doc;
}

namespace detail {

inline std::string scalar_text(const ojson& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_float()) return fmt_num(v.get<double>());
  return v.dump();
}

inline std::string scalar_short(const ojson& v) {
  if (v.is_number_float()) return fmt_short(v.get<double>());
  return scalar_text(v);
}

inline void render_csv(std::ostream& out, const ojson& doc) {
  out << "section,key,value\n";
  for (const auto& [section, value] : doc.items()) {
    if (value.is_array()) {
      for (std::size_t i = 0; i < value.size(); ++i)
        for (const auto& [k, v] : value[i].items())
          out << section << '[' << i << "]," << k << ',' << scalar_text(v) << '\n';
    } else if (value.is_object()) {
      for (const auto& [k, v] : value.items())
        out << section << ',' << k << ',' << scalar_text(v) << '\n';
    } else {
      out << section << ",," << scalar_text(value) << '\n';
    }
  }
}

inline void render_md(std::ostream& out, const ojson& doc, std::string_view title) {
  out << "# " << title << "\n\n";
  for (const auto& [section, value] : doc.items()) {
    if (value.is_array()) {
      // one table; columns are the union of row keys in first-seen order
      std::vector<std::string> cols;
      for (const auto& row : value)
        for (const auto& [k, v] : row.items())
          if (std::find(cols.begin(), cols.end(), k) == cols.end()) cols.push_back(k);
      out << "## " << section << "\n\n|";
      for (const auto& k : cols) out << ' ' << k << " |";
      out << "\n|";
      for (std::size_t i = 0; i < cols.size(); ++i) out << "---|";
      out << '\n';
      for (const auto& row : value) {
        out << '|';
        for (const auto& k : cols)
          out << ' ' << (row.contains(k) ? scalar_short(row[k]) : std::string()) << " |";
        out << '\n';
      }
      out << '\n';
    } else if (value.is_object()) {
      out << "## " << section << "\n\n| key | value |\n|---|---|\n";
      for (const auto& [k, v] : value.items())
        out << "| " << k << " | " << scalar_short(v) << " |\n";
      out << '\n';
    } else {
      out << "**" << section << "**: " << scalar_short(value) << "\n\n";
    }
  }
}

} // namespace detail

inline void render(std::ostream& out, const ojson& doc, ReportFormat fmt,
                   std::string_view title) {
  switch (fmt) {
  case ReportFormat::Json: out << doc.dump(2) << '\n'; break;
  case ReportFormat::Csv: detail::render_csv(out, doc); break;
  case ReportFormat::Markdown: detail::render_md(out, doc, title); break;
  }
}

// ---------------------------------------------------------------------------
// Search rows

inline constexpr const char* kSearchHeader =
    "arm0_death,arm0_bad,arm0_good,arm1_death,arm1_bad,arm1_good,"
    "p_survival0,p_survival1,p_good0,p_good1,sim0,sim1,"
    "survivor_median0,survivor_median1,direction_survivor_median,"
    "as_sweep_opposite,as_sweep_total";

inline void write_search_row(std::ostream& out, const TradeoffHit& h) {
  const double k = h.scenario.units;
  const auto& a0 = h.scenario.arm0;
  const auto& a1 = h.scenario.arm1;
  const auto& r = h.report;
  out << fmt_num(a0.deaths / k) << ',' << fmt_num(a0.bad / k) << ',' << fmt_num(a0.good / k)
      << ',' << fmt_num(a1.deaths / k) << ',' << fmt_num(a1.bad / k) << ','
      << fmt_num(a1.good / k) << ',' << fmt_num(r.arm0.p_survival) << ','
      << fmt_num(r.arm1.p_survival) << ',' << fmt_num(r.arm0.p_alive_above_threshold) << ','
      << fmt_num(r.arm1.p_alive_above_threshold) << ','
      << fmt_outcome(r.arm0.survival_incorporated_median) << ','
      << fmt_outcome(r.arm1.survival_incorporated_median) << ','
      << fmt_opt(r.arm0.median_in_survivors) << ',' << fmt_opt(r.arm1.median_in_survivors)
      << ',' << to_string(r.direction_survivor_median) << ',';
  if (h.always_survivor_sweep)
    out << h.always_survivor_sweep->opposite << ',' << h.always_survivor_sweep->total;
  else
    out << ',';
  out << '\n';
}

// ---------------------------------------------------------------------------
// Stacked-bar SVG

struct BarSegment {
  std::string label;
  double fraction = 0.0;
  std::string color;
};

struct Bar {
  std::string label;
  std::vector<BarSegment> segments; // bottom (worst) to top (best)
};

inline std::string stacked_bar_svg(std::string_view title, const std::vector<Bar>& bars) {
  const int width = 140 + 180 * static_cast<int>(bars.size()) + 200;
  const int top = 50, plot_h = 400, bar_w = 110;
  auto y_of = [&](double cum) { return top + plot_h * (1.0 - cum); };
  std::ostringstream s;
  char buf[256];
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
    << top + plot_h + 60 << "\" font-family=\"sans-serif\" font-size=\"13\">\n";
  s << "<text x=\"20\" y=\"28\" font-size=\"16\">" << title << "</text>\n";
  for (int pct = 0; pct <= 100; pct += 25) {
    std::snprintf(buf, sizeof buf,
                  "<text x=\"50\" y=\"%.1f\" text-anchor=\"end\">%d%%</text>\n",
                  y_of(pct / 100.0) + 4, pct);
    s << buf;
  }
  std::vector<std::pair<std::string, std::string>> legend;
  for (std::size_t b = 0; b < bars.size(); ++b) {
    const int x = 80 + 180 * static_cast<int>(b);
    double cum = 0.0;
    for (const auto& seg : bars[b].segments) {
      const double y1 = y_of(cum + seg.fraction), h = plot_h * seg.fraction;
      std::snprintf(buf, sizeof buf,
                    "<rect x=\"%d\" y=\"%.1f\" width=\"%d\" height=\"%.1f\" fill=\"%s\" "
                    "stroke=\"white\"/>\n",
                    x, y1, bar_w, h, seg.color.c_str());
      s << buf;
      if (seg.fraction > 0.0) {
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%d\" y=\"%.1f\" text-anchor=\"middle\" fill=\"white\">"
                      "%.0f%%</text>\n",
                      x + bar_w / 2, y1 + h / 2 + 4, seg.fraction * 100.0);
        s << buf;
      }
      cum += seg.fraction;
      bool seen = false;
      for (const auto& l : legend) seen = seen || l.first == seg.label;
      if (!seen) legend.emplace_back(seg.label, seg.color);
    }
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%d\" y=\"%d\" text-anchor=\"middle\">", x + bar_w / 2,
                  top + plot_h + 22);
    s << buf << bars[b].label << "</text>\n";
  }
  const int x_end = 80 + 180 * static_cast<int>(bars.size()) - 40;
  std::snprintf(buf, sizeof buf,
                "<line x1=\"60\" y1=\"%.1f\" x2=\"%d\" y2=\"%.1f\" stroke=\"black\" "
                "stroke-width=\"2\" stroke-dasharray=\"6,4\"/>\n"
                "<text x=\"%d\" y=\"%.1f\">50%% (median)</text>\n",
                y_of(0.5), x_end, y_of(0.5), x_end + 4, y_of(0.5) + 4);
  s << buf;
  for (std::size_t i = 0; i < legend.size(); ++i) {
    const int ly = top + 20 + 24 * static_cast<int>(i);
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%d\" y=\"%d\" width=\"14\" height=\"14\" fill=\"%s\"/>"
                  "<text x=\"%d\" y=\"%d\">",
                  x_end + 4, ly, legend[i].second.c_str(), x_end + 24, ly + 12);
    s << buf << legend[i].first << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

} // namespace survmed
