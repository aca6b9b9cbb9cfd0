#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lexalign/alignment.hpp"
#include "lexalign/rubric.hpp"
#include "lexalign/util.hpp"

namespace lexalign {

// All report numbers are printed to 3 decimal places.
inline std::string format_mean_std(double mean, double std_dev) {
  return util::format_3dp(mean) + " ± " + util::format_3dp(std_dev);
}

enum class TableFormat { Csv, Markdown };

// ---------------------------------------------------------------------------
// Aggregate tables
// ---------------------------------------------------------------------------

using VariantRows = std::vector<std::pair<StanceVariant, std::vector<AggregateRow>>>;

namespace detail {

struct TableKey {
  int party = 0;
  int b = 0;
  std::string article;

  bool operator<(const TableKey& other) const {
    if (article != other.article) return article_key_less(article, other.article);
    return std::tie(party, b) < std::tie(other.party, other.b);
  }
};

inline TableKey table_key(const AggregateRow& row) {
  TableKey key;
  key.party = static_cast<int>(row.party);
  if (row.verdict) key.b = static_cast<int>(*row.verdict);
  if (row.iteration) key.b = *row.iteration;
  if (row.article) key.article = *row.article;
  return key;
}

inline std::vector<std::string> key_columns(Grouping grouping) {
  switch (grouping) {
    case Grouping::PartyVerdict:
      return {"party", "verdict"};
    case Grouping::PartyIteration:
      return {"party", "iteration"};
    case Grouping::ArticleParty:
      return {"article", "party"};
  }
  return {};
}

inline std::vector<std::string> key_cells(const AggregateRow& row, Grouping grouping) {
  switch (grouping) {
    case Grouping::PartyVerdict:
      return {display_name(row.party), display_name(*row.verdict)};
    case Grouping::PartyIteration:
      return {display_name(row.party), std::to_string(*row.iteration)};
    case Grouping::ArticleParty:
      return {*row.article, display_name(row.party)};
  }
  return {};
}

}  // namespace detail

// One row per group key; one "mean ± std" column (plus n) per prompt variant.
inline std::string emit_table(Grouping grouping, const VariantRows& variants,
                              TableFormat format) {
  std::map<detail::TableKey, std::vector<std::optional<const AggregateRow*>>> grid;
  for (std::size_t v = 0; v < variants.size(); ++v) {
    for (const auto& row : variants[v].second) {
      auto& slots = grid[detail::table_key(row)];
      slots.resize(variants.size());
      slots[v] = &row;
    }
  }
  for (auto& [key, slots] : grid) slots.resize(variants.size());

  std::vector<std::string> header = detail::key_columns(grouping);
  for (const auto& [variant, rows] : variants) {
    header.push_back(to_string(variant));
    header.push_back("n (" + to_string(variant) + ")");
  }

  std::vector<std::vector<std::string>> body;
  for (const auto& [key, slots] : grid) {
    const AggregateRow* any = nullptr;
    for (const auto& slot : slots)
      if (slot) any = *slot;
    std::vector<std::string> cells = detail::key_cells(*any, grouping);
    for (const auto& slot : slots) {
      if (slot) {
        cells.push_back(format_mean_std((*slot)->mean, (*slot)->std_dev));
        cells.push_back(std::to_string((*slot)->n));
      } else {
        cells.push_back("");
        cells.push_back("0");
      }
    }
    body.push_back(std::move(cells));
  }

  if (format == TableFormat::Csv) {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i)
      out += (i ? "," : "") + util::csv_escape(header[i]);
    out += "\n";
    for (const auto& row : body) {
      for (std::size_t i = 0; i < row.size(); ++i)
        out += (i ? "," : "") + util::csv_escape(row[i]);
      out += "\n";
    }
    return out;
  }

  std::string out = "|";
  for (const auto& h : header) out += " " + h + " |";
  out += "\n|";
  for (std::size_t i = 0; i < header.size(); ++i) out += " --- |";
  out += "\n";
  for (const auto& row : body) {
    out += "|";
    for (const auto& cell : row) out += " " + cell + " |";
    out += "\n";
  }
  return out;
}

// Iteration pivot: one row per party, one column per sample index.
inline std::string emit_party_iteration_pivot(const std::vector<AggregateRow>& rows,
                                              TableFormat format) {
  std::set<int> iterations;
  std::map<int, std::map<int, const AggregateRow*>> by_party;
  for (const auto& row : rows) {
    if (!row.iteration) throw PreconditionError("pivot input must be party-iteration rows");
    iterations.insert(*row.iteration);
    by_party[static_cast<int>(row.party)][*row.iteration] = &row;
  }

  std::vector<std::string> header = {"party"};
  for (int it : iterations) header.push_back("n=" + std::to_string(it));

  std::vector<std::vector<std::string>> body;
  for (const auto& [party, cells] : by_party) {
    std::vector<std::string> out_row = {display_name(static_cast<Party>(party))};
    for (int it : iterations) {
      auto found = cells.find(it);
      out_row.push_back(found == cells.end()
                            ? ""
                            : format_mean_std(found->second->mean, found->second->std_dev));
    }
    body.push_back(std::move(out_row));
  }

  if (format == TableFormat::Csv) {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i)
      out += (i ? "," : "") + util::csv_escape(header[i]);
    out += "\n";
    for (const auto& row : body) {
      for (std::size_t i = 0; i < row.size(); ++i)
        out += (i ? "," : "") + util::csv_escape(row[i]);
      out += "\n";
    }
    return out;
  }
  std::string out = "|";
  for (const auto& h : header) out += " " + h + " |";
  out += "\n|";
  for (std::size_t i = 0; i < header.size(); ++i) out += " --- |";
  out += "\n";
  for (const auto& row : body) {
    out += "|";
    for (const auto& cell : row) out += " " + cell + " |";
    out += "\n";
  }
  return out;
}

inline std::string emit_variability_table(const std::vector<VariabilityRow>& rows) {
  std::string out = "ruling_id,party,mean,std,n\n";
  for (const auto& r : rows) {
    out += r.ruling_id + "," + display_name(r.party) + "," + util::format_3dp(r.mean) + "," +
           util::format_3dp(r.std_dev) + "," + std::to_string(r.n) + "\n";
  }
  return out;
}

inline std::string emit_rubric_table(const std::vector<RubricSummaryRow>& rows) {
  std::vector<RubricSummaryRow> sorted = rows;
  std::sort(sorted.begin(), sorted.end(), [](const RubricSummaryRow& a, const RubricSummaryRow& b) {
    int pa = a.party ? static_cast<int>(*a.party) : -1;
    int pb = b.party ? static_cast<int>(*b.party) : -1;
    return std::tie(a.metric, pa) < std::tie(b.metric, pb);
  });
  std::string out = "metric,party,mean,count\n";
  for (const auto& r : sorted) {
    out += to_string(r.metric) + "," + (r.party ? display_name(*r.party) : std::string("all")) +
           "," + util::format_3dp(r.mean) + "," + std::to_string(r.count) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// SVG charts
// ---------------------------------------------------------------------------
// Charts are static artifacts generated from already-emitted tables, so the
// table stays the source of truth and the chart can always be rebuilt.

struct ChartSeries {
  std::string label;
  std::string color;
};

struct ChartGroup {
  std::string label;
  // One slot per series; empty slot = no bar (e.g. absent State).
  std::vector<std::optional<std::pair<double, double>>> values;  // (value, error)
};

namespace detail {

inline std::string svg_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

inline double nice_ceiling(double max_value) {
  if (max_value <= 0) return 1.0;
  for (double step : {0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0}) {
    if (max_value / step <= 10.0) return std::ceil(max_value / step - 1e-9) * step;
  }
  return std::ceil(max_value / 10.0) * 10.0;
}

inline std::string px(double v) { return util::format_3dp(v); }

}  // namespace detail

inline std::string render_bar_chart(const std::string& title, const std::string& y_label,
                                    const std::vector<ChartSeries>& series,
                                    const std::vector<ChartGroup>& groups,
                                    const std::string& footer = "") {
  const double width = 840, height = 420;
  const double left = 70, right = 20, top = 48, bottom = 78;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  double max_value = 0;
  for (const auto& g : groups)
    for (const auto& v : g.values)
      if (v) max_value = std::max(max_value, v->first + v->second);
  double y_max = detail::nice_ceiling(max_value);

  auto y_of = [&](double value) { return top + plot_h * (1.0 - value / y_max); };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::px(width) +
         "\" height=\"" + detail::px(height) + "\" viewBox=\"0 0 " + detail::px(width) + " " +
         detail::px(height) + "\">\n";
  if (!footer.empty()) svg += "<!-- " + detail::svg_escape(footer) + " -->\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + detail::px(width / 2) +
         "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
         detail::svg_escape(title) + "</text>\n";

  // y axis with gridlines at 5 even divisions
  for (int i = 0; i <= 5; ++i) {
    double value = y_max * i / 5.0;
    double y = y_of(value);
    svg += "<line x1=\"" + detail::px(left) + "\" y1=\"" + detail::px(y) + "\" x2=\"" +
           detail::px(width - right) + "\" y2=\"" + detail::px(y) +
           "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + detail::px(left - 8) + "\" y=\"" + detail::px(y + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
           util::format_3dp(value) + "</text>\n";
  }
  svg += "<text x=\"16\" y=\"" + detail::px(top + plot_h / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 " +
         detail::px(top + plot_h / 2) + ")\">" + detail::svg_escape(y_label) + "</text>\n";

  auto n_groups = static_cast<double>(groups.size());
  auto n_series = static_cast<double>(series.size());
  double group_w = plot_w / std::max(1.0, n_groups);
  double bar_w = group_w * 0.8 / std::max(1.0, n_series);

  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const auto& g = groups[gi];
    double gx = left + group_w * static_cast<double>(gi) + group_w * 0.1;
    for (std::size_t si = 0; si < series.size(); ++si) {
      if (si >= g.values.size() || !g.values[si]) continue;
      auto [value, err] = *g.values[si];
      double x = gx + bar_w * static_cast<double>(si);
      double y = y_of(value);
      svg += "<rect x=\"" + detail::px(x) + "\" y=\"" + detail::px(y) + "\" width=\"" +
             detail::px(bar_w * 0.92) + "\" height=\"" + detail::px(y_of(0) - y) + "\" fill=\"" +
             series[si].color + "\"/>\n";
      if (err > 0) {
        double cx = x + bar_w * 0.46;
        svg += "<line x1=\"" + detail::px(cx) + "\" y1=\"" + detail::px(y_of(value - err)) +
               "\" x2=\"" + detail::px(cx) + "\" y2=\"" + detail::px(y_of(value + err)) +
               "\" stroke=\"#333333\" stroke-width=\"1.5\"/>\n";
      }
    }
    svg += "<text x=\"" + detail::px(gx + group_w * 0.4) + "\" y=\"" +
           detail::px(height - bottom + 18) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
           detail::svg_escape(g.label) + "</text>\n";
  }

  // x axis line and legend
  svg += "<line x1=\"" + detail::px(left) + "\" y1=\"" + detail::px(y_of(0)) + "\" x2=\"" +
         detail::px(width - right) + "\" y2=\"" + detail::px(y_of(0)) +
         "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
  double lx = left;
  double ly = height - 26;
  for (const auto& s : series) {
    svg += "<rect x=\"" + detail::px(lx) + "\" y=\"" + detail::px(ly - 10) +
           "\" width=\"12\" height=\"12\" fill=\"" + s.color + "\"/>\n";
    svg += "<text x=\"" + detail::px(lx + 16) + "\" y=\"" + detail::px(ly) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" + detail::svg_escape(s.label) +
           "</text>\n";
    lx += 20 + 8.0 * static_cast<double>(s.label.size()) + 24;
  }
  svg += "</svg>\n";
  return svg;
}

inline const std::vector<ChartSeries>& party_series() {
  static const std::vector<ChartSeries> series = {
      {"Applicant", "#4878a8"}, {"State", "#d08045"}, {"Court", "#5d9e6c"}};
  return series;
}

// Underlying table for the per-article chart (and for rebuilding it).
inline std::string emit_article_party_table(const std::vector<AggregateRow>& rows) {
  std::string out = "article,party,mean,std,n\n";
  for (const auto& r : rows) {
    if (!r.article) throw PreconditionError("article-party table needs article-party rows");
    out += util::csv_escape(*r.article) + "," + display_name(r.party) + "," +
           util::format_3dp(r.mean) + "," + util::format_3dp(r.std_dev) + "," +
           std::to_string(r.n) + "\n";
  }
  return out;
}

// Builds the Figure-4-style chart from the emitted table text alone.
inline std::string article_chart_from_table(const std::string& csv_text,
                                            const std::string& title,
                                            const std::string& footer = "") {
  auto lines = util::split_lines(csv_text);
  std::vector<ChartGroup> groups;
  std::map<std::string, std::size_t> group_index;
  bool saw_header = false;
  for (const auto& line : lines) {
    if (util::trim(line).empty()) continue;
    if (!saw_header) {
      saw_header = true;
      continue;
    }
    auto fields = util::csv_split(line);
    if (fields.size() != 5)
      throw MalformedCorpus("article-party table row needs 5 fields: \"" + line + "\"");
    const std::string& article = fields[0];
    Party party = require_party(fields[1]);
    double mean = std::stod(fields[2]);
    double err = std::stod(fields[3]);
    auto [it, inserted] = group_index.emplace(article, groups.size());
    if (inserted) {
      ChartGroup g;
      g.label = article;
      g.values.resize(party_series().size());
      groups.push_back(std::move(g));
    }
    groups[it->second].values[static_cast<std::size_t>(party)] = {mean, err};
  }
  return render_bar_chart(title, "cosine distance", party_series(), groups, footer);
}

inline std::string rubric_chart_from_summary(const std::vector<RubricSummaryRow>& rows,
                                             const std::string& footer = "") {
  std::vector<ChartGroup> groups(3);
  groups[0].label = "completeness";
  groups[1].label = "consistency";
  groups[2].label = "hallucination";
  for (auto& g : groups) g.values.resize(party_series().size());
  for (const auto& r : rows) {
    if (!r.party) continue;  // chart shows the per-party view
    groups[static_cast<std::size_t>(r.metric)].values[static_cast<std::size_t>(*r.party)] = {
        r.mean, 0.0};
  }
  return render_bar_chart("Extraction rubric scores", "mean score (1-5)", party_series(), groups,
                          footer);
}

}  // namespace lexalign
