#include <catch2/catch_amalgamated.hpp>

#include "lexalign/reporting.hpp"

using namespace lexalign;

namespace {

AggregateRow verdict_row(Party party, Verdict verdict, double mean, double sd, std::size_t n) {
  AggregateRow row;
  row.party = party;
  row.verdict = verdict;
  row.mean = mean;
  row.std_dev = sd;
  row.n = n;
  return row;
}

AggregateRow iteration_row(Party party, int iteration, double mean, double sd, std::size_t n) {
  AggregateRow row;
  row.party = party;
  row.iteration = iteration;
  row.mean = mean;
  row.std_dev = sd;
  row.n = n;
  return row;
}

AggregateRow article_row(Party party, ArticleKey article, double mean, double sd, std::size_t n) {
  AggregateRow row;
  row.party = party;
  row.article = std::move(article);
  row.mean = mean;
  row.std_dev = sd;
  row.n = n;
  return row;
}

}  // namespace

TEST_CASE("mean and std format as the published cells", "[reporting]") {
  CHECK(format_mean_std(0.242, 0.152) == "0.242 ± 0.152");
  CHECK(format_mean_std(0.2417, 0.1523) == "0.242 ± 0.152");
  CHECK(format_mean_std(0.42, 0.0) == "0.420 ± 0.000");  // the n=1 convention
  CHECK(format_mean_std(1.0, 0.05) == "1.000 ± 0.050");
}

TEST_CASE("the party-verdict table carries one column pair per variant", "[reporting]") {
  VariantRows variants;
  variants.push_back({StanceVariant::Fatto,
                      {verdict_row(Party::Applicant, Verdict::Unfounded, 0.242, 0.152, 20),
                       verdict_row(Party::State, Verdict::Unfounded, 0.31, 0.08, 12)}});
  variants.push_back({StanceVariant::FattoClean,
                      {verdict_row(Party::Applicant, Verdict::Unfounded, 0.25, 0.1, 20)}});

  std::string csv = emit_table(Grouping::PartyVerdict, variants, TableFormat::Csv);
  auto lines = util::split_lines(csv);
  REQUIRE(lines.size() >= 3);
  CHECK(lines[0] == "party,verdict,fatto,n (fatto),fatto-clean,n (fatto-clean)");
  CHECK(lines[1] == "Applicant,Unfounded,0.242 ± 0.152,20,0.250 ± 0.100,20");
  // A slot missing from one variant renders as an empty cell with n = 0.
  CHECK(lines[2] == "State,Unfounded,0.310 ± 0.080,12,,0");

  std::string md = emit_table(Grouping::PartyVerdict, variants, TableFormat::Markdown);
  auto md_lines = util::split_lines(md);
  CHECK(md_lines[0] ==
        "| party | verdict | fatto | n (fatto) | fatto-clean | n (fatto-clean) |");
  CHECK(md_lines[1].find("---") != std::string::npos);
  CHECK(md_lines[2].find("0.242 ± 0.152") != std::string::npos);
}

TEST_CASE("empty aggregate rows emit a header-only table", "[reporting]") {
  VariantRows variants = {{StanceVariant::Fatto, {}}};
  std::string csv = emit_table(Grouping::PartyVerdict, variants, TableFormat::Csv);
  CHECK(csv == "party,verdict,fatto,n (fatto)\n");
}

TEST_CASE("article tables order keys numerically then by treaty", "[reporting]") {
  VariantRows variants = {
      {StanceVariant::Fatto,
       {article_row(Party::Applicant, "117+ECHR:8", 0.3, 0.0, 1),
        article_row(Party::Applicant, "10", 0.2, 0.0, 1),
        article_row(Party::Applicant, "2", 0.1, 0.0, 1)}}};
  std::string csv = emit_table(Grouping::ArticleParty, variants, TableFormat::Csv);
  auto lines = util::split_lines(csv);
  CHECK(lines[0] == "article,party,fatto,n (fatto)");
  CHECK(lines[1].rfind("2,", 0) == 0);
  CHECK(lines[2].rfind("10,", 0) == 0);
  CHECK(lines[3].rfind("117+ECHR:8,", 0) == 0);
}

TEST_CASE("the iteration pivot has one row per party and one column per sample", "[reporting]") {
  std::vector<AggregateRow> rows;
  for (int it = 0; it < 5; ++it) {
    rows.push_back(iteration_row(Party::Applicant, it, 0.1 + 0.01 * it, 0.02, 10));
    rows.push_back(iteration_row(Party::Court, it, 0.2, 0.01, 10));
  }
  rows.push_back(iteration_row(Party::State, 2, 0.4, 0.0, 1));

  std::string csv = emit_party_iteration_pivot(rows, TableFormat::Csv);
  auto lines = util::split_lines(csv);
  REQUIRE(lines.size() == 5);  // 4 rows + terminating newline
  CHECK(lines[4].empty());
  CHECK(lines[0] == "party,n=0,n=1,n=2,n=3,n=4");
  CHECK(lines[1] == "Applicant,0.100 ± 0.020,0.110 ± 0.020,0.120 ± 0.020,0.130 ± 0.020,0.140 ± 0.020");
  // The State appeared only at iteration 2; other cells stay empty.
  CHECK(lines[2] == "State,,,0.400 ± 0.000,,");
  CHECK(lines[3].rfind("Court,", 0) == 0);

  std::vector<AggregateRow> wrong = {verdict_row(Party::Court, Verdict::Founded, 0.1, 0.0, 1)};
  CHECK_THROWS_AS(emit_party_iteration_pivot(wrong, TableFormat::Csv), PreconditionError);
}

TEST_CASE("variability and rubric tables print 3dp rows", "[reporting]") {
  std::vector<VariabilityRow> rows = {{"1/20", Party::Applicant, 0.123456, 0.05, 5},
                                      {"2/20", Party::Court, 0.5, 0.0, 1}};
  CHECK(emit_variability_table(rows) ==
        "ruling_id,party,mean,std,n\n"
        "1/20,Applicant,0.123,0.050,5\n"
        "2/20,Court,0.500,0.000,1\n");

  std::vector<RubricSummaryRow> summary = {
      {Metric::Completeness, Party::Applicant, 4.0, 3},
      {Metric::Completeness, std::nullopt, 3.625, 8},
      {Metric::Consistency, Party::Court, 4.5, 2},
  };
  CHECK(emit_rubric_table(summary) ==
        "metric,party,mean,count\n"
        "completeness,all,3.625,8\n"
        "completeness,Applicant,4.000,3\n"
        "consistency,Court,4.500,2\n");
}

TEST_CASE("the article chart is rebuilt from its table with equal data", "[reporting]") {
  std::vector<AggregateRow> rows = {
      article_row(Party::Applicant, "2", 0.12, 0.03, 15),
      article_row(Party::State, "2", 0.4, 0.1, 10),
      article_row(Party::Court, "2", 0.15, 0.02, 15),
      article_row(Party::Applicant, "32", 0.2, 0.05, 15),
      article_row(Party::Court, "32", 0.22, 0.04, 15),  // no State for article 32
  };
  std::string table = emit_article_party_table(rows);
  auto lines = util::split_lines(table);
  CHECK(lines[0] == "article,party,mean,std,n");
  CHECK(lines[1] == "2,Applicant,0.120,0.030,15");
  REQUIRE(lines.size() == 7);  // header + 5 rows + terminating newline

  std::string chart = article_chart_from_table(table, "Distance by article", "manifest:abc");
  CHECK(chart.rfind("<svg", 0) == 0);
  CHECK(chart.find("<!-- manifest:abc -->") != std::string::npos);
  CHECK(chart.find("Distance by article") != std::string::npos);

  // 5 table rows -> 5 bars plus 3 legend swatches.
  auto count = [](const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (auto at = text.find(needle); at != std::string::npos; at = text.find(needle, at + 1)) ++n;
    return n;
  };
  CHECK(count(chart, "<rect") == 1 + 5 + 3);  // background + bars + legend
  CHECK(count(chart, "#d08045") == 2);        // State bar once, legend once

  // Regenerating from the same table text is byte-identical.
  CHECK(article_chart_from_table(table, "Distance by article", "manifest:abc") == chart);

  CHECK_THROWS_AS(article_chart_from_table("article,party\n2,Applicant\n", "t"), MalformedCorpus);
  std::vector<AggregateRow> not_article = {verdict_row(Party::Court, Verdict::Founded, 0.1, 0, 1)};
  CHECK_THROWS_AS(emit_article_party_table(not_article), PreconditionError);
}

TEST_CASE("the rubric chart plots per-party means only", "[reporting]") {
  std::vector<RubricSummaryRow> summary = {
      {Metric::Completeness, Party::Applicant, 4.0, 3},
      {Metric::Completeness, std::nullopt, 3.6, 8},
      {Metric::Consistency, Party::Court, 4.5, 2},
      {Metric::Hallucination, Party::State, 2.0, 2},
  };
  std::string chart = rubric_chart_from_summary(summary, "manifest:xyz");
  CHECK(chart.find("completeness") != std::string::npos);
  CHECK(chart.find("hallucination") != std::string::npos);
  CHECK(chart.find("<!-- manifest:xyz -->") != std::string::npos);

  auto count = [](const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (auto at = text.find(needle); at != std::string::npos; at = text.find(needle, at + 1)) ++n;
    return n;
  };
  // One bar per per-party row; the pooled row is not plotted.
  CHECK(count(chart, "<rect") == 1 + 3 + 3);
}

TEST_CASE("bar charts scale their axis to a readable ceiling", "[reporting]") {
  CHECK(detail::nice_ceiling(0.0) == 1.0);
  CHECK(detail::nice_ceiling(0.37) == Catch::Approx(0.4));
  CHECK(detail::nice_ceiling(0.5) == Catch::Approx(0.5));
  CHECK(detail::nice_ceiling(3.7) == Catch::Approx(4.0));
  CHECK(detail::nice_ceiling(42.0) == Catch::Approx(45.0));
}
