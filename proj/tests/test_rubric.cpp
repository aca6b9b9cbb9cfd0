#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "lexalign/rubric.hpp"

using namespace lexalign;
namespace fs = std::filesystem;

namespace {

std::set<ArticleKey> first_n(const std::set<ArticleKey>& keys, std::size_t n) {
  std::set<ArticleKey> out;
  for (const auto& k : keys) {
    if (out.size() == n) break;
    out.insert(k);
  }
  return out;
}

}  // namespace

TEST_CASE("completeness maps matched fractions onto the five-point scale", "[rubric]") {
  std::set<ArticleKey> gold = {"2", "3", "32", "117+ECHR:8"};

  // |gold| = 4: 0..4 matches walk the whole scale.
  CHECK(score_completeness({}, gold) == 1);
  CHECK(score_completeness({"13"}, gold) == 1);
  CHECK(score_completeness(first_n(gold, 1), gold) == 2);
  CHECK(score_completeness(first_n(gold, 2), gold) == 3);
  CHECK(score_completeness(first_n(gold, 3), gold) == 4);
  CHECK(score_completeness(gold, gold) == 5);

  // Extraneous extracted keys neither help nor hurt.
  std::set<ArticleKey> noisy = first_n(gold, 3);
  noisy.insert("13");
  noisy.insert("24");
  CHECK(score_completeness(noisy, gold) == 4);

  // Odd gold size has no exact half: 2 of 5 is still "less than half".
  std::set<ArticleKey> gold5 = {"2", "3", "13", "32", "117"};
  CHECK(score_completeness(first_n(gold5, 1), gold5) == 2);
  CHECK(score_completeness(first_n(gold5, 2), gold5) == 2);
  CHECK(score_completeness(first_n(gold5, 3), gold5) == 4);
  CHECK(score_completeness(first_n(gold5, 4), gold5) == 4);
  CHECK(score_completeness(gold5, gold5) == 5);

  CHECK_THROWS_AS(score_completeness({"2"}, {}), EmptyGold);
}

TEST_CASE("score rows are validated before they enter the store", "[rubric]") {
  ScoreStore store;
  CHECK_THROWS_AS(store.append({"1/20", Party::Applicant, Metric::Completeness, 0, Scorer::Auto,
                                "", ""}),
                  OutOfRange);
  CHECK_THROWS_AS(store.append({"1/20", Party::Applicant, Metric::Completeness, 6, Scorer::Auto,
                                "", ""}),
                  OutOfRange);
  CHECK_THROWS_AS(store.append({"1/20", Party::Model, Metric::Completeness, 3, Scorer::Auto,
                                "", ""}),
                  PreconditionError);
  CHECK_THROWS_AS(store.append({"1/20", Party::Court, Metric::Consistency, 3, Scorer::Auto,
                                "", ""}),
                  PreconditionError);
  CHECK_THROWS_AS(store.append({"1/20", Party::Court, Metric::Completeness, 3, Scorer::Human,
                                "a", "t"}),
                  PreconditionError);
  CHECK(store.rows().empty());
}

TEST_CASE("the score store keeps history and reports last-wins currents", "[rubric]") {
  auto file = fs::temp_directory_path() / "lexalign_scores_test.jsonl";
  fs::remove(file);
  {
    ScoreStore store(file);
    store.record_auto("1/20", Party::Applicant, 4);
    store.record_manual("1/20", Party::Applicant, 3, 5, "ann", "2025-01-01T00:00:00Z");
    store.record_manual("1/20", Party::Applicant, 4, 5, "ann", "2025-01-02T00:00:00Z");
    CHECK(store.rows().size() == 5);

    auto current = store.current();
    CHECK(current.size() == 3);  // completeness + consistency + hallucination
    for (const auto& row : current) {
      if (row.metric == Metric::Consistency) {
        CHECK(row.score == 4);
        CHECK(row.timestamp == "2025-01-02T00:00:00Z");
      }
    }
  }

  // Reopening replays the audit trail from disk.
  ScoreStore reopened(file);
  CHECK(reopened.rows().size() == 5);
  CHECK(reopened.current().size() == 3);
  CHECK(reopened.rows() == ScoreStore(file).rows());
  fs::remove(file);
}

TEST_CASE("auto completeness scores every present party on the fixture", "[rubric]") {
  Corpus corpus = load_corpus("data/fixture/corpus.json");
  std::vector<RulingAnalysis> analyses;

  // Hand-built analyses mirroring the fixture transcript's extraction keys.
  auto party = [](std::initializer_list<ArticleKey> keys) {
    PartyAnalysis p;
    p.summary = "s";
    for (const auto& k : keys) p.arguments.push_back({k, "d"});
    return p;
  };
  analyses.push_back({"11/19", party({"2", "3", "13", "32", "117+ECHR:8"}),
                      party({"2", "3", "32"}), party({"2", "13", "32", "117+ECHR:8"})});
  analyses.push_back({"22/20", party({"2", "30", "117+CRC:3"}), std::nullopt,
                      party({"2", "30", "117+CRC:3"})});
  analyses.push_back({"35/22", party({"2", "13", "32"}), party({"13", "32"}),
                      party({"2", "13", "32"})});

  auto rows = auto_completeness(analyses, corpus);
  REQUIRE(rows.size() == 8);  // 22/20 has no State

  std::map<std::pair<std::string, Party>, int> scores;
  for (const auto& row : rows) {
    CHECK(row.scorer == Scorer::Auto);
    CHECK(row.metric == Metric::Completeness);
    CHECK(row.timestamp.empty());
    scores[{row.ruling_id, row.party}] = row.score;
  }
  CHECK(scores.at({"11/19", Party::Applicant}) == 5);
  CHECK(scores.at({"11/19", Party::State}) == 4);
  CHECK(scores.at({"11/19", Party::Court}) == 4);
  CHECK(scores.at({"22/20", Party::Applicant}) == 4);
  CHECK(scores.at({"22/20", Party::Court}) == 4);
  CHECK(scores.at({"35/22", Party::Applicant}) == 3);
  CHECK(scores.at({"35/22", Party::State}) == 2);
  CHECK(scores.at({"35/22", Party::Court}) == 3);
}

TEST_CASE("rubric summaries emit per-party and pooled means", "[rubric]") {
  std::vector<ScoreRow> rows = {
      {"1/20", Party::Applicant, Metric::Completeness, 5, Scorer::Auto, "", ""},
      {"1/20", Party::Court, Metric::Completeness, 4, Scorer::Auto, "", ""},
      {"2/20", Party::Applicant, Metric::Completeness, 2, Scorer::Auto, "", ""},
      {"1/20", Party::Applicant, Metric::Consistency, 3, Scorer::Human, "a", "t"},
  };
  auto summary = summarize_rubric(rows);

  auto find = [&](Metric m, std::optional<Party> p) -> const RubricSummaryRow& {
    for (const auto& row : summary)
      if (row.metric == m && row.party == p) return row;
    FAIL("missing summary row");
    return summary.front();
  };
  CHECK(find(Metric::Completeness, std::nullopt).mean == Catch::Approx(11.0 / 3.0));
  CHECK(find(Metric::Completeness, std::nullopt).count == 3);
  CHECK(find(Metric::Completeness, Party::Applicant).mean == Catch::Approx(3.5));
  CHECK(find(Metric::Completeness, Party::Court).mean == Catch::Approx(4.0));
  CHECK(find(Metric::Consistency, std::nullopt).count == 1);
  CHECK(find(Metric::Consistency, Party::Applicant).mean == Catch::Approx(3.0));
}

TEST_CASE("metric and scorer names round-trip", "[rubric]") {
  for (Metric m : {Metric::Completeness, Metric::Consistency, Metric::Hallucination})
    CHECK(parse_metric(to_string(m)) == m);
  for (Scorer s : {Scorer::Auto, Scorer::Human}) CHECK(parse_scorer(to_string(s)) == s);
  CHECK_THROWS_AS(parse_metric("accuracy"), Error);
  CHECK_THROWS_AS(parse_scorer("llm"), Error);
}
