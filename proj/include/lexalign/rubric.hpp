#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "lexalign/corpus.hpp"
#include "lexalign/errors.hpp"
#include "lexalign/extraction.hpp"
#include "lexalign/json.hpp"
#include "lexalign/util.hpp"

namespace lexalign {

enum class Metric { Completeness, Consistency, Hallucination };
enum class Scorer { Auto, Human };

inline std::string to_string(Metric m) {
  switch (m) {
    case Metric::Completeness:
      return "completeness";
    case Metric::Consistency:
      return "consistency";
    case Metric::Hallucination:
      return "hallucination";
  }
  return "";
}

inline Metric parse_metric(const std::string& s) {
  std::string t = util::to_lower(util::trim(s));
  if (t == "completeness") return Metric::Completeness;
  if (t == "consistency") return Metric::Consistency;
  if (t == "hallucination") return Metric::Hallucination;
  throw OutOfRange("unknown rubric metric \"" + s + "\"");
}

inline std::string to_string(Scorer s) { return s == Scorer::Auto ? "auto" : "human"; }

inline Scorer parse_scorer(const std::string& s) {
  std::string t = util::to_lower(util::trim(s));
  if (t == "auto") return Scorer::Auto;
  if (t == "human") return Scorer::Human;
  throw OutOfRange("unknown scorer \"" + s + "\"");
}

// Completeness thresholds, computed in exact integer arithmetic.
// f = matched/|gold|: f=0 -> 1, f<1/2 -> 2, f=1/2 -> 3, f<1 -> 4, f=1 -> 5.
inline int score_completeness(const std::set<ArticleKey>& extracted,
                              const std::set<ArticleKey>& gold) {
  if (gold.empty()) throw EmptyGold("completeness needs a non-empty gold article set");
  std::size_t matched = 0;
  for (const auto& key : extracted)
    if (gold.count(key)) ++matched;
  if (matched > gold.size()) throw OutOfRange("matched articles exceed gold set");
  if (matched == 0) return 1;
  if (matched == gold.size()) return 5;
  if (2 * matched < gold.size()) return 2;
  if (2 * matched == gold.size()) return 3;
  return 4;
}

// One scored metric for one (ruling, party). Auto rows carry no timestamp so
// repeated runs produce identical files; human rows are audit-stamped.
struct ScoreRow {
  std::string ruling_id;
  Party party = Party::Applicant;
  Metric metric = Metric::Completeness;
  int score = 0;
  Scorer scorer = Scorer::Auto;
  std::string annotator;
  std::string timestamp;
  bool operator==(const ScoreRow&) const = default;
};

namespace detail {

inline void validate_score_row(const ScoreRow& row) {
  if (row.score < 1 || row.score > 5)
    throw OutOfRange("rubric score " + std::to_string(row.score) + " outside 1..5");
  if (row.party == Party::Model)
    throw PreconditionError("rubric rows score the ruling parties, not the model");
  if (row.scorer == Scorer::Auto && row.metric != Metric::Completeness)
    throw PreconditionError("only completeness is scored automatically");
  if (row.scorer == Scorer::Human && row.metric == Metric::Completeness)
    throw PreconditionError("completeness is computed, not hand-recorded");
}

}  // namespace detail

// Append-only JSONL store. The latest row per (ruling, party, metric, scorer)
// is the current value; earlier rows remain as the audit trail.
class ScoreStore {
 public:
  ScoreStore() = default;
  explicit ScoreStore(std::filesystem::path file) : file_(std::move(file)) {
    if (std::filesystem::exists(file_)) {
      std::string text = util::read_file(file_);
      for (const auto& line : util::split_lines(text)) {
        if (util::trim(line).empty()) continue;
        rows_.push_back(row_from_json(jsonx::parse<MalformedCorpus>(line, "score store line")));
      }
    }
  }

  void append(const ScoreRow& row) {
    detail::validate_score_row(row);
    rows_.push_back(row);
    if (!file_.empty()) {
      std::string line = row_to_json(row).dump() + "\n";
      util::append_file(file_, line);
    }
  }

  void record_auto(const std::string& ruling_id, Party party, int completeness) {
    append({ruling_id, party, Metric::Completeness, completeness, Scorer::Auto, "", ""});
  }

  void record_manual(const std::string& ruling_id, Party party, int consistency,
                     int hallucination, const std::string& annotator,
                     const std::string& timestamp) {
    append({ruling_id, party, Metric::Consistency, consistency, Scorer::Human, annotator,
            timestamp});
    append({ruling_id, party, Metric::Hallucination, hallucination, Scorer::Human, annotator,
            timestamp});
  }

  const std::vector<ScoreRow>& rows() const { return rows_; }

  // Last write wins; the full history stays in rows().
  std::vector<ScoreRow> current() const {
    std::map<std::tuple<std::string, Party, Metric, Scorer>, ScoreRow> latest;
    for (const auto& row : rows_)
      latest[{row.ruling_id, row.party, row.metric, row.scorer}] = row;
    std::vector<ScoreRow> out;
    out.reserve(latest.size());
    for (const auto& [key, row] : latest) out.push_back(row);
    return out;
  }

  static jsonx::Json row_to_json(const ScoreRow& row) {
    jsonx::Json j;
    j["ruling_id"] = row.ruling_id;
    j["party"] = to_string(row.party);
    j["metric"] = to_string(row.metric);
    j["score"] = row.score;
    j["scorer"] = to_string(row.scorer);
    j["annotator"] = row.annotator;
    j["timestamp"] = row.timestamp;
    return j;
  }

  static ScoreRow row_from_json(const jsonx::Json& j) {
    ScoreRow row;
    row.ruling_id = jsonx::require_string<MalformedCorpus>(j, "ruling_id", "score row");
    row.party = require_party(jsonx::require_string<MalformedCorpus>(j, "party", "score row"));
    row.metric = parse_metric(jsonx::require_string<MalformedCorpus>(j, "metric", "score row"));
    row.score = static_cast<int>(jsonx::require_int<MalformedCorpus>(j, "score", "score row"));
    row.scorer = parse_scorer(jsonx::require_string<MalformedCorpus>(j, "scorer", "score row"));
    row.annotator = jsonx::require_string<MalformedCorpus>(j, "annotator", "score row");
    row.timestamp = jsonx::require_string<MalformedCorpus>(j, "timestamp", "score row");
    detail::validate_score_row(row);
    return row;
  }

 private:
  std::filesystem::path file_;
  std::vector<ScoreRow> rows_;
};

// Computes completeness rows for every party present in each analysis,
// against the ruling's gold article set.
inline std::vector<ScoreRow> auto_completeness(const std::vector<RulingAnalysis>& analyses,
                                               const Corpus& corpus) {
  std::vector<ScoreRow> out;
  for (const auto& analysis : analyses) {
    const Ruling& ruling = corpus.at(analysis.ruling_id);
    for (Party party : {Party::Applicant, Party::State, Party::Court}) {
      const PartyAnalysis* pa = analysis.party(party);
      if (!pa) continue;
      std::set<ArticleKey> extracted;
      for (const auto& arg : pa->arguments) extracted.insert(arg.key);
      out.push_back({analysis.ruling_id, party, Metric::Completeness,
                     score_completeness(extracted, ruling.gold_articles), Scorer::Auto, "", ""});
    }
  }
  return out;
}

struct RubricSummaryRow {
  Metric metric = Metric::Completeness;
  std::optional<Party> party;  // absent in the pooled view
  double mean = 0.0;
  std::size_t count = 0;
};

// Means over the current rows. Emits both the per-party and the pooled view;
// pooled rows have no party.
inline std::vector<RubricSummaryRow> summarize_rubric(const std::vector<ScoreRow>& rows) {
  std::map<std::pair<Metric, std::optional<Party>>, std::pair<double, std::size_t>> acc;
  for (const auto& row : rows) {
    auto& per_party = acc[{row.metric, row.party}];
    per_party.first += row.score;
    per_party.second += 1;
    auto& pooled = acc[{row.metric, std::nullopt}];
    pooled.first += row.score;
    pooled.second += 1;
  }
  std::vector<RubricSummaryRow> out;
  for (const auto& [key, sums] : acc)
    out.push_back({key.first, key.second, sums.first / static_cast<double>(sums.second),
                   sums.second});
  return out;
}

}  // namespace lexalign
