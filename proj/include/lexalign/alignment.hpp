#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "lexalign/corpus.hpp"
#include "lexalign/embedding.hpp"
#include "lexalign/errors.hpp"
#include "lexalign/extraction.hpp"
#include "lexalign/util.hpp"

namespace lexalign {

// ---------------------------------------------------------------------------
// Matching model stances to party arguments
// ---------------------------------------------------------------------------

// Comparing interpretations only makes sense on the same article, so the
// match is the cartesian product restricted to equal keys.
struct MatchTuple {
  std::string ruling_id;
  ArticleKey article;
  Party party = Party::Applicant;
  StanceVariant variant = StanceVariant::Fatto;
  int sample_index = 0;
  std::string model_text;
  std::string party_text;
};

struct UnmatchedArticle {
  std::string ruling_id;
  StanceVariant variant = StanceVariant::Fatto;
  int sample_index = 0;
  ArticleKey article;
};

struct MatchResult {
  std::vector<MatchTuple> tuples;
  std::vector<UnmatchedArticle> unmatched;  // stance articles no party argued
};

inline MatchResult match_arguments(const Stance& stance, const RulingAnalysis& analysis) {
  if (stance.ruling_id != analysis.ruling_id)
    throw PreconditionError("stance is for ruling " + stance.ruling_id + ", analysis for " +
                            analysis.ruling_id);
  MatchResult out;
  for (const auto& model_arg : stance.arguments) {
    bool matched = false;
    for (Party party : {Party::Applicant, Party::State, Party::Court}) {
      const PartyAnalysis* pa = analysis.party(party);
      if (!pa) continue;
      for (const auto& party_arg : pa->arguments) {
        if (party_arg.key != model_arg.key) continue;
        out.tuples.push_back({stance.ruling_id, model_arg.key, party, stance.variant,
                              stance.sample_index, model_arg.detail, party_arg.detail});
        matched = true;
      }
    }
    if (!matched)
      out.unmatched.push_back(
          {stance.ruling_id, stance.variant, stance.sample_index, model_arg.key});
  }
  return out;
}

inline MatchResult match_all(const std::vector<Stance>& stances,
                             const std::vector<RulingAnalysis>& analyses) {
  std::map<std::string, const RulingAnalysis*> by_id;
  for (const auto& a : analyses) by_id[a.ruling_id] = &a;
  MatchResult out;
  for (const auto& stance : stances) {
    auto it = by_id.find(stance.ruling_id);
    if (it == by_id.end())
      throw PreconditionError("no analysis for ruling " + stance.ruling_id);
    MatchResult one = match_arguments(stance, *it->second);
    out.tuples.insert(out.tuples.end(), one.tuples.begin(), one.tuples.end());
    out.unmatched.insert(out.unmatched.end(), one.unmatched.begin(), one.unmatched.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Distance records
// ---------------------------------------------------------------------------

struct DistanceRecord {
  std::string ruling_id;
  ArticleKey article;
  Party party = Party::Applicant;
  StanceVariant variant = StanceVariant::Fatto;
  int sample_index = 0;
  Verdict verdict = Verdict::Unfounded;  // denormalized from the ruling
  double distance = 0.0;
  bool operator==(const DistanceRecord&) const = default;
};

inline std::vector<DistanceRecord> compute_distances(const std::vector<MatchTuple>& tuples,
                                                     const EmbeddingBackend& backend,
                                                     const Corpus& corpus) {
  std::vector<DistanceRecord> out;
  EmbeddingCache cache;
  out.reserve(tuples.size());
  for (const auto& t : tuples) {
    const Ruling& ruling = corpus.at(t.ruling_id);
    if (!ruling.verdict)
      throw PreconditionError("ruling " + t.ruling_id + " has no verdict");
    try {
      double d = cosine_distance(cache.get_or_compute(backend, t.model_text),
                                 cache.get_or_compute(backend, t.party_text));
      out.push_back({t.ruling_id, t.article, t.party, t.variant, t.sample_index,
                     *ruling.verdict, d});
    } catch (const Error& e) {
      throw PipelineError("align", t.ruling_id + " article " + t.article + " vs " +
                                       to_string(t.party) + ": " + e.what());
    }
  }
  std::sort(out.begin(), out.end(), [](const DistanceRecord& a, const DistanceRecord& b) {
    return std::tie(a.ruling_id, a.article, a.party, a.sample_index) <
           std::tie(b.ruling_id, b.article, b.party, b.sample_index);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

enum class Grouping { PartyVerdict, PartyIteration, ArticleParty };

inline std::string to_string(Grouping g) {
  switch (g) {
    case Grouping::PartyVerdict:
      return "party-verdict";
    case Grouping::PartyIteration:
      return "party-iteration";
    case Grouping::ArticleParty:
      return "article-party";
  }
  return "";
}

inline Grouping parse_grouping(const std::string& s) {
  std::string t = util::to_lower(util::trim(s));
  for (auto& c : t)
    if (c == '_') c = '-';
  if (t == "party-verdict") return Grouping::PartyVerdict;
  if (t == "party-iteration") return Grouping::PartyIteration;
  if (t == "article-party") return Grouping::ArticleParty;
  throw InvalidRequest("unknown grouping \"" + s + "\"");
}

// Pooled weights every record equally and is the default reporting view;
// PerRuling averages per-ruling means instead, so small rulings count as
// much as large ones.
enum class Weighting { Pooled, PerRuling };

struct AggregateRow {
  Party party = Party::Applicant;
  std::optional<Verdict> verdict;    // set for party-verdict
  std::optional<int> iteration;      // set for party-iteration
  std::optional<ArticleKey> article; // set for article-party
  double mean = 0.0;
  double std_dev = 0.0;
  std::size_t n = 0;
};

namespace detail {

// Sample standard deviation (ddof = 1), 0 by convention for n = 1.
inline std::pair<double, double> mean_and_std(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  if (xs.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

struct GroupKey {
  int a = 0;
  std::string article;  // only used by ArticleParty
  int b = 0;

  bool operator<(const GroupKey& other) const {
    if (article != other.article) return article_key_less(article, other.article);
    return std::tie(a, b) < std::tie(other.a, other.b);
  }
};

inline GroupKey key_for(const DistanceRecord& r, Grouping grouping) {
  switch (grouping) {
    case Grouping::PartyVerdict:
      return {static_cast<int>(r.party), "", static_cast<int>(r.verdict)};
    case Grouping::PartyIteration:
      return {static_cast<int>(r.party), "", r.sample_index};
    case Grouping::ArticleParty:
      return {static_cast<int>(r.party), r.article, 0};
  }
  return {};
}

inline AggregateRow row_for(const GroupKey& key, Grouping grouping) {
  AggregateRow row;
  row.party = static_cast<Party>(key.a);
  switch (grouping) {
    case Grouping::PartyVerdict:
      row.verdict = static_cast<Verdict>(key.b);
      break;
    case Grouping::PartyIteration:
      row.iteration = key.b;
      break;
    case Grouping::ArticleParty:
      row.article = key.article;
      break;
  }
  return row;
}

}  // namespace detail

inline std::vector<AggregateRow> aggregate(const std::vector<DistanceRecord>& records,
                                           Grouping grouping,
                                           Weighting weighting = Weighting::Pooled) {
  std::map<detail::GroupKey, std::vector<const DistanceRecord*>> groups;
  for (const auto& r : records) groups[detail::key_for(r, grouping)].push_back(&r);

  std::vector<AggregateRow> out;
  for (const auto& [key, members] : groups) {
    AggregateRow row = detail::row_for(key, grouping);
    std::vector<double> values;
    if (weighting == Weighting::Pooled) {
      for (const auto* r : members) values.push_back(r->distance);
    } else {
      std::map<std::string, std::vector<double>> per_ruling;
      for (const auto* r : members) per_ruling[r->ruling_id].push_back(r->distance);
      for (const auto& [id, xs] : per_ruling) values.push_back(detail::mean_and_std(xs).first);
    }
    auto [mean, sd] = detail::mean_and_std(values);
    row.mean = mean;
    row.std_dev = sd;
    row.n = values.size();
    out.push_back(row);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Per-article variability (Figure-5 shape)
// ---------------------------------------------------------------------------

struct VariabilityRow {
  std::string ruling_id;
  Party party = Party::Applicant;
  double mean = 0.0;
  double std_dev = 0.0;
  std::size_t n = 0;  // iterations observed
};

// Across-iteration statistics for one article: one point per (ruling, party).
inline std::vector<VariabilityRow> variability_report(const std::vector<DistanceRecord>& records,
                                                      const ArticleKey& article) {
  std::map<std::pair<std::string, int>, std::vector<double>> groups;
  for (const auto& r : records) {
    if (r.article != article) continue;
    groups[{r.ruling_id, static_cast<int>(r.party)}].push_back(r.distance);
  }
  std::vector<VariabilityRow> out;
  for (const auto& [key, xs] : groups) {
    auto [mean, sd] = detail::mean_and_std(xs);
    out.push_back({key.first, static_cast<Party>(key.second), mean, sd, xs.size()});
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV store
// ---------------------------------------------------------------------------

inline constexpr const char* kDistanceCsvHeader =
    "ruling_id,article,party,variant,sample_index,verdict,distance";

inline std::string distances_to_csv(const std::vector<DistanceRecord>& records) {
  std::string out = std::string(kDistanceCsvHeader) + "\n";
  for (const auto& r : records) {
    out += r.ruling_id + "," + util::csv_escape(r.article) + "," + to_string(r.party) + "," +
           to_string(r.variant) + "," + std::to_string(r.sample_index) + "," +
           to_string(r.verdict) + "," + util::format_double(r.distance) + "\n";
  }
  return out;
}

inline std::vector<DistanceRecord> distances_from_csv(const std::string& text) {
  auto lines = util::split_lines(text);
  std::vector<DistanceRecord> out;
  bool saw_header = false;
  for (const auto& line : lines) {
    if (util::trim(line).empty()) continue;
    if (!saw_header) {
      saw_header = true;
      if (util::to_lower(util::trim(line)).rfind("ruling_id", 0) == 0) continue;
    }
    auto fields = util::csv_split(line);
    if (fields.size() != 7)
      throw MalformedCorpus("distance row needs 7 fields: \"" + line + "\"");
    DistanceRecord r;
    r.ruling_id = fields[0];
    r.article = fields[1];
    r.party = require_party(fields[2]);
    r.variant = parse_stance_variant(fields[3]);
    r.sample_index = std::stoi(fields[4]);
    r.verdict = require_verdict(fields[5]);
    r.distance = std::stod(fields[6]);
    out.push_back(std::move(r));
  }
  return out;
}

inline std::string unmatched_to_csv(const std::vector<UnmatchedArticle>& rows) {
  std::string out = "ruling_id,variant,sample_index,article\n";
  for (const auto& r : rows) {
    out += r.ruling_id + "," + to_string(r.variant) + "," + std::to_string(r.sample_index) + "," +
           util::csv_escape(r.article) + "\n";
  }
  return out;
}

}  // namespace lexalign
