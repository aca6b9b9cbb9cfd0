#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "lexalign/corpus.hpp"
#include "lexalign/errors.hpp"
#include "lexalign/extraction.hpp"
#include "lexalign/json.hpp"
#include "lexalign/util.hpp"

namespace lexalign {

// One side of a pair: a party's argument on one article of one ruling.
// (ruling, party, article) identifies it uniquely, since the extraction
// parser rejects duplicate articles within a party.
struct PairMember {
  std::string ruling_id;
  Party party = Party::Applicant;
  ArticleKey article;
  std::string text;
  bool operator==(const PairMember&) const = default;
};

namespace detail {

inline std::string member_identity(const PairMember& m) {
  return m.ruling_id + '\x1f' + to_string(m.party) + '\x1f' + m.article;
}

}  // namespace detail

// pair_id hashes the two member identities in sorted order, so it is
// invariant under swapping a1 and a2.
inline std::string compute_pair_id(const PairMember& a, const PairMember& b) {
  std::string ia = detail::member_identity(a);
  std::string ib = detail::member_identity(b);
  if (ib < ia) std::swap(ia, ib);
  return util::fnv1a_hex(ia + '\x1e' + ib);
}

struct ArgumentPair {
  std::string pair_id;
  PairMember a1;
  PairMember a2;
  std::optional<int> label;  // 1 = concordant, 0 = opposing
  bool operator==(const ArgumentPair&) const = default;
};

inline ArgumentPair make_argument_pair(PairMember a1, PairMember a2) {
  if (a1.ruling_id != a2.ruling_id)
    throw PreconditionError("pair members must share a ruling");
  if (a1.article != a2.article)
    throw PreconditionError("pair members must argue the same article");
  if (a1.party == a2.party)
    throw PreconditionError("pair members must come from different parties");
  if (static_cast<int>(a2.party) < static_cast<int>(a1.party)) std::swap(a1, a2);
  ArgumentPair p;
  p.pair_id = compute_pair_id(a1, a2);
  p.a1 = std::move(a1);
  p.a2 = std::move(a2);
  return p;
}

// All cross-party pairs on matching (ruling, article): a ruling where k
// parties argue an article yields k*(k-1)/2 pairs for it.
inline std::vector<ArgumentPair> generate_pairs(const std::vector<RulingAnalysis>& analyses) {
  std::vector<ArgumentPair> out;
  for (const auto& analysis : analyses) {
    std::map<ArticleKey, std::vector<PairMember>, decltype(&article_key_less)> by_article(
        &article_key_less);
    for (Party party : {Party::Applicant, Party::State, Party::Court}) {
      const PartyAnalysis* pa = analysis.party(party);
      if (!pa) continue;
      for (const auto& arg : pa->arguments)
        by_article[arg.key].push_back({analysis.ruling_id, party, arg.key, arg.detail});
    }
    for (const auto& [article, members] : by_article) {
      for (std::size_t i = 0; i < members.size(); ++i)
        for (std::size_t j = i + 1; j < members.size(); ++j)
          out.push_back(make_argument_pair(members[i], members[j]));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Labels
// ---------------------------------------------------------------------------

struct LabelRow {
  std::string pair_id;
  int label = 0;
  std::string annotator;
  std::string timestamp;
  bool operator==(const LabelRow&) const = default;
};

inline constexpr const char* kLabelCsvHeader = "pair_id,label,annotator,timestamp";

inline std::string labels_to_csv(const std::vector<LabelRow>& rows) {
  std::string out = std::string(kLabelCsvHeader) + "\n";
  for (const auto& row : rows) {
    out += row.pair_id + "," + std::to_string(row.label) + "," + util::csv_escape(row.annotator) +
           "," + util::csv_escape(row.timestamp) + "\n";
  }
  return out;
}

inline std::vector<LabelRow> labels_from_csv(const std::string& text) {
  auto lines = util::split_lines(text);
  std::vector<LabelRow> rows;
  bool saw_header = false;
  for (const auto& line : lines) {
    if (util::trim(line).empty()) continue;
    if (!saw_header) {
      saw_header = true;
      if (util::to_lower(util::trim(line)).rfind("pair_id", 0) == 0) continue;
    }
    auto fields = util::csv_split(line);
    if (fields.size() != 4)
      throw ConflictingLabel("label row needs 4 fields, got " +
                             std::to_string(fields.size()) + ": \"" + line + "\"");
    LabelRow row;
    row.pair_id = util::trim(fields[0]);
    std::string value = util::trim(fields[1]);
    if (value != "0" && value != "1")
      throw ConflictingLabel("label must be 0 or 1, got \"" + value + "\" for pair " +
                             row.pair_id);
    row.label = value == "1" ? 1 : 0;
    row.annotator = fields[2];
    row.timestamp = fields[3];
    rows.push_back(std::move(row));
  }
  return rows;
}

struct LabelResult {
  std::vector<ArgumentPair> labeled;
  std::size_t unlabeled = 0;
};

// Applies file labels to generated pairs. Unknown pair ids and in-file
// disagreements are errors; pairs the file does not cover are counted out.
inline LabelResult label_pairs(const std::vector<ArgumentPair>& pairs,
                               const std::vector<LabelRow>& rows) {
  std::set<std::string> known;
  for (const auto& p : pairs) known.insert(p.pair_id);

  std::map<std::string, int> labels;
  for (const auto& row : rows) {
    if (!known.count(row.pair_id))
      throw UnknownPairId("label references unknown pair " + row.pair_id);
    auto [it, inserted] = labels.emplace(row.pair_id, row.label);
    if (!inserted && it->second != row.label)
      throw ConflictingLabel("pair " + row.pair_id + " labeled both " +
                             std::to_string(it->second) + " and " + std::to_string(row.label));
  }

  LabelResult result;
  for (const auto& p : pairs) {
    auto it = labels.find(p.pair_id);
    if (it == labels.end()) {
      ++result.unlabeled;
      continue;
    }
    ArgumentPair labeled = p;
    labeled.label = it->second;
    result.labeled.push_back(std::move(labeled));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Train / test split
// ---------------------------------------------------------------------------

struct PairDataset {
  std::vector<ArgumentPair> train;
  std::vector<ArgumentPair> test;
  unsigned split_seed = 0;
};

// Ruling-level split: every pair of a ruling lands on one side, so no case
// vocabulary leaks from train into test. Rulings are visited in seeded
// shuffle order and assigned to test while that moves the test pair count
// closer to the requested fraction.
inline PairDataset split_pairs(const std::vector<ArgumentPair>& labeled, double test_fraction,
                               unsigned seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw PreconditionError("test fraction must be strictly between 0 and 1");
  for (const auto& p : labeled)
    if (!p.label)
      throw PreconditionError("split input must be fully labeled (pair " + p.pair_id + ")");

  std::map<std::string, std::size_t> pairs_per_ruling;
  for (const auto& p : labeled) ++pairs_per_ruling[p.a1.ruling_id];
  if (pairs_per_ruling.size() < 2)
    throw TooFewRulings("ruling-level split needs at least 2 rulings, got " +
                        std::to_string(pairs_per_ruling.size()));

  std::vector<std::string> rulings;
  for (const auto& [id, n] : pairs_per_ruling) rulings.push_back(id);
  std::mt19937 rng(seed);
  std::shuffle(rulings.begin(), rulings.end(), rng);

  double target = test_fraction * static_cast<double>(labeled.size());
  std::set<std::string> test_rulings;
  double test_count = 0;
  for (const auto& id : rulings) {
    if (test_rulings.size() + 1 == pairs_per_ruling.size()) break;  // keep train non-empty
    auto n = static_cast<double>(pairs_per_ruling[id]);
    if (std::abs(test_count + n - target) <= std::abs(test_count - target)) {
      test_rulings.insert(id);
      test_count += n;
    }
  }
  // An overshooting first ruling can leave the test side empty; take the
  // closest-to-target single ruling instead.
  if (test_rulings.empty()) {
    auto best = std::min_element(rulings.begin(), rulings.end(),
                                 [&](const std::string& a, const std::string& b) {
                                   return pairs_per_ruling[a] < pairs_per_ruling[b];
                                 });
    test_rulings.insert(*best);
  }

  PairDataset out;
  out.split_seed = seed;
  for (const auto& p : labeled) {
    if (test_rulings.count(p.a1.ruling_id))
      out.test.push_back(p);
    else
      out.train.push_back(p);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline constexpr int kPairsSchemaVersion = 1;

namespace detail {

inline jsonx::Json member_to_json(const PairMember& m) {
  jsonx::Json j;
  j["ruling_id"] = m.ruling_id;
  j["party"] = to_string(m.party);
  j["article"] = m.article;
  j["text"] = m.text;
  return j;
}

inline PairMember member_from_json(const jsonx::Json& j, const std::string& path) {
  PairMember m;
  m.ruling_id = jsonx::require_string<MalformedCorpus>(j, "ruling_id", path);
  m.party = require_party(jsonx::require_string<MalformedCorpus>(j, "party", path));
  m.article = jsonx::require_string<MalformedCorpus>(j, "article", path);
  m.text = jsonx::require_string<MalformedCorpus>(j, "text", path);
  return m;
}

}  // namespace detail

inline jsonx::Json pairs_to_json(const std::vector<ArgumentPair>& pairs) {
  jsonx::Json j;
  j["schema_version"] = kPairsSchemaVersion;
  j["pairs"] = jsonx::Json::array();
  for (const auto& p : pairs) {
    jsonx::Json entry;
    entry["pair_id"] = p.pair_id;
    entry["a1"] = detail::member_to_json(p.a1);
    entry["a2"] = detail::member_to_json(p.a2);
    entry["label"] = p.label ? jsonx::Json(*p.label) : jsonx::Json(nullptr);
    j["pairs"].push_back(std::move(entry));
  }
  return j;
}

inline std::vector<ArgumentPair> pairs_from_json(const jsonx::Json& j) {
  jsonx::require_schema_version<MalformedCorpus>(j, kPairsSchemaVersion, "pairs");
  const auto& arr = jsonx::require_array<MalformedCorpus>(j, "pairs", "pairs");
  std::vector<ArgumentPair> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    std::string path = "pairs[" + std::to_string(i) + "]";
    ArgumentPair p;
    p.pair_id = jsonx::require_string<MalformedCorpus>(arr[i], "pair_id", path);
    p.a1 = detail::member_from_json(jsonx::require<MalformedCorpus>(arr[i], "a1", path),
                                    path + ".a1");
    p.a2 = detail::member_from_json(jsonx::require<MalformedCorpus>(arr[i], "a2", path),
                                    path + ".a2");
    const auto& label = jsonx::require<MalformedCorpus>(arr[i], "label", path);
    if (!label.is_null()) p.label = label.get<int>();
    if (p.pair_id != compute_pair_id(p.a1, p.a2))
      throw MalformedCorpus(path + ": pair_id does not match members");
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace lexalign
