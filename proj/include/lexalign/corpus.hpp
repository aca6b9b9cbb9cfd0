#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include "lexalign/errors.hpp"
#include "lexalign/json.hpp"
#include "lexalign/util.hpp"

namespace lexalign {

// ---------------------------------------------------------------------------
// Enumerations
// ---------------------------------------------------------------------------

enum class Verdict { Unfounded, Inadmissible, PartiallyFounded, Founded };

enum class IssueCategory { ChildBestInterest, EndOfLife, ReproductiveRights };

enum class Party { Applicant, State, Court, Model };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Unfounded: return "unfounded";
    case Verdict::Inadmissible: return "inadmissible";
    case Verdict::PartiallyFounded: return "partially_founded";
    case Verdict::Founded: return "founded";
  }
  return "?";
}

inline std::string display_name(Verdict v) {
  switch (v) {
    case Verdict::Unfounded: return "Unfounded";
    case Verdict::Inadmissible: return "Inadmissible";
    case Verdict::PartiallyFounded: return "Partially founded";
    case Verdict::Founded: return "Founded";
  }
  return "?";
}

// Accepts the schema tokens. "partially_unfounded" is folded into Unfounded
// at ingestion; the four-value taxonomy itself never carries it.
inline std::optional<Verdict> parse_verdict(std::string_view raw) {
  std::string s = util::to_lower(util::trim(raw));
  std::replace(s.begin(), s.end(), ' ', '_');
  std::replace(s.begin(), s.end(), '-', '_');
  if (s == "unfounded" || s == "partially_unfounded") return Verdict::Unfounded;
  if (s == "inadmissible") return Verdict::Inadmissible;
  if (s == "partially_founded") return Verdict::PartiallyFounded;
  if (s == "founded") return Verdict::Founded;
  return std::nullopt;
}

inline std::string to_string(IssueCategory c) {
  switch (c) {
    case IssueCategory::ChildBestInterest: return "child_best_interest";
    case IssueCategory::EndOfLife: return "end_of_life";
    case IssueCategory::ReproductiveRights: return "reproductive_rights";
  }
  return "?";
}

inline std::string display_name(IssueCategory c) {
  switch (c) {
    case IssueCategory::ChildBestInterest: return "Child's best interest";
    case IssueCategory::EndOfLife: return "End of life care";
    case IssueCategory::ReproductiveRights: return "Reproductive Rights";
  }
  return "?";
}

inline std::optional<IssueCategory> parse_issue_category(std::string_view raw) {
  std::string s = util::to_lower(util::trim(raw));
  std::replace(s.begin(), s.end(), ' ', '_');
  std::replace(s.begin(), s.end(), '-', '_');
  if (s == "child_best_interest") return IssueCategory::ChildBestInterest;
  if (s == "end_of_life") return IssueCategory::EndOfLife;
  if (s == "reproductive_rights") return IssueCategory::ReproductiveRights;
  return std::nullopt;
}

inline std::string to_string(Party p) {
  switch (p) {
    case Party::Applicant: return "applicant";
    case Party::State: return "state";
    case Party::Court: return "court";
    case Party::Model: return "model";
  }
  return "?";
}

inline std::string display_name(Party p) {
  switch (p) {
    case Party::Applicant: return "Applicant";
    case Party::State: return "State";
    case Party::Court: return "Court";
    case Party::Model: return "Model";
  }
  return "?";
}

inline std::optional<Party> parse_party(std::string_view raw) {
  std::string s = util::to_lower(util::trim(raw));
  if (s == "applicant") return Party::Applicant;
  if (s == "state") return Party::State;
  if (s == "court") return Party::Court;
  if (s == "model") return Party::Model;
  return std::nullopt;
}

inline Party require_party(std::string_view raw) {
  if (auto p = parse_party(raw)) return *p;
  throw MalformedCorpus("unknown party \"" + std::string(raw) + "\"");
}

inline Verdict require_verdict(std::string_view raw) {
  if (auto v = parse_verdict(raw)) return *v;
  throw MalformedCorpus("unknown verdict \"" + std::string(raw) + "\"");
}

// ---------------------------------------------------------------------------
// ArticleKey
// ---------------------------------------------------------------------------
// Canonical text key for a constitutional article reference. Either a bare
// number ("3") or the domestic-article-117 combination with a treaty article
// ("117+ECHR:8"). Only 117 can combine; anything else is rejected.

using ArticleKey = std::string;

// One article reference found inside a piece of text, with the span it
// occupies. The extraction parser scans bullet heads with this.
struct ArticleMention {
  ArticleKey key;  // empty when the reference is malformed (unknown treaty)
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string problem;  // set iff key is empty
};

namespace detail {

struct TreatyName {
  const char* phrase;  // lowercase long or short form searched in the mention
  const char* abbrev;
};

inline const std::vector<TreatyName>& treaty_table() {
  static const std::vector<TreatyName> table = {
      {"european convention on human rights", "ECHR"},
      {"echr", "ECHR"},
      {"cedu", "ECHR"},
      {"charter of fundamental rights", "CFREU"},
      {"cfreu", "CFREU"},
      {"convention on the rights of the child", "CRC"},
      {"international covenant on civil and political rights", "ICCPR"},
      {"iccpr", "ICCPR"},
      {"universal declaration of human rights", "UDHR"},
      {"udhr", "UDHR"},
  };
  return table;
}

inline std::optional<std::string> recognize_treaty(const std::string& tail) {
  std::string low = util::to_lower(tail);
  for (const auto& t : treaty_table()) {
    if (low.find(t.phrase) != std::string::npos) return std::string(t.abbrev);
  }
  // A parenthesized acronym names a treaty the table does not know.
  static const std::regex acronym(R"(\(([A-Za-z]{2,8})\))");
  std::smatch m;
  if (std::regex_search(tail, m, acronym)) return util::to_upper(m[1].str());
  return std::nullopt;
}

inline const std::regex& canonical_combo_re() {
  static const std::regex re(R"((?:^|[^0-9+])(117\+([A-Za-z][A-Za-z0-9]*):(\d{1,3}))\b)");
  return re;
}

inline const std::regex& combo_phrase_re() {
  // "Article 117 in relation to Article 8 of the ..." and close variants.
  static const std::regex re(
      R"(\bart(?:icle|\.)?s?\s*\.?\s*117\s*,?\s*(?:read\s+)?(?:in\s+relation\s+to|in\s+combination\s+with|combined\s+with|in\s+conjunction\s+with|in\s+connection\s+with|together\s+with)\s+(?:the\s+)?art(?:icle|\.)?s?\s*\.?\s*(\d{1,3}))",
      std::regex::icase);
  return re;
}

inline const std::regex& bare_article_re() {
  static const std::regex re(R"(\bart(?:icle|\.)?s?\s*\.?\s*(\d{1,3})\b)", std::regex::icase);
  return re;
}

inline const std::regex& naked_number_re() {
  static const std::regex re(R"(^\s*(\d{1,3})\b)");
  return re;
}

}  // namespace detail

// Finds the first article reference in `text`, or nullopt. At equal start
// positions a combination phrasing wins over the bare "Article 117" prefix
// it begins with. A combination naming no known treaty is still reported
// (with `problem` set) so callers can reject it instead of misreading it.
inline std::optional<ArticleMention> find_first_article_mention(const std::string& text) {
  std::vector<std::pair<int, ArticleMention>> candidates;  // (priority, mention)

  std::smatch m;
  if (std::regex_search(text, m, detail::canonical_combo_re())) {
    std::size_t b = static_cast<std::size_t>(m.position(1));
    candidates.push_back(
        {2, {"117+" + util::to_upper(m[2].str()) + ":" + m[3].str(), b, b + m[1].length(), ""}});
  }
  if (std::regex_search(text, m, detail::combo_phrase_re())) {
    std::size_t b = static_cast<std::size_t>(m.position(0));
    std::size_t e = b + m[0].length();
    auto treaty = detail::recognize_treaty(text.substr(e, 96));
    if (treaty) {
      candidates.push_back({2, {"117+" + *treaty + ":" + m[1].str(), b, e, ""}});
    } else {
      candidates.push_back({2, {"", b, e, "combination names no known treaty"}});
    }
  }
  if (std::regex_search(text, m, detail::bare_article_re())) {
    if (std::stoi(m[1].str()) >= 1) {
      std::size_t b = static_cast<std::size_t>(m.position(0));
      candidates.push_back({1, {m[1].str(), b, b + m[0].length(), ""}});
    }
  }
  if (std::regex_search(text, m, detail::naked_number_re())) {
    if (std::stoi(m[1].str()) >= 1) {
      std::size_t b = static_cast<std::size_t>(m.position(1));
      candidates.push_back({0, {m[1].str(), b, b + m[1].length(), ""}});
    }
  }
  if (candidates.empty()) return std::nullopt;
  auto best = std::min_element(candidates.begin(), candidates.end(),
                               [](const auto& a, const auto& b) {
                                 if (a.second.begin != b.second.begin)
                                   return a.second.begin < b.second.begin;
                                 return a.first > b.first;
                               });
  return best->second;
}

// Canonicalize a single article mention. Idempotent on canonical keys;
// insensitive to case, spacing, and trailing punctuation.
inline ArticleKey normalize_article_key(const std::string& raw) {
  std::string s = util::trim(raw);
  // Strip markdown emphasis and dangling punctuation around the mention.
  auto strippable_tail = [](const std::string& t) {
    if (t.empty()) return false;
    char c = t.back();
    if (c == '*' || c == '_' || c == '`' || c == '.' || c == ',' || c == ';' || c == ':')
      return true;
    return c == ')' && t.find('(') == std::string::npos;
  };
  while (strippable_tail(s)) {
    s.pop_back();
    s = util::trim(s);
  }
  std::size_t lead = 0;
  while (lead < s.size() && (s[lead] == '*' || s[lead] == '_' || s[lead] == '`' ||
                             s[lead] == '-' || s[lead] == ' '))
    ++lead;
  s = s.substr(lead);
  if (s.empty()) throw UnrecognizedArticle("empty article mention");

  auto mention = find_first_article_mention(s);
  if (!mention)
    throw UnrecognizedArticle("no article reference in \"" + util::trim(raw) + "\"");
  if (mention->key.empty())
    throw UnrecognizedArticle(mention->problem + ": \"" + util::trim(raw) + "\"");

  // The mention must be the leading content of the string, and what follows
  // may only be descriptive ("of the ...", parenthetical, source note) or a
  // continuation listing further articles ("and Article 31", ", 3 and 32").
  std::string before = util::trim(s.substr(0, mention->begin));
  if (!before.empty())
    throw UnrecognizedArticle("unexpected leading text in \"" + util::trim(raw) + "\"");
  std::string after = util::trim(s.substr(mention->end));
  if (!after.empty()) {
    bool descriptive = after[0] == '(' || after[0] == ',' ||
                       util::starts_with_ci(after, "of ") ||
                       util::starts_with_ci(after, "della ") ||
                       util::starts_with_ci(after, "cost") ||
                       util::starts_with_ci(after, "and ") ||
                       util::starts_with_ci(after, "e ") ||
                       util::starts_with_ci(after, "ed ");
    if (!descriptive)
      throw UnrecognizedArticle("trailing text after article reference in \"" +
                                util::trim(raw) + "\"");
  }
  return mention->key;
}

// ---------------------------------------------------------------------------
// Ruling / Corpus
// ---------------------------------------------------------------------------

struct Ruling {
  std::string id;  // "N/YY", e.g. "272/17"
  int year = 0;
  IssueCategory category = IssueCategory::ChildBestInterest;
  std::string fatto;        // full fact section (the longest text we hold)
  std::string fatto_clean;  // human-shortened fact section
  std::optional<Verdict> verdict;  // optional so validation can report absence
  std::set<ArticleKey> gold_articles;  // human-curated rubric ground truth

  bool operator==(const Ruling&) const = default;
};

// Empty list iff every Ruling invariant holds. Violations are data, not
// exceptions; each names the failing field.
inline std::vector<std::string> validate_ruling(const Ruling& r) {
  std::vector<std::string> v;
  static const std::regex id_re(R"(^\d+/\d{2}$)");
  if (!std::regex_match(r.id, id_re)) v.push_back("id: not in form N/YY");
  int year_now = util::current_year();
  if (r.year < 1948 || r.year > year_now)
    v.push_back("year: outside 1948.." + std::to_string(year_now));
  if (r.fatto.empty()) v.push_back("fatto: empty");
  if (r.fatto_clean.empty()) v.push_back("fatto_clean: empty");
  if (!r.fatto.empty() && !r.fatto_clean.empty() && r.fatto_clean.size() >= r.fatto.size())
    v.push_back("fatto_clean not shorter than fatto");
  if (!r.verdict) v.push_back("verdict: required");
  for (const auto& k : r.gold_articles) {
    try {
      if (normalize_article_key(k) != k) v.push_back("gold_articles: not canonical: " + k);
    } catch (const UnrecognizedArticle&) {
      v.push_back("gold_articles: unrecognized: " + k);
    }
  }
  return v;
}

class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::vector<Ruling> rulings) : rulings_(std::move(rulings)) {
    std::sort(rulings_.begin(), rulings_.end(),
              [](const Ruling& a, const Ruling& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < rulings_.size(); ++i) index_[rulings_[i].id] = i;
  }

  const std::vector<Ruling>& rulings() const { return rulings_; }
  std::size_t size() const { return rulings_.size(); }
  bool empty() const { return rulings_.empty(); }

  const Ruling* find(const std::string& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &rulings_[it->second];
  }

  const Ruling& at(const std::string& id) const {
    const Ruling* r = find(id);
    if (!r) throw Error("unknown ruling id: " + id);
    return *r;
  }

  bool operator==(const Corpus& other) const { return rulings_ == other.rulings_; }

 private:
  std::vector<Ruling> rulings_;
  std::map<std::string, std::size_t> index_;
};

inline constexpr int kCorpusSchemaVersion = 1;

namespace detail {

inline Ruling ruling_from_json(const jsonx::Json& j, const std::string& path) {
  Ruling r;
  r.id = jsonx::require_string<MalformedCorpus>(j, "id", path);
  r.year = static_cast<int>(jsonx::require_int<MalformedCorpus>(j, "year", path));
  std::string cat = jsonx::require_string<MalformedCorpus>(j, "category", path);
  auto category = parse_issue_category(cat);
  if (!category) throw MalformedCorpus(path + ".category: unknown value \"" + cat + "\"");
  r.category = *category;
  r.fatto = jsonx::require_string<MalformedCorpus>(j, "fatto", path);
  r.fatto_clean = jsonx::require_string<MalformedCorpus>(j, "fatto_clean", path);
  if (j.contains("verdict") && !j["verdict"].is_null()) {
    if (!j["verdict"].is_string()) throw MalformedCorpus(path + ".verdict: expected string");
    std::string verdict = j["verdict"].get<std::string>();
    r.verdict = parse_verdict(verdict);
    if (!r.verdict) throw MalformedCorpus(path + ".verdict: unknown value \"" + verdict + "\"");
  }
  const auto& gold = jsonx::require_array<MalformedCorpus>(j, "gold_articles", path);
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (!gold[i].is_string())
      throw MalformedCorpus(path + ".gold_articles[" + std::to_string(i) + "]: expected string");
    r.gold_articles.insert(gold[i].get<std::string>());
  }
  return r;
}

}  // namespace detail

// Schema-strict parse; Ruling invariants are not enforced here so that
// `corpus validate` can report them as data.
inline Corpus parse_corpus(const std::string& text) {
  jsonx::Json j = jsonx::parse<MalformedCorpus>(text, "corpus");
  jsonx::require_schema_version<MalformedCorpus>(j, kCorpusSchemaVersion, "corpus");
  const auto& rulings = jsonx::require_array<MalformedCorpus>(j, "rulings", "corpus");
  std::vector<Ruling> out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < rulings.size(); ++i) {
    Ruling r = detail::ruling_from_json(rulings[i], "rulings[" + std::to_string(i) + "]");
    if (!seen.insert(r.id).second) throw DuplicateRulingId("duplicate ruling id: " + r.id);
    out.push_back(std::move(r));
  }
  return Corpus(std::move(out));
}

// Load and enforce: every ruling passes validate_ruling; ordering is by id.
inline Corpus load_corpus(const std::filesystem::path& path) {
  Corpus corpus = parse_corpus(util::read_file(path));
  std::string problems;
  for (const Ruling& r : corpus.rulings()) {
    for (const std::string& v : validate_ruling(r)) {
      problems += "ruling " + r.id + ": " + v + "\n";
    }
  }
  if (!problems.empty()) throw MalformedCorpus("invalid corpus:\n" + problems);
  return corpus;
}

inline jsonx::Json corpus_to_json(const Corpus& corpus) {
  jsonx::Json j;
  j["schema_version"] = kCorpusSchemaVersion;
  j["rulings"] = jsonx::Json::array();
  for (const Ruling& r : corpus.rulings()) {
    jsonx::Json rj;
    rj["id"] = r.id;
    rj["year"] = r.year;
    rj["category"] = to_string(r.category);
    rj["verdict"] = r.verdict ? jsonx::Json(to_string(*r.verdict)) : jsonx::Json(nullptr);
    rj["fatto"] = r.fatto;
    rj["fatto_clean"] = r.fatto_clean;
    rj["gold_articles"] = std::vector<std::string>(r.gold_articles.begin(), r.gold_articles.end());
    j["rulings"].push_back(std::move(rj));
  }
  return j;
}

inline void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  util::write_file(path, corpus_to_json(corpus).dump(2) + "\n");
}

// Sort order for article keys in reports: bare numbers first by value, then
// combinations by (treaty, treaty article).
inline bool article_key_less(const ArticleKey& a, const ArticleKey& b) {
  auto parse = [](const ArticleKey& k) {
    std::tuple<int, std::string, int> t{0, "", 0};
    auto plus = k.find('+');
    if (plus == std::string::npos) {
      std::get<0>(t) = std::atoi(k.c_str());
    } else {
      std::get<0>(t) = std::atoi(k.substr(0, plus).c_str());
      auto colon = k.find(':', plus);
      std::get<1>(t) = k.substr(plus + 1, colon - plus - 1);
      std::get<2>(t) = colon == std::string::npos ? 0 : std::atoi(k.c_str() + colon + 1);
    }
    return t;
  };
  return parse(a) < parse(b);
}

}  // namespace lexalign
