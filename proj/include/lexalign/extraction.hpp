#pragma once

#include <map>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "lexalign/corpus.hpp"
#include "lexalign/errors.hpp"
#include "lexalign/json.hpp"
#include "lexalign/llm_client.hpp"
#include "lexalign/util.hpp"

namespace lexalign {

// ---------------------------------------------------------------------------
// Constitution article library
// ---------------------------------------------------------------------------

// Article texts inserted into the prompts. Both prompts require articles
// 1 through 34 plus 117.
class ArticleLibrary {
 public:
  static constexpr int kSchemaVersion = 1;

  ArticleLibrary() = default;
  explicit ArticleLibrary(std::map<int, std::string> texts) : texts_(std::move(texts)) {}

  static ArticleLibrary from_json(const std::string& text) {
    jsonx::Json j = jsonx::parse<MalformedCorpus>(text, "article library");
    jsonx::require_schema_version<MalformedCorpus>(j, kSchemaVersion, "article library");
    const auto& arr = jsonx::require_array<MalformedCorpus>(j, "articles", "article library");
    std::map<int, std::string> texts;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      std::string path = "article library.articles[" + std::to_string(i) + "]";
      int number = static_cast<int>(jsonx::require_int<MalformedCorpus>(arr[i], "number", path));
      std::string body = jsonx::require_string<MalformedCorpus>(arr[i], "text", path);
      if (texts.count(number))
        throw MalformedCorpus("article library: duplicate article " + std::to_string(number));
      texts[number] = std::move(body);
    }
    return ArticleLibrary(std::move(texts));
  }

  static ArticleLibrary load(const std::filesystem::path& path) {
    return from_json(util::read_file(path));
  }

  // Numbers missing from the 1-34 + 117 range the prompts promise.
  std::vector<int> missing_required() const {
    std::vector<int> missing;
    for (int n = 1; n <= 34; ++n)
      if (!texts_.count(n)) missing.push_back(n);
    if (!texts_.count(117)) missing.push_back(117);
    return missing;
  }

  std::string render_list() const {
    std::string out;
    for (const auto& [number, body] : texts_) {
      out += "Article " + std::to_string(number) + ": " + body + "\n";
    }
    if (!out.empty()) out.pop_back();
    return out;
  }

  const std::map<int, std::string>& texts() const { return texts_; }

 private:
  std::map<int, std::string> texts_;
};

// ---------------------------------------------------------------------------
// Prompt templates
// ---------------------------------------------------------------------------
// Slots: {{ARTICLES}}, {{RULING_ID}}, {{RULING_TEXT}} / {{CASE_TEXT}}.

inline constexpr const char* kAnalysisPromptTemplate =
    R"(You are a legal expert tasked with analyzing a ruling from the Italian Constitutional Court. Along with the ruling, you'll be provided with selected articles from the Italian Constitution relevant to the case. Please review the materials carefully to prepare your analysis.

Provided Materials:
- Articles from the Italian Constitution:
{{ARTICLES}}
- Text of the ruling {{RULING_ID}}:
{{RULING_TEXT}}

Analysis Instructions:
Your analysis should dissect the positions and arguments of the involved parties in the ruling:
- The Applicant: The party appealing to the Constitutional Court.
- The State: Typically mentioned as "il presidente del consiglio dei ministri" and represented by the "Avvocatura di Stato" or "la difesa erariale". It could alternatively advocate for the rejection of the appeal or be the applicant. It does not always appear in the judgment.
- The Constitutional Court: The adjudicating body delivering the verdict.
Remember, the State does not always provide an opinion on the matter. In that case, skip the part of the answer relevant to the State.
For each party, structure your analysis as follows:
- Summary: Provide a concise overview of the party's stance.
- Constitutional Principles and Articles: Enumerate and detail each constitutional principle and article referenced by the party. For each mention, elucidate the specific argument or interpretation presented. Ensure this section is organized in a bullet-point or numbered list for clarity and consistency. When the party mentions the article 117 is referring to international treaties, as for example the ECHR, please enumerate the article 117 combined with the articles of the international treaties.

Formatting Guide:
Please adhere to the following format to ensure uniformity and precision in your analysis. Replace the placeholders with the corresponding information for each party involved.

<applicant>
SUMMARY:
[Your concise summary here.]

CONSTITUTIONAL PRINCIPLES AND ARTICLES:
- Article [Number]: Describe how the applicant interprets or applies this article in their argument. Highlight specific phrases or reasoning used to support their stance.

</applicant>

<state>
Skip this portion if the State did not explicitly provide its position in the ruling.
SUMMARY:
[Your concise summary here.]

CONSTITUTIONAL PRINCIPLES AND ARTICLES:
- Article [Number]: Outline the State's interpretation or application of this article. Include any counterarguments or specific legal doctrines cited to oppose the applicant's position.

</state>

<court>
SUMMARY:
[Your concise summary here.]

CONSTITUTIONAL PRINCIPLES AND ARTICLES:
- Article [Number]: Summarize the Court's final interpretation or application of this article in their ruling. Note how this interpretation aligns with or diverges from the positions of the applicant and the state.

</court>

Additional Notes:
- Ensure all legal terminologies and references to constitutional principles are accurately used.
- Your analysis should not only recount what is stated in the documents but also critically assess the legal reasoning and its alignment with constitutional principles. However, you should not make up arguments which cannot be reasonably inferred from the text.
- Each article and principle should have its own bullet point. Don't group multiple articles or principles together in the same bullet point.
- Do not specify which specific paragraph of a Constitutional Article you are referring to.
- Each party's arguments should be presented independently, without referring to other parts of the analysis. Remember that the parties do not necessarily mention the same articles.)";

inline constexpr const char* kStancePromptTemplate =
    R"(You are a constitutional scholar preparing a hypothetical argument for a case presented to the Italian Constitutional Court. You will be provided with the details of a case, where the parties express their opinion but without the final verdict, along with selected articles from the Italian Constitution relevant to the scenario. Your task is to formulate a comprehensive your argument that could potentially influence the court's decision, based on the constitutional articles provided. Don't be influenced by the opinion expressed by the parties, you should refer to them only if they support your argument.

Provided Materials:
- Articles from the Italian Constitution:
{{ARTICLES}}
- Description of case {{RULING_ID}}:
{{CASE_TEXT}}

Argument Construction Instructions
Develop a detailed argument that addresses the constitutional issues presented in the case. Focus on how the articles of the Italian Constitution should be interpreted and applied in this specific scenario.
- Case overview: Provide a brief summary of the case and the main constitutional questions it raises.
- Constitutional Arguments: Enumerate and detail each constitutional principle and article relevant to the case. For each article, provide a thorough analysis and argument about how it should be interpreted or applied in the context of the case. Organize this section in a bullet-point or clarity and consistency.

Formatting Guide:
Adhere to the following format to ensure uniformity and precision in your argument presentation:

CASE OVERVIEW:
[Your concise summary of the case here]

CONSTITUTIONAL ARGUMENTS:
- Article [Number]: Discuss how this article relates to the case and your argument for its application. Include specific phrases from the article and reasoning to support your stance.)";

enum class StanceVariant { Fatto, FattoClean };

inline std::string to_string(StanceVariant v) {
  return v == StanceVariant::Fatto ? "fatto" : "fatto-clean";
}

inline StanceVariant parse_stance_variant(const std::string& s) {
  std::string t = util::to_lower(util::trim(s));
  for (auto& c : t)
    if (c == '_') c = '-';
  if (t == "fatto") return StanceVariant::Fatto;
  if (t == "fatto-clean") return StanceVariant::FattoClean;
  throw InvalidRequest("unknown stance variant \"" + s + "\" (expected fatto or fatto-clean)");
}

namespace detail {

inline std::string fill_slot(std::string text, const std::string& slot,
                             const std::string& value) {
  auto pos = text.find(slot);
  if (pos == std::string::npos) throw PreconditionError("prompt template missing slot " + slot);
  return text.replace(pos, slot.size(), value);
}

inline void require_complete_library(const ArticleLibrary& lib) {
  auto missing = lib.missing_required();
  if (missing.empty()) return;
  std::string list;
  for (std::size_t i = 0; i < missing.size(); ++i) {
    if (i) list += ", ";
    list += std::to_string(missing[i]);
  }
  throw PreconditionError("article library is missing articles " + list);
}

}  // namespace detail

inline std::string build_analysis_prompt(const ArticleLibrary& lib, const Ruling& ruling) {
  detail::require_complete_library(lib);
  std::string p = kAnalysisPromptTemplate;
  p = detail::fill_slot(p, "{{ARTICLES}}", lib.render_list());
  p = detail::fill_slot(p, "{{RULING_ID}}", ruling.id);
  p = detail::fill_slot(p, "{{RULING_TEXT}}", ruling.fatto);
  return p;
}

inline std::string build_stance_prompt(const ArticleLibrary& lib, const Ruling& ruling,
                                       StanceVariant variant) {
  detail::require_complete_library(lib);
  const std::string& case_text =
      variant == StanceVariant::Fatto ? ruling.fatto : ruling.fatto_clean;
  std::string p = kStancePromptTemplate;
  p = detail::fill_slot(p, "{{ARTICLES}}", lib.render_list());
  p = detail::fill_slot(p, "{{RULING_ID}}", ruling.id);
  p = detail::fill_slot(p, "{{CASE_TEXT}}", case_text);
  return p;
}

// ---------------------------------------------------------------------------
// Parsed structures
// ---------------------------------------------------------------------------

struct Argument {
  ArticleKey key;      // canonical key of the first article the bullet cites
  std::string detail;  // bullet text after the delimiter colon
  bool operator==(const Argument&) const = default;
};

struct PartyAnalysis {
  std::string summary;
  std::vector<Argument> arguments;
  bool operator==(const PartyAnalysis&) const = default;
};

struct RulingAnalysis {
  std::string ruling_id;
  PartyAnalysis applicant;
  std::optional<PartyAnalysis> state;  // absent when the ruling has no State opinion
  PartyAnalysis court;
  bool operator==(const RulingAnalysis&) const = default;

  const PartyAnalysis* party(Party p) const {
    switch (p) {
      case Party::Applicant:
        return &applicant;
      case Party::State:
        return state ? &*state : nullptr;
      case Party::Court:
        return &court;
      case Party::Model:
        return nullptr;  // the model's stance lives outside the analysis
    }
    return nullptr;
  }
};

struct Stance {
  std::string ruling_id;
  StanceVariant variant = StanceVariant::Fatto;
  int sample_index = 0;
  std::string overview;
  std::vector<Argument> arguments;
  bool operator==(const Stance&) const = default;
};

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace detail {

inline bool is_bullet_start(const std::string& line, std::string* rest) {
  std::string t = util::trim(line);
  if (t.size() >= 2 && (t[0] == '-' || t[0] == '*') && t[1] == ' ') {
    *rest = util::trim(t.substr(2));
    return true;
  }
  // "1. text" style numbered items
  std::size_t i = 0;
  while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) ++i;
  if (i > 0 && i + 1 < t.size() && t[i] == '.' && t[i + 1] == ' ') {
    *rest = util::trim(t.substr(i + 2));
    return true;
  }
  return false;
}

// Matches "NAME" or "NAME:"; inline content after the colon goes to *rest.
inline bool match_heading(const std::string& line, const char* name, std::string* rest) {
  std::string t = util::trim(line);
  std::string lower = util::to_lower(t);
  std::string n = util::to_lower(name);
  if (lower == n || lower == n + ":") {
    rest->clear();
    return true;
  }
  if (lower.rfind(n + ":", 0) == 0) {
    *rest = util::trim(t.substr(n.size() + 1));
    return true;
  }
  return false;
}

// One bullet becomes one argument, keyed by the first article reference it
// cites; the text after the first colon is the argument detail.
inline Argument parse_bullet(const std::string& bullet, const std::string& context) {
  // A leading canonical combination key ("117+ECHR:8") contains a colon of
  // its own; the delimiter is the first colon after it.
  static const std::regex canon_prefix(R"(^\s*117\+[A-Za-z][A-Za-z0-9]*:\d{1,3})");
  std::size_t search_from = 0;
  std::smatch m;
  if (std::regex_search(bullet, m, canon_prefix)) search_from = m[0].length();

  std::string key_part = bullet;
  std::string detail_part;
  if (auto colon = bullet.find(':', search_from); colon != std::string::npos) {
    key_part = bullet.substr(0, colon);
    detail_part = util::trim(bullet.substr(colon + 1));
  }
  try {
    return {normalize_article_key(key_part), detail_part};
  } catch (const UnrecognizedArticle& e) {
    throw UnrecognizedArticle(std::string(e.what()) + " in " + context + " bullet \"" + bullet +
                              "\"");
  }
}

struct SectionedText {
  std::string summary;
  std::vector<Argument> arguments;
  std::string trailing;  // prose after the bullet list
};

// Shared walker for both response grammars. Collects the prose section, the
// bullet list, and any trailing paragraph after the bullets.
inline SectionedText parse_sections(const std::vector<std::string>& lines,
                                    const char* summary_heading, const char* list_heading,
                                    const std::string& context) {
  SectionedText out;
  enum class Where { Preamble, Summary, List } where = Where::Preamble;
  bool saw_summary = false, saw_list = false;
  bool bullet_open = false;
  std::vector<std::string> summary_parts, trailing_parts;
  std::vector<std::string> bullets;

  // Blank lines inside a prose section are kept so paragraph breaks survive
  // a print/parse round trip; leading and trailing blanks are dropped below.
  auto join_paragraphs = [](std::vector<std::string> parts) {
    while (!parts.empty() && parts.front().empty()) parts.erase(parts.begin());
    while (!parts.empty() && parts.back().empty()) parts.pop_back();
    std::string joined;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i) joined += "\n";
      joined += parts[i];
    }
    return joined;
  };

  for (const auto& raw : lines) {
    std::string line = util::trim(raw);
    std::string inline_rest;
    if (match_heading(line, summary_heading, &inline_rest)) {
      where = Where::Summary;
      saw_summary = true;
      if (!inline_rest.empty()) summary_parts.push_back(inline_rest);
      continue;
    }
    if (match_heading(line, list_heading, &inline_rest)) {
      where = Where::List;
      saw_list = true;
      continue;
    }
    switch (where) {
      case Where::Preamble:
        break;  // stray text before the first heading is ignored
      case Where::Summary:
        summary_parts.push_back(line);
        break;
      case Where::List: {
        std::string rest;
        if (is_bullet_start(line, &rest)) {
          bullets.push_back(rest);
          bullet_open = true;
        } else if (line.empty()) {
          bullet_open = false;
          if (!trailing_parts.empty()) trailing_parts.push_back(line);
        } else if (bullet_open && !bullets.empty()) {
          bullets.back() += " " + line;
        } else {
          trailing_parts.push_back(line);
        }
        break;
      }
    }
  }
  if (!saw_summary)
    throw MissingSection(context + ": missing " + std::string(summary_heading) + " section");
  if (!saw_list)
    throw MissingSection(context + ": missing " + std::string(list_heading) + " section");

  out.summary = join_paragraphs(std::move(summary_parts));
  out.trailing = join_paragraphs(std::move(trailing_parts));
  for (const auto& b : bullets) {
    Argument arg = parse_bullet(b, context);
    for (const auto& prev : out.arguments)
      if (prev.key == arg.key)
        throw DuplicateArticle(context + ": article " + arg.key + " appears in more than one bullet");
    out.arguments.push_back(std::move(arg));
  }
  return out;
}

inline std::optional<std::string> extract_tag_block(const std::string& text,
                                                    const std::string& tag) {
  std::string open = "<" + tag + ">", close = "</" + tag + ">";
  auto lower = util::to_lower(text);
  auto a = lower.find(open);
  if (a == std::string::npos) return std::nullopt;
  auto b = lower.find(close, a + open.size());
  if (b == std::string::npos)
    throw MissingPartyBlock("unterminated <" + tag + "> block");
  return text.substr(a + open.size(), b - (a + open.size()));
}

inline PartyAnalysis parse_party_block(const std::string& block, const std::string& context) {
  auto sections = parse_sections(util::split_lines(block), "SUMMARY",
                                 "CONSTITUTIONAL PRINCIPLES AND ARTICLES", context);
  if (sections.arguments.empty())
    throw EmptyArticleList(context + ": no article bullets");
  PartyAnalysis out;
  out.summary = sections.summary;
  if (!sections.trailing.empty()) {
    if (!out.summary.empty()) out.summary += "\n\n";
    out.summary += sections.trailing;
  }
  out.arguments = std::move(sections.arguments);
  return out;
}

}  // namespace detail

// Parses a tagged analysis response (applicant / state / court blocks).
// The state block is optional; applicant and court are not.
inline RulingAnalysis parse_argument_set(const std::string& text, const std::string& ruling_id) {
  RulingAnalysis out;
  out.ruling_id = ruling_id;

  auto applicant = detail::extract_tag_block(text, "applicant");
  if (!applicant) throw MissingPartyBlock(ruling_id + ": response has no <applicant> block");
  out.applicant = detail::parse_party_block(*applicant, ruling_id + " applicant");

  if (auto state = detail::extract_tag_block(text, "state"))
    out.state = detail::parse_party_block(*state, ruling_id + " state");

  auto court = detail::extract_tag_block(text, "court");
  if (!court) throw MissingPartyBlock(ruling_id + ": response has no <court> block");
  out.court = detail::parse_party_block(*court, ruling_id + " court");
  return out;
}

// Parses a stance response (case overview + constitutional arguments). A
// concluding paragraph after the bullet list is folded into the overview.
inline Stance parse_stance(const std::string& text, const std::string& ruling_id,
                           StanceVariant variant, int sample_index) {
  std::string context = ruling_id + " stance[" + to_string(variant) + "/" +
                        std::to_string(sample_index) + "]";
  auto sections = detail::parse_sections(util::split_lines(text), "CASE OVERVIEW",
                                         "CONSTITUTIONAL ARGUMENTS", context);
  if (sections.arguments.empty()) throw EmptyArticleList(context + ": no article bullets");
  Stance out;
  out.ruling_id = ruling_id;
  out.variant = variant;
  out.sample_index = sample_index;
  out.overview = sections.summary;
  if (!sections.trailing.empty()) {
    if (!out.overview.empty()) out.overview += "\n\n";
    out.overview += sections.trailing;
  }
  out.arguments = std::move(sections.arguments);
  return out;
}

// ---------------------------------------------------------------------------
// Canonical printers (round-trip with the parsers)
// ---------------------------------------------------------------------------

namespace detail {

inline void print_party(std::string& out, const PartyAnalysis& p) {
  out += "SUMMARY:\n" + p.summary + "\n\nCONSTITUTIONAL PRINCIPLES AND ARTICLES:\n";
  for (const auto& a : p.arguments) out += "- " + a.key + ": " + a.detail + "\n";
}

}  // namespace detail

inline std::string print_analysis(const RulingAnalysis& analysis) {
  std::string out = "<applicant>\n";
  detail::print_party(out, analysis.applicant);
  out += "</applicant>\n";
  if (analysis.state) {
    out += "\n<state>\n";
    detail::print_party(out, *analysis.state);
    out += "</state>\n";
  }
  out += "\n<court>\n";
  detail::print_party(out, analysis.court);
  out += "</court>\n";
  return out;
}

inline std::string print_stance(const Stance& stance) {
  std::string out = "CASE OVERVIEW:\n" + stance.overview + "\n\nCONSTITUTIONAL ARGUMENTS:\n";
  for (const auto& a : stance.arguments) out += "- " + a.key + ": " + a.detail + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Verdict leakage scan
// ---------------------------------------------------------------------------

// Terms that reveal the outcome; the cleaned case description handed to the
// stance prompt should not contain any of them.
inline std::vector<std::string> find_verdict_leakage(const std::string& text) {
  static const std::vector<std::string> terms = {
      "unfounded",     "well-founded", "founded",    "inadmissible", "infondat",
      "fondat",        "inammissibil", "accoglie",   "respinge",     "dichiara",
      "illegittimita costituzionale",
  };
  std::string lower = util::to_lower(text);
  std::vector<std::string> found;
  for (const auto& term : terms) {
    if (lower.find(term) == std::string::npos) continue;
    // "founded" is a substring of "unfounded"; report each term once.
    bool shadowed = false;
    for (const auto& f : found)
      if (f.find(term) != std::string::npos) shadowed = true;
    if (!shadowed) found.push_back(term);
  }
  return found;
}

// ---------------------------------------------------------------------------
// Batch drivers
// ---------------------------------------------------------------------------

struct StageFailure {
  std::string ruling_id;
  std::string detail;
};

struct ExtractOptions {
  std::string model_id;
  double temperature = 0.0;
  int parse_retries = 0;  // extra samples to try when a response fails to parse
};

struct ExtractionRun {
  std::vector<RulingAnalysis> analyses;
  std::vector<StageFailure> failures;
};

inline ExtractionRun extract_all(Client& client, const ArticleLibrary& lib, const Corpus& corpus,
                                 const ExtractOptions& options) {
  ExtractionRun run;
  for (const auto& ruling : corpus.rulings()) {
    CompletionRequest req;
    req.prompt = build_analysis_prompt(lib, ruling);
    req.temperature = options.temperature;
    req.model_id = options.model_id;
    std::string last_error;
    bool parsed = false;
    for (int attempt = 0; attempt <= options.parse_retries && !parsed; ++attempt) {
      req.sample_index = attempt;
      CompletionResult result = client.complete(req);
      try {
        run.analyses.push_back(parse_argument_set(result.text, ruling.id));
        parsed = true;
      } catch (const Error& e) {
        last_error = e.what();
      }
    }
    if (!parsed) run.failures.push_back({ruling.id, last_error});
  }
  return run;
}

struct StanceOptions {
  std::string model_id;
  double temperature = 1.0;
  StanceVariant variant = StanceVariant::Fatto;
  int samples = 5;
};

struct StanceRun {
  std::vector<Stance> stances;
  std::vector<StageFailure> failures;
};

inline StanceRun collect_stances(Client& client, const ArticleLibrary& lib, const Corpus& corpus,
                                 const StanceOptions& options) {
  if (options.samples < 1)
    throw PreconditionError("stance samples must be at least 1");
  StanceRun run;
  for (const auto& ruling : corpus.rulings()) {
    for (int s = 0; s < options.samples; ++s) {
      CompletionRequest req;
      req.prompt = build_stance_prompt(lib, ruling, options.variant);
      req.temperature = options.temperature;
      req.sample_index = s;
      req.model_id = options.model_id;
      CompletionResult result = client.complete(req);
      try {
        run.stances.push_back(parse_stance(result.text, ruling.id, options.variant, s));
      } catch (const Error& e) {
        run.failures.push_back({ruling.id, std::string("sample ") + std::to_string(s) + ": " +
                                               e.what()});
      }
    }
  }
  return run;
}

// ---------------------------------------------------------------------------
// Serialization of parsed artifacts
// ---------------------------------------------------------------------------

inline constexpr int kAnalysisSchemaVersion = 1;
inline constexpr int kStanceSchemaVersion = 1;

namespace detail {

inline jsonx::Json arguments_to_json(const std::vector<Argument>& args) {
  jsonx::Json arr = jsonx::Json::array();
  for (const auto& a : args) arr.push_back({{"key", a.key}, {"detail", a.detail}});
  return arr;
}

inline std::vector<Argument> arguments_from_json(const jsonx::Json& arr, const std::string& path) {
  std::vector<Argument> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    std::string p = path + "[" + std::to_string(i) + "]";
    out.push_back({jsonx::require_string<MalformedCorpus>(arr[i], "key", p),
                   jsonx::require_string<MalformedCorpus>(arr[i], "detail", p)});
  }
  return out;
}

inline jsonx::Json party_to_json(const PartyAnalysis& p) {
  return {{"summary", p.summary}, {"arguments", arguments_to_json(p.arguments)}};
}

inline PartyAnalysis party_from_json(const jsonx::Json& j, const std::string& path) {
  PartyAnalysis p;
  p.summary = jsonx::require_string<MalformedCorpus>(j, "summary", path);
  p.arguments =
      arguments_from_json(jsonx::require_array<MalformedCorpus>(j, "arguments", path), path + ".arguments");
  return p;
}

}  // namespace detail

inline jsonx::Json analyses_to_json(const std::vector<RulingAnalysis>& analyses) {
  jsonx::Json j;
  j["schema_version"] = kAnalysisSchemaVersion;
  j["analyses"] = jsonx::Json::array();
  for (const auto& a : analyses) {
    jsonx::Json entry;
    entry["ruling_id"] = a.ruling_id;
    entry["applicant"] = detail::party_to_json(a.applicant);
    entry["state"] = a.state ? detail::party_to_json(*a.state) : jsonx::Json(nullptr);
    entry["court"] = detail::party_to_json(a.court);
    j["analyses"].push_back(std::move(entry));
  }
  return j;
}

inline std::vector<RulingAnalysis> analyses_from_json(const jsonx::Json& j) {
  jsonx::require_schema_version<MalformedCorpus>(j, kAnalysisSchemaVersion, "analyses");
  const auto& arr = jsonx::require_array<MalformedCorpus>(j, "analyses", "analyses");
  std::vector<RulingAnalysis> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    std::string path = "analyses[" + std::to_string(i) + "]";
    RulingAnalysis a;
    a.ruling_id = jsonx::require_string<MalformedCorpus>(arr[i], "ruling_id", path);
    a.applicant = detail::party_from_json(
        jsonx::require<MalformedCorpus>(arr[i], "applicant", path), path + ".applicant");
    const auto& state = jsonx::require<MalformedCorpus>(arr[i], "state", path);
    if (!state.is_null()) a.state = detail::party_from_json(state, path + ".state");
    a.court = detail::party_from_json(jsonx::require<MalformedCorpus>(arr[i], "court", path),
                                      path + ".court");
    out.push_back(std::move(a));
  }
  return out;
}

inline jsonx::Json stances_to_json(const std::vector<Stance>& stances) {
  jsonx::Json j;
  j["schema_version"] = kStanceSchemaVersion;
  j["stances"] = jsonx::Json::array();
  for (const auto& s : stances) {
    jsonx::Json entry;
    entry["ruling_id"] = s.ruling_id;
    entry["variant"] = to_string(s.variant);
    entry["sample_index"] = s.sample_index;
    entry["overview"] = s.overview;
    entry["arguments"] = detail::arguments_to_json(s.arguments);
    j["stances"].push_back(std::move(entry));
  }
  return j;
}

inline std::vector<Stance> stances_from_json(const jsonx::Json& j) {
  jsonx::require_schema_version<MalformedCorpus>(j, kStanceSchemaVersion, "stances");
  const auto& arr = jsonx::require_array<MalformedCorpus>(j, "stances", "stances");
  std::vector<Stance> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    std::string path = "stances[" + std::to_string(i) + "]";
    Stance s;
    s.ruling_id = jsonx::require_string<MalformedCorpus>(arr[i], "ruling_id", path);
    s.variant = parse_stance_variant(jsonx::require_string<MalformedCorpus>(arr[i], "variant", path));
    s.sample_index =
        static_cast<int>(jsonx::require_int<MalformedCorpus>(arr[i], "sample_index", path));
    s.overview = jsonx::require_string<MalformedCorpus>(arr[i], "overview", path);
    s.arguments = detail::arguments_from_json(
        jsonx::require_array<MalformedCorpus>(arr[i], "arguments", path), path + ".arguments");
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace lexalign
