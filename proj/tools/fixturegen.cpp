// Generates the bundled mock fixture: a three-ruling synthetic corpus, the
// matching provider transcript, pair labels, and a ready-to-run config.
// Responses are parsed back through the extraction grammar before anything
// is written, so a fixture that generates at all is valid by construction.

#include <cstdio>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "lexalign/corpus.hpp"
#include "lexalign/extraction.hpp"
#include "lexalign/llm_client.hpp"
#include "lexalign/pairs.hpp"
#include "lexalign/rubric.hpp"
#include "lexalign/util.hpp"

namespace fs = std::filesystem;
using namespace lexalign;

namespace {

struct Bullet {
  std::string ref;     // natural-language article reference
  std::string detail;  // argument body, without the per-sample tail
};

struct StanceSpec {
  std::string overview_lead;
  std::string overview_core;
  std::string conclusion;  // appended as a trailing paragraph on sample 2
  std::vector<Bullet> bullets;
  Bullet extra;  // cited only on samples 0 and 3; never argued by the parties
};

struct FixtureRuling {
  Ruling ruling;
  std::string analysis_response;
  StanceSpec stance;
};

const char* kAdverb[5] = {"squarely", "plainly", "decisively", "firmly", "above all"};

std::string stance_response(const StanceSpec& spec, StanceVariant variant, int sample) {
  std::string source = variant == StanceVariant::Fatto ? "full narrative of the facts"
                                                       : "distilled summary of the facts";
  std::string out = "CASE OVERVIEW:\n";
  out += spec.overview_lead + " Read against the " + source + ", the question " +
         kAdverb[sample] + " turns on " + spec.overview_core + "\n";
  out += "\nCONSTITUTIONAL ARGUMENTS:\n";
  auto emit = [&](const Bullet& b) {
    out += "- " + b.ref + ": " + b.detail + " The point stands " + kAdverb[sample] +
           " on the " + source + ".\n";
  };
  for (const auto& b : spec.bullets) emit(b);
  if (sample == 0 || sample == 3) emit(spec.extra);
  if (sample == 2) out += "\nIn conclusion, " + spec.conclusion + "\n";
  return out;
}

FixtureRuling ruling_a() {
  FixtureRuling f;
  f.ruling.id = "11/19";
  f.ruling.year = 2019;
  f.ruling.category = IssueCategory::ReproductiveRights;
  f.ruling.verdict = Verdict::Founded;
  f.ruling.gold_articles = {"2", "3", "32", "117+ECHR:8"};
  f.ruling.fatto =
      "An ordinary tribunal raises questions about the statutory prohibition of donor-assisted "
      "procreation. The proceeding concerns a married couple in which both partners carry a "
      "severe form of infertility that no homologous technique can treat; the clinic refused the "
      "requested procedure because the statute bans the use of donor gametes in every case.\n\n"
      "The referring judge reports that the couple has pursued every therapy available in Italy, "
      "that the sole medically indicated road is donor-assisted procreation abroad, and that the "
      "travel costs place the treatment beyond their means. The order recounts the medical file "
      "in detail and stresses the documented psychological strain on both partners.\n\n"
      "Before the Court the couple's counsel and the office representing the government filed "
      "opposing briefs on whether the blanket character of the prohibition can stand.";
  f.ruling.fatto_clean =
      "A tribunal questions the blanket statutory ban on donor-assisted procreation in the case "
      "of a married couple whose severe infertility admits no homologous treatment; the clinic "
      "refused the procedure, the only medically indicated option, and both sides briefed the "
      "point before the Court.";
  f.analysis_response =
      "<applicant>\n"
      "SUMMARY:\n"
      "The referring judge doubts the blanket statutory ban on donor-assisted procreation, "
      "arguing that it burdens couples with severe infertility and intrudes on intimate life "
      "choices without a proportionate aim.\n"
      "\n"
      "CONSTITUTIONAL PRINCIPLES AND ARTICLES:\n"
      "- Article 2: The ban compresses the inviolable right to self-determination in procreative "
      "choices, a core expression of personal identity.\n"
      "- Article 3: Couples whose infertility requires donor gametes are treated worse than "
      "couples treatable with homologous techniques, an unreasonable distinction.\n"
      "- Article 13: Personal liberty covers decisions over one's own body, and the prohibition "
      "coerces reproductive conduct.\n"
      "- Article 32: Infertility is a pathological condition, and denying the only effective "
      "treatment harms psychological and physical health.\n"
      "- Article 117 in relation to Article 8 of the European Convention on Human Rights (ECHR): "
      "The interference with private and family life fails the Convention's necessity test, so "
      "the domestic ban breaches the international obligation.\n"
      "</applicant>\n"
      "\n"
      "<state>\n"
      "SUMMARY:\n"
      "The Avvocatura dello Stato defends the prohibition as a legislative balance shielding the "
      "embryo and the donor-conceived child, a matter reserved to parliamentary discretion.\n"
      "\n"
      "CONSTITUTIONAL PRINCIPLES AND ARTICLES:\n"
      "- Article 2: Solidarity duties toward the unborn justify restraining adult procreative "
      "projects.\n"
      "- Article 3: The distinction between homologous and heterologous techniques rests on "
      "objective biological differences, hence no arbitrary discrimination.\n"
      "- Article 32: Health protection does not guarantee access to every desired technique when "
      "the legislature judges the risks excessive.\n"
      "</state>\n"
      "\n"
      "<court>\n"
      "SUMMARY:\n"
      "The Court holds the absolute ban disproportionate: procreative self-determination and the "
      "health of the couple prevail once the technique is the only therapeutic road, and the "
      "Convention case law confirms the breach.\n"
      "\n"
      "CONSTITUTIONAL PRINCIPLES AND ARTICLES:\n"
      "- Article 2: The choice to become parents is an inviolable expression of personal "
      "self-determination that an absolute ban cannot erase.\n"
      "- Article 13: Decisions over one's own body belong to personal liberty and resist blanket "
      "coercion.\n"
      "- Article 32: Denying the sole effective treatment for severe infertility injures the "
      "right to health in its psychological dimension.\n"
      "- Article 117 in relation to Article 8 of the European Convention on Human Rights (ECHR): "
      "The Strasbourg case law on private and family life binds the legislature, and the ban "
      "fails its proportionality review.\n"
      "</court>\n";
  f.stance.overview_lead =
      "The referral concerns the statutory ban on donor-assisted procreation for couples whose "
      "severe infertility admits no other treatment.";
  f.stance.overview_core =
      "whether a blanket prohibition respects procreative self-determination, the right to "
      "health, and the Convention guarantees on private and family life.";
  f.stance.conclusion =
      "an absolute ban that forecloses the only effective treatment cannot survive "
      "proportionality review.";
  f.stance.bullets = {
      {"Article 2",
       "Procreative self-determination is an inviolable expression of the person, and an "
       "absolute ban erases it."},
      {"Article 13",
       "Personal liberty protects decisions over one's own body from blanket coercion."},
      {"Article 32",
       "Severe infertility is a pathology, and barring the only effective treatment harms "
       "psychological and physical health."},
      {"Article 117 in relation to Article 8 of the European Convention on Human Rights (ECHR)",
       "A blanket interference with private and family life fails the proportionality review "
       "the Convention requires."}};
  f.stance.extra = {"Article 9",
                    "Scientific research on assisted procreation deserves room within "
                    "constitutional limits."};
  return f;
}

FixtureRuling ruling_b() {
  FixtureRuling f;
  f.ruling.id = "22/20";
  f.ruling.year = 2020;
  f.ruling.category = IssueCategory::ChildBestInterest;
  f.ruling.verdict = Verdict::Unfounded;
  f.ruling.gold_articles = {"2", "30", "31", "117+CRC:3"};
  f.ruling.fatto =
      "A guardianship judge questions the rule governing revocation of a special adoption, in "
      "the part where it does not require the minor to be heard. The proceeding concerns a "
      "twelve-year-old placed with relatives after the adoptive placement broke down; the "
      "revocation request was filed by the public prosecutor.\n\n"
      "The referring order describes the child's settled life with the relatives, the school "
      "reports, and the opinion of the social services, and argues that deciding the revocation "
      "on documents alone leaves the person most affected without any voice.\n\n"
      "No brief was filed on behalf of the government; the questions reached the Court on the "
      "referring order and the file of the guardianship proceeding alone.";
  f.ruling.fatto_clean =
      "A guardianship judge questions the special-adoption revocation rule insofar as it lets "
      "the court decide on documents alone without hearing the twelve-year-old concerned; the "
      "government filed no brief.";
  f.analysis_response =
      "<applicant>\n"
      "SUMMARY:\n"
      "The guardianship judge challenges the rule that denies the minor any voice in adoption "
      "revocation proceedings, claiming it sacrifices the child's welfare to procedural "
      "formalism.\n"
      "\n"
      "CONSTITUTIONAL PRINCIPLES AND ARTICLES:\n"
      "- Article 2: The child's identity and relational life are inviolable interests that a "
      "documents-only procedure ignores.\n"
      "- Articles 30 and 31: Parental duties and the Republic's protection of childhood require "
      "hearing the minor before severing family bonds.\n"
      "- Article 117 in relation to Article 3 of the Convention on the Rights of the Child "
      "(CRC): The best interests of the child must be the primary consideration, which a silent "
      "procedure disregards.\n"
      "</applicant>\n"
      "\n"
      "<court>\n"
      "SUMMARY:\n"
      "The Court reads the contested rule as already requiring an assessment centred on the "
      "minor, so the challenge rests on a mistaken interpretive premise.\n"
      "\n"
      "CONSTITUTIONAL PRINCIPLES AND ARTICLES:\n"
      "- Article 2: The child's relational identity is an inviolable interest, yet the existing "
      "procedure already lets the judge weigh it by hearing the minor where capable.\n"
      "- Article 30: Parental duties are enforced through an assessment the ordinary courts can "
      "and must centre on the minor.\n"
      "- Article 117 in relation to Article 3 of the Convention on the Rights of the Child "
      "(CRC): The best interests standard guides interpretation, and a conforming reading of "
      "the rule satisfies the international obligation.\n"
      "</court>\n";
  f.stance.overview_lead =
      "The referral concerns the revocation of a special adoption decided on documents alone, "
      "without the twelve-year-old being heard.";
  f.stance.overview_core =
      "whether the child's best interests and relational identity tolerate a procedure that "
      "never hears the minor.";
  f.stance.conclusion =
      "a procedure that decides the child's family life without hearing the child must at least "
      "admit of a conforming interpretation.";
  f.stance.bullets = {
      {"Article 2",
       "The child's relational identity is an inviolable interest that the revocation procedure "
       "must weigh by hearing the minor."},
      {"Article 30",
       "Parental duties are enforced through an assessment centred on the minor, not on "
       "documents alone."},
      {"Article 117 in relation to Article 3 of the Convention on the Rights of the Child (CRC)",
       "The best interests of the child are the primary consideration and guide the reading of "
       "the revocation rule."}};
  f.stance.extra = {"Article 24",
                    "The minor's right to be heard is also a guarantee of judicial protection "
                    "in proceedings that shape family life."};
  return f;
}

FixtureRuling ruling_c() {
  FixtureRuling f;
  f.ruling.id = "35/22";
  f.ruling.year = 2022;
  f.ruling.category = IssueCategory::EndOfLife;
  f.ruling.verdict = Verdict::Inadmissible;
  f.ruling.gold_articles = {"2", "13", "25", "27", "32", "117+ECHR:8"};
  f.ruling.fatto =
      "An assize court raises questions on the criminal provision punishing assistance to "
      "suicide, as applied to a defendant who accompanied abroad a patient kept alive by "
      "life-support machinery after a road accident. The patient, fully lucid, had asked "
      "repeatedly to end treatment and, when palliative sedation was offered, insisted on a "
      "faster and self-administered road.\n\n"
      "The referring order details the patient's clinical picture, the repeated and documented "
      "requests, the family discussions, and the defendant's role, limited to driving the "
      "patient to the foreign clinic and assisting with the paperwork.\n\n"
      "Counsel for the defendant and the office representing the government debated before the "
      "Court whether the penal rule can be reshaped by judgment or only by parliament.";
  f.ruling.fatto_clean =
      "An assize court questions the crime of assisting suicide as applied to a defendant who "
      "drove a lucid, machine-dependent patient to a foreign clinic after repeated documented "
      "requests; the parties debated whether any reshaping of the rule belongs to the Court or "
      "to parliament.";
  f.analysis_response =
      "<applicant>\n"
      "SUMMARY:\n"
      "The assize court questions the criminal ban on assisted suicide as applied to a patient "
      "kept alive by life-support machinery, arguing that punishing every aid to a free and "
      "informed decision is irrational.\n"
      "\n"
      "CONSTITUTIONAL PRINCIPLES AND ARTICLES:\n"
      "- Article 2: Self-determination at the end of life belongs to the inviolable core of the "
      "person.\n"
      "- Article 13: Personal liberty protects control over one's own body against penal "
      "coercion of continued suffering.\n"
      "- Article 32: The right to refuse treatment implies that help in carrying out that free "
      "and informed refusal cannot be punished.\n"
      "</applicant>\n"
      "\n"
      "<state>\n"
      "SUMMARY:\n"
      "The Avvocatura dello Stato argues the question seeks a creative rewriting of penal "
      "policy that only parliament may perform, and that protecting vulnerable persons "
      "justifies the incrimination.\n"
      "\n"
      "CONSTITUTIONAL PRINCIPLES AND ARTICLES:\n"
      "- Article 13: The penal safeguard defends the weak from pressure, a legitimate limit on "
      "liberty set by parliamentary discretion.\n"
      "- Article 32: Health protection entitles the legislature to guard vulnerable patients "
      "against abuse rather than to license assistance in dying.\n"
      "</state>\n"
      "\n"
      "<court>\n"
      "SUMMARY:\n"
      "The Court declines to decide the questions as framed: crafting the conditions under "
      "which assistance may be lawful exceeds the remedial options open to the Court, though "
      "the plea signals a real constitutional tension for the legislature.\n"
      "\n"
      "CONSTITUTIONAL PRINCIPLES AND ARTICLES:\n"
      "- Article 2: Self-determination of the gravely ill person is an inviolable interest the "
      "legal order must weigh.\n"
      "- Article 13: Control over one's own body resists indiscriminate penal coercion, yet the "
      "selection of safeguards is legislative work.\n"
      "- Article 32: The settled right to refuse treatment shows that the free and informed "
      "patient's will already guides end-of-life care.\n"
      "</court>\n";
  f.stance.overview_lead =
      "The referral concerns the crime of assisting suicide as applied to help given to a "
      "lucid, machine-dependent patient after repeated documented requests.";
  f.stance.overview_core =
      "whether penal coercion may reach every aid to a free and informed end-of-life decision.";
  f.stance.conclusion =
      "punishing aid to a free and informed refusal of treatment strains self-determination, "
      "though the design of safeguards remains legislative work.";
  f.stance.bullets = {
      {"Article 2",
       "Self-determination at the end of life belongs to the inviolable core of the person."},
      {"Article 13",
       "Control over one's own body resists indiscriminate penal coercion of continued "
       "suffering."},
      {"Article 32",
       "The settled right to refuse treatment shows that the free and informed patient's will "
       "guides end-of-life care."}};
  f.stance.extra = {"Article 25",
                    "Any reshaping of the penal rule must respect the legality principle and "
                    "its reserve of statute."};
  return f;
}

void check(bool cond, const std::string& what) {
  if (!cond) throw std::runtime_error("fixture check failed: " + what);
}

std::set<ArticleKey> keys_of(const PartyAnalysis& p) {
  std::set<ArticleKey> keys;
  for (const auto& a : p.arguments) keys.insert(a.key);
  return keys;
}

}  // namespace

int main(int argc, char** argv) {
  fs::path out_dir = argc > 1 ? fs::path(argv[1]) : fs::path("data/fixture");
  fs::path articles_path = argc > 2 ? fs::path(argv[2]) : fs::path("data/articles.json");

  ArticleLibrary lib = ArticleLibrary::load(articles_path);
  check(lib.missing_required().empty(), "article library incomplete");

  std::vector<FixtureRuling> fixtures = {ruling_a(), ruling_b(), ruling_c()};
  const std::string model_id = "mock-model-1";
  const double extract_temperature = 0.0;
  const double stance_temperature = 1.0;

  // Validate every ruling and every response before writing anything.
  std::vector<Ruling> rulings;
  std::vector<RulingAnalysis> analyses;
  for (const auto& f : fixtures) {
    auto violations = validate_ruling(f.ruling);
    check(violations.empty(),
          f.ruling.id + ": " + (violations.empty() ? "" : violations.front()));
    check(find_verdict_leakage(f.ruling.fatto).empty(), f.ruling.id + ": fatto leaks verdict");
    check(find_verdict_leakage(f.ruling.fatto_clean).empty(),
          f.ruling.id + ": fatto_clean leaks verdict");
    RulingAnalysis analysis = parse_argument_set(f.analysis_response, f.ruling.id);
    analyses.push_back(analysis);
    rulings.push_back(f.ruling);
  }
  check(keys_of(analyses[0].applicant) ==
            std::set<ArticleKey>({"2", "3", "13", "32", "117+ECHR:8"}),
        "ruling A applicant keys");
  check(analyses[0].state.has_value(), "ruling A has state");
  check(!analyses[1].state.has_value(), "ruling B has no state");
  check(keys_of(analyses[1].applicant) == std::set<ArticleKey>({"2", "30", "117+CRC:3"}),
        "ruling B applicant keys (multi-article bullet keeps first key)");

  Corpus corpus(rulings);

  jsonx::Json transcript;
  transcript["schema_version"] = MockProvider::kTranscriptSchemaVersion;
  transcript["entries"] = jsonx::Json::array();
  auto add_entry = [&](const std::string& prompt, double temperature, int sample,
                       const std::string& response) {
    transcript["entries"].push_back({{"prompt", prompt},
                                     {"temperature", temperature},
                                     {"sample_index", sample},
                                     {"model_id", model_id},
                                     {"response_text", response}});
  };

  for (const auto& f : fixtures) {
    add_entry(build_analysis_prompt(lib, f.ruling), extract_temperature, 0, f.analysis_response);
    for (StanceVariant v : {StanceVariant::Fatto, StanceVariant::FattoClean}) {
      std::string prompt = build_stance_prompt(lib, f.ruling, v);
      for (int s = 0; s < 5; ++s) {
        std::string response = stance_response(f.stance, v, s);
        Stance parsed = parse_stance(response, f.ruling.id, v, s);
        check(!parsed.arguments.empty(), f.ruling.id + " stance has arguments");
        add_entry(prompt, stance_temperature, s, response);
      }
    }
  }

  // Pair labels: applicant-court pairs are concordant, any pair with the
  // State opposing. This mirrors the corpus design, where applicant and
  // court share ground and the State argues the other way.
  std::vector<ArgumentPair> pairs = generate_pairs(analyses);
  check(pairs.size() == 19, "expected 19 pairs, got " + std::to_string(pairs.size()));
  std::vector<LabelRow> labels;
  std::size_t concordant = 0;
  for (const auto& p : pairs) {
    bool applicant_court = (p.a1.party == Party::Applicant && p.a2.party == Party::Court);
    int label = applicant_court ? 1 : 0;
    concordant += static_cast<std::size_t>(label);
    labels.push_back({p.pair_id, label, "fixture", "2025-01-01T00:00:00Z"});
  }
  check(concordant == 10, "expected 10 concordant pairs, got " + std::to_string(concordant));

  jsonx::Json config = {
      {"schema_version", 1},
      {"corpus", "corpus.json"},
      {"articles", "../articles.json"},
      {"labels", "labels.csv"},
      {"transcript", "transcript.json"},
      {"out", "out"},
      {"mock", true},
      {"model_id", model_id},
      {"extract_temperature", extract_temperature},
      {"stance_temperature", stance_temperature},
      {"stance_samples", 5},
      {"variants", {"fatto", "fatto-clean"}},
      {"report_variant", "fatto"},
      {"test_fraction", 0.3},
      {"split_seed", 7},
      {"encoder_dim", 256},
      {"head_dim", 0},
      {"head_seed", 0},
      // The transformer-scale default learning rate moves a frozen-base
      // linear head far too slowly at this corpus size; the head uses a
      // larger step while every other training default stays unchanged.
      {"training",
       {{"epochs", 25},
        {"learning_rate", 0.01},
        {"margin", 0.5},
        {"weight_decay", 0.01},
        {"beta1", 0.9},
        {"beta2", 0.999},
        {"epsilon", 1e-8},
        {"batch_size", 16},
        {"seed", 0}}}};

  fs::create_directories(out_dir);
  save_corpus(corpus, out_dir / "corpus.json");
  util::write_file(out_dir / "transcript.json", transcript.dump(2) + "\n");
  util::write_file(out_dir / "labels.csv", labels_to_csv(labels));
  util::write_file(out_dir / "config.mock.json", config.dump(2) + "\n");

  std::printf("fixture written to %s\n", out_dir.string().c_str());
  std::printf("  rulings: %zu  transcript entries: %zu  pairs: %zu (%zu concordant)\n",
              rulings.size(), transcript["entries"].size(), pairs.size(), concordant);
  for (const auto& row : auto_completeness(analyses, corpus))
    std::printf("  completeness %s %s = %d\n", row.ruling_id.c_str(),
                to_string(row.party).c_str(), row.score);
  return 0;
}
