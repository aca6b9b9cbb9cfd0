#include <catch2/catch_amalgamated.hpp>

#include "lexalign/corpus.hpp"

using namespace lexalign;

namespace {

Ruling valid_ruling() {
  Ruling r;
  r.id = "272/17";
  r.year = 2017;
  r.category = IssueCategory::ChildBestInterest;
  r.verdict = Verdict::Unfounded;
  r.fatto = "A long factual narrative about the proceeding before the ordinary judge.";
  r.fatto_clean = "A short factual narrative.";
  r.gold_articles = {"2", "30", "117+ECHR:8"};
  return r;
}

}  // namespace

TEST_CASE("article keys normalize to the canonical grammar", "[corpus]") {
  CHECK(normalize_article_key("Article 3") == "3");
  CHECK(normalize_article_key("art. 117") == "117");
  CHECK(normalize_article_key("ARTICLE 24") == "24");
  CHECK(normalize_article_key("3") == "3");
  CHECK(normalize_article_key("117+ECHR:8") == "117+ECHR:8");
  CHECK(normalize_article_key(
            "Article 117 in relation to Article 8 of the European Convention on Human Rights "
            "(ECHR)") == "117+ECHR:8");
  CHECK(normalize_article_key(
            "Article 117 in relation to Article 3 of the Convention on the Rights of the Child "
            "(CRC)") == "117+CRC:3");
  CHECK(normalize_article_key("Article 117 in relation to Article 24 of the Charter of "
                              "Fundamental Rights of the European Union (CFREU)") ==
        "117+CFREU:24");
  // Without an explicit link to 117, the first mention is the key itself.
  CHECK(normalize_article_key("Article 24 of the Charter of Fundamental Rights of the European "
                              "Union") == "24");
}

TEST_CASE("multi-article references keep the first mention", "[corpus]") {
  CHECK(normalize_article_key("Articles 30 and 31") == "30");
  CHECK(normalize_article_key("Article 2, Article 3") == "2");
  CHECK(normalize_article_key("Articles 2, 3, 30 and 31") == "2");
}

TEST_CASE("normalization is idempotent", "[corpus]") {
  for (const char* raw :
       {"Article 3", "Articles 30 and 31", "art. 117",
        "Article 117 in relation to Article 8 of the European Convention on Human Rights "
        "(ECHR)"}) {
    ArticleKey once = normalize_article_key(raw);
    CHECK(normalize_article_key(once) == once);
  }
}

TEST_CASE("unrecognized references throw", "[corpus]") {
  CHECK_THROWS_AS(normalize_article_key("the general principles"), UnrecognizedArticle);
  CHECK_THROWS_AS(normalize_article_key(""), UnrecognizedArticle);
  CHECK_THROWS_AS(normalize_article_key("Article"), UnrecognizedArticle);
}

TEST_CASE("article keys order numerically then by treaty", "[corpus]") {
  CHECK(article_key_less("2", "10"));
  CHECK(article_key_less("10", "117"));
  CHECK(article_key_less("117", "117+CFREU:24"));
  CHECK(article_key_less("117+CFREU:24", "117+ECHR:8"));
  CHECK(article_key_less("117+ECHR:8", "117+ECHR:14"));
  CHECK_FALSE(article_key_less("117+ECHR:8", "117+ECHR:8"));
}

TEST_CASE("party and verdict tokens parse and print", "[corpus]") {
  CHECK(require_party("applicant") == Party::Applicant);
  CHECK(require_party(" State ") == Party::State);
  CHECK(to_string(Party::Court) == "court");
  CHECK(display_name(Party::Model) == "Model");
  CHECK_THROWS_AS(require_party("referee"), MalformedCorpus);

  CHECK(require_verdict("founded") == Verdict::Founded);
  CHECK(require_verdict("Partially Founded") == Verdict::PartiallyFounded);
  CHECK(display_name(Verdict::PartiallyFounded) == "Partially founded");
  CHECK_THROWS_AS(require_verdict("settled"), MalformedCorpus);
}

TEST_CASE("partially unfounded folds into Unfounded at ingestion", "[corpus]") {
  CHECK(require_verdict("partially unfounded") == Verdict::Unfounded);
  CHECK(require_verdict("partially_unfounded") == Verdict::Unfounded);
}

TEST_CASE("validate_ruling reports each violated invariant", "[corpus]") {
  CHECK(validate_ruling(valid_ruling()).empty());

  Ruling bad_id = valid_ruling();
  bad_id.id = "272-17";
  REQUIRE_FALSE(validate_ruling(bad_id).empty());
  CHECK(validate_ruling(bad_id).front().find("id") != std::string::npos);

  Ruling old = valid_ruling();
  old.year = 1900;
  CHECK_FALSE(validate_ruling(old).empty());

  Ruling future = valid_ruling();
  future.year = util::current_year() + 1;
  CHECK_FALSE(validate_ruling(future).empty());

  Ruling unshortened = valid_ruling();
  unshortened.fatto_clean = unshortened.fatto;
  CHECK_FALSE(validate_ruling(unshortened).empty());

  Ruling no_verdict = valid_ruling();
  no_verdict.verdict.reset();
  CHECK_FALSE(validate_ruling(no_verdict).empty());

  Ruling bad_gold = valid_ruling();
  bad_gold.gold_articles.insert("thirty");
  CHECK_FALSE(validate_ruling(bad_gold).empty());
}

TEST_CASE("corpus JSON round trips", "[corpus]") {
  Ruling a = valid_ruling();
  Ruling b = valid_ruling();
  b.id = "11/19";
  b.year = 2019;
  b.category = IssueCategory::ReproductiveRights;
  b.verdict = Verdict::Founded;
  Corpus corpus({a, b});

  Corpus back = parse_corpus(corpus_to_json(corpus).dump());
  REQUIRE(back.rulings().size() == 2);
  CHECK(back.at("272/17") == a);
  CHECK(back.at("11/19") == b);
}

TEST_CASE("duplicate ruling ids are rejected", "[corpus]") {
  Corpus corpus({valid_ruling(), valid_ruling()});
  CHECK_THROWS_AS(parse_corpus(corpus_to_json(corpus).dump()), DuplicateRulingId);
}

TEST_CASE("schema version is enforced", "[corpus]") {
  jsonx::Json j = corpus_to_json(Corpus({valid_ruling()}));
  j["schema_version"] = 99;
  CHECK_THROWS_AS(parse_corpus(j.dump()), MalformedCorpus);
}

TEST_CASE("the bundled fixture corpus loads clean", "[corpus]") {
  Corpus corpus = load_corpus("data/fixture/corpus.json");
  REQUIRE(corpus.rulings().size() == 3);
  CHECK(corpus.at("11/19").verdict == Verdict::Founded);
  CHECK(corpus.at("22/20").verdict == Verdict::Unfounded);
  CHECK(corpus.at("35/22").verdict == Verdict::Inadmissible);
  for (const Ruling& r : corpus.rulings()) CHECK(validate_ruling(r).empty());
}
