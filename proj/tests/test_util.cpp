#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "lexalign/util.hpp"

using namespace lexalign;

TEST_CASE("fnv1a matches the published test vectors", "[util]") {
  CHECK(util::fnv1a("") == 14695981039346656037ull);
  CHECK(util::fnv1a("a") == 0xaf63dc4c8601ec8cull);
  CHECK(util::fnv1a("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("fnv1a_hex is 16 lowercase hex digits", "[util]") {
  std::string h = util::fnv1a_hex("anything");
  REQUIRE(h.size() == 16);
  for (char c : h) CHECK(((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f')));
  CHECK(util::fnv1a_hex("x") != util::fnv1a_hex("y"));
}

TEST_CASE("string helpers", "[util]") {
  CHECK(util::trim("  a b \t\n") == "a b");
  CHECK(util::trim("") == "");
  CHECK(util::to_lower("AbC") == "abc");
  CHECK(util::to_upper("aBc") == "ABC");
  CHECK(util::starts_with_ci("Article 3", "article"));
  CHECK_FALSE(util::starts_with_ci("art", "article"));
  CHECK(util::split_lines("a\nb\r\nc").size() == 3);
}

TEST_CASE("format_3dp rounds to three decimals", "[util]") {
  CHECK(util::format_3dp(0.2417) == "0.242");
  CHECK(util::format_3dp(0.1523) == "0.152");
  CHECK(util::format_3dp(1.0) == "1.000");
  CHECK(util::format_3dp(0.0) == "0.000");
}

TEST_CASE("format_double round-trips through parsing", "[util]") {
  for (double x : {0.0, 1.0, 2e-5, 0.1 + 0.2, 1e300, -3.25}) {
    CHECK(std::stod(util::format_double(x)) == x);
  }
}

TEST_CASE("csv escaping quotes separators and doubles quotes", "[util]") {
  CHECK(util::csv_escape("plain") == "plain");
  CHECK(util::csv_escape("a,b") == "\"a,b\"");
  CHECK(util::csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(util::csv_escape("two\nlines") == "\"two\nlines\"");
}

TEST_CASE("csv_split inverts csv_escape", "[util]") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> len(0, 12);
  const std::string alphabet = "ab,\"\n x";
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> fields(3);
    for (auto& f : fields)
      for (int i = 0, n = len(rng); i < n; ++i) f += alphabet[pick(rng)];
    std::string line = util::csv_escape(fields[0]) + "," + util::csv_escape(fields[1]) + "," +
                       util::csv_escape(fields[2]);
    CHECK(util::csv_split(line) == fields);
  }
}

TEST_CASE("iso timestamps look like UTC instants", "[util]") {
  std::string t = util::iso_timestamp_utc();
  REQUIRE(t.size() == 20);
  CHECK(t[4] == '-');
  CHECK(t[10] == 'T');
  CHECK(t.back() == 'Z');
  CHECK(util::current_year() >= 2024);
}

TEST_CASE("sanitize_for_filename replaces path hazards", "[util]") {
  CHECK(util::sanitize_for_filename("117+ECHR:8") == "117_ECHR_8");
  CHECK(util::sanitize_for_filename("11/19") == "11_19");
}

TEST_CASE("file round trip and append", "[util]") {
  auto path = std::filesystem::temp_directory_path() / "lexalign_util_test.txt";
  util::write_file(path, "one\n");
  util::append_file(path, "two\n");
  CHECK(util::read_file(path) == "one\ntwo\n");
  std::filesystem::remove(path);
}
