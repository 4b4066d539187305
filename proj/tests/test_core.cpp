#include <random>

#include "doctest.h"
#include "sp/core.hpp"

using namespace sp;

TEST_CASE("parse single sentence") {
  auto f = parse_pattern_file("t w o k i t t e n s p l a y", Role::New);
  REQUIRE(f.patterns.size() == 1);
  CHECK(f.patterns[0].size() == 14);
  CHECK(f.patterns[0].frequency() == 1);
  CHECK(f.patterns[0].role() == Role::New);
}

TEST_CASE("frequency prefix") {
  auto f = parse_pattern_file("@3 a b", Role::Old);
  REQUIRE(f.patterns.size() == 1);
  CHECK(f.patterns[0].text() == "a b");
  CHECK(f.patterns[0].frequency() == 3);
}

TEST_CASE("comments and blank lines") {
  auto f = parse_pattern_file("; comment\n\nj o h n r u n s", Role::New);
  REQUIRE(f.patterns.size() == 1);
  CHECK(f.patterns[0].size() == 8);
}

TEST_CASE("tabs and runs of spaces separate marks") {
  auto f = parse_pattern_file("  a\t\tb   c  \r\n", Role::Old);
  REQUIRE(f.patterns.size() == 1);
  CHECK(f.patterns[0].text() == "a b c");
}

TEST_CASE("format errors carry the line number") {
  try {
    parse_pattern_file("a b\n@4\n", Role::Old);
    FAIL("expected error");
  } catch (const FormatError& e) {
    CHECK(e.line() == 2);
    CHECK(e.detail() == "empty pattern");
  }
  try {
    parse_pattern_file("; x\n\n@0 a\n", Role::Old);
    FAIL("expected error");
  } catch (const FormatError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(parse_pattern_file("@-2 a", Role::Old), FormatError);
  CHECK_THROWS_AS(parse_pattern_file("@x a", Role::Old), FormatError);
}

TEST_CASE("serialize") {
  std::vector<Pattern> one{Pattern({"a", "b"})};
  CHECK(serialize_pattern_file(one) == "a b\n");
  std::vector<Pattern> two{Pattern({"a"}, 2)};
  CHECK(serialize_pattern_file(two) == "@2 a\n");
}

TEST_CASE("symbol kinds") {
  SymbolClassifier c({"NP"});
  CHECK(c.classify("<") == SymbolKind::boundary);
  CHECK(c.classify(">") == SymbolKind::boundary);
  CHECK(c.classify("%1") == SymbolKind::identification);
  CHECK(c.classify("#NP") == SymbolKind::identification);
  CHECK(c.classify("42") == SymbolKind::identification);
  CHECK(c.classify("NP") == SymbolKind::identification);
  CHECK(c.classify("np") == SymbolKind::content);
  CHECK(c.classify("k") == SymbolKind::content);
  CHECK(c.classify("4a") == SymbolKind::content);
}

TEST_CASE("id pragma feeds the classifier") {
  auto f = parse_pattern_file(";@id S NP\nS a NP #S\n", Role::Old);
  REQUIRE(f.patterns.size() == 1);
  CHECK(f.patterns[0][0].kind == SymbolKind::identification);
  CHECK(f.patterns[0][1].kind == SymbolKind::content);
  CHECK(f.patterns[0][2].kind == SymbolKind::identification);
  auto again = parse_pattern_file(serialize_pattern_file(f.patterns, f.classifier), Role::Old);
  CHECK(again.patterns == f.patterns);
  CHECK(again.classifier == f.classifier);
}

TEST_CASE("marks compare by exact spelling") {
  auto p = Pattern::from_text("a A a");
  CHECK(p.ids()[0] == p.ids()[2]);
  CHECK(p.ids()[0] != p.ids()[1]);
}

TEST_CASE("validate") {
  CHECK(validate_pattern(Pattern({"a", "b"})).empty());
  auto v = validate_pattern(Pattern(std::vector<std::string>{}));
  REQUIRE(v.size() == 1);
  CHECK(v[0] == "empty pattern");
  auto z = validate_pattern(Pattern({"a"}, 0));
  REQUIRE(z.size() == 1);
  CHECK(z[0] == "non-positive frequency");
}

TEST_CASE("kittens grammar round trip") {
  auto text = read_text_file(std::string(SP_DATA_DIR) + "/kittens.spg");
  auto f = parse_pattern_file(text, Role::Old);
  CHECK(f.patterns.size() == 8);
  auto g = parse_pattern_file(serialize_pattern_file(f.patterns, f.classifier), Role::Old);
  CHECK(g.patterns == f.patterns);
}

TEST_CASE("round trip on random documents") {
  std::mt19937 rng(7);
  const std::vector<std::string> alphabet{"a", "b", "%1", "#x", "<", ">", "12", ";", "@", "@@", "q;", "é"};
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Pattern> ps;
    const int n = std::uniform_int_distribution<int>(1, 6)(rng);
    for (int k = 0; k < n; ++k) {
      std::vector<std::string> marks;
      const int len = std::uniform_int_distribution<int>(1, 8)(rng);
      for (int s = 0; s < len; ++s)
        marks.push_back(alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)]);
      ps.emplace_back(marks, std::uniform_int_distribution<int>(1, 4)(rng));
    }
    auto back = parse_pattern_file(serialize_pattern_file(ps), Role::Old).patterns;
    REQUIRE(back == ps);
  }
}
