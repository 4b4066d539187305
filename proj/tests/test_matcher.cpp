#include <cmath>
#include <random>

#include "doctest.h"
#include "sp/core.hpp"
#include "sp/matcher.hpp"

using namespace sp;

namespace {

std::vector<MarkId> seq(std::string_view text) {
  auto p = Pattern::from_text(text);
  return {p.ids().begin(), p.ids().end()};
}

double direct_product(const std::vector<std::size_t>& gaps, double p1) {
  double p = 1.0;
  for (auto g : gaps) p *= 1.0 - std::pow(1.0 - p1, static_cast<double>(g) + 1.0);
  return p;
}

std::vector<MarkId> random_seq(std::mt19937& rng, std::size_t n, int alphabet) {
  std::vector<MarkId> v(n);
  const char* names[] = {"a", "b", "c", "d", "e"};
  for (auto& m : v) m = intern(names[std::uniform_int_distribution<int>(0, alphabet - 1)(rng)]);
  return v;
}

}  // namespace

TEST_CASE("probability formula") {
  std::vector<std::size_t> g1{0};
  CHECK(hit_sequence_probability(g1, 0.5) == doctest::Approx(0.5));
  std::vector<std::size_t> g2{0, 2};
  CHECK(hit_sequence_probability(g2, 0.25) == doctest::Approx(0.14453125).epsilon(1e-12));
  std::vector<std::size_t> g3{0, 5, 1, 9};
  CHECK(hit_sequence_probability(g3, 1.0) == 1.0);
  std::vector<std::size_t> bad{1, 0};
  CHECK_THROWS_AS(hit_sequence_probability(bad, 0.5), std::invalid_argument);
}

TEST_CASE("probability properties on random gap vectors") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 1000; ++trial) {
    const double p1 = 1.0 / std::uniform_int_distribution<int>(2, 8)(rng);
    std::vector<std::size_t> gaps{0};
    const int n = std::uniform_int_distribution<int>(0, 12)(rng);
    for (int k = 0; k < n; ++k) gaps.push_back(std::uniform_int_distribution<std::size_t>(0, 10)(rng));
    const double p = hit_sequence_probability(gaps, p1);
    REQUIRE(p == doctest::Approx(direct_product(gaps, p1)).epsilon(1e-12));
    REQUIRE(p > 0.0);
    REQUIRE(p <= p1 + 1e-15);
    auto longer = gaps;
    longer.push_back(std::uniform_int_distribution<std::size_t>(0, 10)(rng));
    REQUIRE(hit_sequence_probability(longer, p1) <= p);
    if (gaps.size() > 1) {
      auto wider = gaps;
      wider[1 + std::uniform_int_distribution<std::size_t>(0, gaps.size() - 2)(rng)] += 1;
      REQUIRE(hit_sequence_probability(wider, p1) > p);
    }
  }
}

TEST_CASE("transfer example: best chain keeps 'that' and 'runs'") {
  auto a = seq("t h a t g i r l r u n s");
  auto b = seq("< %1 3 t h a t b o y r u n s >");
  auto r = find_matches(a, b, 0.5);
  REQUIRE_FALSE(r.empty());
  const auto& best = r[0];
  REQUIRE(best.size() == 8);
  const std::size_t want_a[] = {0, 1, 2, 3, 8, 9, 10, 11};
  const std::size_t want_b[] = {3, 4, 5, 6, 10, 11, 12, 13};
  for (std::size_t k = 0; k < 8; ++k) {
    CHECK(best.hits[k].pos_a == want_a[k]);
    CHECK(best.hits[k].pos_b == want_b[k]);
  }
  CHECK(best.hits[4].gap == 4 + 3);
}

TEST_CASE("identity match") {
  auto a = seq("p q r s t");
  auto r = find_matches(a, a, 0.5);
  REQUIRE(r.size() == 1);
  CHECK(r[0].size() == 5);
  for (const auto& h : r[0].hits) {
    CHECK(h.pos_a == h.pos_b);
    CHECK(h.gap == 0);
  }
}

TEST_CASE("crossing is forbidden") {
  auto r = find_matches(seq("a b"), seq("b a"), 0.5);
  REQUIRE(r.size() == 2);
  CHECK(r[0].size() == 1);
  CHECK(r[1].size() == 1);
  CHECK(r[0].hits[0].pos_a == 0);  // tie on p and n; lexicographic order decides
  CHECK(r[1].hits[0].pos_a == 1);
}

TEST_CASE("no common mark") {
  CHECK(find_matches(seq("x"), seq("y"), 0.5).empty());
  CHECK(brute_force_matches(seq("x"), seq("y"), 0.5).empty());
}

TEST_CASE("oracle basics") {
  auto r = brute_force_matches(seq("a b"), seq("a b"), 0.5);
  REQUIRE(r.size() == 1);
  CHECK(r[0].size() == 2);
  std::vector<MarkId> big(13, intern("a"));
  CHECK_THROWS_AS(brute_force_matches(big, big, 0.5), OracleBoundError);
}

TEST_CASE("filter vetoes match points") {
  auto a = seq("a b c");
  auto r = find_matches(a, a, 0.5, {}, [](std::size_t i, std::size_t) { return i != 1; });
  REQUIRE(r.size() == 1);
  CHECK(r[0].size() == 2);
  CHECK(r[0].hits[1].gap == 2);
}

TEST_CASE("gap limit") {
  MatchLimits lim;
  lim.max_gap = 1;
  auto r = find_matches(seq("a x x x b"), seq("a b"), 0.5, lim);
  REQUIRE(r.size() == 2);
  for (const auto& hs : r) CHECK(hs.size() == 1);
  auto o = brute_force_matches(seq("a x x x b"), seq("a b"), 0.5, 24, {}, 1);
  CHECK(o.size() == 2);
}

TEST_CASE("heuristic against the oracle") {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 400; ++trial) {
    const int alphabet = trial % 2 ? 3 : 2;
    auto a = random_seq(rng, std::uniform_int_distribution<std::size_t>(1, 7)(rng), alphabet);
    auto b = random_seq(rng, std::uniform_int_distribution<std::size_t>(1, 7)(rng), alphabet);
    const double p1 = trial % 3 ? 0.5 : 0.25;
    MatchLimits lim;
    if (trial % 5 == 0) lim.max_gap = 2;
    auto h = find_matches(a, b, p1, lim);
    auto o = brute_force_matches(a, b, p1, 24, {}, lim.max_gap);
    REQUIRE(h.empty() == o.empty());
    if (o.empty()) continue;
    REQUIRE(h[0].log2_p == doctest::Approx(o[0].log2_p).epsilon(1e-9));
    for (const auto& hs : h) {
      bool found = false;
      for (const auto& os : o) found = found || os == hs;
      REQUIRE(found);
    }
    for (std::size_t k = 1; k < h.size(); ++k) REQUIRE_FALSE(hit_sequence_before(h[k], h[k - 1]));
    REQUIRE(h == find_matches(a, b, p1, lim));
  }
}
