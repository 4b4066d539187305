#include <random>

#include "doctest.h"
#include "sp/kernels.hpp"

using namespace sp::kernels;

TEST_CASE("scalar reference") {
  std::vector<std::uint32_t> hay{3, 1, 3, 3, 0};
  std::vector<std::uint32_t> out;
  scalar::find_equal(hay, 3, out);
  CHECK(out == std::vector<std::uint32_t>{0, 2, 3});
  CHECK(scalar::count_equal(hay, 3) == 3);
  CHECK(scalar::count_equal(hay, 9) == 0);
}

TEST_CASE("every available variant agrees with the scalar reference") {
  std::mt19937 rng(11);
  for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
    if (!isa_available(isa)) continue;
    CAPTURE(to_string(isa));
    for (int trial = 0; trial < 2000; ++trial) {
      const std::size_t n = std::uniform_int_distribution<std::size_t>(0, 70)(rng);
      const std::uint32_t range = std::uniform_int_distribution<std::uint32_t>(1, 6)(rng);
      std::vector<std::uint32_t> hay(n);
      for (auto& v : hay) v = std::uniform_int_distribution<std::uint32_t>(0, range)(rng);
      const std::uint32_t needle = std::uniform_int_distribution<std::uint32_t>(0, range)(rng);
      std::vector<std::uint32_t> ref, got;
      scalar::find_equal(hay, needle, ref);
      find_equal(isa, hay, needle, got);
      REQUIRE(got == ref);
      REQUIRE(count_equal(isa, hay, needle) == scalar::count_equal(hay, needle));
    }
  }
}

TEST_CASE("dispatch picks an available variant") {
  CHECK(isa_available(detect_isa()));
  std::vector<std::uint32_t> hay(33, 5);
  hay[32] = 6;
  std::vector<std::uint32_t> out;
  find_equal(hay, 6, out);
  CHECK(out == std::vector<std::uint32_t>{32});
  CHECK(count_equal(hay, 5) == 32);
}
