#include <doctest.h>

#include <set>
#include <vector>

#include "usf/random.hpp"

using namespace usf;

TEST_CASE("philox known-answer vectors") {
  using A4 = std::array<std::uint32_t, 4>;
  using A2 = std::array<std::uint32_t, 2>;
  CHECK(philox4x32_10(A4{0, 0, 0, 0}, A2{0, 0}) ==
        A4{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(philox4x32_10(A4{~0u, ~0u, ~0u, ~0u}, A2{~0u, ~0u}) ==
        A4{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(philox4x32_10(A4{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                      A2{0xa4093822u, 0x299f31d0u}) ==
        A4{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("stream words follow the counter") {
  RandomStream s(0, 0);
  const auto block0 = philox4x32_10({0, 0, 0, 0}, {0, 0});
  const auto block1 = philox4x32_10({1, 0, 0, 0}, {0, 0});
  for (auto w : block0) CHECK(s.next_u32() == w);
  CHECK(s.next_u32() == block1[0]);
}

TEST_CASE("same seed and stream give the same sequence") {
  RandomStream a(42, 3), b(42, 3), c(42, 4);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differs = differs || x != c.next_u64();
  }
  CHECK(differs);
}

TEST_CASE("substreams are distinct and reproducible") {
  const RandomStream base(7, 0);
  std::set<std::uint64_t> firsts;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    RandomStream s = base.substream(i);
    RandomStream t = base.substream(i);
    const auto x = s.next_u64();
    CHECK(x == t.next_u64());
    firsts.insert(x);
  }
  CHECK(firsts.size() == 1000);
}

TEST_CASE("uniform_below stays in range and hits every value") {
  RandomStream s(1, 0);
  std::vector<int> seen(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const auto x = s.uniform_below(7);
    REQUIRE(x < 7);
    ++seen[x];
  }
  for (int c : seen) CHECK(c > 800);
  CHECK_THROWS(s.uniform_below(0));
}

TEST_CASE("uniform01 in [0, 1) with mean near 1/2") {
  RandomStream s(2, 0);
  double sum = 0;
  for (int i = 0; i < 100000; ++i) {
    const double u = s.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("mix64 frozen values") {
  // splitmix64 finalizer reference values
  CHECK(mix64(0) == 0xe220a8397b1dcdafull);
  CHECK(mix64(1) == 0x910a2dec89025cc1ull);
}
