#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "faripa/rng.hpp"

using faripa::Rng;

TEST_CASE("identical seeds give identical streams") {
  Rng a(12345), b(12345);
  for (int i = 0; i < 200; ++i) {
    CHECK(a.uniform() == b.uniform());
    CHECK(a.gaussian() == b.gaussian());
    CHECK(a.uniform_int(97) == b.uniform_int(97));
  }
}

TEST_CASE("uniform matches the documented engine mapping") {
  // reference: raw mt19937_64 output shifted to 53 bits, scaled by 2^-53
  Rng rng(98765);
  std::mt19937_64 engine(98765);
  for (int i = 0; i < 1000; ++i) {
    const double expected =
        static_cast<double>(engine() >> 11) * 0x1.0p-53;
    CHECK(rng.uniform() == expected);
  }
}

TEST_CASE("uniform stays in [0,1) with sane first moments") {
  Rng rng(7);
  double sum = 0.0, sumsq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    sumsq += u * u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(sumsq / n - (sum / n) * (sum / n) ==
        doctest::Approx(1.0 / 12.0).epsilon(0.03));
}

TEST_CASE("ranged uniform covers the requested interval") {
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.uniform(-3.0, 5.0);
    CHECK(v >= -3.0);
    CHECK(v < 5.0);
  }
}

TEST_CASE("gaussian has standard-normal moments") {
  Rng rng(21);
  const int n = 100000;
  double sum = 0.0, sumsq = 0.0, fourth = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.gaussian();
    sum += g;
    sumsq += g * g;
    fourth += g * g * g * g;
  }
  CHECK(sum / n == doctest::Approx(0.0).epsilon(0.02));
  CHECK(std::abs(sum / n) < 0.02);
  CHECK(sumsq / n == doctest::Approx(1.0).epsilon(0.02));
  CHECK(fourth / n == doctest::Approx(3.0).epsilon(0.1));
}

TEST_CASE("gaussian reproduces an explicit Box-Muller evaluation") {
  Rng rng(5150);
  Rng ref(5150);
  const double u1 = ref.uniform();
  const double u2 = ref.uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  CHECK(rng.gaussian() == r * std::cos(2.0 * M_PI * u2));
  CHECK(rng.gaussian() == r * std::sin(2.0 * M_PI * u2));  // cached spare
}

TEST_CASE("uniform_int bounds and rough uniformity") {
  Rng rng(31);
  std::vector<int> counts(8, 0);
  const int n = 80000;
  for (int i = 0; i < n; ++i) {
    const auto v = rng.uniform_int(8);
    REQUIRE(v < 8);
    ++counts[static_cast<size_t>(v)];
  }
  for (int c : counts) CHECK(c == doctest::Approx(n / 8.0).epsilon(0.03));
}

TEST_CASE("uniform_int with n <= 1 consumes no engine output") {
  Rng a(555), b(555);
  CHECK(a.uniform_int(1) == 0);
  CHECK(a.uniform_int(0) == 0);
  CHECK(a.uniform() == b.uniform());
}

TEST_CASE("derive is deterministic and separates streams") {
  CHECK(Rng::derive(1, 0) == Rng::derive(1, 0));
  CHECK(Rng::derive(1, 0) != Rng::derive(1, 1));
  CHECK(Rng::derive(1, 0) != Rng::derive(2, 0));
  // streams derived from adjacent bases stay distinct
  std::vector<std::uint64_t> seen;
  for (std::uint64_t base = 0; base < 16; ++base)
    for (std::uint64_t stream = 0; stream < 8; ++stream)
      seen.push_back(Rng::derive(base, stream));
  std::sort(seen.begin(), seen.end());
  CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
}
