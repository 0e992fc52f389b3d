#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "avseq/rng.hpp"

using namespace avseq;

TEST_CASE("same key and counter give identical streams") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different counter blocks do not collide on prefixes") {
  Rng a = Rng::derive(7, 1, 0);
  Rng b = Rng::derive(7, 1, 1);
  int equal = 0;
  for (int i = 0; i < 256; ++i) {
    if (a.next_u64() == b.next_u64()) ++equal;
  }
  CHECK(equal == 0);
}

TEST_CASE("uniform lies in (0,1] and has the right mean") {
  Rng rng(3);
  double acc = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u <= 1.0);
    acc += u;
  }
  CHECK(std::abs(acc / n - 0.5) < 0.005);
}

TEST_CASE("gaussian moments") {
  Rng rng(11);
  double s1 = 0, s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.gaussian();
    s1 += z;
    s2 += z * z;
  }
  CHECK(std::abs(s1 / n) < 0.01);
  CHECK(std::abs(s2 / n - 1.0) < 0.02);
}

TEST_CASE("beta(2,5) sample moments match closed form") {
  Rng rng(19);
  double s1 = 0, s2 = 0;
  const int n = 400000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.beta(2, 5);
    REQUIRE(x >= 0.0);
    REQUIRE(x <= 1.0);
    s1 += x;
    s2 += x * x;
  }
  const double mean = s1 / n;
  const double var = s2 / n - mean * mean;
  CHECK(std::abs(mean - 2.0 / 7.0) < 0.002);       // 3 sigma ~ 0.00076
  CHECK(std::abs(var - 5.0 / 196.0) < 0.0005);
}

TEST_CASE("gamma shapes below one are supported") {
  Rng rng(23);
  double acc = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) acc += rng.gamma(0.5);
  CHECK(std::abs(acc / n - 0.5) < 0.02);
}

TEST_CASE("categorical respects the probabilities") {
  Rng rng(5);
  std::vector<double> probs = {0.5, 0.25, 0.25};
  std::vector<int> counts(3, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(rng.categorical(probs))];
  CHECK(std::abs(counts[0] / double(n) - 0.5) < 0.01);
  CHECK(std::abs(counts[1] / double(n) - 0.25) < 0.01);
}

TEST_CASE("hash64 is stable and spreads") {
  CHECK(hash64("alpha") == hash64("alpha"));
  std::set<std::uint64_t> seen;
  seen.insert(hash64("a"));
  seen.insert(hash64("b"));
  seen.insert(hash64("ab"));
  seen.insert(hash64(""));
  CHECK(seen.size() == 4);
}
