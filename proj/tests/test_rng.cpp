#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "aqsim/rng.hpp"

using namespace aqsim;

TEST_CASE("counter stream is positional and sequential at once") {
  CounterRng rng(123);
  std::vector<uint64_t> seq;
  for (int i = 0; i < 16; ++i) seq.push_back(rng.next_u64());
  for (int i = 0; i < 16; ++i) CHECK(seq[i] == stream_at(123, i));
}

TEST_CASE("u01 lies in [0,1) and has the right mean") {
  CounterRng rng(7);
  double sum = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.next_u01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / n - 0.5) < 0.005);
}

TEST_CASE("bernoulli threshold endpoints are exact") {
  CHECK(bernoulli_threshold(0.0) == 0);
  CHECK(bernoulli_threshold(1.0) == (uint64_t{1} << 32));
  CounterRng rng(99);
  for (int i = 0; i < 1000; ++i) {
    const uint64_t w = rng.next_u64();
    CHECK_FALSE(bernoulli_from(w, bernoulli_threshold(0.0)));
    CHECK(bernoulli_from(w, bernoulli_threshold(1.0)));
  }
}

TEST_CASE("bernoulli frequency tracks p") {
  const double p = 0.35;
  const uint64_t thr = bernoulli_threshold(p);
  int hits = 0;
  const int n = 400000;
  for (int i = 0; i < n; ++i) {
    if (bernoulli_from(stream_at(5150, i), thr)) ++hits;
  }
  const double freq = static_cast<double>(hits) / n;
  CHECK(std::abs(freq - p) < 3.0 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("chained seeds separate domains") {
  std::set<uint64_t> seen;
  for (uint64_t tag = 0; tag < 8; ++tag) {
    for (uint64_t idx = 0; idx < 64; ++idx) {
      seen.insert(chain_seed(42, tag, idx));
    }
  }
  CHECK(seen.size() == 8 * 64);
}

TEST_CASE("next_index is within range and near uniform") {
  CounterRng rng(31337);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const uint32_t k = rng.next_index(7);
    REQUIRE(k < 7);
    ++counts[k];
  }
  for (int c : counts) CHECK(std::abs(c - n / 7) < 5 * std::sqrt(n / 7.0));
}
