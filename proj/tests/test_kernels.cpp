#include <doctest.h>

#include <complex>
#include <vector>

#include "aqsim/gates.hpp"
#include "aqsim/kernels.hpp"
#include "aqsim/rng.hpp"

using namespace aqsim;
namespace k = aqsim::kernels;

namespace {

std::vector<cd> random_state(int L, uint64_t seed) {
  CounterRng rng(seed);
  std::vector<cd> amps(std::size_t{1} << L);
  double norm = 0;
  for (auto& a : amps) {
    a = cd{rng.next_u01() - 0.5, rng.next_u01() - 0.5};
    norm += std::norm(a);
  }
  const double s = 1.0 / std::sqrt(norm);
  for (auto& a : amps) a *= s;
  return amps;
}

double max_abs_diff(const std::vector<cd>& a, const std::vector<cd>& b) {
  double worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return worst;
}

}  // namespace

#if defined(__x86_64__)

TEST_CASE("avx2 gate kernels match scalar reference") {
  if (!k::cpu_supports_avx2()) return;
  const int L = 9;
  const Unitary2 u2 = equatorial_rotation(0.7);
  const Unitary4 u4 =
      dressed_entangler(fsim(M_PI / 2, 0.1), equatorial_rotation(0.3),
                        equatorial_rotation(1.1), equatorial_rotation(2.2),
                        equatorial_rotation(4.0));
  for (int bit = 0; bit < L; ++bit) {
    auto a = random_state(L, 10 + bit);
    auto b = a;
    k::scalar::apply_gate1(a.data(), a.size(), bit, u2.data());
    k::avx2::apply_gate1(b.data(), b.size(), bit, u2.data());
    CHECK(max_abs_diff(a, b) < 1e-13);
  }
  for (int ba = 0; ba < L; ++ba) {
    for (int bb = 0; bb < L; ++bb) {
      if (ba == bb) continue;
      auto a = random_state(L, 100 + 17 * ba + bb);
      auto b = a;
      k::scalar::apply_gate2(a.data(), a.size(), ba, bb, u4.data());
      k::avx2::apply_gate2(b.data(), b.size(), ba, bb, u4.data());
      CHECK(max_abs_diff(a, b) < 1e-13);
    }
  }
}

TEST_CASE("avx2 reductions match scalar reference") {
  if (!k::cpu_supports_avx2()) return;
  for (int L : {3, 8, 11}) {
    const auto a = random_state(L, 50 + L);
    CHECK(std::abs(k::scalar::norm_sq(a.data(), a.size()) -
                   k::avx2::norm_sq(a.data(), a.size())) < 1e-13);
    for (int bit = 0; bit < L; ++bit) {
      CHECK(std::abs(k::scalar::prob_one(a.data(), a.size(), bit) -
                     k::avx2::prob_one(a.data(), a.size(), bit)) < 1e-13);
    }
  }
}

TEST_CASE("avx2 project/scale match scalar reference") {
  if (!k::cpu_supports_avx2()) return;
  const int L = 8;
  for (int bit : {0, 1, 5, 7}) {
    for (int keep : {0, 1}) {
      auto a = random_state(L, 5 + bit);
      auto b = a;
      k::scalar::project_and_scale(a.data(), a.size(), bit, keep, 1.7);
      k::avx2::project_and_scale(b.data(), b.size(), bit, keep, 1.7);
      CHECK(max_abs_diff(a, b) == 0.0);
    }
  }
  auto a = random_state(L, 77);
  auto b = a;
  k::scalar::scale(a.data(), a.size(), 0.3);
  k::avx2::scale(b.data(), b.size(), 0.3);
  CHECK(max_abs_diff(a, b) == 0.0);
}

TEST_CASE("avx2 bernoulli mask is bit-exact vs scalar") {
  if (!k::cpu_supports_avx2()) return;
  for (std::size_t n : {1u, 7u, 64u, 513u}) {
    for (double p : {0.0, 0.2, 0.35, 1.0}) {
      std::vector<uint8_t> a(n), b(n);
      const uint64_t thr = bernoulli_threshold(p);
      k::scalar::bernoulli_mask(987, 12345, n, thr, a.data());
      k::avx2::bernoulli_mask(987, 12345, n, thr, b.data());
      CHECK(a == b);
    }
  }
}

TEST_CASE("avx2 byte kernels are bit-exact vs scalar") {
  if (!k::cpu_supports_avx2()) return;
  const std::size_t n = 1000;
  std::vector<uint8_t> f(n), m(n);
  CounterRng rng(4);
  for (std::size_t i = 0; i < n; ++i) {
    f[i] = rng.next_u64() & 1;
    m[i] = rng.next_u64() & 1;
  }
  auto fa = f, fb = f;
  k::scalar::apply_kill(fa.data(), m.data(), n);
  k::avx2::apply_kill(fb.data(), m.data(), n);
  CHECK(fa == fb);
  CHECK(k::scalar::count_nonzero(fa.data(), n) == k::avx2::count_nonzero(fb.data(), n));
}

#endif  // __x86_64__

TEST_CASE("backend selection honors overrides") {
  const auto saved = k::active_backend();
  k::set_backend(k::Backend::scalar);
  CHECK(k::active_backend() == k::Backend::scalar);
  k::set_backend(saved);
}

TEST_CASE("brickwork OR covers bonds of the requested parity") {
  std::vector<uint8_t> f = {1, 0, 0, 0, 0, 0};
  k::brickwork_or(f.data(), 6, 0, true);
  CHECK(f == std::vector<uint8_t>{1, 1, 0, 0, 0, 0});
  k::brickwork_or(f.data(), 6, 1, true);
  CHECK(f == std::vector<uint8_t>{1, 1, 1, 0, 0, 1});  // wrap bond (5,0) fires
}

TEST_CASE("gate2 kernel agrees with explicit matrix action on small state") {
  // 2-qubit state, sites both: kernel vs direct 4x4 product
  const Unitary4 u = fsim(M_PI / 2, 0.0);
  std::vector<cd> amps = {cd{0, 0}, cd{1, 0}, cd{0, 0}, cd{0, 0}};  // |01>
  k::apply_gate2(amps.data(), 4, 1, 0, u.data());
  CHECK(std::abs(amps[2] - cd{0, -1}) < 1e-14);  // -i |10>
  CHECK(std::abs(amps[1]) < 1e-14);
}
