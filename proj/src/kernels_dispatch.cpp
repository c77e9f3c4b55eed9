#include "aqsim/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace aqsim::kernels {

bool cpu_supports_avx2() {
#if defined(__x86_64__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

Backend initial_backend() {
  if (const char* env = std::getenv("AQSIM_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
    if (std::strcmp(env, "avx2") == 0 && cpu_supports_avx2()) return Backend::avx2;
  }
  return cpu_supports_avx2() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend> g_backend{initial_backend()};

}  // namespace

Backend detect_best_backend() { return initial_backend(); }

Backend active_backend() { return g_backend.load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  if (b == Backend::avx2 && !cpu_supports_avx2()) {
    throw std::runtime_error("AVX2 kernels requested but CPU lacks AVX2/FMA");
  }
  g_backend.store(b, std::memory_order_relaxed);
}

std::string backend_name(Backend b) {
  return b == Backend::avx2 ? "avx2" : "scalar";
}

#if defined(__x86_64__)
#define AQSIM_DISPATCH(fn, ...)                                  \
  do {                                                           \
    if (active_backend() == Backend::avx2) return avx2::fn(__VA_ARGS__); \
    return scalar::fn(__VA_ARGS__);                              \
  } while (0)
#else
#define AQSIM_DISPATCH(fn, ...) return scalar::fn(__VA_ARGS__)
#endif

void apply_gate1(cd* amps, std::size_t n, int bit, const cd* u2) {
  AQSIM_DISPATCH(apply_gate1, amps, n, bit, u2);
}

void apply_gate2(cd* amps, std::size_t n, int bit_a, int bit_b, const cd* u4) {
  AQSIM_DISPATCH(apply_gate2, amps, n, bit_a, bit_b, u4);
}

double prob_one(const cd* amps, std::size_t n, int bit) {
  AQSIM_DISPATCH(prob_one, amps, n, bit);
}

double norm_sq(const cd* amps, std::size_t n) {
  AQSIM_DISPATCH(norm_sq, amps, n);
}

void project_and_scale(cd* amps, std::size_t n, int bit, int keep, double s) {
  AQSIM_DISPATCH(project_and_scale, amps, n, bit, keep, s);
}

void scale(cd* amps, std::size_t n, double s) {
  AQSIM_DISPATCH(scale, amps, n, s);
}

void bernoulli_mask(uint64_t key, uint64_t base, std::size_t n,
                    uint64_t threshold, uint8_t* out) {
  AQSIM_DISPATCH(bernoulli_mask, key, base, n, threshold, out);
}

void apply_kill(uint8_t* flags, const uint8_t* mask, std::size_t n) {
  AQSIM_DISPATCH(apply_kill, flags, mask, n);
}

std::size_t count_nonzero(const uint8_t* v, std::size_t n) {
  AQSIM_DISPATCH(count_nonzero, v, n);
}

void brickwork_or(uint8_t* flags, int num_sites, int parity, bool periodic) {
  // pairwise OR; cheap enough that one implementation serves both backends
  for (int i = parity; i + 1 < num_sites; i += 2) {
    const uint8_t o = flags[i] | flags[i + 1];
    flags[i] = o;
    flags[i + 1] = o;
  }
  if (periodic && parity == 1 && num_sites % 2 == 0) {
    const uint8_t o = flags[num_sites - 1] | flags[0];
    flags[num_sites - 1] = o;
    flags[0] = o;
  }
}

#undef AQSIM_DISPATCH

}  // namespace aqsim::kernels
