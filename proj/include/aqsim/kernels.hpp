#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>

namespace aqsim::kernels {

// Data-parallel inner loops used by the engines. Every kernel has a scalar
// reference implementation and (on x86-64) an AVX2 variant selected at
// runtime. Integer kernels are bit-exact across backends; floating-point
// kernels agree to within reduction-order rounding (equivalence-tested).

enum class Backend { scalar, avx2 };

Backend active_backend();
void set_backend(Backend b);      // throws std::runtime_error if unsupported
Backend detect_best_backend();    // honors AQSIM_KERNELS env override
bool cpu_supports_avx2();
std::string backend_name(Backend b);

using cd = std::complex<double>;

// --- dense amplitude kernels (vector length n = 2^L) ---------------------

// apply 2x2 row-major u2 to the qubit mapped to `bit`
void apply_gate1(cd* amps, std::size_t n, int bit, const cd* u2);

// apply 4x4 row-major u4 (basis index 2*bit_a_value + bit_b_value) to the
// qubit pair mapped to bits (bit_a, bit_b); bits must be distinct
void apply_gate2(cd* amps, std::size_t n, int bit_a, int bit_b, const cd* u4);

// sum of |amp|^2 over basis states with `bit` set
double prob_one(const cd* amps, std::size_t n, int bit);

double norm_sq(const cd* amps, std::size_t n);

// zero the branch with bit != keep, multiply the kept branch by scale
void project_and_scale(cd* amps, std::size_t n, int bit, int keep, double scale);

void scale(cd* amps, std::size_t n, double s);

// --- integer kernels (bit-exact across backends) --------------------------

// out[i] = 1 iff Bernoulli(threshold) draw at stream position base+i fires
void bernoulli_mask(uint64_t key, uint64_t base, std::size_t n,
                    uint64_t threshold, uint8_t* out);

// brickwork OR step: for each bond (i, i+1) with i ≡ parity (mod 2), set both
// flags to their OR; periodic adds the wrap bond (L-1, 0) on parity 1
void brickwork_or(uint8_t* flags, int num_sites, int parity, bool periodic);

// flags[i] &= !mask[i]
void apply_kill(uint8_t* flags, const uint8_t* mask, std::size_t n);

// number of nonzero bytes
std::size_t count_nonzero(const uint8_t* v, std::size_t n);

// --- per-backend entry points (exposed for equivalence tests) -------------

namespace scalar {
void apply_gate1(cd* amps, std::size_t n, int bit, const cd* u2);
void apply_gate2(cd* amps, std::size_t n, int bit_a, int bit_b, const cd* u4);
double prob_one(const cd* amps, std::size_t n, int bit);
double norm_sq(const cd* amps, std::size_t n);
void project_and_scale(cd* amps, std::size_t n, int bit, int keep, double scale);
void scale(cd* amps, std::size_t n, double s);
void bernoulli_mask(uint64_t key, uint64_t base, std::size_t n,
                    uint64_t threshold, uint8_t* out);
void apply_kill(uint8_t* flags, const uint8_t* mask, std::size_t n);
std::size_t count_nonzero(const uint8_t* v, std::size_t n);
}  // namespace scalar

#if defined(__x86_64__)
namespace avx2 {
void apply_gate1(cd* amps, std::size_t n, int bit, const cd* u2);
void apply_gate2(cd* amps, std::size_t n, int bit_a, int bit_b, const cd* u4);
double prob_one(const cd* amps, std::size_t n, int bit);
double norm_sq(const cd* amps, std::size_t n);
void project_and_scale(cd* amps, std::size_t n, int bit, int keep, double scale);
void scale(cd* amps, std::size_t n, double s);
void bernoulli_mask(uint64_t key, uint64_t base, std::size_t n,
                    uint64_t threshold, uint8_t* out);
void apply_kill(uint8_t* flags, const uint8_t* mask, std::size_t n);
std::size_t count_nonzero(const uint8_t* v, std::size_t n);
}  // namespace avx2
#endif

}  // namespace aqsim::kernels
