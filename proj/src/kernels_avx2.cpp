// AVX2 kernel variants. Compiled with -mavx2 -mfma in its own translation
// unit; callers go through the dispatch table and never reach these entry
// points unless the CPU reports AVX2.

#include "aqsim/kernels.hpp"

#if defined(__x86_64__)

#include <immintrin.h>

#include "aqsim/rng.hpp"

namespace aqsim::kernels::avx2 {

namespace {

// (u_re + i u_im) * v for a vector of two packed complex doubles
inline __m256d cmul_scalar_vec(__m256d u_re, __m256d u_im, __m256d v) {
  const __m256d v_swap = _mm256_permute_pd(v, 0x5);
  return _mm256_fmaddsub_pd(u_re, v, _mm256_mul_pd(u_im, v_swap));
}

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(lo) + _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
}

// 64-bit lane-wise multiply (low 64 bits)
inline __m256i mul64(__m256i a, __m256i b) {
  const __m256i b_hi = _mm256_srli_epi64(b, 32);
  const __m256i a_hi = _mm256_srli_epi64(a, 32);
  const __m256i lo = _mm256_mul_epu32(a, b);
  const __m256i m1 = _mm256_mul_epu32(a, b_hi);
  const __m256i m2 = _mm256_mul_epu32(a_hi, b);
  const __m256i mid = _mm256_slli_epi64(_mm256_add_epi64(m1, m2), 32);
  return _mm256_add_epi64(lo, mid);
}

inline __m256i mix64_vec(__m256i x) {
  const __m256i c1 = _mm256_set1_epi64x(static_cast<long long>(0xbf58476d1ce4e5b9ull));
  const __m256i c2 = _mm256_set1_epi64x(static_cast<long long>(0x94d049bb133111ebull));
  x = _mm256_xor_si256(x, _mm256_srli_epi64(x, 30));
  x = mul64(x, c1);
  x = _mm256_xor_si256(x, _mm256_srli_epi64(x, 27));
  x = mul64(x, c2);
  return _mm256_xor_si256(x, _mm256_srli_epi64(x, 31));
}

}  // namespace

void apply_gate1(cd* amps, std::size_t n, int bit, const cd* u) {
  const std::size_t step = std::size_t{1} << bit;
  if (step < 2) {
    scalar::apply_gate1(amps, n, bit, u);
    return;
  }
  const __m256d u0r = _mm256_set1_pd(u[0].real()), u0i = _mm256_set1_pd(u[0].imag());
  const __m256d u1r = _mm256_set1_pd(u[1].real()), u1i = _mm256_set1_pd(u[1].imag());
  const __m256d u2r = _mm256_set1_pd(u[2].real()), u2i = _mm256_set1_pd(u[2].imag());
  const __m256d u3r = _mm256_set1_pd(u[3].real()), u3i = _mm256_set1_pd(u[3].imag());
  for (std::size_t base = 0; base < n; base += 2 * step) {
    double* p0 = reinterpret_cast<double*>(amps + base);
    double* p1 = reinterpret_cast<double*>(amps + base + step);
    for (std::size_t i = 0; i < step; i += 2, p0 += 4, p1 += 4) {
      const __m256d a0 = _mm256_loadu_pd(p0);
      const __m256d a1 = _mm256_loadu_pd(p1);
      const __m256d r0 = _mm256_add_pd(cmul_scalar_vec(u0r, u0i, a0),
                                       cmul_scalar_vec(u1r, u1i, a1));
      const __m256d r1 = _mm256_add_pd(cmul_scalar_vec(u2r, u2i, a0),
                                       cmul_scalar_vec(u3r, u3i, a1));
      _mm256_storeu_pd(p0, r0);
      _mm256_storeu_pd(p1, r1);
    }
  }
}

void apply_gate2(cd* amps, std::size_t n, int bit_a, int bit_b, const cd* u) {
  const std::size_t lo_bit = static_cast<std::size_t>(bit_a < bit_b ? bit_a : bit_b);
  if (lo_bit < 1) {
    scalar::apply_gate2(amps, n, bit_a, bit_b, u);
    return;
  }
  const std::size_t sa = std::size_t{1} << bit_a;
  const std::size_t sb = std::size_t{1} << bit_b;
  const std::size_t hi = sa > sb ? sa : sb;
  const std::size_t lo = sa > sb ? sb : sa;
  __m256d ur[16], ui[16];
  for (int k = 0; k < 16; ++k) {
    ur[k] = _mm256_set1_pd(u[k].real());
    ui[k] = _mm256_set1_pd(u[k].imag());
  }
  for (std::size_t h = 0; h < n; h += 2 * hi) {
    for (std::size_t m = h; m < h + hi; m += 2 * lo) {
      for (std::size_t i = m; i < m + lo; i += 2) {
        double* p00 = reinterpret_cast<double*>(amps + i);
        double* p01 = reinterpret_cast<double*>(amps + i + sb);
        double* p10 = reinterpret_cast<double*>(amps + i + sa);
        double* p11 = reinterpret_cast<double*>(amps + i + sa + sb);
        const __m256d a00 = _mm256_loadu_pd(p00);
        const __m256d a01 = _mm256_loadu_pd(p01);
        const __m256d a10 = _mm256_loadu_pd(p10);
        const __m256d a11 = _mm256_loadu_pd(p11);
        for (int row = 0; row < 4; ++row) {
          const int k = 4 * row;
          __m256d acc = cmul_scalar_vec(ur[k], ui[k], a00);
          acc = _mm256_add_pd(acc, cmul_scalar_vec(ur[k + 1], ui[k + 1], a01));
          acc = _mm256_add_pd(acc, cmul_scalar_vec(ur[k + 2], ui[k + 2], a10));
          acc = _mm256_add_pd(acc, cmul_scalar_vec(ur[k + 3], ui[k + 3], a11));
          double* dst = row == 0 ? p00 : row == 1 ? p01 : row == 2 ? p10 : p11;
          _mm256_storeu_pd(dst, acc);
        }
      }
    }
  }
}

double prob_one(const cd* amps, std::size_t n, int bit) {
  const std::size_t step = std::size_t{1} << bit;
  if (step < 2) return scalar::prob_one(amps, n, bit);
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t base = step; base < n; base += 2 * step) {
    const double* p = reinterpret_cast<const double*>(amps + base);
    for (std::size_t i = 0; i < step; i += 2, p += 4) {
      const __m256d v = _mm256_loadu_pd(p);
      acc = _mm256_fmadd_pd(v, v, acc);
    }
  }
  return hsum(acc);
}

double norm_sq(const cd* amps, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  const double* p = reinterpret_cast<const double*>(amps);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2, p += 4) {
    const __m256d v = _mm256_loadu_pd(p);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  double tail = 0.0;
  for (; i < n; ++i) tail += std::norm(amps[i]);
  return hsum(acc) + tail;
}

void project_and_scale(cd* amps, std::size_t n, int bit, int keep, double s) {
  const std::size_t step = std::size_t{1} << bit;
  if (step < 2) {
    scalar::project_and_scale(amps, n, bit, keep, s);
    return;
  }
  const __m256d vs = _mm256_set1_pd(s);
  const __m256d z = _mm256_setzero_pd();
  for (std::size_t base = 0; base < n; base += 2 * step) {
    double* pk = reinterpret_cast<double*>(amps + (keep ? base + step : base));
    double* pg = reinterpret_cast<double*>(amps + (keep ? base : base + step));
    for (std::size_t i = 0; i < step; i += 2, pk += 4, pg += 4) {
      _mm256_storeu_pd(pk, _mm256_mul_pd(_mm256_loadu_pd(pk), vs));
      _mm256_storeu_pd(pg, z);
    }
  }
}

void scale(cd* amps, std::size_t n, double s) {
  const __m256d vs = _mm256_set1_pd(s);
  double* p = reinterpret_cast<double*>(amps);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2, p += 4) {
    _mm256_storeu_pd(p, _mm256_mul_pd(_mm256_loadu_pd(p), vs));
  }
  for (; i < n; ++i) amps[i] *= s;
}

void bernoulli_mask(uint64_t key, uint64_t base, std::size_t n,
                    uint64_t threshold, uint8_t* out) {
  const __m256i gold = _mm256_set1_epi64x(static_cast<long long>(kGolden));
  const __m256i keyv = _mm256_set1_epi64x(static_cast<long long>(key));
  const __m256i thr = _mm256_set1_epi64x(static_cast<long long>(threshold));
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i idx = _mm256_setr_epi64x(
        static_cast<long long>(base + i + 1), static_cast<long long>(base + i + 2),
        static_cast<long long>(base + i + 3), static_cast<long long>(base + i + 4));
    __m256i x = _mm256_add_epi64(keyv, mul64(idx, gold));
    x = mix64_vec(x);
    // top 32 bits vs threshold; both fit in signed 64-bit range
    const __m256i top = _mm256_srli_epi64(x, 32);
    const __m256i fire = _mm256_cmpgt_epi64(thr, top);
    const int m = _mm256_movemask_pd(_mm256_castsi256_pd(fire));
    out[i] = static_cast<uint8_t>(m & 1);
    out[i + 1] = static_cast<uint8_t>((m >> 1) & 1);
    out[i + 2] = static_cast<uint8_t>((m >> 2) & 1);
    out[i + 3] = static_cast<uint8_t>((m >> 3) & 1);
  }
  for (; i < n; ++i) {
    out[i] = bernoulli_from(stream_at(key, base + i), threshold) ? 1 : 0;
  }
}

void apply_kill(uint8_t* flags, const uint8_t* mask, std::size_t n) {
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i f = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(flags + i));
    const __m256i m = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(mask + i));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(flags + i),
                        _mm256_andnot_si256(m, f));
  }
  for (; i < n; ++i) flags[i] &= static_cast<uint8_t>(~mask[i]);
}

std::size_t count_nonzero(const uint8_t* v, std::size_t n) {
  const __m256i z = _mm256_setzero_si256();
  std::size_t c = 0, i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i x = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(v + i));
    const __m256i eq = _mm256_cmpeq_epi8(x, z);
    c += 32 - static_cast<std::size_t>(
                  __builtin_popcount(static_cast<unsigned>(_mm256_movemask_epi8(eq))));
  }
  for (; i < n; ++i) c += v[i] != 0;
  return c;
}

}  // namespace aqsim::kernels::avx2

#endif  // __x86_64__
