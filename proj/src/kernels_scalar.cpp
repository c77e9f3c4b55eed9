#include "aqsim/kernels.hpp"

#include "aqsim/rng.hpp"

namespace aqsim::kernels::scalar {

void apply_gate1(cd* amps, std::size_t n, int bit, const cd* u) {
  const std::size_t step = std::size_t{1} << bit;
  for (std::size_t base = 0; base < n; base += 2 * step) {
    for (std::size_t i = base; i < base + step; ++i) {
      const cd a0 = amps[i];
      const cd a1 = amps[i + step];
      amps[i] = u[0] * a0 + u[1] * a1;
      amps[i + step] = u[2] * a0 + u[3] * a1;
    }
  }
}

void apply_gate2(cd* amps, std::size_t n, int bit_a, int bit_b, const cd* u) {
  const std::size_t sa = std::size_t{1} << bit_a;
  const std::size_t sb = std::size_t{1} << bit_b;
  const std::size_t hi = std::size_t{1} << (bit_a > bit_b ? bit_a : bit_b);
  const std::size_t lo = std::size_t{1} << (bit_a > bit_b ? bit_b : bit_a);
  for (std::size_t h = 0; h < n; h += 2 * hi) {
    for (std::size_t m = h; m < h + hi; m += 2 * lo) {
      for (std::size_t i = m; i < m + lo; ++i) {
        const cd a00 = amps[i];
        const cd a01 = amps[i + sb];
        const cd a10 = amps[i + sa];
        const cd a11 = amps[i + sa + sb];
        amps[i] = u[0] * a00 + u[1] * a01 + u[2] * a10 + u[3] * a11;
        amps[i + sb] = u[4] * a00 + u[5] * a01 + u[6] * a10 + u[7] * a11;
        amps[i + sa] = u[8] * a00 + u[9] * a01 + u[10] * a10 + u[11] * a11;
        amps[i + sa + sb] = u[12] * a00 + u[13] * a01 + u[14] * a10 + u[15] * a11;
      }
    }
  }
}

double prob_one(const cd* amps, std::size_t n, int bit) {
  const std::size_t step = std::size_t{1} << bit;
  double acc = 0.0;
  for (std::size_t base = step; base < n; base += 2 * step) {
    for (std::size_t i = base; i < base + step; ++i) {
      acc += amps[i].real() * amps[i].real() + amps[i].imag() * amps[i].imag();
    }
  }
  return acc;
}

double norm_sq(const cd* amps, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += amps[i].real() * amps[i].real() + amps[i].imag() * amps[i].imag();
  }
  return acc;
}

void project_and_scale(cd* amps, std::size_t n, int bit, int keep, double s) {
  const std::size_t step = std::size_t{1} << bit;
  for (std::size_t base = 0; base < n; base += 2 * step) {
    const std::size_t kept = keep ? base + step : base;
    const std::size_t gone = keep ? base : base + step;
    for (std::size_t i = 0; i < step; ++i) {
      amps[kept + i] *= s;
      amps[gone + i] = cd{0.0, 0.0};
    }
  }
}

void scale(cd* amps, std::size_t n, double s) {
  for (std::size_t i = 0; i < n; ++i) amps[i] *= s;
}

void bernoulli_mask(uint64_t key, uint64_t base, std::size_t n,
                    uint64_t threshold, uint8_t* out) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = bernoulli_from(stream_at(key, base + i), threshold) ? 1 : 0;
  }
}

void apply_kill(uint8_t* flags, const uint8_t* mask, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) flags[i] &= static_cast<uint8_t>(~mask[i]);
}

std::size_t count_nonzero(const uint8_t* v, std::size_t n) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < n; ++i) c += v[i] != 0;
  return c;
}

}  // namespace aqsim::kernels::scalar
