#pragma once

#include <stdexcept>

#include "aqsim/kernels.hpp"
#include "aqsim/rng.hpp"

namespace aqsim {

template <class Visitor>
int run_flags_visit(int num_sites, int depth, double p, const FlagVector& initial,
                    uint64_t seed, Boundary boundary, Visitor&& visit) {
  if (static_cast<int>(initial.size()) != num_sites) {
    throw std::invalid_argument("initial flag vector has wrong length");
  }
  if (boundary == Boundary::periodic && num_sites % 2 != 0) {
    throw std::invalid_argument("periodic brickwork requires even num_sites");
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("p must be in [0,1]");
  }
  const uint64_t meas_key = chain_seed(seed, kTagMeasure, 0);
  const uint64_t threshold = bernoulli_threshold(p);
  FlagVector flags = initial;
  std::vector<uint8_t> mask(num_sites);

  visit(0, std::as_const(flags));
  for (int t = 1; t <= depth; ++t) {
    kernels::brickwork_or(flags.data(), num_sites, (t - 1) % 2,
                          boundary == Boundary::periodic);
    kernels::bernoulli_mask(meas_key, static_cast<uint64_t>(t - 1) * num_sites,
                            num_sites, threshold, mask.data());
    kernels::apply_kill(flags.data(), mask.data(), num_sites);
    visit(t, std::as_const(flags));
    if (kernels::count_nonzero(flags.data(), num_sites) == 0) return t;
  }
  return depth;
}

}  // namespace aqsim
