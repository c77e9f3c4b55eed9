#include "aqsim/statevector.hpp"

#include <fmt/format.h>

#include <cmath>
#include <stdexcept>

#include "aqsim/kernels.hpp"

namespace aqsim {

PureState PureState::from_bits(std::span<const uint8_t> bits) {
  const int L = static_cast<int>(bits.size());
  if (L > kMaxSites) {
    throw std::invalid_argument(
        fmt::format("statevector engine limited to {} sites, got {}", kMaxSites, L));
  }
  PureState st;
  st.num_sites = L;
  st.amps.assign(std::size_t{1} << L, cd{0.0, 0.0});
  std::size_t idx = 0;
  for (int i = 0; i < L; ++i) idx = (idx << 1) | (bits[i] ? 1 : 0);
  st.amps[idx] = cd{1.0, 0.0};
  return st;
}

PureState PureState::zero_state(int num_sites) {
  std::vector<uint8_t> bits(num_sites, 0);
  return from_bits(bits);
}

double PureState::norm_sq() const {
  return kernels::norm_sq(amps.data(), amps.size());
}

void apply_unitary(PureState& state, int site, const Unitary2& u) {
  if (site < 0 || site >= state.num_sites) {
    throw std::invalid_argument(fmt::format("site {} out of range", site));
  }
  kernels::apply_gate1(state.amps.data(), state.amps.size(),
                       state.bit_of_site(site), u.data());
}

void apply_unitary(PureState& state, std::pair<int, int> sites, const Unitary4& u) {
  const auto [a, b] = sites;
  if (a == b || a < 0 || b < 0 || a >= state.num_sites || b >= state.num_sites) {
    throw std::invalid_argument(fmt::format("invalid site pair ({}, {})", a, b));
  }
  kernels::apply_gate2(state.amps.data(), state.amps.size(),
                       state.bit_of_site(a), state.bit_of_site(b), u.data());
}

double occupation_expectation(const PureState& state, int site) {
  return kernels::prob_one(state.amps.data(), state.amps.size(),
                           state.bit_of_site(site));
}

void occupation_profile(const PureState& state, double* out) {
  for (int i = 0; i < state.num_sites; ++i) {
    out[i] = occupation_expectation(state, i);
  }
}

MeasurementRecord measure_and_feedback(PureState& state, int site,
                                       CounterRng& rng, const NoiseModel& noise) {
  const double p1 = occupation_expectation(state, site);
  if (std::isnan(p1)) {
    throw TrajectoryError("NaN probability in measure_and_feedback");
  }
  const double u = rng.next_u01();
  int outcome;
  if (p1 < kZeroProbGuard) {
    outcome = 0;
  } else if (1.0 - p1 < kZeroProbGuard) {
    outcome = 1;
  } else {
    outcome = u < p1 ? 1 : 0;
  }
  const double keep_prob = outcome ? p1 : 1.0 - p1;
  if (keep_prob <= 0.0) {
    throw TrajectoryError(
        fmt::format("zero-norm projection at site {} (engine bug)", site));
  }
  kernels::project_and_scale(state.amps.data(), state.amps.size(),
                             state.bit_of_site(site), outcome,
                             1.0 / std::sqrt(keep_prob));
  int recorded = outcome;
  if (noise.has_readout_noise()) {
    const double flip = outcome ? noise.readout_flip_1to0 : noise.readout_flip_0to1;
    if (rng.next_u01() < flip) recorded = 1 - recorded;
  }
  if (recorded == 1) apply_unitary(state, site, pauli_x());
  return MeasurementRecord{-1, site, static_cast<uint8_t>(outcome),
                           static_cast<uint8_t>(recorded), recorded == 1};
}

StatevectorBackend::StatevectorBackend(const CircuitInstance& inst) {
  auto [bits, flags] = initial_configuration(inst.spec.initial_state,
                                             inst.spec.num_sites);
  (void)flags;
  state_ = PureState::from_bits(bits);
}

void StatevectorBackend::apply_two_site(int a, int b, const Unitary4& u) {
  apply_unitary(state_, {a, b}, u);
}

void StatevectorBackend::apply_one_site(int site, const Unitary2& u) {
  apply_unitary(state_, site, u);
}

double StatevectorBackend::prob_one(int site) {
  return occupation_expectation(state_, site);
}

void StatevectorBackend::project(int site, int outcome, double prob) {
  if (prob <= 0.0) {
    throw TrajectoryError(
        fmt::format("zero-norm projection at site {} (engine bug)", site));
  }
  kernels::project_and_scale(state_.amps.data(), state_.amps.size(),
                             state_.bit_of_site(site), outcome,
                             1.0 / std::sqrt(prob));
}

void StatevectorBackend::scale_state(double s) {
  kernels::scale(state_.amps.data(), state_.amps.size(), s);
}

double StatevectorBackend::norm_error() {
  return std::abs(1.0 - std::sqrt(state_.norm_sq()));
}

TrajectoryResult run_trajectory_sv(const CircuitInstance& inst,
                                   uint64_t trajectory_index,
                                   const TrajectoryOptions& opt) {
  StatevectorBackend backend(inst);
  return run_trajectory(inst, trajectory_index, backend, opt);
}

std::pair<TrajectoryResult, PureState> run_trajectory_sv_with_state(
    const CircuitInstance& inst, uint64_t trajectory_index,
    const TrajectoryOptions& opt) {
  StatevectorBackend backend(inst);
  TrajectoryResult res = run_trajectory(inst, trajectory_index, backend, opt);
  return {std::move(res), std::move(backend.state())};
}

}  // namespace aqsim
