#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "aqsim/circuit.hpp"
#include "aqsim/gates.hpp"
#include "aqsim/rng.hpp"
#include "aqsim/trajectory.hpp"

namespace aqsim {

// Dense amplitude vector. Site 0 maps to the most significant bit, so the
// basis index of |s_0 s_1 ... s_{L-1}> is sum_i s_i << (L-1-i).
struct PureState {
  int num_sites = 0;
  std::vector<cd> amps;

  static constexpr int kMaxSites = 26;

  static PureState from_bits(std::span<const uint8_t> bits);
  static PureState zero_state(int num_sites);  // |00...0>

  int bit_of_site(int site) const { return num_sites - 1 - site; }
  std::size_t dim() const { return amps.size(); }
  double norm_sq() const;
};

// free functions per the engine surface
void apply_unitary(PureState& state, int site, const Unitary2& u);
void apply_unitary(PureState& state, std::pair<int, int> sites, const Unitary4& u);
double occupation_expectation(const PureState& state, int site);
void occupation_profile(const PureState& state, double* out);

// Born-samples the site, projects and renormalizes, applies feedback X iff
// the recorded (possibly readout-flipped) outcome is 1
MeasurementRecord measure_and_feedback(PureState& state, int site,
                                       CounterRng& rng, const NoiseModel& noise);

class StatevectorBackend {
 public:
  explicit StatevectorBackend(const CircuitInstance& inst);
  explicit StatevectorBackend(PureState state) : state_(std::move(state)) {}

  int num_sites() const { return state_.num_sites; }
  void apply_two_site(int a, int b, const Unitary4& u);
  void apply_one_site(int site, const Unitary2& u);
  double prob_one(int site);
  void project(int site, int outcome, double prob);
  void scale_state(double s);
  void occupation_row(double* out) { occupation_profile(state_, out); }
  double norm_error();
  double discarded_weight() const { return 0.0; }

  PureState& state() { return state_; }
  const PureState& state() const { return state_; }

 private:
  PureState state_;
};

TrajectoryResult run_trajectory_sv(const CircuitInstance& inst,
                                   uint64_t trajectory_index,
                                   const TrajectoryOptions& opt = {});

// variant that also returns the final state (for entropy sampling)
std::pair<TrajectoryResult, PureState> run_trajectory_sv_with_state(
    const CircuitInstance& inst, uint64_t trajectory_index,
    const TrajectoryOptions& opt = {});

}  // namespace aqsim
