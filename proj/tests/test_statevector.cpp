#include <doctest.h>

#include <cmath>

#include "aqsim/observables.hpp"
#include "aqsim/statevector.hpp"
#include "oracles.hpp"

using namespace aqsim;

TEST_CASE("apply_unitary basics") {
  PureState st = PureState::zero_state(1);
  apply_unitary(st, 0, pauli_x());
  CHECK(std::abs(st.amps[1] - cd{1, 0}) < 1e-15);

  // iSWAP on |01> -> -i |10>
  std::vector<uint8_t> bits = {0, 1};
  PureState st2 = PureState::from_bits(bits);
  apply_unitary(st2, {0, 1}, fsim(M_PI / 2, 0));
  CHECK(std::abs(st2.amps[2] - cd{0, -1}) < 1e-15);

  CHECK_THROWS(apply_unitary(st2, {0, 0}, fsim(0, 0)));
  CHECK_THROWS(apply_unitary(st2, {0, 2}, fsim(0, 0)));
}

TEST_CASE("random unitaries preserve the norm at L=10") {
  CounterRng rng(41);
  std::vector<uint8_t> bits(10, 0);
  PureState st = PureState::from_bits(bits);
  // scramble into a generic state
  for (int round = 0; round < 30; ++round) {
    const int a = rng.next_index(10);
    int b = rng.next_index(10);
    if (b == a) b = (a + 1) % 10;
    const Unitary4 u = dressed_entangler(
        fsim(M_PI / 2, 0.05), equatorial_rotation(rng.next_u01() * 2 * M_PI),
        equatorial_rotation(rng.next_u01() * 2 * M_PI),
        equatorial_rotation(rng.next_u01() * 2 * M_PI),
        equatorial_rotation(rng.next_u01() * 2 * M_PI));
    apply_unitary(st, {a, b}, u);
    CHECK(std::abs(st.norm_sq() - 1.0) < 1e-12);
  }
}

TEST_CASE("measure_and_feedback on |1> resets deterministically") {
  std::vector<uint8_t> bits = {1};
  PureState st = PureState::from_bits(bits);
  CounterRng rng(4);
  const MeasurementRecord rec = measure_and_feedback(st, 0, rng, NoiseModel{});
  CHECK(rec.outcome == 1);
  CHECK(rec.feedback_applied);
  CHECK(std::abs(st.amps[0] - cd{1, 0}) < 1e-14);
  CHECK(std::abs(st.amps[1]) < 1e-14);
}

TEST_CASE("Born frequency on |+> is 1/2 within 0.02 over 1e4 samples") {
  int ones = 0;
  const int n = 10000;
  CounterRng rng(777);
  for (int i = 0; i < n; ++i) {
    PureState st = PureState::zero_state(1);
    const double c = 1.0 / std::sqrt(2.0);
    st.amps = {cd{c, 0}, cd{c, 0}};
    const MeasurementRecord rec = measure_and_feedback(st, 0, rng, NoiseModel{});
    ones += rec.outcome;
    // post-state is |0> on either branch
    CHECK(std::abs(st.amps[0] - cd{1, 0}) < 1e-12);
  }
  CHECK(std::abs(ones / static_cast<double>(n) - 0.5) < 0.02);
}

TEST_CASE("Bell state measurement: hand-computed branches") {
  const double c = 1.0 / std::sqrt(2.0);
  int outcome0 = 0, outcome1 = 0;
  CounterRng rng(12);
  for (int i = 0; i < 2000; ++i) {
    PureState st = PureState::zero_state(2);
    st.amps = {cd{c, 0}, cd{0, 0}, cd{0, 0}, cd{c, 0}};
    const MeasurementRecord rec = measure_and_feedback(st, 0, rng, NoiseModel{});
    if (rec.outcome == 0) {
      ++outcome0;
      CHECK(std::abs(st.amps[0] - cd{1, 0}) < 1e-12);  // |00>
    } else {
      ++outcome1;
      CHECK(std::abs(st.amps[1] - cd{1, 0}) < 1e-12);  // |01> after feedback X
    }
  }
  const double f1 = outcome1 / 2000.0;
  CHECK(std::abs(f1 - 0.5) < 0.04);
  CHECK(outcome0 + outcome1 == 2000);
}

TEST_CASE("absorbing initial state stays absorbing") {
  CircuitSpec s;
  s.num_sites = 6;
  s.depth = 5;
  s.measurement_rate = 0.5;
  s.initial_state = InitialState::all_empty();
  s.master_seed = 3;
  const CircuitInstance inst = build_instance(s, 0);
  const TrajectoryResult res = run_trajectory_sv(inst, 0);
  for (int t = 0; t <= s.depth; ++t) {
    CHECK(res.total_particles(t) == 0.0);
  }
  CHECK_FALSE(res.survived);
}

TEST_CASE("p=1 all-occupied locks the absorbing state after one depth unit") {
  CircuitSpec s;
  s.num_sites = 4;
  s.depth = 3;
  s.measurement_rate = 1.0;
  s.initial_state = InitialState::all_occupied();
  s.master_seed = 5;
  const CircuitInstance inst = build_instance(s, 0);
  auto [res, state] = run_trajectory_sv_with_state(inst, 0);
  for (const uint8_t f : res.flag_history[1]) CHECK(f == 0);
  CHECK(res.total_particles(1) < 1e-12);
  CHECK(std::abs(state.amps[0] - cd{1, 0}) < 1e-10);
  // later layers execute nothing
  CHECK(res.counts.n_2q == 2);  // only the first layer's gates
  CHECK(res.counts.n_ro == 4);
}

TEST_CASE("flag-state consistency: inactive sites carry no occupation") {
  CircuitSpec s;
  s.num_sites = 8;
  s.depth = 6;
  s.measurement_rate = 0.5;
  s.initial_state = InitialState::single_seed(4);
  s.master_seed = 31;
  for (int c = 0; c < 3; ++c) {
    const CircuitInstance inst = build_instance(s, c);
    const TrajectoryResult res = run_trajectory_sv(inst, c + 10);
    for (int t = 0; t <= s.depth; ++t) {
      for (int i = 0; i < s.num_sites; ++i) {
        if (!res.flag_history[t][i]) {
          CHECK(res.occupation_row(t)[i] < 1e-10);
        }
      }
    }
    CHECK(res.max_norm_error < 1e-10);
  }
}

TEST_CASE("branch enumeration equals the channel oracle to 1e-10") {
  CircuitSpec s;
  s.num_sites = 4;
  s.depth = 3;
  s.measurement_rate = 0.5;
  s.initial_state = InitialState::all_occupied();
  s.master_seed = 2026;
  const CircuitInstance inst = build_instance(s, 0);
  const auto channel = testing::run_channel_oracle(inst);
  const auto branches = testing::run_branch_enumeration(inst);
  for (int t = 0; t <= s.depth; ++t) {
    for (int i = 0; i < s.num_sites; ++i) {
      CHECK(std::abs(channel.at(t, i) - branches.at(t, i)) < 1e-10);
    }
  }
}

TEST_CASE("trajectory-averaged occupation converges to the channel") {
  CircuitSpec s;
  s.num_sites = 6;
  s.depth = 4;
  s.measurement_rate = 0.4;
  s.initial_state = InitialState::single_seed(3);
  s.master_seed = 99;
  const CircuitInstance inst = build_instance(s, 0);
  const auto channel = testing::run_channel_oracle(inst);
  const int n_traj = 3000;
  std::vector<TrajectoryResult> ensemble;
  ensemble.reserve(n_traj);
  for (int traj = 0; traj < n_traj; ++traj) {
    ensemble.push_back(run_trajectory_sv(inst, traj));
  }
  const auto [grid, series] = occupation_series(ensemble);
  int checked = 0;
  for (int t = 0; t <= s.depth; ++t) {
    for (int i = 0; i < s.num_sites; ++i) {
      const double se = grid.sem[static_cast<std::size_t>(t) * s.num_sites + i];
      const double diff = std::abs(grid.at(t, i) - channel.at(t, i));
      // 3 sigma Monte Carlo band with an absolute floor for exact-zero cells
      CHECK(diff <= 3.0 * se + 1e-9);
      ++checked;
    }
  }
  CHECK(checked == (s.depth + 1) * s.num_sites);
}

TEST_CASE("pure brickwork at p=0 grows entanglement") {
  CircuitSpec s;
  s.num_sites = 8;
  s.depth = 4;
  s.measurement_rate = 0.0;
  s.initial_state = InitialState::all_occupied();
  s.master_seed = 55;
  double mean_s2 = 0;
  const int n_circ = 10;
  for (int c = 0; c < n_circ; ++c) {
    const CircuitInstance inst = build_instance(s, c);
    auto [res, state] = run_trajectory_sv_with_state(inst, 0);
    const std::vector<int> half = {0, 1, 2, 3};
    const DensityMatrix rho = reduced_density_matrix(state, half);
    mean_s2 += renyi_entropy(rho, 2).value;
  }
  mean_s2 /= n_circ;
  CHECK(mean_s2 > 0.5);
}

TEST_CASE("readout noise flips the record and feedback but not the projection") {
  NoiseModel noise;
  noise.readout_flip_1to0 = 1.0;  // every true 1 is recorded as 0
  std::vector<uint8_t> bits = {1};
  PureState st = PureState::from_bits(bits);
  CounterRng rng(6);
  const MeasurementRecord rec = measure_and_feedback(st, 0, rng, noise);
  CHECK(rec.outcome == 1);
  CHECK(rec.recorded_outcome == 0);
  CHECK_FALSE(rec.feedback_applied);
  // projection followed the true outcome; no feedback applied, so state is |1>
  CHECK(std::abs(st.amps[1] - cd{1, 0}) < 1e-14);
}

TEST_CASE("statevector engine refuses oversized systems") {
  std::vector<uint8_t> bits(PureState::kMaxSites + 1, 0);
  CHECK_THROWS(PureState::from_bits(bits));
}
