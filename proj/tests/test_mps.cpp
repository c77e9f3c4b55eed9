#include <doctest.h>

#include <cmath>

#include "aqsim/mps.hpp"
#include "aqsim/observables.hpp"
#include "aqsim/statevector.hpp"
#include "oracles.hpp"

using namespace aqsim;

namespace {

MpsOptions tight_opts(int max_bond = 64) {
  MpsOptions o;
  o.max_bond = max_bond;
  o.truncation_cutoff = 1e-14;
  return o;
}

double overlap_mag(const PureState& a, const PureState& b) {
  cd acc{0, 0};
  for (std::size_t i = 0; i < a.amps.size(); ++i) {
    acc += std::conj(a.amps[i]) * b.amps[i];
  }
  return std::abs(acc);
}

}  // namespace

TEST_CASE("product-state gates keep bond dimension 1") {
  std::vector<uint8_t> bits = {0, 0};
  MpsState mps(bits, tight_opts());
  mps.apply_gate_bond(0, fsim(M_PI / 2, 0));  // iSWAP on |00> acts trivially
  CHECK(mps.bond_dim(1) == 1);
  CHECK(std::abs(mps.norm() - 1.0) < 1e-12);

  std::vector<uint8_t> bits10 = {1, 0};
  MpsState mps10(bits10, tight_opts());
  mps10.apply_gate_bond(0, fsim(M_PI / 2, 0));  // |10> -> -i |01>
  CHECK(mps10.bond_dim(1) == 1);
  const PureState dense = mps10.to_statevector();
  CHECK(std::abs(dense.amps[1] - cd{0, -1}) < 1e-12);
}

TEST_CASE("dressed entangler on |00>: singular values match the dense oracle") {
  const Unitary4 gate =
      dressed_entangler(fsim(M_PI / 2, 0), equatorial_rotation(0),
                        equatorial_rotation(0), equatorial_rotation(0),
                        equatorial_rotation(0));
  std::vector<uint8_t> bits = {0, 0};
  MpsState mps(bits, tight_opts());
  mps.apply_gate_bond(0, gate);
  CHECK(mps.bond_dim(1) == 2);
  const auto schmidt = mps.schmidt_values(1);

  // dense two-qubit computation of the same Schmidt spectrum
  PureState st = PureState::from_bits(bits);
  apply_unitary(st, {0, 1}, gate);
  Eigen::Matrix2cd m;
  m << st.amps[0], st.amps[1], st.amps[2], st.amps[3];
  Eigen::JacobiSVD<Eigen::Matrix2cd> svd(m);
  REQUIRE(schmidt.size() >= 2);
  CHECK(std::abs(schmidt[0] - svd.singularValues()(0)) < 1e-12);
  CHECK(std::abs(schmidt[1] - svd.singularValues()(1)) < 1e-12);
}

TEST_CASE("measurement collapses a Bell pair and shrinks the bond") {
  std::vector<uint8_t> bits = {0, 0};
  MpsState mps(bits, tight_opts());
  // build a Bell-like pair with one entangler
  const Unitary4 gate =
      dressed_entangler(fsim(M_PI / 2, 0), equatorial_rotation(0), identity2(),
                        identity2(), identity2());
  mps.apply_gate_bond(0, gate);
  const double p1 = mps.local_expectation(0);
  CHECK(p1 > 0.01);
  mps.project(0, 1, p1);
  mps.apply_one_site(0, pauli_x());
  CHECK(std::abs(mps.norm() - 1.0) < 1e-12);
  CHECK(mps.local_expectation(0) < 1e-12);
  // the post-measurement state is a product: both remaining Schmidt values
  // beyond the first are numerically zero
  const auto schmidt = mps.schmidt_values(1);
  if (schmidt.size() > 1) CHECK(schmidt[1] < 1e-12);
}

TEST_CASE("to_statevector round-trips product and entangled states") {
  std::vector<uint8_t> bits = {0, 1, 0};
  MpsState mps(bits, tight_opts());
  PureState dense = mps.to_statevector();
  CHECK(std::abs(dense.amps[2] - cd{1, 0}) < 1e-15);  // index of 010

  CounterRng rng(3);
  for (int round = 0; round < 8; ++round) {
    const int bond = rng.next_index(2);
    mps.apply_gate_bond(bond, dressed_entangler(
                                  fsim(M_PI / 2, 0.1),
                                  equatorial_rotation(rng.next_u01() * 2 * M_PI),
                                  equatorial_rotation(rng.next_u01() * 2 * M_PI),
                                  equatorial_rotation(rng.next_u01() * 2 * M_PI),
                                  equatorial_rotation(rng.next_u01() * 2 * M_PI)));
  }
  dense = mps.to_statevector();
  CHECK(std::abs(kernels::norm_sq(dense.amps.data(), dense.amps.size()) - 1.0) <
        1e-10);
}

TEST_CASE("local expectations on simple states") {
  std::vector<uint8_t> bits = {0, 1};
  MpsState mps(bits, tight_opts());
  CHECK(mps.local_expectation(0) < 1e-15);
  CHECK(std::abs(mps.local_expectation(1) - 1.0) < 1e-15);
}

TEST_CASE("untruncated MPS reproduces statevector trajectories exactly") {
  for (int L : {6, 8}) {
    CircuitSpec s;
    s.num_sites = L;
    s.depth = 4;
    s.measurement_rate = 0.4;
    s.initial_state = InitialState::all_occupied();
    s.master_seed = 400 + L;
    const CircuitInstance inst = build_instance(s, 0);
    MpsOptions opts = tight_opts(2 << (L / 2));
    for (int traj = 0; traj < 10; ++traj) {
      auto [sv_res, sv_state] = run_trajectory_sv_with_state(inst, traj);
      MpsBackend<double> backend(inst, opts);
      const TrajectoryResult mps_res = run_trajectory(inst, traj, backend);
      REQUIRE(sv_res.records.size() == mps_res.records.size());
      for (std::size_t i = 0; i < sv_res.records.size(); ++i) {
        CHECK(sv_res.records[i].site == mps_res.records[i].site);
        CHECK(sv_res.records[i].outcome == mps_res.records[i].outcome);
      }
      CHECK(overlap_mag(sv_state, backend.state().to_statevector()) > 1.0 - 1e-8);
      CHECK(mps_res.counts.n_2q == sv_res.counts.n_2q);
      CHECK(mps_res.counts.n_ro == sv_res.counts.n_ro);
    }
  }
}

TEST_CASE("GHZ-like outcome statistics match the statevector engine within 2%") {
  // one dressed entangler chain makes a long-range-correlated state; measure
  // site 0 over many seeded trajectories on both engines
  CircuitSpec s;
  s.num_sites = 10;
  s.depth = 2;
  s.measurement_rate = 0.3;
  s.initial_state = InitialState::all_occupied();
  s.master_seed = 11;
  const CircuitInstance inst = build_instance(s, 0);
  MpsOptions opts = tight_opts(64);
  const int n = 10000;
  int64_t sv_ones = 0, mps_ones = 0;
  for (int traj = 0; traj < n; ++traj) {
    const TrajectoryResult sv = run_trajectory_sv(inst, traj, TrajectoryOptions{false, false, true});
    for (const auto& r : sv.records) sv_ones += r.outcome;
    MpsBackend<double> backend(inst, opts);
    const TrajectoryResult mr =
        run_trajectory(inst, traj, backend, TrajectoryOptions{false, false, true});
    for (const auto& r : mr.records) mps_ones += r.outcome;
  }
  const double diff =
      std::abs(sv_ones - mps_ones) / std::max<double>(1.0, sv_ones);
  CHECK(diff < 0.02);
}

TEST_CASE("truncation monotonicity: discarded weight shrinks as chi grows") {
  CircuitSpec s;
  s.num_sites = 10;
  s.depth = 6;
  s.measurement_rate = 0.1;
  s.initial_state = InitialState::all_occupied();
  s.master_seed = 321;
  const CircuitInstance inst = build_instance(s, 0);
  double prev = 1e300;
  for (int chi : {4, 8, 16, 32}) {
    MpsOptions opts;
    opts.max_bond = chi;
    opts.truncation_cutoff = 1e-12;
    const TrajectoryResult res = run_trajectory_mps(inst, 0, opts);
    CHECK(res.total_discarded_weight <= prev + 1e-12);
    prev = res.total_discarded_weight;
  }
}

TEST_CASE("wrap-bond routing matches the dense engine on a ring") {
  CircuitSpec s;
  s.num_sites = 6;
  s.depth = 4;
  s.measurement_rate = 0.35;
  s.initial_state = InitialState::single_seed(5);  // seed next to the wrap bond
  s.master_seed = 77;
  const CircuitInstance inst = build_instance(s, 0);
  MpsOptions opts = tight_opts(2 << 3);
  for (int traj = 0; traj < 20; ++traj) {
    auto [sv_res, sv_state] = run_trajectory_sv_with_state(inst, traj);
    MpsBackend<double> backend(inst, opts);
    const TrajectoryResult mps_res = run_trajectory(inst, traj, backend);
    REQUIRE(sv_res.records.size() == mps_res.records.size());
    for (std::size_t i = 0; i < sv_res.records.size(); ++i) {
      CHECK(sv_res.records[i].outcome == mps_res.records[i].outcome);
    }
    CHECK(overlap_mag(sv_state, backend.state().to_statevector()) > 1.0 - 1e-8);
  }
}

TEST_CASE("open_override drops the wrap bond and adjusts counts") {
  CircuitSpec s;
  s.num_sites = 6;
  s.depth = 2;
  s.measurement_rate = 0.0;
  s.initial_state = InitialState::all_occupied();
  s.master_seed = 8;
  const CircuitInstance inst = build_instance(s, 0);
  MpsOptions ring = tight_opts(16);
  MpsOptions open = ring;
  open.boundary_strategy = BoundaryStrategy::open_override;
  const TrajectoryResult ring_res = run_trajectory_mps(inst, 0, ring);
  const TrajectoryResult open_res = run_trajectory_mps(inst, 0, open);
  CHECK(ring_res.counts.n_2q == 6);  // 3 + 3 bonds on a 6-ring
  CHECK(open_res.counts.n_2q == 5);  // wrap bond dropped
}

TEST_CASE("float precision engine stays close to double on small systems") {
  CircuitSpec s;
  s.num_sites = 8;
  s.depth = 4;
  s.measurement_rate = 0.3;
  s.initial_state = InitialState::all_occupied();
  s.master_seed = 13;
  const CircuitInstance inst = build_instance(s, 0);
  MpsOptions opts = tight_opts(32);
  MpsOptions opts32 = opts;
  opts32.precision = MpsPrecision::f32;
  int agree = 0, total = 0;
  for (int traj = 0; traj < 50; ++traj) {
    const TrajectoryResult a = run_trajectory_mps(inst, traj, opts);
    const TrajectoryResult b = run_trajectory_mps(inst, traj, opts32);
    if (a.records.size() == b.records.size()) {
      bool same = true;
      for (std::size_t i = 0; i < a.records.size(); ++i) {
        same = same && a.records[i].outcome == b.records[i].outcome;
      }
      agree += same;
    }
    ++total;
  }
  // f32 rounding can flip rare near-threshold Born draws, nothing more
  CHECK(agree >= total - 2);
}

TEST_CASE("mps reduced density matrix agrees with the dense partial trace") {
  CircuitSpec s;
  s.num_sites = 10;
  s.depth = 3;
  s.measurement_rate = 0.2;
  s.initial_state = InitialState::all_occupied();
  s.master_seed = 500;
  const CircuitInstance inst = build_instance(s, 0);
  MpsOptions opts = tight_opts(64);
  MpsBackend<double> backend(inst, opts);
  const TrajectoryResult res = run_trajectory(inst, 0, backend);
  (void)res;
  const PureState dense = backend.state().to_statevector();
  for (int first : {0, 3, 7}) {
    const int count = 3;
    std::vector<int> sites(count);
    for (int i = 0; i < count; ++i) sites[i] = first + i;
    const DensityMatrix a = reduced_density_matrix(dense, sites);
    const DensityMatrix b = reduced_density_matrix(backend.state(), first, count);
    CHECK((a.rho - b.rho).cwiseAbs().maxCoeff() < 1e-10);
  }
}
