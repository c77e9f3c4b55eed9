#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "aqsim/circuit.hpp"
#include "aqsim/rng.hpp"

namespace aqsim {

struct MeasurementRecord {
  int time = -1;  // depth index (1-based; layer t produced this record)
  int site = 0;
  uint8_t outcome = 0;           // true projected outcome
  uint8_t recorded_outcome = 0;  // what the (noisy) readout reported
  bool feedback_applied = false;
};

struct TrajectoryOptions {
  bool record_profile = true;
  bool record_flag_history = true;
  bool record_measurements = true;
};

struct TrajectoryResult {
  int num_sites = 0;
  int depth = 0;
  // row t (0..depth) holds exact <n_i> after t depth units; empty if not recorded
  std::vector<double> occupation;
  std::vector<std::vector<uint8_t>> flag_history;  // depth+1 snapshots
  std::vector<MeasurementRecord> records;
  ExecutionLog log;
  OperationCounts counts;
  double total_discarded_weight = 0.0;
  double max_norm_error = 0.0;
  bool survived = false;  // any flag active at final depth

  const double* occupation_row(int t) const {
    return occupation.data() + static_cast<std::size_t>(t) * num_sites;
  }
  double total_particles(int t) const {
    double s = 0.0;
    const double* row = occupation_row(t);
    for (int i = 0; i < num_sites; ++i) s += row[i];
    return s;
  }
};

struct TrajectoryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr double kZeroProbGuard = 1e-14;

// One protocol implementation drives every engine: per depth unit, apply the
// dressed entangler on each bond with an active endpoint (then activate both
// flags), then measure each Bernoulli-selected active site, feed back X on a
// recorded 1, and clear its flag. All randomness is drawn here, in a fixed
// order, so engines sharing a (instance, trajectory_index) pair consume
// identical streams and produce identical measurement outcomes.
template <class Backend>
TrajectoryResult run_trajectory(const CircuitInstance& inst,
                                uint64_t trajectory_index, Backend& backend,
                                const TrajectoryOptions& opt = {}) {
  const CircuitSpec& spec = inst.spec;
  const int L = spec.num_sites;
  const NoiseModel& noise = spec.noise;
  CounterRng rng(chain_seed(inst.instance_seed, kTagTrajectory, trajectory_index));

  TrajectoryResult res;
  res.num_sites = L;
  res.depth = spec.depth;
  res.log.instance_seed = inst.instance_seed;

  auto [bits, flags] = initial_configuration(spec.initial_state, L);
  (void)bits;

  if (opt.record_profile) {
    res.occupation.assign(static_cast<std::size_t>(spec.depth + 1) * L, 0.0);
    backend.occupation_row(res.occupation.data());
  }
  if (opt.record_flag_history) res.flag_history.push_back(flags);

  std::vector<uint8_t> measured_now(L, 0);

  const auto check_prob = [](double p) {
    if (!(p >= -1e-9) || !(p <= 1.0 + 1e-6) || std::isnan(p)) {
      throw TrajectoryError("trajectory aborted: invalid probability (NaN guard)");
    }
  };

  const Unitary2 x_gate = pauli_x();
  const Unitary2 damp_k0 = {1.0, 0.0, 0.0, std::sqrt(1.0 - noise.idle_damping)};

  for (int t = 1; t <= spec.depth; ++t) {
    const Layer& layer = inst.layers[t - 1];

    for (const BondGate& g : layer.gates) {
      if (!flags[g.site_a] && !flags[g.site_b]) continue;
      backend.apply_two_site(g.site_a, g.site_b, g.matrix);
      flags[g.site_a] = 1;
      flags[g.site_b] = 1;
      ++res.log.entanglers_applied;
      if (noise.depol_1q > 0.0) {
        // one error chance per dressing rotation: pre_a, pre_b, post_a, post_b
        const int sites[4] = {g.site_a, g.site_b, g.site_a, g.site_b};
        for (int slot = 0; slot < 4; ++slot) {
          if (rng.next_u01() < noise.depol_1q) {
            const uint32_t which = rng.next_index(3);
            const Unitary2 p = which == 0 ? pauli_x() : which == 1 ? pauli_y() : pauli_z();
            backend.apply_one_site(sites[slot], p);
          }
        }
      }
      if (noise.depol_2q > 0.0 && rng.next_u01() < noise.depol_2q) {
        const uint32_t which = 1 + rng.next_index(15);  // skip I(x)I
        const Unitary2 paulis[4] = {identity2(), pauli_x(), pauli_y(), pauli_z()};
        backend.apply_one_site(g.site_a, paulis[which >> 2]);
        backend.apply_one_site(g.site_b, paulis[which & 3]);
      }
    }

    std::fill(measured_now.begin(), measured_now.end(), uint8_t{0});
    for (int site : layer.measured_sites) {
      if (!flags[site]) continue;  // draws on inactive sites are skipped
      const double p1 = backend.prob_one(site);
      check_prob(p1);
      const double u = rng.next_u01();
      int outcome;
      if (p1 < kZeroProbGuard) {
        outcome = 0;
      } else if (1.0 - p1 < kZeroProbGuard) {
        outcome = 1;
      } else {
        outcome = u < p1 ? 1 : 0;
      }
      backend.project(site, outcome, outcome ? p1 : 1.0 - p1);
      int recorded = outcome;
      if (noise.has_readout_noise()) {
        const double flip =
            outcome ? noise.readout_flip_1to0 : noise.readout_flip_0to1;
        if (rng.next_u01() < flip) recorded = 1 - recorded;
      }
      if (recorded == 1) {
        backend.apply_one_site(site, x_gate);
        ++res.log.feedback_pulses;
      }
      if (opt.record_measurements) {
        res.records.push_back(MeasurementRecord{
            t, site, static_cast<uint8_t>(outcome),
            static_cast<uint8_t>(recorded), recorded == 1});
      }
      flags[site] = 0;
      measured_now[site] = 1;
      ++res.log.measurements_performed;
    }

    if (noise.idle_damping > 0.0) {
      for (int site = 0; site < L; ++site) {
        if (measured_now[site]) continue;
        const double pe = backend.prob_one(site);
        check_prob(pe);
        const double p_jump = noise.idle_damping * pe;
        const double u = rng.next_u01();
        if (u < p_jump) {
          backend.project(site, 1, pe);
          backend.apply_one_site(site, x_gate);
        } else {
          backend.apply_one_site(site, damp_k0);
          backend.scale_state(1.0 / std::sqrt(1.0 - p_jump));
        }
      }
    }

    if (opt.record_profile) {
      backend.occupation_row(res.occupation.data() +
                             static_cast<std::size_t>(t) * L);
    }
    if (opt.record_flag_history) res.flag_history.push_back(flags);
    res.max_norm_error = std::max(res.max_norm_error, backend.norm_error());
  }

  res.total_discarded_weight = backend.discarded_weight();
  res.survived = false;
  for (uint8_t f : flags) {
    if (f) {
      res.survived = true;
      break;
    }
  }
  res.counts = count_operations(inst, res.log);
  return res;
}

}  // namespace aqsim
