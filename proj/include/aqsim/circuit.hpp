#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "aqsim/gates.hpp"

namespace aqsim {

enum class Boundary { periodic, open };

enum class InitialStateKind { all_empty, all_occupied, single_seed };

struct InitialState {
  InitialStateKind kind = InitialStateKind::all_occupied;
  int seed_site = -1;  // single_seed only

  static InitialState all_empty() { return {InitialStateKind::all_empty, -1}; }
  static InitialState all_occupied() { return {InitialStateKind::all_occupied, -1}; }
  static InitialState single_seed(int site) {
    return {InitialStateKind::single_seed, site};
  }
};

struct GateParams {
  double swap_angle = M_PI / 2.0;  // fSim theta; iSWAP point by default
  double cphase_angle = 0.0;       // fSim phi
  std::vector<double> dressing_set = {0.0, M_PI / 2.0, M_PI, 3.0 * M_PI / 2.0};
};

struct NoiseModel {
  double readout_flip_0to1 = 0.0;  // P(record 1 | true 0)
  double readout_flip_1to0 = 0.0;  // P(record 0 | true 1)
  double depol_1q = 0.0;           // error insertion per single-qubit gate
  double depol_2q = 0.0;           // per two-qubit entangler
  double idle_damping = 0.0;       // amplitude damping per measurement window
                                   // per unmeasured qubit
  bool is_ideal() const {
    return readout_flip_0to1 == 0 && readout_flip_1to0 == 0 && depol_1q == 0 &&
           depol_2q == 0 && idle_damping == 0;
  }
  bool has_readout_noise() const {
    return readout_flip_0to1 > 0 || readout_flip_1to0 > 0;
  }
};

struct CircuitSpec {
  int num_sites = 2;
  Boundary boundary = Boundary::periodic;
  int depth = 0;  // one depth unit = unitary layer + measurement layer
  double measurement_rate = 0.0;
  InitialState initial_state;
  GateParams gate_params;
  NoiseModel noise;
  uint64_t master_seed = 0;

  // throws std::invalid_argument naming the offending field
  void validate() const;
};

struct BondGate {
  int site_a = 0;  // bond (site_a, site_b), site_b = (site_a + 1) mod L
  int site_b = 0;
  std::array<double, 4> dressing{};  // axis angles: pre_a, pre_b, post_a, post_b
  Unitary4 matrix{};                 // dressed entangler, prebuilt
};

struct Layer {
  int parity = 0;  // 0: bonds (0,1),(2,3),...; 1: (1,2),(3,4),...,(+wrap)
  std::vector<BondGate> gates;        // ascending site_a
  std::vector<int> measured_sites;    // ascending; Bernoulli(p) draw per site
};

struct CircuitInstance {
  CircuitSpec spec;
  uint64_t circuit_index = 0;
  uint64_t instance_seed = 0;
  uint64_t measurement_key = 0;  // positional stream key for selection draws
  std::vector<Layer> layers;

  // replays the per-(layer, site) selection draw recorded in the instance
  bool measurement_draw(int layer, int site) const;
};

// deterministic function of (spec.master_seed, circuit_index)
CircuitInstance build_instance(const CircuitSpec& spec, uint64_t circuit_index);

// the brickwork bonds of one parity: pairs (i, i+1 mod L)
std::vector<std::pair<int, int>> brickwork_bonds(int num_sites, int parity,
                                                 Boundary boundary);

// (basis bits, flag vector) for an initial state
std::pair<std::vector<uint8_t>, std::vector<uint8_t>> initial_configuration(
    const InitialState& kind, int num_sites);

struct OperationCounts {
  int64_t n_1q = 0;  // dressing rotations + feedback X pulses
  int64_t n_2q = 0;  // entanglers actually applied
  int64_t n_ro = 0;  // measurements actually performed (flag-gated)
};

// log of what an engine actually executed for one trajectory
struct ExecutionLog {
  uint64_t instance_seed = 0;
  int64_t entanglers_applied = 0;
  int64_t feedback_pulses = 0;
  int64_t measurements_performed = 0;
};

// derives counts from an execution log; verifies the log is consistent with
// the instance (the flag-gated gate and measurement schedule is a
// deterministic function of the instance) and throws on mismatch
OperationCounts count_operations(const CircuitInstance& instance,
                                 const ExecutionLog& log);

// JSON (de)serialization of specs; schema_version 1, unknown keys rejected
std::string circuit_spec_to_json(const CircuitSpec& spec);
CircuitSpec circuit_spec_from_json(const std::string& text);

}  // namespace aqsim
