#include "aqsim/circuit.hpp"

#include <fmt/format.h>

#include <nlohmann/json.hpp>
#include <stdexcept>

#include "aqsim/rng.hpp"

namespace aqsim {

void CircuitSpec::validate() const {
  if (num_sites < 2) {
    throw std::invalid_argument(
        fmt::format("num_sites must be >= 2, got {}", num_sites));
  }
  if (boundary == Boundary::periodic && num_sites % 2 != 0) {
    throw std::invalid_argument(fmt::format(
        "periodic brickwork requires even num_sites, got {}", num_sites));
  }
  if (depth < 0) {
    throw std::invalid_argument(fmt::format("depth must be >= 0, got {}", depth));
  }
  if (!(measurement_rate >= 0.0 && measurement_rate <= 1.0)) {
    throw std::invalid_argument(fmt::format(
        "measurement_rate must be in [0,1], got {}", measurement_rate));
  }
  if (initial_state.kind == InitialStateKind::single_seed &&
      (initial_state.seed_site < 0 || initial_state.seed_site >= num_sites)) {
    throw std::invalid_argument(fmt::format(
        "single_seed site {} out of range [0,{})", initial_state.seed_site,
        num_sites));
  }
  if (gate_params.dressing_set.empty()) {
    throw std::invalid_argument("dressing_set must be non-empty");
  }
  for (double v : {noise.readout_flip_0to1, noise.readout_flip_1to0,
                   noise.depol_1q, noise.depol_2q, noise.idle_damping}) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument("noise probabilities must be in [0,1]");
    }
  }
}

std::vector<std::pair<int, int>> brickwork_bonds(int num_sites, int parity,
                                                 Boundary boundary) {
  std::vector<std::pair<int, int>> bonds;
  for (int i = parity; i + 1 < num_sites; i += 2) bonds.emplace_back(i, i + 1);
  if (boundary == Boundary::periodic && parity == 1 && num_sites % 2 == 0) {
    bonds.emplace_back(num_sites - 1, 0);
  }
  return bonds;
}

bool CircuitInstance::measurement_draw(int layer, int site) const {
  const uint64_t threshold = bernoulli_threshold(spec.measurement_rate);
  const uint64_t pos = static_cast<uint64_t>(layer) * spec.num_sites + site;
  return bernoulli_from(stream_at(measurement_key, pos), threshold);
}

CircuitInstance build_instance(const CircuitSpec& spec, uint64_t circuit_index) {
  spec.validate();
  CircuitInstance inst;
  inst.spec = spec;
  inst.circuit_index = circuit_index;
  inst.instance_seed = chain_seed(spec.master_seed, kTagInstance, circuit_index);
  inst.measurement_key = chain_seed(inst.instance_seed, kTagMeasure, 0);

  const Unitary4 core = fsim(spec.gate_params.swap_angle, spec.gate_params.cphase_angle);
  const auto& dset = spec.gate_params.dressing_set;
  CounterRng dress_rng(chain_seed(inst.instance_seed, kTagDressing, 0));

  inst.layers.resize(spec.depth);
  for (int t = 0; t < spec.depth; ++t) {
    Layer& layer = inst.layers[t];
    layer.parity = t % 2;
    for (auto [a, b] : brickwork_bonds(spec.num_sites, layer.parity, spec.boundary)) {
      BondGate g;
      g.site_a = a;
      g.site_b = b;
      for (auto& angle : g.dressing) {
        angle = dset[dress_rng.next_index(static_cast<uint32_t>(dset.size()))];
      }
      g.matrix = dressed_entangler(core, equatorial_rotation(g.dressing[0]),
                                   equatorial_rotation(g.dressing[1]),
                                   equatorial_rotation(g.dressing[2]),
                                   equatorial_rotation(g.dressing[3]));
      layer.gates.push_back(g);
    }
    for (int i = 0; i < spec.num_sites; ++i) {
      if (inst.measurement_draw(t, i)) layer.measured_sites.push_back(i);
    }
  }
  return inst;
}

std::pair<std::vector<uint8_t>, std::vector<uint8_t>> initial_configuration(
    const InitialState& kind, int num_sites) {
  std::vector<uint8_t> bits(num_sites, 0), flags(num_sites, 0);
  switch (kind.kind) {
    case InitialStateKind::all_empty:
      break;
    case InitialStateKind::all_occupied:
      std::fill(bits.begin(), bits.end(), uint8_t{1});
      std::fill(flags.begin(), flags.end(), uint8_t{1});
      break;
    case InitialStateKind::single_seed:
      if (kind.seed_site < 0 || kind.seed_site >= num_sites) {
        throw std::invalid_argument(
            fmt::format("seed site {} out of range [0,{})", kind.seed_site,
                        num_sites));
      }
      bits[kind.seed_site] = 1;
      flags[kind.seed_site] = 1;
      break;
  }
  return {bits, flags};
}

namespace {

// replay the classical flag dynamics to obtain the instance-determined
// counts of applied entanglers and performed measurements
std::pair<int64_t, int64_t> replay_gated_counts(const CircuitInstance& inst) {
  auto [bits, flags] = initial_configuration(inst.spec.initial_state,
                                             inst.spec.num_sites);
  (void)bits;
  int64_t gates = 0, measurements = 0;
  for (const Layer& layer : inst.layers) {
    for (const BondGate& g : layer.gates) {
      if (flags[g.site_a] || flags[g.site_b]) {
        ++gates;
        flags[g.site_a] = 1;
        flags[g.site_b] = 1;
      }
    }
    for (int site : layer.measured_sites) {
      if (flags[site]) {
        ++measurements;
        flags[site] = 0;
      }
    }
  }
  return {gates, measurements};
}

}  // namespace

OperationCounts count_operations(const CircuitInstance& instance,
                                 const ExecutionLog& log) {
  if (log.instance_seed != instance.instance_seed) {
    throw std::invalid_argument("execution log does not match instance (seed)");
  }
  const auto [gates, measurements] = replay_gated_counts(instance);
  if (log.entanglers_applied != gates ||
      log.measurements_performed != measurements) {
    throw std::invalid_argument(fmt::format(
        "execution log inconsistent with instance: gates {} vs {}, "
        "measurements {} vs {}",
        log.entanglers_applied, gates, log.measurements_performed, measurements));
  }
  OperationCounts counts;
  counts.n_2q = log.entanglers_applied;
  counts.n_1q = 4 * log.entanglers_applied + log.feedback_pulses;
  counts.n_ro = log.measurements_performed;
  return counts;
}

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, std::initializer_list<const char*> known,
                         const std::string& path) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) {
      if (it.key() == k) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw std::invalid_argument(
          fmt::format("unknown field '{}{}'", path, it.key()));
    }
  }
}

}  // namespace

std::string circuit_spec_to_json(const CircuitSpec& spec) {
  json j;
  j["schema_version"] = 1;
  j["num_sites"] = spec.num_sites;
  j["boundary"] = spec.boundary == Boundary::periodic ? "periodic" : "open";
  j["depth"] = spec.depth;
  j["measurement_rate"] = spec.measurement_rate;
  switch (spec.initial_state.kind) {
    case InitialStateKind::all_empty:
      j["initial_state"] = {{"kind", "all_empty"}};
      break;
    case InitialStateKind::all_occupied:
      j["initial_state"] = {{"kind", "all_occupied"}};
      break;
    case InitialStateKind::single_seed:
      j["initial_state"] = {{"kind", "single_seed"},
                            {"site", spec.initial_state.seed_site}};
      break;
  }
  j["gate_params"] = {{"swap_angle", spec.gate_params.swap_angle},
                      {"cphase_angle", spec.gate_params.cphase_angle},
                      {"dressing_set", spec.gate_params.dressing_set}};
  j["noise"] = {{"readout_flip_0to1", spec.noise.readout_flip_0to1},
                {"readout_flip_1to0", spec.noise.readout_flip_1to0},
                {"depol_1q", spec.noise.depol_1q},
                {"depol_2q", spec.noise.depol_2q},
                {"idle_damping", spec.noise.idle_damping}};
  j["master_seed"] = spec.master_seed;
  return j.dump(2);
}

CircuitSpec circuit_spec_from_json(const std::string& text) {
  const json j = json::parse(text);
  reject_unknown_keys(j,
                      {"schema_version", "num_sites", "boundary", "depth",
                       "measurement_rate", "initial_state", "gate_params",
                       "noise", "master_seed"},
                      "");
  if (j.at("schema_version").get<int>() != 1) {
    throw std::invalid_argument("unsupported schema_version");
  }
  CircuitSpec spec;
  spec.num_sites = j.at("num_sites").get<int>();
  const std::string boundary = j.value("boundary", "periodic");
  if (boundary == "periodic") {
    spec.boundary = Boundary::periodic;
  } else if (boundary == "open") {
    spec.boundary = Boundary::open;
  } else {
    throw std::invalid_argument(fmt::format("unknown boundary '{}'", boundary));
  }
  spec.depth = j.at("depth").get<int>();
  spec.measurement_rate = j.at("measurement_rate").get<double>();
  if (j.contains("initial_state")) {
    const json& is = j.at("initial_state");
    reject_unknown_keys(is, {"kind", "site"}, "initial_state.");
    const std::string kind = is.at("kind").get<std::string>();
    if (kind == "all_empty") {
      spec.initial_state = InitialState::all_empty();
    } else if (kind == "all_occupied") {
      spec.initial_state = InitialState::all_occupied();
    } else if (kind == "single_seed") {
      spec.initial_state = InitialState::single_seed(is.at("site").get<int>());
    } else {
      throw std::invalid_argument(
          fmt::format("unknown initial_state.kind '{}'", kind));
    }
  }
  if (j.contains("gate_params")) {
    const json& gp = j.at("gate_params");
    reject_unknown_keys(gp, {"swap_angle", "cphase_angle", "dressing_set"},
                        "gate_params.");
    spec.gate_params.swap_angle =
        gp.value("swap_angle", spec.gate_params.swap_angle);
    spec.gate_params.cphase_angle =
        gp.value("cphase_angle", spec.gate_params.cphase_angle);
    if (gp.contains("dressing_set")) {
      spec.gate_params.dressing_set =
          gp.at("dressing_set").get<std::vector<double>>();
    }
  }
  if (j.contains("noise")) {
    const json& nm = j.at("noise");
    reject_unknown_keys(nm,
                        {"readout_flip_0to1", "readout_flip_1to0", "depol_1q",
                         "depol_2q", "idle_damping"},
                        "noise.");
    spec.noise.readout_flip_0to1 = nm.value("readout_flip_0to1", 0.0);
    spec.noise.readout_flip_1to0 = nm.value("readout_flip_1to0", 0.0);
    spec.noise.depol_1q = nm.value("depol_1q", 0.0);
    spec.noise.depol_2q = nm.value("depol_2q", 0.0);
    spec.noise.idle_damping = nm.value("idle_damping", 0.0);
  }
  spec.master_seed = j.value("master_seed", uint64_t{0});
  spec.validate();
  return spec;
}

}  // namespace aqsim
