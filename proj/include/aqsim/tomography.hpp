#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "aqsim/circuit.hpp"
#include "aqsim/observables.hpp"

namespace aqsim {

// Counts over the 3^k Pauli product bases of a k-qubit subsystem. Setting
// index is base-3 with qubit 0 as the most significant digit, digits meaning
// X=0, Y=1, Z=2. Outcome bitstrings index qubit 0 at the most significant
// bit, matching the density-matrix basis. Analytic tables carry exact
// frequencies (shots_per_setting = 1) in place of integer counts.
struct ShotTable {
  int k = 0;
  double shots_per_setting = 0;
  bool analytic = false;
  std::vector<std::vector<double>> counts;  // [3^k][2^k]

  int num_settings() const { return static_cast<int>(counts.size()); }
  static std::string setting_name(int index, int k);
  static int setting_index(const std::string& name);

  std::string to_json() const;
  static ShotTable from_json(const std::string& text);
};

// samples `shots` bitstrings per setting from the exact Born distribution of
// rho, flipping each reported bit per the readout noise model
ShotTable sample_shots(const DensityMatrix& rho, int shots, const NoiseModel& noise,
                       uint64_t seed);

// infinite-shot limit: exact outcome probabilities through the same noise map
ShotTable sample_shots_analytic(const DensityMatrix& rho, const NoiseModel& noise);

// estimate every Pauli-string expectation from compatible settings and
// assemble rho = 2^{-k} sum_P <P> P; Hermitian and trace-1 by construction,
// PSD not guaranteed at finite shots
DensityMatrix linear_inversion(const ShotTable& table);

// clip negative eigenvalues at zero and renormalize the trace to one
DensityMatrix psd_project(const DensityMatrix& rho);

// exact outcome distribution of rho measured in the given setting (before
// readout noise); exposed for the mitigation pipeline and tests
std::vector<double> setting_distribution(const DensityMatrix& rho,
                                         int setting_index);

// replaces each per-setting distribution/counts with a corrected one
ShotTable corrected_table(const ShotTable& table,
                          std::span<const std::vector<double>> corrected);

}  // namespace aqsim
