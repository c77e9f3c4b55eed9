#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "aqsim/analysis.hpp"
#include "aqsim/circuit.hpp"
#include "aqsim/mitigation.hpp"
#include "aqsim/mps.hpp"

namespace aqsim {

enum class ExperimentKind {
  classical_dp,
  absorbing_profile,
  absorbing_exponents,
  mipt_scan,
  tomography_pipeline,
  convergence_check,
};

enum class EngineKind { statevector, mps, flags };

struct FlagsScanConfig {
  double p_min = 0.30;
  double p_max = 0.40;
  double step = 0.005;
  int64_t realizations = 20000;
};

struct FlagsConfig {
  int64_t realizations = 100000;        // main single-seed batch at p_c
  int64_t all_active_realizations = 20000;
  int chunk_size = 1000;
  FlagsScanConfig scan;
};

struct AnalysisConfig {
  double fit_window_lo = 3.0;
  double fit_window_hi = 20.0;
  double front_threshold = 0.01;
  int bootstrap_resamples = 1000;
  double bootstrap_level = 0.90;
};

struct TomographyConfig {
  int shots_per_setting = 300;
  bool analytic = false;
  double svd_rel_cutoff = 1e-6;
  ErrorRates rates;
};

struct CampaignConfig {
  ExperimentKind experiment = ExperimentKind::mipt_scan;
  CircuitSpec circuit;  // base spec; measurement_rate/depth overridden per p
  std::vector<double> p_grid;
  std::map<std::string, int> depth_by_p;  // key: p formatted via io::format_double
  int circuits_per_p = 1;
  int trajectories_per_circuit = 1;
  EngineKind engine = EngineKind::statevector;
  MpsOptions mps;
  FlagsConfig flags;
  AnalysisConfig analysis;
  TomographyConfig tomography;
  std::vector<int> entropy_subsystem = {0, 1, 2};
  std::vector<int> entropy_alphas = {1, 2, 3, 4};
  std::vector<int> convergence_bonds = {64, 128};
  std::string output_dir;
  int workers = 0;  // 0 = hardware concurrency
  double memory_cap_mb = 8192.0;

  void validate() const;
  std::string to_json() const;
  static CampaignConfig from_json(const std::string& text);

  int depth_for(double p) const;
};

std::string experiment_name(ExperimentKind e);
ExperimentKind experiment_from_name(const std::string& name);
std::string engine_name(EngineKind e);

// Runs (or resumes) the campaign; returns the artifact directory. Work is
// split into deterministic units keyed by (p, circuit/chunk); completed units
// persist as JSON files, so interrupted campaigns resume idempotently and
// re-aggregation is byte-identical for any worker count.
std::filesystem::path run_campaign(const CampaignConfig& config, bool resume = true);

enum class Figure { fig2, fig3a, fig3b, fig4b, fig4c, fig5, figS1, figS2 };

Figure figure_from_name(const std::string& name);
std::string figure_name(Figure f);

// renders one figure (CSV + SVG + axes sidecar) from campaign artifacts;
// throws with the missing aggregate names if the campaign has not run
void emit_report(const std::filesystem::path& artifact_dir, Figure figure);

}  // namespace aqsim
