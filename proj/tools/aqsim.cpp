// Campaign runner CLI: configure, run, resume, and report on simulation
// campaigns, plus a quick cross-engine oracle battery.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdlib>
#include <filesystem>

#include "aqsim/campaign.hpp"
#include "aqsim/io.hpp"
#include "aqsim/kernels.hpp"
#include "aqsim/mps.hpp"
#include "aqsim/observables.hpp"
#include "aqsim/statevector.hpp"

namespace {

int cmd_validate(const std::string& config_path) {
  try {
    const auto cfg =
        aqsim::CampaignConfig::from_json(aqsim::io::read_file(config_path));
    fmt::print("OK: {} campaign, engine {}, {} p-values\n",
               aqsim::experiment_name(cfg.experiment), aqsim::engine_name(cfg.engine),
               cfg.p_grid.size());
    return 0;
  } catch (const std::exception& e) {
    fmt::print(stderr, "invalid config: {}\n", e.what());
    return 1;
  }
}

int cmd_run(const std::string& config_path, int workers, int64_t seed,
            bool seed_set, bool resume, const std::string& output) {
  auto cfg = aqsim::CampaignConfig::from_json(aqsim::io::read_file(config_path));
  if (workers > 0) cfg.workers = workers;
  if (seed_set) cfg.circuit.master_seed = static_cast<uint64_t>(seed);
  if (!output.empty()) cfg.output_dir = output;
  const auto dir = aqsim::run_campaign(cfg, resume);
  fmt::print("artifacts: {}\n", dir.string());
  return 0;
}

int cmd_report(const std::string& dir, const std::string& figure) {
  aqsim::emit_report(dir, aqsim::figure_from_name(figure));
  fmt::print("report written under {}/report\n", dir);
  return 0;
}

int cmd_oracle_check(int num_trajectories) {
  using namespace aqsim;
  bool all_ok = true;
  for (int L : {6, 8, 10}) {
    CircuitSpec spec;
    spec.num_sites = L;
    spec.depth = 4;
    spec.measurement_rate = 0.4;
    spec.initial_state = InitialState::all_occupied();
    spec.master_seed = 20260801;
    const CircuitInstance inst = build_instance(spec, 0);
    MpsOptions opts;
    opts.max_bond = 2 << (L / 2);  // 2^(L/2+1): headroom for swap routing
    opts.truncation_cutoff = 1e-14;
    int outcome_mismatches = 0;
    double worst_overlap = 1.0;
    double worst_flag_violation = 0.0;
    for (int traj = 0; traj < num_trajectories; ++traj) {
      auto [sv_res, sv_state] = run_trajectory_sv_with_state(inst, traj);
      MpsBackend<double> backend(inst, opts);
      TrajectoryResult mps_res = run_trajectory(inst, traj, backend);
      if (sv_res.records.size() != mps_res.records.size()) {
        ++outcome_mismatches;
      } else {
        for (std::size_t i = 0; i < sv_res.records.size(); ++i) {
          if (sv_res.records[i].outcome != mps_res.records[i].outcome) {
            ++outcome_mismatches;
            break;
          }
        }
      }
      const PureState mps_state = backend.state().to_statevector();
      std::complex<double> ov{0, 0};
      for (std::size_t k = 0; k < sv_state.amps.size(); ++k) {
        ov += std::conj(sv_state.amps[k]) * mps_state.amps[k];
      }
      worst_overlap = std::min(worst_overlap, std::abs(ov));
      // flag-state consistency on the dense state
      const auto& flags = sv_res.flag_history.back();
      for (int i = 0; i < L; ++i) {
        if (!flags[i]) {
          worst_flag_violation = std::max(worst_flag_violation,
                                          occupation_expectation(sv_state, i));
        }
      }
    }
    const bool ok = outcome_mismatches == 0 && worst_overlap > 1.0 - 1e-8 &&
                    worst_flag_violation < 1e-10;
    all_ok = all_ok && ok;
    fmt::print("[{}] L={}: {} trajectories, outcome mismatches {}, min overlap "
               "{:.3e} from 1, max inactive-site occupation {:.3e}\n",
               ok ? "PASS" : "FAIL", L, num_trajectories, outcome_mismatches,
               1.0 - worst_overlap, worst_flag_violation);
  }
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptive-circuit trajectory simulator"};
  app.require_subcommand(1);

  std::string config_path, output_dir, report_dir, figure;
  int workers = 0;
  int64_t seed = 0;
  bool seed_set = false, no_resume = false;
  int oracle_traj = 50;

  auto* run = app.add_subcommand("run", "run a campaign from a JSON config");
  run->add_option("--config", config_path, "campaign config path")->required();
  run->add_option("--workers", workers, "worker threads (default: all cores)");
  auto* seed_opt = run->add_option("--seed", seed, "override master seed");
  run->add_flag("--no-resume", no_resume, "ignore previously completed units");
  run->add_option("--output", output_dir, "override output directory");

  auto* validate = app.add_subcommand("validate-config", "check a config file");
  validate->add_option("--config", config_path, "campaign config path")->required();

  auto* report = app.add_subcommand("report", "render a figure from artifacts");
  report->add_option("--dir", report_dir, "campaign artifact directory")->required();
  report->add_option("--figure", figure,
                     "one of fig2, fig3a, fig3b, fig4b, fig4c, fig5, figS1, figS2")
      ->required();

  auto* oracle = app.add_subcommand("oracle-check",
                                    "small-size cross-engine consistency battery");
  oracle->add_option("--trajectories", oracle_traj, "trajectories per size");

  CLI11_PARSE(app, argc, argv);
  seed_set = seed_opt->count() > 0;

  try {
    if (run->parsed()) {
      return cmd_run(config_path, workers, seed, seed_set, !no_resume, output_dir);
    }
    if (validate->parsed()) return cmd_validate(config_path);
    if (report->parsed()) return cmd_report(report_dir, figure);
    if (oracle->parsed()) return cmd_oracle_check(oracle_traj);
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
