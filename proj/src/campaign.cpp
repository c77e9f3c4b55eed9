#include "aqsim/campaign.hpp"

#include <fmt/format.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <nlohmann/json.hpp>
#include <numeric>
#include <thread>

#include "aqsim/flags.hpp"
#include "aqsim/io.hpp"
#include "aqsim/observables.hpp"
#include "aqsim/statevector.hpp"
#include "aqsim/tomography.hpp"

namespace aqsim {

using nlohmann::json;
namespace fs = std::filesystem;

std::string experiment_name(ExperimentKind e) {
  switch (e) {
    case ExperimentKind::classical_dp: return "classical_dp";
    case ExperimentKind::absorbing_profile: return "absorbing_profile";
    case ExperimentKind::absorbing_exponents: return "absorbing_exponents";
    case ExperimentKind::mipt_scan: return "mipt_scan";
    case ExperimentKind::tomography_pipeline: return "tomography_pipeline";
    case ExperimentKind::convergence_check: return "convergence_check";
  }
  return "?";
}

ExperimentKind experiment_from_name(const std::string& name) {
  for (auto e : {ExperimentKind::classical_dp, ExperimentKind::absorbing_profile,
                 ExperimentKind::absorbing_exponents, ExperimentKind::mipt_scan,
                 ExperimentKind::tomography_pipeline,
                 ExperimentKind::convergence_check}) {
    if (experiment_name(e) == name) return e;
  }
  throw std::invalid_argument(fmt::format("unknown experiment '{}'", name));
}

std::string engine_name(EngineKind e) {
  switch (e) {
    case EngineKind::statevector: return "statevector";
    case EngineKind::mps: return "mps";
    case EngineKind::flags: return "flags";
  }
  return "?";
}

namespace {

EngineKind engine_from_name(const std::string& name) {
  for (auto e : {EngineKind::statevector, EngineKind::mps, EngineKind::flags}) {
    if (engine_name(e) == name) return e;
  }
  throw std::invalid_argument(fmt::format("unknown engine '{}'", name));
}

void reject_unknown(const json& j, std::initializer_list<const char*> known,
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
          fmt::format("unknown config field '{}{}'", path, it.key()));
    }
  }
}

}  // namespace

int CampaignConfig::depth_for(double p) const {
  const auto it = depth_by_p.find(io::format_double(p));
  return it != depth_by_p.end() ? it->second : circuit.depth;
}

void CampaignConfig::validate() const {
  circuit.validate();
  if (experiment != ExperimentKind::classical_dp && p_grid.empty()) {
    throw std::invalid_argument("p_grid must be non-empty");
  }
  for (double p : p_grid) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument(fmt::format("p_grid value {} outside [0,1]", p));
    }
  }
  if (circuits_per_p < 1 || trajectories_per_circuit < 1) {
    throw std::invalid_argument("circuit/trajectory budgets must be positive");
  }
  if (output_dir.empty()) {
    throw std::invalid_argument("output_dir must be set");
  }
  mps.validate();
  if (engine == EngineKind::statevector && circuit.num_sites > PureState::kMaxSites) {
    throw std::invalid_argument(
        fmt::format("statevector engine refuses num_sites {} > {}",
                    circuit.num_sites, PureState::kMaxSites));
  }
  if (engine == EngineKind::mps || experiment == ExperimentKind::convergence_check) {
    int max_bond = mps.max_bond;
    for (int b : convergence_bonds) max_bond = std::max(max_bond, b);
    const int workers_eff = workers > 0
                                ? workers
                                : static_cast<int>(std::thread::hardware_concurrency());
    const double bytes = static_cast<double>(workers_eff) * circuit.num_sites * 2.0 *
                         max_bond * max_bond * 16.0 * 6.0;  // tensors + workspaces
    if (bytes > memory_cap_mb * 1024.0 * 1024.0) {
      throw std::invalid_argument(
          fmt::format("estimated MPS memory {:.0f} MB exceeds cap {} MB",
                      bytes / 1048576.0, memory_cap_mb));
    }
  }
  for (int a : entropy_alphas) {
    if (a < 1 || a > 4) {
      throw std::invalid_argument("entropy_alphas must lie in {1,2,3,4}");
    }
  }
  for (int s : entropy_subsystem) {
    if (s < 0 || s >= circuit.num_sites) {
      throw std::invalid_argument("entropy_subsystem site out of range");
    }
  }
}

std::string CampaignConfig::to_json() const {
  json j;
  j["schema_version"] = 1;
  j["experiment"] = experiment_name(experiment);
  j["circuit"] = json::parse(circuit_spec_to_json(circuit));
  j["p_grid"] = p_grid;
  if (!depth_by_p.empty()) j["depth_by_p"] = depth_by_p;
  j["circuits_per_p"] = circuits_per_p;
  j["trajectories_per_circuit"] = trajectories_per_circuit;
  j["engine"] = engine_name(engine);
  j["mps"] = {{"max_bond", mps.max_bond},
              {"truncation_cutoff", mps.truncation_cutoff},
              {"boundary_strategy",
               mps.boundary_strategy == BoundaryStrategy::swap_routing
                   ? "swap_routing"
                   : "open_override"},
              {"precision", mps.precision == MpsPrecision::f64 ? "f64" : "f32"}};
  j["flags"] = {{"realizations", flags.realizations},
                {"all_active_realizations", flags.all_active_realizations},
                {"chunk_size", flags.chunk_size},
                {"scan",
                 {{"p_min", flags.scan.p_min},
                  {"p_max", flags.scan.p_max},
                  {"step", flags.scan.step},
                  {"realizations", flags.scan.realizations}}}};
  j["analysis"] = {{"fit_window", {analysis.fit_window_lo, analysis.fit_window_hi}},
                   {"front_threshold", analysis.front_threshold},
                   {"bootstrap_resamples", analysis.bootstrap_resamples},
                   {"bootstrap_level", analysis.bootstrap_level}};
  j["tomography"] = {{"shots_per_setting", tomography.shots_per_setting},
                     {"analytic", tomography.analytic},
                     {"svd_rel_cutoff", tomography.svd_rel_cutoff},
                     {"error_rates",
                      {{"eps_1q", tomography.rates.eps_1q},
                       {"eps_2q", tomography.rates.eps_2q},
                       {"eps_ro", tomography.rates.eps_ro}}}};
  j["entropy_subsystem"] = entropy_subsystem;
  j["entropy_alphas"] = entropy_alphas;
  j["convergence_bonds"] = convergence_bonds;
  j["output_dir"] = output_dir;
  j["workers"] = workers;
  j["memory_cap_mb"] = memory_cap_mb;
  return j.dump(2);
}

CampaignConfig CampaignConfig::from_json(const std::string& text) {
  const json j = json::parse(text);
  reject_unknown(j,
                 {"schema_version", "experiment", "circuit", "p_grid", "depth_by_p",
                  "circuits_per_p", "trajectories_per_circuit", "engine", "mps",
                  "flags", "analysis", "tomography", "entropy_subsystem",
                  "entropy_alphas", "convergence_bonds", "output_dir", "workers",
                  "memory_cap_mb"},
                 "");
  if (j.at("schema_version").get<int>() != 1) {
    throw std::invalid_argument("unsupported config schema_version");
  }
  CampaignConfig c;
  c.experiment = experiment_from_name(j.at("experiment").get<std::string>());
  c.circuit = circuit_spec_from_json(j.at("circuit").dump());
  c.p_grid = j.value("p_grid", std::vector<double>{});
  if (j.contains("depth_by_p")) {
    c.depth_by_p = j.at("depth_by_p").get<std::map<std::string, int>>();
  }
  c.circuits_per_p = j.value("circuits_per_p", 1);
  c.trajectories_per_circuit = j.value("trajectories_per_circuit", 1);
  c.engine = engine_from_name(j.value("engine", std::string{"statevector"}));
  if (j.contains("mps")) {
    const json& m = j.at("mps");
    reject_unknown(m, {"max_bond", "truncation_cutoff", "boundary_strategy",
                       "precision"},
                   "mps.");
    c.mps.max_bond = m.value("max_bond", 64);
    c.mps.truncation_cutoff = m.value("truncation_cutoff", 1e-10);
    const std::string bs = m.value("boundary_strategy", std::string{"swap_routing"});
    if (bs == "swap_routing") {
      c.mps.boundary_strategy = BoundaryStrategy::swap_routing;
    } else if (bs == "open_override") {
      c.mps.boundary_strategy = BoundaryStrategy::open_override;
    } else {
      throw std::invalid_argument(fmt::format("unknown boundary_strategy '{}'", bs));
    }
    const std::string prec = m.value("precision", std::string{"f64"});
    if (prec == "f64") {
      c.mps.precision = MpsPrecision::f64;
    } else if (prec == "f32") {
      c.mps.precision = MpsPrecision::f32;
    } else {
      throw std::invalid_argument(fmt::format("unknown mps precision '{}'", prec));
    }
  }
  if (j.contains("flags")) {
    const json& f = j.at("flags");
    reject_unknown(f, {"realizations", "all_active_realizations", "chunk_size", "scan"},
                   "flags.");
    c.flags.realizations = f.value("realizations", int64_t{100000});
    c.flags.all_active_realizations =
        f.value("all_active_realizations", int64_t{20000});
    c.flags.chunk_size = f.value("chunk_size", 1000);
    if (f.contains("scan")) {
      const json& s = f.at("scan");
      reject_unknown(s, {"p_min", "p_max", "step", "realizations"}, "flags.scan.");
      c.flags.scan.p_min = s.value("p_min", 0.30);
      c.flags.scan.p_max = s.value("p_max", 0.40);
      c.flags.scan.step = s.value("step", 0.005);
      c.flags.scan.realizations = s.value("realizations", int64_t{20000});
    }
  }
  if (j.contains("analysis")) {
    const json& a = j.at("analysis");
    reject_unknown(a, {"fit_window", "front_threshold", "bootstrap_resamples",
                       "bootstrap_level"},
                   "analysis.");
    if (a.contains("fit_window")) {
      const auto w = a.at("fit_window").get<std::vector<double>>();
      if (w.size() != 2) throw std::invalid_argument("fit_window must be [lo, hi]");
      c.analysis.fit_window_lo = w[0];
      c.analysis.fit_window_hi = w[1];
    }
    c.analysis.front_threshold = a.value("front_threshold", 0.01);
    c.analysis.bootstrap_resamples = a.value("bootstrap_resamples", 1000);
    c.analysis.bootstrap_level = a.value("bootstrap_level", 0.90);
  }
  if (j.contains("tomography")) {
    const json& t = j.at("tomography");
    reject_unknown(t, {"shots_per_setting", "analytic", "svd_rel_cutoff",
                       "error_rates"},
                   "tomography.");
    c.tomography.shots_per_setting = t.value("shots_per_setting", 300);
    c.tomography.analytic = t.value("analytic", false);
    c.tomography.svd_rel_cutoff = t.value("svd_rel_cutoff", 1e-6);
    if (t.contains("error_rates")) {
      const json& r = t.at("error_rates");
      reject_unknown(r, {"eps_1q", "eps_2q", "eps_ro"}, "tomography.error_rates.");
      c.tomography.rates.eps_1q = r.value("eps_1q", 0.0);
      c.tomography.rates.eps_2q = r.value("eps_2q", 0.0);
      c.tomography.rates.eps_ro = r.value("eps_ro", 0.0);
    }
  }
  c.entropy_subsystem =
      j.value("entropy_subsystem", std::vector<int>{0, 1, 2});
  c.entropy_alphas = j.value("entropy_alphas", std::vector<int>{1, 2, 3, 4});
  c.convergence_bonds = j.value("convergence_bonds", std::vector<int>{64, 128});
  c.output_dir = j.at("output_dir").get<std::string>();
  c.workers = j.value("workers", 0);
  c.memory_cap_mb = j.value("memory_cap_mb", 8192.0);
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// deterministic unit runner with file-backed resume
// ---------------------------------------------------------------------------

namespace {

struct Unit {
  std::string id;
  std::function<json()> compute;
};

std::map<std::string, json> run_units(const std::vector<Unit>& units,
                                      const fs::path& unit_dir, int workers,
                                      bool resume) {
  fs::create_directories(unit_dir);
  std::map<std::string, json> results;
  std::vector<const Unit*> pending;
  for (const Unit& u : units) {
    const fs::path path = unit_dir / (u.id + ".json");
    if (resume && fs::exists(path)) {
      results.emplace(u.id, json::parse(io::read_file(path)));
    } else {
      pending.push_back(&u);
    }
  }
  if (!pending.empty()) {
    if (workers <= 0) {
      if (const char* env = std::getenv("AQSIM_WORKERS")) workers = std::atoi(env);
    }
    if (workers <= 0) {
      workers = static_cast<int>(std::thread::hardware_concurrency());
    }
    workers = std::max(1, std::min<int>(workers, static_cast<int>(pending.size())));
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::mutex mu;
    std::exception_ptr error;
    auto worker = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= pending.size()) return;
        try {
          const Unit& u = *pending[i];
          json payload = u.compute();
          io::atomic_write(unit_dir / (u.id + ".json"), payload.dump());
          std::lock_guard<std::mutex> lock(mu);
          results.emplace(u.id, std::move(payload));
          const std::size_t d = ++done;
          if (d % 50 == 0 || d == pending.size()) {
            fmt::print(stderr, "  units {}/{} done\n", d, pending.size());
          }
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!error) error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
  }
  return results;
}

std::string unit_id(const std::string& tag, int a, int b) {
  return fmt::format("{}_{:03d}_{:06d}", tag, a, b);
}

CircuitSpec spec_for(const CampaignConfig& cfg, double p) {
  CircuitSpec spec = cfg.circuit;
  spec.measurement_rate = p;
  spec.depth = cfg.depth_for(p);
  return spec;
}

json fit_to_json(const FitResult& f) {
  return json{{"exponent", f.exponent},   {"stderr", f.stderr_exponent},
              {"intercept", f.intercept}, {"window", {f.window_lo, f.window_hi}},
              {"r_squared", f.r_squared}, {"n_points", f.n_points}};
}

json estimate_to_json(const CriticalPointEstimate& e) {
  return json{{"p_c", e.p_c},
              {"ci_low", e.ci_low},
              {"ci_high", e.ci_high},
              {"method", e.method},
              {"boundary_flag", e.boundary_flag}};
}

// ---------------------------------------------------------------------------
// classical_dp
// ---------------------------------------------------------------------------

json flags_chunk_payload(int num_sites, int depth, double p, uint64_t batch_seed,
                         int64_t first, int64_t count, const FlagVector& initial,
                         std::optional<int> seed_site) {
  FlagStatsAccumulator acc(num_sites, depth, seed_site);
  for (int64_t r = 0; r < count; ++r) {
    acc.accumulate(p, chain_seed(batch_seed, kTagRealization, first + r), initial);
  }
  const FlagEnsembleStats st = acc.finish();
  json out;
  out["count"] = count;
  out["mean_n"] = st.mean_particles;
  out["survival"] = st.survival;
  if (st.mean_square_spread) out["mean_r2"] = *st.mean_square_spread;
  out["density"] = st.density;
  return out;
}

struct FlagsBatchStats {
  std::vector<double> t, n_mean, n_sem, survival, r2, density;
  std::vector<std::vector<double>> chunk_curves;  // per-chunk mean N(t)
  int64_t realizations = 0;
};

FlagsBatchStats combine_flag_chunks(const std::map<std::string, json>& units,
                                    const std::string& tag, int point_index,
                                    int n_chunks, int depth) {
  FlagsBatchStats out;
  out.t.resize(depth + 1);
  std::iota(out.t.begin(), out.t.end(), 0.0);
  out.n_mean.assign(depth + 1, 0.0);
  out.n_sem.assign(depth + 1, 0.0);
  out.survival.assign(depth + 1, 0.0);
  out.r2.assign(depth + 1, 0.0);
  out.density.assign(depth + 1, 0.0);
  std::vector<double> surv_weight(depth + 1, 0.0);
  std::vector<double> sq(depth + 1, 0.0);
  for (int chunk = 0; chunk < n_chunks; ++chunk) {
    const json& u = units.at(unit_id(tag, point_index, chunk));
    const auto count = u.at("count").get<double>();
    const auto mean_n = u.at("mean_n").get<std::vector<double>>();
    const auto survival = u.at("survival").get<std::vector<double>>();
    const auto density = u.at("density").get<std::vector<double>>();
    std::vector<double> mean_r2;
    if (u.contains("mean_r2")) mean_r2 = u.at("mean_r2").get<std::vector<double>>();
    out.chunk_curves.push_back(mean_n);
    for (int t = 0; t <= depth; ++t) {
      out.n_mean[t] += count * mean_n[t];
      sq[t] += count * mean_n[t] * mean_n[t];
      out.survival[t] += count * survival[t];
      out.density[t] += count * density[t];
      if (!mean_r2.empty() && survival[t] > 0) {
        // chunk reports spread averaged over its survivors
        out.r2[t] += count * survival[t] * mean_r2[t];
        surv_weight[t] += count * survival[t];
      }
    }
    out.realizations += static_cast<int64_t>(count);
  }
  const auto n = static_cast<double>(out.realizations);
  const auto n_chunks_d = static_cast<double>(n_chunks);
  for (int t = 0; t <= depth; ++t) {
    out.n_mean[t] /= n;
    out.survival[t] /= n;
    out.density[t] /= n;
    if (surv_weight[t] > 0) out.r2[t] /= surv_weight[t];
    // between-chunk spread gives the SEM of the grand mean
    const double chunk_mean_sq = sq[t] / n;
    const double var_between =
        std::max(0.0, chunk_mean_sq - out.n_mean[t] * out.n_mean[t]);
    out.n_sem[t] = n_chunks > 1
                       ? std::sqrt(var_between / std::max(1.0, n_chunks_d - 1))
                       : 0.0;
  }
  return out;
}

fs::path run_classical_dp(const CampaignConfig& cfg, const fs::path& dir,
                          bool resume) {
  const int L = cfg.circuit.num_sites;
  const int depth = cfg.circuit.depth;
  const int seed_site = L / 2;
  FlagVector seed_initial(L, 0);
  seed_initial[seed_site] = 1;
  FlagVector full_initial(L, 1);
  const int chunk = cfg.flags.chunk_size;

  // phase 1: p-scan, single seed, log-log linearity of <N(t)>
  std::vector<double> scan_ps;
  for (double p = cfg.flags.scan.p_min; p <= cfg.flags.scan.p_max + 1e-12;
       p += cfg.flags.scan.step) {
    scan_ps.push_back(p);
  }
  const int scan_chunks =
      static_cast<int>((cfg.flags.scan.realizations + chunk - 1) / chunk);
  std::vector<Unit> scan_units;
  for (int ip = 0; ip < static_cast<int>(scan_ps.size()); ++ip) {
    const double p = scan_ps[ip];
    for (int c = 0; c < scan_chunks; ++c) {
      const int64_t first = static_cast<int64_t>(c) * chunk;
      const int64_t count =
          std::min<int64_t>(chunk, cfg.flags.scan.realizations - first);
      const uint64_t batch_seed =
          chain_seed(cfg.circuit.master_seed, kTagScan, 1000 + ip);
      scan_units.push_back(Unit{
          unit_id("scan", ip, c), [=, &cfg]() {
            return flags_chunk_payload(L, depth, p, batch_seed, first, count,
                                       seed_initial, seed_site);
          }});
    }
  }
  auto scan_results = run_units(scan_units, dir / "units", cfg.workers, resume);

  std::vector<LinearityScanPoint> scan_points;
  io::CsvTable scan_csv;
  scan_csv.header = {"p", "r_squared", "theta_fit"};
  for (int ip = 0; ip < static_cast<int>(scan_ps.size()); ++ip) {
    const FlagsBatchStats st =
        combine_flag_chunks(scan_results, "scan", ip, scan_chunks, depth);
    LinearityScanPoint pt;
    pt.p = scan_ps[ip];
    pt.chunk_curves = st.chunk_curves;
    scan_points.push_back(std::move(pt));
    const FitResult fit =
        fit_power_law(st.t, st.n_mean, {}, cfg.analysis.fit_window_lo,
                      cfg.analysis.fit_window_hi);
    scan_csv.rows.push_back({scan_ps[ip], fit.r_squared, fit.exponent});
  }
  io::write_csv(dir / "scan.csv", scan_csv);
  const CriticalPointEstimate pc = locate_loglog_linearity_peak(
      scan_points, cfg.analysis.fit_window_lo, cfg.analysis.fit_window_hi,
      cfg.analysis.bootstrap_resamples, cfg.analysis.bootstrap_level,
      cfg.circuit.master_seed);
  io::atomic_write(dir / "critical.json", estimate_to_json(pc).dump(2));

  // phase 2: exponents at the located critical point
  // snap to the scan grid so unit ids stay stable across resumes
  double p_c = pc.p_c;
  {
    double best = 1e9;
    for (double p : scan_ps) {
      if (std::abs(p - pc.p_c) < best) {
        best = std::abs(p - pc.p_c);
        p_c = p;
      }
    }
  }
  const int main_chunks =
      static_cast<int>((cfg.flags.realizations + chunk - 1) / chunk);
  const int full_chunks =
      static_cast<int>((cfg.flags.all_active_realizations + chunk - 1) / chunk);
  std::vector<Unit> main_units;
  const uint64_t main_seed = chain_seed(cfg.circuit.master_seed, kTagScan, 1);
  const uint64_t full_seed = chain_seed(cfg.circuit.master_seed, kTagScan, 2);
  for (int c = 0; c < main_chunks; ++c) {
    const int64_t first = static_cast<int64_t>(c) * chunk;
    const int64_t count = std::min<int64_t>(chunk, cfg.flags.realizations - first);
    main_units.push_back(Unit{unit_id("main", 0, c), [=]() {
                                return flags_chunk_payload(L, depth, p_c, main_seed,
                                                           first, count,
                                                           seed_initial, seed_site);
                              }});
  }
  for (int c = 0; c < full_chunks; ++c) {
    const int64_t first = static_cast<int64_t>(c) * chunk;
    const int64_t count =
        std::min<int64_t>(chunk, cfg.flags.all_active_realizations - first);
    main_units.push_back(Unit{unit_id("full", 0, c), [=]() {
                                return flags_chunk_payload(L, depth, p_c, full_seed,
                                                           first, count, full_initial,
                                                           std::nullopt);
                              }});
  }
  auto main_results = run_units(main_units, dir / "units", cfg.workers, resume);

  const FlagsBatchStats seed_stats =
      combine_flag_chunks(main_results, "main", 0, main_chunks, depth);
  const FlagsBatchStats full_stats =
      combine_flag_chunks(main_results, "full", 0, full_chunks, depth);

  io::CsvTable seed_csv;
  seed_csv.header = {"t", "n_mean", "n_sem", "survival", "mean_square_spread"};
  for (int t = 0; t <= depth; ++t) {
    seed_csv.rows.push_back({seed_stats.t[t], seed_stats.n_mean[t],
                             seed_stats.n_sem[t], seed_stats.survival[t],
                             seed_stats.r2[t]});
  }
  io::write_csv(dir / "series_seed.csv", seed_csv);

  io::CsvTable full_csv;
  full_csv.header = {"t", "n_mean", "n_sem", "density"};
  for (int t = 0; t <= depth; ++t) {
    full_csv.rows.push_back({full_stats.t[t], full_stats.n_mean[t],
                             full_stats.n_sem[t], full_stats.density[t]});
  }
  io::write_csv(dir / "series_full.csv", full_csv);

  const double lo = cfg.analysis.fit_window_lo;
  const double hi = cfg.analysis.fit_window_hi;
  const FitResult theta_fit =
      fit_power_law(seed_stats.t, seed_stats.n_mean, seed_stats.n_sem, lo, hi);
  const FitResult alpha_fit =
      fit_power_law(full_stats.t, full_stats.density, {}, lo, hi);
  // spread fit only over surviving-dominated range
  std::vector<double> ts, r2s;
  for (int t = 1; t <= depth; ++t) {
    if (seed_stats.r2[t] > 0) {
      ts.push_back(seed_stats.t[t]);
      r2s.push_back(seed_stats.r2[t]);
    }
  }
  const FitResult spread_fit = fit_power_law(ts, r2s, {}, lo, hi);
  const double z = 2.0 / spread_fit.exponent;
  const double z_err = 2.0 * spread_fit.stderr_exponent /
                       (spread_fit.exponent * spread_fit.exponent);

  json expo;
  expo["p_c"] = estimate_to_json(pc);
  expo["p_c_used"] = p_c;
  expo["theta"] = fit_to_json(theta_fit);
  expo["alpha"] = fit_to_json(alpha_fit);
  expo["alpha"]["alpha"] = -alpha_fit.exponent;  // density decays as t^-alpha
  expo["z"] = fit_to_json(spread_fit);
  expo["z"]["z"] = z;
  expo["z"]["z_stderr"] = z_err;
  expo["realizations"] = {{"scan_per_p", cfg.flags.scan.realizations},
                          {"seed", seed_stats.realizations},
                          {"all_active", full_stats.realizations}};
  io::atomic_write(dir / "exponents.json", expo.dump(2));
  return dir;
}

// ---------------------------------------------------------------------------
// quantum ensembles (statevector / mps)
// ---------------------------------------------------------------------------

json trajectory_batch_payload(const CampaignConfig& cfg, const CircuitSpec& spec,
                              int circuit_index) {
  const CircuitInstance inst = build_instance(spec, circuit_index);
  const int L = spec.num_sites;
  OccupationAccumulator acc(L, spec.depth);
  int64_t survived = 0;
  int64_t sum_1q = 0, sum_2q = 0, sum_ro = 0;
  double discarded = 0.0;
  std::vector<double> mean_curve(spec.depth + 1, 0.0);
  for (int traj = 0; traj < cfg.trajectories_per_circuit; ++traj) {
    TrajectoryResult res;
    if (cfg.engine == EngineKind::mps) {
      res = run_trajectory_mps(inst, traj, cfg.mps);
    } else {
      res = run_trajectory_sv(inst, traj);
    }
    acc.add(res);
    survived += res.survived ? 1 : 0;
    sum_1q += res.counts.n_1q;
    sum_2q += res.counts.n_2q;
    sum_ro += res.counts.n_ro;
    discarded += res.total_discarded_weight;
    for (int t = 0; t <= spec.depth; ++t) mean_curve[t] += res.total_particles(t);
  }
  const auto nt = static_cast<double>(cfg.trajectories_per_circuit);
  for (double& v : mean_curve) v /= nt;
  json out;
  out["circuit"] = circuit_index;
  out["acc"] = acc.pack();
  out["mean_n_t"] = mean_curve;
  out["survived_fraction"] = survived / nt;
  out["mean_n_1q"] = sum_1q / nt;
  out["mean_n_2q"] = sum_2q / nt;
  out["mean_n_ro"] = sum_ro / nt;
  out["mean_discarded"] = discarded / nt;
  return out;
}

fs::path run_absorbing(const CampaignConfig& cfg, const fs::path& dir, bool resume,
                       bool with_exponents) {
  std::vector<Unit> units;
  for (int ip = 0; ip < static_cast<int>(cfg.p_grid.size()); ++ip) {
    const CircuitSpec spec = spec_for(cfg, cfg.p_grid[ip]);
    for (int c = 0; c < cfg.circuits_per_p; ++c) {
      units.push_back(Unit{unit_id("run", ip, c), [&cfg, spec, c]() {
                             return trajectory_batch_payload(cfg, spec, c);
                           }});
    }
  }
  auto results = run_units(units, dir / "units", cfg.workers, resume);

  json fits = json::object();
  for (int ip = 0; ip < static_cast<int>(cfg.p_grid.size()); ++ip) {
    const double p = cfg.p_grid[ip];
    const CircuitSpec spec = spec_for(cfg, p);
    OccupationAccumulator acc(spec.num_sites, spec.depth);
    std::string records;
    for (int c = 0; c < cfg.circuits_per_p; ++c) {
      const json& u = results.at(unit_id("run", ip, c));
      const auto packed = u.at("acc").get<std::vector<double>>();
      acc.merge(OccupationAccumulator::unpack(spec.num_sites, spec.depth, packed));
      json line = u;
      line.erase("acc");
      records += line.dump();
      records += '\n';
    }
    io::atomic_write(dir / fmt::format("records_p{:03d}.jsonl", ip), records);
    const auto [grid, series] = acc.finish();

    io::CsvTable grid_csv;
    grid_csv.header = {"t"};
    for (int i = 0; i < spec.num_sites; ++i) {
      grid_csv.header.push_back(fmt::format("site_{}", i));
    }
    for (int t = 0; t <= spec.depth; ++t) {
      std::vector<double> row{static_cast<double>(t)};
      for (int i = 0; i < spec.num_sites; ++i) row.push_back(grid.at(t, i));
      grid_csv.rows.push_back(std::move(row));
    }
    io::write_csv(dir / fmt::format("grid_p{:03d}.csv", ip), grid_csv);

    io::CsvTable series_csv;
    series_csv.header = {"t", "n_mean", "n_sem"};
    for (int t = 0; t <= spec.depth; ++t) {
      series_csv.rows.push_back({series.t[t], series.n[t], series.sem[t]});
    }
    io::write_csv(dir / fmt::format("series_p{:03d}.csv", ip), series_csv);

    if (with_exponents) {
      json f;
      f["p"] = p;
      try {
        const FitResult fit =
            fit_power_law(series.t, series.n, series.sem, cfg.analysis.fit_window_lo,
                          cfg.analysis.fit_window_hi);
        f["n_t_fit"] = fit_to_json(fit);
      } catch (const std::exception& e) {
        f["n_t_fit_error"] = e.what();
      }
      if (cfg.circuit.initial_state.kind == InitialStateKind::single_seed) {
        const int seed_site = cfg.circuit.initial_state.seed_site;
        for (auto method : {SpreadingMethod::threshold, SpreadingMethod::mean_square}) {
          const char* name =
              method == SpreadingMethod::threshold ? "z_threshold" : "z_mean_square";
          try {
            const auto [front, fit] = spreading_exponent(
                grid, seed_site, method, cfg.analysis.front_threshold,
                cfg.analysis.fit_window_lo, cfg.analysis.fit_window_hi);
            json zf = fit_to_json(fit);
            zf["z"] = dynamical_exponent_from_fit(fit, method);
            zf["z_stderr"] = dynamical_exponent_stderr(fit, method);
            f[name] = zf;
            if (method == SpreadingMethod::mean_square) {
              io::CsvTable front_csv;
              front_csv.header = {"t", "radius", "mean_square"};
              for (std::size_t i = 0; i < front.t.size(); ++i) {
                front_csv.rows.push_back(
                    {front.t[i], front.radius[i], front.mean_square[i]});
              }
              io::write_csv(dir / fmt::format("front_p{:03d}.csv", ip), front_csv);
            }
          } catch (const std::exception& e) {
            f[fmt::format("{}_error", name)] = e.what();
          }
        }
      }
      fits[io::format_double(p)] = f;
    }
  }
  if (with_exponents) io::atomic_write(dir / "fits.json", fits.dump(2));
  return dir;
}

// ---------------------------------------------------------------------------
// mipt_scan / tomography_pipeline
// ---------------------------------------------------------------------------

json entropy_batch_payload(const CampaignConfig& cfg, const CircuitSpec& spec,
                           int circuit_index, bool tomographic) {
  const CircuitInstance inst = build_instance(spec, circuit_index);
  TrajectoryOptions topt;
  topt.record_profile = false;
  topt.record_flag_history = false;
  json samples = json::array();
  AssignmentMatrix am;
  if (tomographic && spec.noise.has_readout_noise()) {
    am = build_assignment_matrix(spec.noise,
                                 static_cast<int>(cfg.entropy_subsystem.size()));
  }
  for (int traj = 0; traj < cfg.trajectories_per_circuit; ++traj) {
    auto [res, state] = run_trajectory_sv_with_state(inst, traj, topt);
    const DensityMatrix rho =
        reduced_density_matrix(state, cfg.entropy_subsystem);
    json line;
    line["circuit"] = circuit_index;
    line["trajectory"] = traj;
    line["n_1q"] = res.counts.n_1q;
    line["n_2q"] = res.counts.n_2q;
    line["n_ro"] = res.counts.n_ro;
    if (!tomographic) {
      json s = json::object();
      for (int alpha : cfg.entropy_alphas) {
        s[std::to_string(alpha)] = renyi_entropy(rho, alpha).value;
      }
      line["s"] = std::move(s);
    } else {
      const uint64_t shot_seed =
          chain_seed(inst.instance_seed, kTagTomography, 7000000 + traj);
      ShotTable table =
          cfg.tomography.analytic
              ? sample_shots_analytic(rho, spec.noise)
              : sample_shots(rho, cfg.tomography.shots_per_setting, spec.noise,
                             shot_seed);
      const DensityMatrix raw = psd_project(linear_inversion(table));
      json s_raw = json::object();
      for (int alpha : cfg.entropy_alphas) {
        s_raw[std::to_string(alpha)] = renyi_entropy(raw, alpha).value;
      }
      line["raw"] = std::move(s_raw);
      DensityMatrix corrected_rho = raw;
      if (spec.noise.has_readout_noise()) {
        const ShotTable fixed =
            readout_invert_table(table, am, cfg.tomography.svd_rel_cutoff);
        corrected_rho = psd_project(linear_inversion(fixed));
      }
      json s_cor = json::object();
      for (int alpha : cfg.entropy_alphas) {
        s_cor[std::to_string(alpha)] = renyi_entropy(corrected_rho, alpha).value;
      }
      line["corrected"] = std::move(s_cor);
    }
    samples.push_back(std::move(line));
  }
  json out;
  out["circuit"] = circuit_index;
  out["samples"] = std::move(samples);
  return out;
}

fs::path run_entropy_scan(const CampaignConfig& cfg, const fs::path& dir,
                          bool resume, bool tomographic) {
  std::vector<Unit> units;
  for (int ip = 0; ip < static_cast<int>(cfg.p_grid.size()); ++ip) {
    const CircuitSpec spec = spec_for(cfg, cfg.p_grid[ip]);
    for (int c = 0; c < cfg.circuits_per_p; ++c) {
      units.push_back(Unit{unit_id("ent", ip, c), [&cfg, spec, c, tomographic]() {
                             return entropy_batch_payload(cfg, spec, c, tomographic);
                           }});
    }
  }
  auto results = run_units(units, dir / "units", cfg.workers, resume);

  const char* value_key = tomographic ? "corrected" : "s";
  // per (p, alpha): pooled samples and per-circuit grouping
  io::CsvTable stats;
  stats.header = {"p",        "alpha",      "count",       "mean",
                  "variance", "mean_ci_lo", "mean_ci_hi",  "var_ci_lo",
                  "var_ci_hi"};
  io::CsvTable counts_csv;
  counts_csv.header = {"p", "mean_n_1q", "mean_n_2q", "mean_n_ro", "median_n_ro",
                       "max_n_ro", "mean_budget"};
  json peaks = json::object();
  std::map<int, std::vector<VarianceScanPoint>> scans;  // alpha -> scan
  std::map<int, std::vector<std::pair<double, double>>> means;  // alpha -> (p, mean)
  json raw_means = json::object();

  for (int ip = 0; ip < static_cast<int>(cfg.p_grid.size()); ++ip) {
    const double p = cfg.p_grid[ip];
    std::string records;
    std::map<int, std::vector<std::vector<double>>> by_circuit;  // alpha ->
    std::map<int, std::vector<double>> pooled;
    std::map<int, std::vector<double>> pooled_raw;
    std::vector<double> n_ro_samples;
    double sum_1q = 0, sum_2q = 0, sum_ro = 0, sum_budget = 0;
    int64_t n_traj = 0;
    for (int c = 0; c < cfg.circuits_per_p; ++c) {
      const json& u = results.at(unit_id("ent", ip, c));
      std::map<int, std::vector<double>> circuit_vals;
      for (const json& line : u.at("samples")) {
        records += line.dump();
        records += '\n';
        for (int alpha : cfg.entropy_alphas) {
          const double v = line.at(value_key).at(std::to_string(alpha)).get<double>();
          circuit_vals[alpha].push_back(v);
          pooled[alpha].push_back(v);
          if (tomographic) {
            pooled_raw[alpha].push_back(
                line.at("raw").at(std::to_string(alpha)).get<double>());
          }
        }
        OperationCounts oc{line.at("n_1q").get<int64_t>(),
                           line.at("n_2q").get<int64_t>(),
                           line.at("n_ro").get<int64_t>()};
        sum_1q += static_cast<double>(oc.n_1q);
        sum_2q += static_cast<double>(oc.n_2q);
        sum_ro += static_cast<double>(oc.n_ro);
        sum_budget += error_budget(oc, cfg.tomography.rates);
        n_ro_samples.push_back(static_cast<double>(oc.n_ro));
        ++n_traj;
      }
      for (int alpha : cfg.entropy_alphas) {
        by_circuit[alpha].push_back(std::move(circuit_vals[alpha]));
      }
    }
    io::atomic_write(dir / fmt::format("samples_p{:03d}.jsonl", ip), records);
    for (int alpha : cfg.entropy_alphas) {
      const SampleStats st = aggregate_statistics(
          pooled[alpha], cfg.analysis.bootstrap_resamples,
          cfg.analysis.bootstrap_level,
          chain_seed(cfg.circuit.master_seed, kTagBootstrap, ip * 10 + alpha));
      stats.rows.push_back({p, static_cast<double>(alpha),
                            static_cast<double>(st.count), st.mean, st.variance,
                            st.mean_ci_low, st.mean_ci_high, st.var_ci_low,
                            st.var_ci_high});
      scans[alpha].push_back(VarianceScanPoint{p, by_circuit[alpha]});
      means[alpha].emplace_back(p, st.mean);
      if (tomographic) {
        double rm = 0;
        for (double v : pooled_raw[alpha]) rm += v;
        raw_means[io::format_double(p)][std::to_string(alpha)] =
            rm / pooled_raw[alpha].size();
      }
    }
    std::sort(n_ro_samples.begin(), n_ro_samples.end());
    const double median_ro =
        n_ro_samples.empty()
            ? 0.0
            : n_ro_samples[n_ro_samples.size() / 2];
    const double max_ro = n_ro_samples.empty() ? 0.0 : n_ro_samples.back();
    const auto nd = static_cast<double>(n_traj);
    counts_csv.rows.push_back({p, sum_1q / nd, sum_2q / nd, sum_ro / nd, median_ro,
                               max_ro, sum_budget / nd});
  }
  io::write_csv(dir / "stats.csv", stats);
  io::write_csv(dir / "counts.csv", counts_csv);
  if (tomographic) io::atomic_write(dir / "raw_means.json", raw_means.dump(2));

  for (int alpha : cfg.entropy_alphas) {
    if (scans[alpha].size() >= 5) {
      const CriticalPointEstimate est = locate_variance_peak(
          scans[alpha], cfg.analysis.bootstrap_resamples,
          cfg.analysis.bootstrap_level,
          chain_seed(cfg.circuit.master_seed, kTagBootstrap, 100 + alpha));
      json pj = estimate_to_json(est);
      bool monotone = true;
      for (std::size_t i = 1; i < means[alpha].size(); ++i) {
        if (means[alpha][i].second >= means[alpha][i - 1].second) monotone = false;
      }
      pj["mean_strictly_decreasing"] = monotone;
      peaks[std::to_string(alpha)] = pj;
    }
  }
  io::atomic_write(dir / "peaks.json", peaks.dump(2));

  if (tomographic) {
    // residual-entropy mitigation of the means against the p=1 reference
    int ref_ip = -1;
    for (int ip = 0; ip < static_cast<int>(cfg.p_grid.size()); ++ip) {
      if (cfg.p_grid[ip] == 1.0) ref_ip = ip;
    }
    json mitigated = json::object();
    if (ref_ip >= 0) {
      std::map<int, double> ref_mean;  // alpha -> corrected mean at p=1
      double ref_budget = 0.0;
      for (const auto& row : stats.rows) {
        if (row[0] == 1.0) ref_mean[static_cast<int>(row[1])] = row[3];
      }
      for (const auto& row : counts_csv.rows) {
        if (row[0] == 1.0) ref_budget = row[6];
      }
      for (int ip = 0; ip < static_cast<int>(cfg.p_grid.size()); ++ip) {
        const double p = cfg.p_grid[ip];
        double budget_p = 0.0;
        for (const auto& row : counts_csv.rows) {
          if (row[0] == p) budget_p = row[6];
        }
        json entry;
        for (int alpha : cfg.entropy_alphas) {
          double mean_p = 0.0;
          for (const auto& row : stats.rows) {
            if (row[0] == p && static_cast<int>(row[1]) == alpha) mean_p = row[3];
          }
          entry[std::to_string(alpha)] = residual_entropy_correct(
              mean_p, ref_mean[alpha], budget_p, ref_budget);
        }
        mitigated[io::format_double(p)] = entry;
      }
    }
    io::atomic_write(dir / "mitigated_means.json", mitigated.dump(2));
  }
  return dir;
}

// ---------------------------------------------------------------------------
// convergence_check
// ---------------------------------------------------------------------------

json convergence_batch_payload(const CampaignConfig& cfg, const CircuitSpec& spec,
                               int max_bond, int circuit_index) {
  const CircuitInstance inst = build_instance(spec, circuit_index);
  MpsOptions opts = cfg.mps;
  opts.max_bond = max_bond;
  const int L = spec.num_sites;
  OccupationAccumulator acc(L, spec.depth);
  std::vector<double> s1_sum(L - 1, 0.0), s2_sum(L - 1, 0.0);
  std::vector<double> s1_sq(L - 1, 0.0), s2_sq(L - 1, 0.0);
  for (int traj = 0; traj < cfg.trajectories_per_circuit; ++traj) {
    const MpsTrajectoryOutput out = run_trajectory_mps_with_entropies(inst, traj, opts);
    acc.add(out.result);
    for (int b = 0; b < L - 1; ++b) {
      s1_sum[b] += out.final_bipartite_entropy_s1[b];
      s2_sum[b] += out.final_bipartite_entropy_s2[b];
      s1_sq[b] += out.final_bipartite_entropy_s1[b] * out.final_bipartite_entropy_s1[b];
      s2_sq[b] += out.final_bipartite_entropy_s2[b] * out.final_bipartite_entropy_s2[b];
    }
  }
  json out;
  out["circuit"] = circuit_index;
  out["acc"] = acc.pack();
  out["s1_sum"] = s1_sum;
  out["s2_sum"] = s2_sum;
  out["s1_sq"] = s1_sq;
  out["s2_sq"] = s2_sq;
  out["trajectories"] = cfg.trajectories_per_circuit;
  return out;
}

fs::path run_convergence(const CampaignConfig& cfg, const fs::path& dir,
                         bool resume) {
  std::vector<Unit> units;
  for (int ip = 0; ip < static_cast<int>(cfg.p_grid.size()); ++ip) {
    const CircuitSpec spec = spec_for(cfg, cfg.p_grid[ip]);
    for (int ib = 0; ib < static_cast<int>(cfg.convergence_bonds.size()); ++ib) {
      const int bond = cfg.convergence_bonds[ib];
      for (int c = 0; c < cfg.circuits_per_p; ++c) {
        units.push_back(
            Unit{unit_id(fmt::format("conv{:03d}", ib), ip, c),
                 [&cfg, spec, bond, c]() {
                   return convergence_batch_payload(cfg, spec, bond, c);
                 }});
      }
    }
  }
  auto results = run_units(units, dir / "units", cfg.workers, resume);

  const int L = cfg.circuit.num_sites;
  io::CsvTable diffs;
  diffs.header = {"p", "chi_a", "chi_b", "max_abs_dn", "max_abs_ds1", "max_abs_ds2"};
  for (int ip = 0; ip < static_cast<int>(cfg.p_grid.size()); ++ip) {
    const double p = cfg.p_grid[ip];
    const CircuitSpec spec = spec_for(cfg, p);
    std::vector<std::vector<double>> series_by_bond, s1_by_bond, s2_by_bond;
    for (int ib = 0; ib < static_cast<int>(cfg.convergence_bonds.size()); ++ib) {
      OccupationAccumulator acc(L, spec.depth);
      std::vector<double> s1(L - 1, 0.0), s2(L - 1, 0.0);
      std::vector<double> s1sq(L - 1, 0.0), s2sq(L - 1, 0.0);
      int64_t n_traj = 0;
      for (int c = 0; c < cfg.circuits_per_p; ++c) {
        const json& u = results.at(unit_id(fmt::format("conv{:03d}", ib), ip, c));
        acc.merge(OccupationAccumulator::unpack(
            L, spec.depth, u.at("acc").get<std::vector<double>>()));
        const auto us1 = u.at("s1_sum").get<std::vector<double>>();
        const auto us2 = u.at("s2_sum").get<std::vector<double>>();
        const auto us1q = u.at("s1_sq").get<std::vector<double>>();
        const auto us2q = u.at("s2_sq").get<std::vector<double>>();
        for (int b = 0; b < L - 1; ++b) {
          s1[b] += us1[b];
          s2[b] += us2[b];
          s1sq[b] += us1q[b];
          s2sq[b] += us2q[b];
        }
        n_traj += u.at("trajectories").get<int64_t>();
      }
      const auto nd = static_cast<double>(n_traj);
      const auto [grid, series] = acc.finish();
      (void)grid;
      io::CsvTable series_csv;
      series_csv.header = {"t", "n_mean", "n_sem"};
      for (int t = 0; t <= spec.depth; ++t) {
        series_csv.rows.push_back({series.t[t], series.n[t], series.sem[t]});
      }
      io::write_csv(dir / fmt::format("series_p{:03d}_chi{}.csv", ip,
                                      cfg.convergence_bonds[ib]),
                    series_csv);
      io::CsvTable ent;
      ent.header = {"subsystem_size", "s1_mean", "s2_mean", "s1_sem", "s2_sem"};
      for (int b = 0; b < L - 1; ++b) {
        const double m1 = s1[b] / nd, m2 = s2[b] / nd;
        const double v1 = std::max(0.0, s1sq[b] / nd - m1 * m1);
        const double v2 = std::max(0.0, s2sq[b] / nd - m2 * m2);
        ent.rows.push_back({static_cast<double>(b + 1), m1, m2,
                            std::sqrt(v1 / std::max<double>(1, nd - 1)),
                            std::sqrt(v2 / std::max<double>(1, nd - 1))});
      }
      io::write_csv(dir / fmt::format("entropy_p{:03d}_chi{}.csv", ip,
                                      cfg.convergence_bonds[ib]),
                    ent);
      series_by_bond.push_back(series.n);
      std::vector<double> m1(L - 1), m2(L - 1);
      for (int b = 0; b < L - 1; ++b) {
        m1[b] = s1[b] / nd;
        m2[b] = s2[b] / nd;
      }
      s1_by_bond.push_back(std::move(m1));
      s2_by_bond.push_back(std::move(m2));
    }
    for (std::size_t a = 0; a + 1 < cfg.convergence_bonds.size(); ++a) {
      for (std::size_t b = a + 1; b < cfg.convergence_bonds.size(); ++b) {
        double dn = 0, ds1 = 0, ds2 = 0;
        for (std::size_t t = 0; t < series_by_bond[a].size(); ++t) {
          dn = std::max(dn, std::abs(series_by_bond[a][t] - series_by_bond[b][t]));
        }
        for (int k = 0; k < L - 1; ++k) {
          ds1 = std::max(ds1, std::abs(s1_by_bond[a][k] - s1_by_bond[b][k]));
          ds2 = std::max(ds2, std::abs(s2_by_bond[a][k] - s2_by_bond[b][k]));
        }
        diffs.rows.push_back({p, static_cast<double>(cfg.convergence_bonds[a]),
                              static_cast<double>(cfg.convergence_bonds[b]), dn, ds1,
                              ds2});
      }
    }
  }
  io::write_csv(dir / "diffs.csv", diffs);
  return dir;
}

}  // namespace

fs::path run_campaign(const CampaignConfig& config, bool resume) {
  config.validate();
  const fs::path dir = config.output_dir;
  fs::create_directories(dir);

  // resource estimate up front
  {
    double mem_mb = 1.0;
    if (config.engine == EngineKind::statevector) {
      mem_mb = std::ldexp(16.0, config.circuit.num_sites) / 1048576.0;
    } else if (config.engine == EngineKind::mps) {
      mem_mb = config.circuit.num_sites * 2.0 * config.mps.max_bond *
               config.mps.max_bond * 16.0 * 6.0 / 1048576.0;
    }
    int64_t tasks = 0;
    if (config.experiment == ExperimentKind::classical_dp) {
      const int n_scan = static_cast<int>((config.flags.scan.p_max -
                                           config.flags.scan.p_min) /
                                              config.flags.scan.step +
                                          1.5);
      tasks = n_scan * config.flags.scan.realizations + config.flags.realizations +
              config.flags.all_active_realizations;
    } else {
      tasks = static_cast<int64_t>(config.p_grid.size()) * config.circuits_per_p *
              config.trajectories_per_circuit;
      if (config.experiment == ExperimentKind::convergence_check) {
        tasks *= static_cast<int64_t>(config.convergence_bonds.size());
      }
    }
    fmt::print(stderr,
               "campaign '{}': {} trajectories/realizations, ~{:.1f} MB per "
               "worker state\n",
               experiment_name(config.experiment), tasks, mem_mb);
  }

  io::atomic_write(dir / "config.json", config.to_json());

  fs::path out;
  switch (config.experiment) {
    case ExperimentKind::classical_dp:
      out = run_classical_dp(config, dir, resume);
      break;
    case ExperimentKind::absorbing_profile:
      out = run_absorbing(config, dir, resume, false);
      break;
    case ExperimentKind::absorbing_exponents:
      out = run_absorbing(config, dir, resume, true);
      break;
    case ExperimentKind::mipt_scan:
      out = run_entropy_scan(config, dir, resume, false);
      break;
    case ExperimentKind::tomography_pipeline:
      out = run_entropy_scan(config, dir, resume, true);
      break;
    case ExperimentKind::convergence_check:
      out = run_convergence(config, dir, resume);
      break;
  }

  json manifest;
  manifest["experiment"] = experiment_name(config.experiment);
  manifest["schema_version"] = 1;
  manifest["config"] = json::parse(config.to_json());
  manifest["completed_utc"] = static_cast<int64_t>(std::time(nullptr));
  io::atomic_write(dir / "manifest.json", manifest.dump(2));
  return out;
}

}  // namespace aqsim
