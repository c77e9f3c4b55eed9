#include <fmt/format.h>

#include <nlohmann/json.hpp>

#include "aqsim/campaign.hpp"
#include "aqsim/io.hpp"

namespace aqsim {

namespace fs = std::filesystem;
using nlohmann::json;

Figure figure_from_name(const std::string& name) {
  for (auto f : {Figure::fig2, Figure::fig3a, Figure::fig3b, Figure::fig4b,
                 Figure::fig4c, Figure::fig5, Figure::figS1, Figure::figS2}) {
    if (figure_name(f) == name) return f;
  }
  throw std::invalid_argument(fmt::format("unknown figure '{}'", name));
}

std::string figure_name(Figure f) {
  switch (f) {
    case Figure::fig2: return "fig2";
    case Figure::fig3a: return "fig3a";
    case Figure::fig3b: return "fig3b";
    case Figure::fig4b: return "fig4b";
    case Figure::fig4c: return "fig4c";
    case Figure::fig5: return "fig5";
    case Figure::figS1: return "figS1";
    case Figure::figS2: return "figS2";
  }
  return "?";
}

namespace {

json load_manifest(const fs::path& dir) {
  const fs::path mf = dir / "manifest.json";
  if (!fs::exists(mf)) {
    throw std::runtime_error(fmt::format(
        "no campaign manifest in {}; run `aqsim run` first", dir.string()));
  }
  return json::parse(io::read_file(mf));
}

void require(const fs::path& p, const std::string& campaign_hint) {
  if (!fs::exists(p)) {
    throw std::runtime_error(
        fmt::format("missing aggregate {}; run a '{}' campaign first", p.string(),
                    campaign_hint));
  }
}

std::vector<double> p_grid_of(const json& manifest) {
  return manifest.at("config").at("p_grid").get<std::vector<double>>();
}

void sidecar(const fs::path& out_base, const std::string& title,
             const std::string& x, const std::string& y, const json& extra = {}) {
  json meta;
  meta["title"] = title;
  meta["x_axis"] = x;
  meta["y_axis"] = y;
  meta["units"] = {{"time", "depth units (one entangling + one measurement layer)"},
                   {"entropy", "bits"}};
  if (!extra.is_null()) meta["extra"] = extra;
  io::atomic_write(fs::path(out_base.string() + ".axes.json"), meta.dump(2));
}

void emit_profile_heatmaps(const fs::path& dir, const fs::path& rep,
                           const std::string& figname, const json& manifest) {
  const auto ps = p_grid_of(manifest);
  for (std::size_t ip = 0; ip < ps.size(); ++ip) {
    const fs::path grid_path = dir / fmt::format("grid_p{:03d}.csv", ip);
    require(grid_path, "absorbing_profile");
    const io::CsvTable grid = io::read_csv(grid_path);
    const int rows = static_cast<int>(grid.rows.size());
    const int cols = static_cast<int>(grid.header.size()) - 1;
    std::vector<double> vals;
    vals.reserve(static_cast<std::size_t>(rows) * cols);
    for (const auto& r : grid.rows) {
      for (int c = 1; c <= cols; ++c) vals.push_back(r[c]);
    }
    io::SvgPlotSpec spec;
    spec.title = fmt::format("<n_i(t)>, p = {}", io::format_double(ps[ip]));
    spec.x_label = "site";
    spec.y_label = "t";
    const fs::path base = rep / fmt::format("{}_p{:03d}", figname, ip);
    io::atomic_write(fs::path(base.string() + ".svg"),
                     io::svg_heatmap(spec, rows, cols, vals, 1.0));
    io::write_csv(fs::path(base.string() + ".csv"), grid);
    sidecar(base, spec.title, "site index", "depth t",
            json{{"p", ps[ip]}, {"colormap_max", 1.0}});
  }
}

void emit_particle_curves(const fs::path& dir, const fs::path& rep,
                          const std::string& figname, const json& manifest) {
  const auto ps = p_grid_of(manifest);
  std::vector<io::SvgSeries> series;
  io::CsvTable merged;
  merged.header = {"t"};
  for (std::size_t ip = 0; ip < ps.size(); ++ip) {
    const fs::path path = dir / fmt::format("series_p{:03d}.csv", ip);
    require(path, "absorbing_exponents");
    const io::CsvTable tab = io::read_csv(path);
    io::SvgSeries s;
    s.label = fmt::format("p = {}", io::format_double(ps[ip]));
    for (const auto& row : tab.rows) {
      s.x.push_back(row[0]);
      s.y.push_back(row[1]);
      s.err.push_back(row[2]);
    }
    if (ip == 0) {
      for (const auto& row : tab.rows) merged.rows.push_back({row[0]});
    }
    merged.header.push_back(fmt::format("n_mean_p{}", io::format_double(ps[ip])));
    merged.header.push_back(fmt::format("n_sem_p{}", io::format_double(ps[ip])));
    for (std::size_t r = 0; r < tab.rows.size() && r < merged.rows.size(); ++r) {
      merged.rows[r].push_back(tab.rows[r][1]);
      merged.rows[r].push_back(tab.rows[r][2]);
    }
    series.push_back(std::move(s));
  }
  io::SvgPlotSpec spec;
  spec.title = "N(t) by measurement rate";
  spec.x_label = "t";
  spec.y_label = "N(t)";
  spec.log_x = true;
  spec.log_y = true;
  const fs::path base = rep / figname;
  io::atomic_write(fs::path(base.string() + ".svg"), io::svg_line_plot(spec, series));
  io::write_csv(fs::path(base.string() + ".csv"), merged);
  sidecar(base, spec.title, "depth t (log)", "average particle number N(t) (log)");
}

void emit_entropy_vs_p(const fs::path& dir, const fs::path& rep,
                       const std::string& figname, int alpha, bool variance) {
  const fs::path path = dir / "stats.csv";
  require(path, "mipt_scan");
  const io::CsvTable tab = io::read_csv(path);
  io::SvgSeries s;
  s.label = variance ? fmt::format("Var(S{})", alpha) : fmt::format("<S{}>", alpha);
  io::CsvTable out;
  out.header = variance
                   ? std::vector<std::string>{"p", "variance", "ci_lo", "ci_hi"}
                   : std::vector<std::string>{"p", "mean", "ci_lo", "ci_hi"};
  for (const auto& row : tab.rows) {
    if (static_cast<int>(row[1]) != alpha) continue;
    const double p = row[0];
    const double v = variance ? row[4] : row[3];
    const double lo = variance ? row[7] : row[5];
    const double hi = variance ? row[8] : row[6];
    s.x.push_back(p);
    s.y.push_back(v);
    s.err.push_back((hi - lo) / 2.0);
    out.rows.push_back({p, v, lo, hi});
  }
  io::SvgPlotSpec spec;
  spec.title = variance ? fmt::format("Var(S^({})) vs p", alpha)
                        : fmt::format("<S^({})> vs p", alpha);
  spec.x_label = "p";
  spec.y_label = variance ? "variance (bits^2)" : "entropy (bits)";
  const fs::path base = rep / figname;
  io::atomic_write(fs::path(base.string() + ".svg"),
                   io::svg_line_plot(spec, std::vector<io::SvgSeries>{s}));
  io::write_csv(fs::path(base.string() + ".csv"), out);
  sidecar(base, spec.title, "measurement rate p",
          variance ? "Var(S) over circuits and trajectories" : "mean entropy");
}

void emit_fig5(const fs::path& dir, const fs::path& rep, const json& manifest) {
  const auto ps = p_grid_of(manifest);
  const auto bonds =
      manifest.at("config").at("convergence_bonds").get<std::vector<int>>();
  for (std::size_t ip = 0; ip < ps.size(); ++ip) {
    std::vector<io::SvgSeries> series;
    io::CsvTable merged;
    merged.header = {"subsystem_size"};
    bool first = true;
    for (int chi : bonds) {
      const fs::path path = dir / fmt::format("entropy_p{:03d}_chi{}.csv", ip, chi);
      require(path, "convergence_check");
      const io::CsvTable tab = io::read_csv(path);
      for (int which = 0; which < 2; ++which) {
        io::SvgSeries s;
        s.label = fmt::format("S{} chi={}", which + 1, chi);
        for (const auto& row : tab.rows) {
          s.x.push_back(row[0]);
          s.y.push_back(row[1 + which]);
          s.err.push_back(row[3 + which]);
        }
        series.push_back(std::move(s));
        merged.header.push_back(fmt::format("s{}_chi{}", which + 1, chi));
      }
      if (first) {
        for (const auto& row : tab.rows) merged.rows.push_back({row[0]});
        first = false;
      }
      for (std::size_t r = 0; r < tab.rows.size(); ++r) {
        merged.rows[r].push_back(tab.rows[r][1]);
        merged.rows[r].push_back(tab.rows[r][2]);
      }
    }
    io::SvgPlotSpec spec;
    spec.title = fmt::format("Entanglement vs subsystem size, p = {}",
                             io::format_double(ps[ip]));
    spec.x_label = "|A|";
    spec.y_label = "entropy (bits)";
    const fs::path base = rep / fmt::format("fig5_p{:03d}", ip);
    io::atomic_write(fs::path(base.string() + ".svg"),
                     io::svg_line_plot(spec, series));
    io::write_csv(fs::path(base.string() + ".csv"), merged);
    sidecar(base, spec.title, "subsystem size |A| (edge-anchored cut)",
            "steady-state bipartite entropy (bits)", json{{"p", ps[ip]}});
  }
}

void emit_figs2(const fs::path& dir, const fs::path& rep) {
  for (int alpha : {1, 3, 4}) {
    emit_entropy_vs_p(dir, rep, fmt::format("figS2_mean_alpha{}", alpha), alpha,
                      false);
    emit_entropy_vs_p(dir, rep, fmt::format("figS2_var_alpha{}", alpha), alpha,
                      true);
  }
}

}  // namespace

void emit_report(const fs::path& artifact_dir, Figure figure) {
  const json manifest = load_manifest(artifact_dir);
  const fs::path rep = artifact_dir / "report";
  fs::create_directories(rep);
  switch (figure) {
    case Figure::fig2:
      emit_profile_heatmaps(artifact_dir, rep, "fig2", manifest);
      break;
    case Figure::figS1:
      emit_profile_heatmaps(artifact_dir, rep, "figS1", manifest);
      break;
    case Figure::fig3a:
      emit_particle_curves(artifact_dir, rep, "fig3a", manifest);
      break;
    case Figure::fig3b:
      emit_particle_curves(artifact_dir, rep, "fig3b", manifest);
      break;
    case Figure::fig4b:
      emit_entropy_vs_p(artifact_dir, rep, "fig4b", 2, false);
      break;
    case Figure::fig4c:
      emit_entropy_vs_p(artifact_dir, rep, "fig4c", 2, true);
      break;
    case Figure::fig5:
      emit_fig5(artifact_dir, rep, manifest);
      break;
    case Figure::figS2:
      emit_figs2(artifact_dir, rep);
      break;
  }
}

}  // namespace aqsim
