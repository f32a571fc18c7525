#pragma once

// End-to-end experiments. Output layout:
//   <out>/<experiment>/<run-id>/{data/*.csv, plots/*.svg, metadata.json}
// Everything is first written under <out>/.<experiment>.partial and moved into
// place only when the whole experiment succeeded.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "phaselens/config.hpp"
#include "phaselens/csv.hpp"
#include "phaselens/embed.hpp"
#include "phaselens/error.hpp"
#include "phaselens/kdv.hpp"
#include "phaselens/lorenz.hpp"
#include "phaselens/pca.hpp"
#include "phaselens/svg.hpp"

namespace phaselens::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

struct Artifact {
  fs::path path;
  std::string kind;
};

struct RunArtifacts {
  std::string experiment;
  fs::path root;
  std::vector<Artifact> files;

  std::size_t count(std::string_view kind) const {
    return static_cast<std::size_t>(std::count_if(files.begin(), files.end(),
                                                  [&](const Artifact& a) { return a.kind == kind; }));
  }

  json to_json() const {
    json j = {{"experiment", experiment}, {"root", root.generic_string()}, {"files", json::array()}};
    for (const auto& a : files) j["files"].push_back({{"path", a.path.generic_string()}, {"kind", a.kind}});
    return j;
  }
};

/// Writes one run's files into the staging tree and records their final paths.
class RunWriter {
public:
  RunWriter(const fs::path& staging, const fs::path& final_root, std::string run_id)
      : stage_dir_(staging / run_id), final_dir_(final_root / run_id) {
    fs::create_directories(stage_dir_ / "data");
    fs::create_directories(stage_dir_ / "plots");
  }

  void csv(std::string_view name, std::string_view kind, const csv::Table& table) {
    const fs::path rel = fs::path("data") / (std::string(name) + ".csv");
    csv::emit_csv(table, stage_dir_ / rel);
    record(rel, kind);
  }

  void svg(std::string_view name, std::string_view kind, const svg::Plot& plot) {
    const fs::path rel = fs::path("plots") / (std::string(name) + ".svg");
    svg::emit_svg(plot, stage_dir_ / rel);
    record(rel, kind);
  }

  void metadata(const json& j) {
    const fs::path path = stage_dir_ / "metadata.json";
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
    if (!out.flush()) throw IoError("failed writing " + path.string());
    record("metadata.json", "metadata-json");
  }

  std::vector<Artifact> take() { return std::move(files_); }

private:
  void record(const fs::path& rel, std::string_view kind) {
    files_.push_back({final_dir_ / rel, std::string(kind)});
  }

  fs::path stage_dir_;
  fs::path final_dir_;
  std::vector<Artifact> files_;
};

namespace detail {

inline std::vector<double> one_based_index(std::size_t n) {
  std::vector<double> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<double>(i + 1);
  return idx;
}

inline void pairwise_portraits(RunWriter& w, const pca::ReducedMatrix& reduced, std::string_view title) {
  const auto& m = reduced.entries;
  for (std::size_t a = 0; a < m.cols(); ++a)
    for (std::size_t b = a + 1; b < m.cols(); ++b) {
      svg::Plot plot{std::string(title) + ": " + reduced.names[a] + " vs " + reduced.names[b],
                     reduced.names[a], reduced.names[b],
                     {{"trajectory", m.column(a), m.column(b), svg::Style::line}}};
      plot.show_legend = false;
      w.svg("reconstruction_" + reduced.names[a] + "_" + reduced.names[b], "reconstruction-svg", plot);
    }
}

inline json pca_metadata(const config::ExperimentConfig& cfg, const pca::Analysis& a) {
  json j;
  j["center"] = cfg.pca.center;
  j["decompose"] = cfg.pca.decompose == pca::Decompose::covariance ? "covariance" : "trajectory";
  j["project_centered"] = cfg.pca.project_centered;
  j["selection"] = cfg.pca.energy ? "energy" : "fixed-k";
  j["energy_threshold"] = cfg.pca.energy ? json(*cfg.pca.energy) : json(nullptr);
  j["k"] = a.projection.k;
  j["energy_captured"] = a.projection.energy_captured;
  j["singular_values"] = a.decomposition.singular_values;
  return j;
}

inline void lorenz_experiment(const config::ExperimentConfig& cfg, const fs::path& staging,
                              const fs::path& final_root, RunArtifacts& out) {
  const auto& lc = cfg.lorenz;
  const ode::StepSpec spec{0.0, lc.h, lc.steps};
  const auto traj = lorenz::trajectory(lc.params, lc.initial, spec);

  char idbuf[96];
  std::snprintf(idbuf, sizeof idbuf, "sigma%g-r%g-b%.4g", lc.params.sigma, lc.params.r, lc.params.b);
  RunWriter w(staging, final_root, idbuf);

  std::vector<double> t(traj.size()), xs(traj.size()), ys(traj.size()), zs(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    t[i] = spec.time(i);
    xs[i] = traj[i].x;
    ys[i] = traj[i].y;
    zs[i] = traj[i].z;
  }
  w.csv("timeseries", "timeseries-csv", {{{"t", t}, {"x", xs}, {"y", ys}, {"z", zs}}});
  const std::vector<std::pair<std::string, const std::vector<double>*>> vars{
      {"x", &xs}, {"y", &ys}, {"z", &zs}};
  for (const auto& [name, values] : vars) {
    svg::Plot plot{name + "(t)", "t", name, {{name, t, *values, svg::Style::line}}};
    plot.show_legend = false;
    w.svg("timeseries_" + name, "timeseries-svg", plot);
  }
  for (std::size_t a = 0; a < vars.size(); ++a)
    for (std::size_t b = a + 1; b < vars.size(); ++b) {
      svg::Plot plot{"phase portrait " + vars[a].first + "-" + vars[b].first, vars[a].first,
                     vars[b].first, {{"trajectory", *vars[a].second, *vars[b].second, svg::Style::line}}};
      plot.show_legend = false;
      w.svg("phase_" + vars[a].first + "_" + vars[b].first, "portrait-svg", plot);
    }

  const embed::TimeSeries series(xs, lc.h);
  csv::Table spectra;
  svg::Plot overlay{"normalized singular spectrum of x(t) trajectory matrices", "index",
                    "sigma_i / sigma_1", {}};
  overlay.log_y = true;
  std::size_t longest = 0;
  json columns = json::array();
  for (std::size_t window : cfg.embedding.windows) {
    const auto x = embed::hankel_embed(series, window);
    const auto s = pca::normalized_spectrum(pca::decompose(x.observations(), cfg.pca.center, cfg.pca.decompose));
    const std::string label = "window_" + std::to_string(window);
    spectra.columns.push_back({label, s});
    overlay.series.push_back({"window " + std::to_string(window), one_based_index(s.size()), s});
    longest = std::max(longest, s.size());
    columns.push_back(x.entries.cols());
  }
  spectra.columns.insert(spectra.columns.begin(), {"index", one_based_index(longest)});
  w.csv("spectrum", "spectrum-csv", spectra);
  w.svg("spectrum", "spectrum-svg", overlay);

  const auto recon = embed::hankel_embed(series, cfg.embedding.reconstruction_window);
  const auto analysis = pca::analyze(recon, cfg.pca_options());
  w.csv("components", "components-csv", csv::Table::from_matrix(analysis.reduced.entries, analysis.reduced.names));
  pairwise_portraits(w, analysis.reduced, "reconstructed phase space");

  json meta = pca_metadata(cfg, analysis);
  meta["experiment"] = cfg.name;
  meta["system"] = "lorenz";
  meta["run_id"] = idbuf;
  meta["sigma"] = lc.params.sigma;
  meta["r"] = lc.params.r;
  meta["b"] = lc.params.b;
  meta["x0"] = lc.initial.x;
  meta["y0"] = lc.initial.y;
  meta["z0"] = lc.initial.z;
  meta["t0"] = spec.t0;
  meta["h"] = lc.h;
  meta["steps"] = lc.steps;
  meta["samples"] = series.size();
  meta["windows"] = cfg.embedding.windows;
  meta["columns_per_window"] = columns;
  meta["reconstruction_window"] = cfg.embedding.reconstruction_window;
  meta["K"] = recon.entries.cols();
  meta["final_x"] = traj.back().x;
  meta["final_y"] = traj.back().y;
  meta["final_z"] = traj.back().z;
  meta["final_max_norm"] = traj.back().max_norm();
  w.metadata(meta);

  auto files = w.take();
  out.files.insert(out.files.end(), files.begin(), files.end());
}

struct KdvOutcome {
  std::vector<Artifact> files;
  std::vector<double> spectrum;
};

inline KdvOutcome kdv_run(const config::ExperimentConfig& cfg, const config::KdvRun& run,
                          const fs::path& staging, const fs::path& final_root) {
  const kdv::Params p = cfg.kdv.params_for(run);
  const auto field = kdv::simulate(p);
  RunWriter w(staging, final_root, run.id());

  std::vector<std::string> names{"t"};
  for (std::size_t j = 0; j < p.grid; ++j) names.push_back("u_" + std::to_string(j));
  const auto with_time = [&](const Matrix& rows, const std::vector<double>& times) {
    csv::Table table;
    table.columns.push_back({"t", times});
    for (std::size_t j = 0; j < rows.cols(); ++j) table.columns.push_back({names[j + 1], rows.column(j)});
    return table;
  };
  w.csv("field", "field-csv", with_time(field.values, field.times));

  const std::size_t stride = cfg.embedding.stride ? *cfg.embedding.stride
                                                  : embed::even_stride(field.snapshot_count(), cfg.embedding.rows);
  const auto x = embed::snapshot_embed(field, cfg.embedding.rows, stride);
  std::vector<double> picked_times;
  for (std::size_t i = 0; i < cfg.embedding.rows; ++i) picked_times.push_back(field.times[i * stride]);
  w.csv("trajectory", "trajectory-csv", with_time(x.entries, picked_times));

  double peak = 0.0;
  for (std::size_t i = 0; i < x.entries.rows(); ++i)
    for (double v : x.entries.row(i)) peak = std::max(peak, std::fabs(v));
  svg::Plot evolution{"soliton evolution " + run.id() + " (offset by snapshot)", "x", "u + offset", {}};
  evolution.show_legend = false;
  for (std::size_t i = 0; i < x.entries.rows(); ++i) {
    std::vector<double> u(x.entries.row(i).begin(), x.entries.row(i).end());
    for (double& v : u) v += 0.25 * peak * static_cast<double>(i);
    evolution.series.push_back({"t=" + csv::format_real(picked_times[i]), field.grid, u});
  }
  w.svg("evolution", "evolution-svg", evolution);

  const auto analysis = pca::analyze(x, cfg.pca_options());
  w.csv("spectrum", "spectrum-csv",
        {{{"index", one_based_index(analysis.spectrum.size())}, {run.id(), analysis.spectrum}}});
  svg::Plot spec_plot{"normalized singular spectrum " + run.id(), "index", "sigma_i / sigma_1",
                      {{run.id(), one_based_index(analysis.spectrum.size()), analysis.spectrum}}};
  spec_plot.log_y = true;
  w.svg("spectrum", "spectrum-svg", spec_plot);
  w.csv("components", "components-csv", csv::Table::from_matrix(analysis.reduced.entries, analysis.reduced.names));
  pairwise_portraits(w, analysis.reduced, "reconstructed phase space " + run.id());

  const auto first = field.values.row(0);
  const auto last = field.values.row(field.snapshot_count() - 1);
  json meta = pca_metadata(cfg, analysis);
  meta["experiment"] = cfg.name;
  meta["system"] = "kdv";
  meta["run_id"] = run.id();
  meta["group"] = run.group;
  meta["grid"] = p.grid;
  meta["velocity"] = p.velocity;
  meta["half_length"] = p.half_length;
  meta["dt"] = p.dt;
  meta["steps"] = p.steps;
  meta["record_stride"] = p.record_stride;
  meta["dealias"] = p.dealias;
  meta["snapshots"] = field.snapshot_count();
  meta["rows"] = cfg.embedding.rows;
  meta["stride"] = stride;
  meta["total_time"] = field.times.back();
  meta["x_min"] = field.grid.front();
  meta["x_spacing"] = 2.0 * p.half_length / static_cast<double>(p.grid);
  meta["mass_initial"] = kdv::mass(first);
  meta["mass_final"] = kdv::mass(last);
  meta["momentum_initial"] = kdv::momentum(first);
  meta["momentum_final"] = kdv::momentum(last);
  meta["max_imaginary_residue"] = field.max_imaginary_residue;
  w.metadata(meta);

  return {w.take(), analysis.spectrum};
}

inline void kdv_experiment(const config::ExperimentConfig& cfg, const fs::path& staging,
                           const fs::path& final_root, RunArtifacts& out) {
  std::vector<std::future<KdvOutcome>> jobs;
  jobs.reserve(cfg.kdv.runs.size());
  for (const auto& run : cfg.kdv.runs) {
    jobs.push_back(std::async(std::launch::async, [&cfg, &run, &staging, &final_root] {
      return kdv_run(cfg, run, staging, final_root);
    }));
  }
  std::vector<KdvOutcome> outcomes;
  for (auto& job : jobs) outcomes.push_back(job.get());

  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < cfg.kdv.runs.size(); ++i) groups[cfg.kdv.runs[i].group].push_back(i);

  for (std::size_t i = 0; i < outcomes.size(); ++i)
    out.files.insert(out.files.end(), outcomes[i].files.begin(), outcomes[i].files.end());

  for (const auto& [group, members] : groups) {
    RunWriter w(staging, final_root, "spectra-" + group);
    csv::Table table;
    svg::Plot overlay{"normalized singular spectra (" + group + ")", "index", "sigma_i / sigma_1", {}};
    overlay.log_y = true;
    std::size_t longest = 0;
    json ids = json::array();
    for (std::size_t i : members) {
      const auto& s = outcomes[i].spectrum;
      const std::string id = cfg.kdv.runs[i].id();
      table.columns.push_back({id, s});
      overlay.series.push_back({id, one_based_index(s.size()), s});
      longest = std::max(longest, s.size());
      ids.push_back(id);
    }
    table.columns.insert(table.columns.begin(), {"index", one_based_index(longest)});
    w.csv("spectrum", "spectrum-csv", table);
    w.svg("spectrum", "spectrum-svg", overlay);
    w.metadata({{"experiment", cfg.name}, {"system", "kdv"}, {"run_id", "spectra-" + group},
                {"group", group}, {"runs", ids}, {"rows", cfg.embedding.rows}});
    auto files = w.take();
    out.files.insert(out.files.end(), files.begin(), files.end());
  }
}

}  // namespace detail

/// Validates, runs, and atomically publishes one experiment under `out_root`.
inline RunArtifacts run_experiment(const config::ExperimentConfig& cfg, const fs::path& out_root) {
  cfg.validate();
  const fs::path final_root = out_root / cfg.name;
  const fs::path staging = out_root / ("." + cfg.name + ".partial");

  RunArtifacts out{cfg.name, final_root, {}};
  try {
    fs::remove_all(staging);
    fs::create_directories(staging);
    if (cfg.system == config::System::lorenz) {
      detail::lorenz_experiment(cfg, staging, final_root, out);
    } else {
      detail::kdv_experiment(cfg, staging, final_root, out);
    }
    fs::remove_all(final_root);
    fs::rename(staging, final_root);
  } catch (const fs::filesystem_error& e) {
    std::error_code ignored;
    fs::remove_all(staging, ignored);
    throw IoError(e.what());
  } catch (...) {
    std::error_code ignored;
    fs::remove_all(staging, ignored);
    throw;
  }
  std::sort(out.files.begin(), out.files.end(),
            [](const Artifact& a, const Artifact& b) { return a.path < b.path; });
  return out;
}

}  // namespace phaselens::pipeline
