#pragma once

// Command-line front end. Exit codes: 0 success, 1 usage/config/I-O error,
// 2 numerical failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "phaselens/config.hpp"
#include "phaselens/csv.hpp"
#include "phaselens/embed.hpp"
#include "phaselens/error.hpp"
#include "phaselens/kdv.hpp"
#include "phaselens/lorenz.hpp"
#include "phaselens/pca.hpp"
#include "phaselens/pipeline.hpp"
#include "phaselens/presets.hpp"

namespace phaselens::cli {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;

inline constexpr const char* kOutEnv = "PHASELENS_OUT";
inline constexpr const char* kDefaultOut = "phaselens-out";

/// --out, then the config's own "output", then $PHASELENS_OUT, then ./phaselens-out.
inline fs::path output_root(const std::optional<std::string>& flag,
                            const std::optional<std::string>& from_config = std::nullopt) {
  if (flag) return *flag;
  if (from_config) return *from_config;
  if (const char* env = std::getenv(kOutEnv); env && *env) return env;
  return kDefaultOut;
}

/// Every flag maps onto an ExperimentConfig field.
struct RunOverrides {
  std::optional<std::string> out;
  std::optional<std::size_t> window;
  std::optional<std::size_t> k;
  std::optional<double> energy;
  bool no_center = false;
  std::optional<std::size_t> grid;
  std::optional<double> velocity;
  std::optional<double> dt;
  std::optional<std::size_t> steps;
  std::optional<double> half_length;
  std::optional<std::size_t> stride;
  std::optional<std::size_t> rows;
  std::optional<std::size_t> record_stride;
  std::optional<std::string> decompose;
  bool project_centered = false;
  bool dealias = false;

  void apply(config::ExperimentConfig& c) const {
    if (out) c.output = *out;
    if (k) {
      c.pca.k = *k;
      c.pca.energy.reset();
    }
    if (energy) {
      c.pca.energy = *energy;
      c.pca.k.reset();
    }
    if (no_center) c.pca.center = false;
    if (project_centered) c.pca.project_centered = true;
    if (decompose) {
      if (*decompose == "covariance") {
        c.pca.decompose = pca::Decompose::covariance;
      } else if (*decompose == "trajectory") {
        c.pca.decompose = pca::Decompose::trajectory;
      } else {
        throw InvalidArgument("--decompose must be 'covariance' or 'trajectory'");
      }
    }
    if (stride) c.embedding.stride = *stride;
    if (rows) c.embedding.rows = *rows;

    if (c.system == config::System::lorenz) {
      if (window) {
        c.embedding.windows = {*window};
        c.embedding.reconstruction_window = *window;
      }
      if (dt) c.lorenz.h = *dt;
      if (steps) c.lorenz.steps = *steps;
      if (grid || velocity || half_length || record_stride || dealias) {
        throw InvalidArgument("--grid/--velocity/--half-length/--record-stride/--dealias apply to kdv configs only");
      }
    } else {
      if (window) throw InvalidArgument("--window applies to lorenz configs only");
      if (dt) c.kdv.dt = *dt;
      if (steps) {
        c.kdv.steps = *steps;
        for (auto& r : c.kdv.runs) r.steps.reset();
      }
      if (half_length) c.kdv.half_length = *half_length;
      if (record_stride) c.kdv.record_stride = *record_stride;
      if (dealias) c.kdv.dealias = true;
      if (grid || velocity) {
        config::KdvRun run;
        run.grid = grid ? *grid : (c.kdv.runs.empty() ? 0 : c.kdv.runs.front().grid);
        run.velocity = velocity ? *velocity : (c.kdv.runs.empty() ? 0.0 : c.kdv.runs.front().velocity);
        c.kdv.runs = {run};
      }
    }
  }
};

inline config::ExperimentConfig load_config(const std::string& source) {
  if (fs::exists(source)) {
    std::ifstream in(source, std::ios::binary);
    if (!in) throw IoError("cannot open " + source);
    try {
      return config::from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
      throw InvalidArgument(source + ": " + e.what());
    }
  }
  if (presets::find(source)) return presets::load(source);
  throw InvalidArgument("no config file or preset named '" + source + "'");
}

inline csv::Table drop_time_column(csv::Table t) {
  std::erase_if(t.columns, [](const csv::Column& c) { return c.name == "t"; });
  if (t.columns.empty()) throw InvalidArgument("input has no data columns besides 't'");
  return t;
}

inline fs::path prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  return dir;
}

inline void cmd_simulate_lorenz(const lorenz::Params& p, const lorenz::State& initial, double h,
                                std::size_t steps, const fs::path& out_dir, std::ostream& out) {
  const ode::StepSpec spec{0.0, h, steps};
  const auto traj = lorenz::trajectory(p, initial, spec);
  csv::Table t{{{"t", {}}, {"x", {}}, {"y", {}}, {"z", {}}}};
  for (std::size_t i = 0; i < traj.size(); ++i) {
    t.columns[0].values.push_back(spec.time(i));
    t.columns[1].values.push_back(traj[i].x);
    t.columns[2].values.push_back(traj[i].y);
    t.columns[3].values.push_back(traj[i].z);
  }
  const fs::path path = prepare_dir(out_dir) / "lorenz-series.csv";
  csv::emit_csv(t, path);
  out << path.generic_string() << '\n';
}

inline void cmd_simulate_kdv(const kdv::Params& p, const fs::path& out_dir, std::ostream& out) {
  const auto field = kdv::simulate(p);
  csv::Table t;
  t.columns.push_back({"t", field.times});
  for (std::size_t j = 0; j < p.grid; ++j) t.columns.push_back({"u_" + std::to_string(j), field.values.column(j)});
  const fs::path path = prepare_dir(out_dir) / "kdv-field.csv";
  csv::emit_csv(t, path);
  out << path.generic_string() << '\n';
}

struct EmbedArgs {
  std::string input;
  std::optional<std::string> column;
  std::optional<std::size_t> window;
  std::optional<std::size_t> rows;
  std::optional<std::size_t> stride;
};

inline void cmd_embed(const EmbedArgs& a, const fs::path& out_dir, std::ostream& out) {
  const csv::Table in = csv::read_csv(a.input);
  if (a.window.has_value() == a.rows.has_value()) {
    throw InvalidArgument("embed: give exactly one of --window (series) or --rows (field snapshots)");
  }
  csv::Table result;
  if (a.window) {
    if (a.stride) throw InvalidArgument("embed: --stride only applies with --rows");
    std::string name;
    if (a.column) {
      name = *a.column;
    } else if (in.has("x")) {
      name = "x";
    } else {
      name = drop_time_column(in).columns.front().name;
    }
    double dt = 1.0;
    if (in.has("t") && in.at("t").values.size() >= 2) dt = in.at("t").values[1] - in.at("t").values[0];
    const auto x = embed::hankel_embed(embed::TimeSeries(in.at(name).values, dt > 0 ? dt : 1.0), *a.window);
    const Matrix obs = x.observations();
    std::vector<std::string> names;
    for (std::size_t j = 0; j < obs.cols(); ++j) names.push_back("lag_" + std::to_string(j));
    result = csv::Table::from_matrix(obs, names);
  } else {
    const csv::Table data = drop_time_column(in);
    kdv::FieldSnapshots field;
    field.values = data.to_matrix();
    const auto x = embed::snapshot_embed(field, *a.rows, a.stride);
    std::vector<std::string> names;
    for (const auto& c : data.columns) names.push_back(c.name);
    result = csv::Table::from_matrix(x.entries, names);
  }
  const fs::path path = prepare_dir(out_dir) / "trajectory.csv";
  csv::emit_csv(result, path);
  out << path.generic_string() << '\n';
}

struct PcaArgs {
  std::string input;
  std::optional<std::size_t> k;
  std::optional<double> energy;
  bool no_center = false;
  std::string decompose = "covariance";
  bool project_centered = false;
  std::string prefix = "c";
};

inline void cmd_pca(const PcaArgs& a, const fs::path& out_dir, std::ostream& out) {
  const Matrix obs = drop_time_column(csv::read_csv(a.input)).to_matrix();
  pca::Options opt;
  if (a.energy) {
    opt.rule = pca::EnergyThreshold{*a.energy};
  } else {
    opt.rule = pca::FixedCount{a.k ? *a.k : 3};
  }
  opt.center = !a.no_center;
  if (a.decompose == "covariance") {
    opt.decompose = pca::Decompose::covariance;
  } else if (a.decompose == "trajectory") {
    opt.decompose = pca::Decompose::trajectory;
  } else {
    throw InvalidArgument("--decompose must be 'covariance' or 'trajectory'");
  }
  opt.project_centered = a.project_centered;
  opt.prefix = a.prefix;
  if (const auto* fixed = std::get_if<pca::FixedCount>(&opt.rule); fixed && fixed->k > obs.cols()) {
    throw InvalidArgument("k out of range: k = " + std::to_string(fixed->k) + " but the matrix has " +
                          std::to_string(obs.cols()) + " columns");
  }

  const auto r = pca::analyze(obs, opt);
  const fs::path dir = prepare_dir(out_dir);
  std::vector<double> index(r.spectrum.size());
  for (std::size_t i = 0; i < index.size(); ++i) index[i] = static_cast<double>(i + 1);
  csv::emit_csv({{{"index", index}, {"singular_value", r.decomposition.singular_values},
                  {"normalized", r.spectrum}}},
                dir / "spectrum.csv");
  csv::emit_csv(csv::Table::from_matrix(r.reduced.entries, r.reduced.names), dir / "components.csv");
  csv::emit_csv(csv::Table::from_matrix(r.projection.projection, r.reduced.names), dir / "projection.csv");
  out << (dir / "spectrum.csv").generic_string() << '\n'
      << (dir / "components.csv").generic_string() << '\n'
      << (dir / "projection.csv").generic_string() << '\n'
      << "k = " << r.projection.k << ", energy captured = " << csv::format_real(r.projection.energy_captured)
      << '\n';
}

/// Top-level help: every subcommand at every depth, with its flags.
inline std::string full_help(const CLI::App& app) {
  std::string text = app.help("", CLI::AppFormatMode::All);
  auto walk = [&](auto&& self, const CLI::App& node, const std::string& path) -> void {
    for (const CLI::App* sub : node.get_subcommands({})) {
      const std::string name = path + " " + sub->get_name();
      if (!sub->get_subcommands({}).empty()) {
        self(self, *sub, name);
        continue;
      }
      if (path == app.get_name()) continue;  // first-level leaves are fully shown above
      text += "\n" + sub->help(path);
    }
  };
  walk(walk, app, app.get_name());
  return text;
}

/// Parses `args` (args[0] is the program name) and runs the selected subcommand.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"phaselens: Lorenz and KdV simulation, trajectory-matrix embedding and PCA phase-space reconstruction",
               "phaselens"};
  app.require_subcommand(1);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Integrate a system and write its raw output as CSV");
  simulate->require_subcommand(1);
  std::optional<std::string> out_flag;

  auto* sim_lorenz = simulate->add_subcommand("lorenz", "Lorenz series -> <out>/lorenz-series.csv (t,x,y,z)");
  lorenz::Params lp;
  std::vector<double> initial{0.0, 1.0, 0.0};
  double lorenz_dt = 0.01;
  std::size_t lorenz_steps = 5000;
  sim_lorenz->add_option("--out", out_flag, "Output directory (default $PHASELENS_OUT or ./phaselens-out)");
  sim_lorenz->add_option("--dt", lorenz_dt, "RK4 step size h")->capture_default_str();
  sim_lorenz->add_option("--steps", lorenz_steps, "Number of RK4 steps")->capture_default_str();
  sim_lorenz->add_option("--sigma", lp.sigma, "Prandtl number")->capture_default_str();
  sim_lorenz->add_option("--rayleigh", lp.r, "Rayleigh number r")->capture_default_str();
  sim_lorenz->add_option("--beta", lp.b, "Region-size parameter b")->capture_default_str();
  sim_lorenz->add_option("--initial", initial, "Initial state x y z")->expected(3);

  auto* sim_kdv = simulate->add_subcommand("kdv", "KdV soliton field -> <out>/kdv-field.csv (t,u_0..u_N-1)");
  std::size_t grid = 0;
  double velocity = 0.0;
  std::optional<double> kdv_dt;
  std::optional<std::size_t> kdv_steps;
  double half_length = kdv::Params{}.half_length;
  std::size_t record_stride = 1;
  bool dealias = false;
  sim_kdv->add_option("--out", out_flag, "Output directory (default $PHASELENS_OUT or ./phaselens-out)");
  sim_kdv->add_option("--grid", grid, "Number of Fourier collocation points N (power of two)")->required();
  sim_kdv->add_option("--velocity", velocity, "Soliton velocity v")->required();
  sim_kdv->add_option("--dt", kdv_dt, "Time step (default 0.4/N^2)");
  sim_kdv->add_option("--steps", kdv_steps, "Number of RK4 steps (default 256 for N=16, else 1000)");
  sim_kdv->add_option("--half-length", half_length, "Domain half-length l, domain [-l, l)")->capture_default_str();
  sim_kdv->add_option("--stride", record_stride, "Record every n-th step")->capture_default_str();
  sim_kdv->add_flag("--dealias", dealias, "Apply the 2/3 dealiasing rule to the nonlinear term");

  // embed
  auto* embed_cmd = app.add_subcommand("embed", "Series or field CSV -> <out>/trajectory.csv (one observation per row)");
  EmbedArgs ea;
  embed_cmd->add_option("--input", ea.input, "Input CSV with a header row")->required();
  embed_cmd->add_option("--out", out_flag, "Output directory (default $PHASELENS_OUT or ./phaselens-out)");
  embed_cmd->add_option("--column", ea.column, "Series column for --window (default x, else first non-t column)");
  embed_cmd->add_option("--window", ea.window, "Hankel window length L, 2 <= L <= N/2");
  embed_cmd->add_option("--rows", ea.rows, "Number of field snapshots to keep");
  embed_cmd->add_option("--stride", ea.stride, "Snapshot stride for --rows (default: spread over the run)");

  // pca
  auto* pca_cmd = app.add_subcommand("pca", "Matrix CSV -> spectrum.csv, components.csv, projection.csv");
  PcaArgs pa;
  pca_cmd->add_option("--input", pa.input, "Matrix CSV, rows = observations (a 't' column is ignored)")->required();
  pca_cmd->add_option("--out", out_flag, "Output directory (default $PHASELENS_OUT or ./phaselens-out)");
  auto* k_opt = pca_cmd->add_option("--k", pa.k, "Number of components (default 3)");
  auto* e_opt = pca_cmd->add_option("--energy", pa.energy, "Keep the smallest k whose singular-value share >= this (0..1]");
  k_opt->excludes(e_opt);
  pca_cmd->add_flag("--no-center", pa.no_center, "Do not subtract column means before the covariance");
  pca_cmd->add_option("--decompose", pa.decompose, "covariance | trajectory")->capture_default_str();
  pca_cmd->add_flag("--project-centered", pa.project_centered, "Project the centered matrix instead of the raw one");
  pca_cmd->add_option("--prefix", pa.prefix, "Component name prefix")->capture_default_str();

  // run
  auto* run_cmd = app.add_subcommand("run", "Run a full experiment from a JSON config file or preset name");
  std::string config_source;
  RunOverrides ov;
  run_cmd->add_option("config", config_source, "Config file path or preset name")->required();
  run_cmd->add_option("--out", ov.out, "Output root (overrides config 'output' and $PHASELENS_OUT)");
  run_cmd->add_option("--window", ov.window, "lorenz: single window L (embedding.windows and reconstruction_window)");
  auto* rk = run_cmd->add_option("--k", ov.k, "pca.k");
  auto* re = run_cmd->add_option("--energy", ov.energy, "pca.energy");
  rk->excludes(re);
  run_cmd->add_flag("--no-center", ov.no_center, "pca.center = false");
  run_cmd->add_option("--decompose", ov.decompose, "pca.decompose: covariance | trajectory");
  run_cmd->add_flag("--project-centered", ov.project_centered, "pca.project_centered = true");
  run_cmd->add_option("--grid", ov.grid, "kdv: replace runs with a single run on this grid");
  run_cmd->add_option("--velocity", ov.velocity, "kdv: replace runs with a single run at this velocity");
  run_cmd->add_option("--dt", ov.dt, "lorenz.h or kdv.dt");
  run_cmd->add_option("--steps", ov.steps, "lorenz.steps or kdv.steps");
  run_cmd->add_option("--half-length", ov.half_length, "kdv.half_length");
  run_cmd->add_option("--stride", ov.stride, "embedding.stride (kdv snapshot stride)");
  run_cmd->add_option("--rows", ov.rows, "embedding.rows (kdv snapshot count)");
  run_cmd->add_option("--record-stride", ov.record_stride, "kdv.record_stride");
  run_cmd->add_flag("--dealias", ov.dealias, "kdv.dealias = true");

  // presets
  auto* presets_cmd = app.add_subcommand("presets", "Built-in experiment presets");
  presets_cmd->require_subcommand(1);
  auto* presets_list = presets_cmd->add_subcommand("list", "List preset names");
  auto* presets_show = presets_cmd->add_subcommand("show", "Print a preset's JSON config");
  std::string preset_name;
  presets_show->add_option("name", preset_name, "Preset name")->required();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? full_help(app) : app.help());
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (sim_lorenz->parsed()) {
      cmd_simulate_lorenz(lp, {initial[0], initial[1], initial[2]}, lorenz_dt, lorenz_steps,
                          output_root(out_flag), out);
    } else if (sim_kdv->parsed()) {
      kdv::Params p = kdv::Params::with_defaults(grid, velocity);
      if (kdv_dt) p.dt = *kdv_dt;
      if (kdv_steps) p.steps = *kdv_steps;
      p.half_length = half_length;
      p.record_stride = record_stride;
      p.dealias = dealias;
      cmd_simulate_kdv(p, output_root(out_flag), out);
    } else if (embed_cmd->parsed()) {
      cmd_embed(ea, output_root(out_flag), out);
    } else if (pca_cmd->parsed()) {
      cmd_pca(pa, output_root(out_flag), out);
    } else if (run_cmd->parsed()) {
      auto cfg = load_config(config_source);
      ov.apply(cfg);
      const auto artifacts = pipeline::run_experiment(cfg, output_root(std::nullopt, cfg.output));
      out << artifacts.to_json().dump(2) << '\n';
    } else if (presets_list->parsed()) {
      for (const auto& p : presets::all()) out << p.name << "\t" << p.description << '\n';
    } else if (presets_show->parsed()) {
      const auto* p = presets::find(preset_name);
      if (!p) throw InvalidArgument("unknown preset '" + preset_name + "'");
      out << p->json;
    }
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DivergenceError& e) {
    err << "numerical failure in stage '" << e.stage() << "' at step " << e.step() << ": " << e.what() << '\n';
    return kExitNumerical;
  } catch (const NumericalError& e) {
    err << "numerical failure in stage '" << e.stage() << "': " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace phaselens::cli
