#pragma once

// Declarative experiment configuration. Unknown keys are errors, and validate()
// checks every constraint that can be checked before computing anything.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "phaselens/embed.hpp"
#include "phaselens/error.hpp"
#include "phaselens/kdv.hpp"
#include "phaselens/lorenz.hpp"
#include "phaselens/pca.hpp"

namespace phaselens::config {

using nlohmann::json;

enum class System { lorenz, kdv };

struct LorenzSection {
  lorenz::Params params{};
  lorenz::State initial{0.0, 1.0, 0.0};
  double h = 0.01;
  std::size_t steps = 5000;
};

struct KdvRun {
  std::size_t grid = 0;
  double velocity = 0.0;
  std::optional<std::size_t> steps;
  std::string group = "all";

  std::string id() const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "N%zu-v%g", grid, velocity);
    return buf;
  }
};

struct KdvSection {
  double half_length = std::numbers::pi;
  std::optional<double> dt;            // default 0.4 / N^2
  std::optional<std::size_t> steps;    // default per grid
  std::size_t record_stride = 1;
  bool dealias = false;
  std::vector<KdvRun> runs;

  kdv::Params params_for(const KdvRun& run) const {
    kdv::Params p = kdv::Params::with_defaults(run.grid, run.velocity);
    p.half_length = half_length;
    if (dt) p.dt = *dt;
    if (steps) p.steps = *steps;
    if (run.steps) p.steps = *run.steps;
    p.record_stride = record_stride;
    p.dealias = dealias;
    return p;
  }
};

struct EmbeddingSection {
  std::vector<std::size_t> windows{25, 13, 9, 7, 5, 3};
  std::size_t reconstruction_window = 25;
  std::size_t rows = 26;
  std::optional<std::size_t> stride;
};

struct PcaSection {
  std::optional<std::size_t> k;
  std::optional<double> energy;
  bool center = true;
  pca::Decompose decompose = pca::Decompose::covariance;
  bool project_centered = false;
};

struct ExperimentConfig {
  std::string name;
  System system = System::lorenz;
  LorenzSection lorenz;
  KdvSection kdv;
  EmbeddingSection embedding;
  PcaSection pca;
  std::optional<std::string> output;

  std::size_t default_k() const { return system == System::lorenz ? 3 : 4; }

  pca::SelectionRule selection_rule() const {
    if (pca.energy) return pca::EnergyThreshold{*pca.energy};
    return pca::FixedCount{pca.k ? *pca.k : default_k()};
  }

  pca::Options pca_options() const {
    pca::Options o;
    o.rule = selection_rule();
    o.center = pca.center;
    o.decompose = pca.decompose;
    o.project_centered = pca.project_centered;
    o.prefix = system == System::lorenz ? "c" : "y";
    return o;
  }

  void validate() const;
};

namespace detail {

inline void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw InvalidArgument("config: '" + where + "' must be an object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.contains(key)) throw InvalidArgument("config: unknown key '" + where + "." + key + "'");
  }
}

inline bool non_negative_integer(const json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

inline bool all_unsigned(const json& v) {
  if (v.is_array()) {
    for (const json& e : v)
      if (!non_negative_integer(e)) return false;
    return true;
  }
  return non_negative_integer(v);
}

template <class T>
T get(const json& j, const char* key, const std::string& where) {
  if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::vector<std::size_t>>) {
    if (!j.contains(key) || !all_unsigned(j.at(key))) {
      throw InvalidArgument("config: '" + where + "." + key + "' must be a non-negative integer");
    }
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidArgument("config: bad value for '" + where + "." + key + "': " + e.what());
  }
}

template <class T>
void read_if(const json& j, const char* key, T& dest, const std::string& where) {
  if (j.contains(key) && !j.at(key).is_null()) dest = get<T>(j, key, where);
}

template <class T>
void read_if(const json& j, const char* key, std::optional<T>& dest, const std::string& where) {
  if (j.contains(key) && !j.at(key).is_null()) dest = get<T>(j, key, where);
}

inline bool safe_name(const std::string& s) {
  if (s.empty() || s == "." || s == "..") return false;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.';
    if (!ok) return false;
  }
  return true;
}

}  // namespace detail

inline ExperimentConfig from_json(const json& j) {
  using detail::check_keys;
  using detail::read_if;
  check_keys(j, {"name", "system", "lorenz", "kdv", "embedding", "pca", "output"}, "config");

  ExperimentConfig c;
  c.name = detail::get<std::string>(j, "name", "config");
  const auto system = detail::get<std::string>(j, "system", "config");
  if (system == "lorenz") {
    c.system = System::lorenz;
  } else if (system == "kdv") {
    c.system = System::kdv;
  } else {
    throw InvalidArgument("config: system must be 'lorenz' or 'kdv', got '" + system + "'");
  }
  read_if(j, "output", c.output, "config");

  if (j.contains("lorenz")) {
    const json& l = j.at("lorenz");
    check_keys(l, {"sigma", "r", "b", "initial", "h", "steps"}, "lorenz");
    read_if(l, "sigma", c.lorenz.params.sigma, "lorenz");
    read_if(l, "r", c.lorenz.params.r, "lorenz");
    read_if(l, "b", c.lorenz.params.b, "lorenz");
    read_if(l, "h", c.lorenz.h, "lorenz");
    read_if(l, "steps", c.lorenz.steps, "lorenz");
    if (l.contains("initial")) {
      const auto v = detail::get<std::vector<double>>(l, "initial", "lorenz");
      if (v.size() != 3) throw InvalidArgument("config: lorenz.initial needs 3 numbers");
      c.lorenz.initial = {v[0], v[1], v[2]};
    }
  }

  if (j.contains("kdv")) {
    const json& k = j.at("kdv");
    check_keys(k, {"half_length", "dt", "steps", "record_stride", "dealias", "runs"}, "kdv");
    read_if(k, "half_length", c.kdv.half_length, "kdv");
    read_if(k, "dt", c.kdv.dt, "kdv");
    read_if(k, "steps", c.kdv.steps, "kdv");
    read_if(k, "record_stride", c.kdv.record_stride, "kdv");
    read_if(k, "dealias", c.kdv.dealias, "kdv");
    if (k.contains("runs")) {
      if (!k.at("runs").is_array()) throw InvalidArgument("config: kdv.runs must be an array");
      for (const json& r : k.at("runs")) {
        check_keys(r, {"grid", "velocity", "steps", "group"}, "kdv.runs[]");
        KdvRun run;
        run.grid = detail::get<std::size_t>(r, "grid", "kdv.runs[]");
        run.velocity = detail::get<double>(r, "velocity", "kdv.runs[]");
        read_if(r, "steps", run.steps, "kdv.runs[]");
        read_if(r, "group", run.group, "kdv.runs[]");
        c.kdv.runs.push_back(run);
      }
    }
  }

  if (j.contains("embedding")) {
    const json& e = j.at("embedding");
    check_keys(e, {"windows", "reconstruction_window", "rows", "stride"}, "embedding");
    read_if(e, "windows", c.embedding.windows, "embedding");
    read_if(e, "reconstruction_window", c.embedding.reconstruction_window, "embedding");
    read_if(e, "rows", c.embedding.rows, "embedding");
    read_if(e, "stride", c.embedding.stride, "embedding");
  }

  if (j.contains("pca")) {
    const json& p = j.at("pca");
    check_keys(p, {"k", "energy", "center", "decompose", "project_centered"}, "pca");
    read_if(p, "k", c.pca.k, "pca");
    read_if(p, "energy", c.pca.energy, "pca");
    read_if(p, "center", c.pca.center, "pca");
    read_if(p, "project_centered", c.pca.project_centered, "pca");
    if (p.contains("decompose")) {
      const auto d = detail::get<std::string>(p, "decompose", "pca");
      if (d == "covariance") {
        c.pca.decompose = pca::Decompose::covariance;
      } else if (d == "trajectory") {
        c.pca.decompose = pca::Decompose::trajectory;
      } else {
        throw InvalidArgument("config: pca.decompose must be 'covariance' or 'trajectory'");
      }
    }
  }
  return c;
}

inline json to_json(const ExperimentConfig& c) {
  json j;
  j["name"] = c.name;
  j["system"] = c.system == System::lorenz ? "lorenz" : "kdv";
  if (c.output) j["output"] = *c.output;
  if (c.system == System::lorenz) {
    const auto& l = c.lorenz;
    j["lorenz"] = {{"sigma", l.params.sigma}, {"r", l.params.r}, {"b", l.params.b},
                   {"initial", {l.initial.x, l.initial.y, l.initial.z}},
                   {"h", l.h}, {"steps", l.steps}};
    j["embedding"] = {{"windows", c.embedding.windows},
                      {"reconstruction_window", c.embedding.reconstruction_window}};
  } else {
    json runs = json::array();
    for (const auto& r : c.kdv.runs) {
      json rj = {{"grid", r.grid}, {"velocity", r.velocity}, {"group", r.group}};
      if (r.steps) rj["steps"] = *r.steps;
      runs.push_back(rj);
    }
    j["kdv"] = {{"half_length", c.kdv.half_length}, {"record_stride", c.kdv.record_stride},
                {"dealias", c.kdv.dealias}, {"runs", runs}};
    if (c.kdv.dt) j["kdv"]["dt"] = *c.kdv.dt;
    if (c.kdv.steps) j["kdv"]["steps"] = *c.kdv.steps;
    j["embedding"] = {{"rows", c.embedding.rows}};
    if (c.embedding.stride) j["embedding"]["stride"] = *c.embedding.stride;
  }
  json p = {{"center", c.pca.center},
            {"decompose", c.pca.decompose == pca::Decompose::covariance ? "covariance" : "trajectory"},
            {"project_centered", c.pca.project_centered}};
  if (c.pca.k) p["k"] = *c.pca.k;
  if (c.pca.energy) p["energy"] = *c.pca.energy;
  j["pca"] = p;
  return j;
}

inline void ExperimentConfig::validate() const {
  if (!detail::safe_name(name)) {
    throw InvalidArgument("config: name must be non-empty and use only [A-Za-z0-9._-]");
  }
  if (pca.k && pca.energy) throw InvalidArgument("config: set either pca.k or pca.energy, not both");
  if (pca.energy && !(*pca.energy > 0.0 && *pca.energy <= 1.0)) {
    throw InvalidArgument("config: pca.energy must lie in (0, 1]");
  }
  if (pca.k && *pca.k == 0) throw InvalidArgument("config: pca.k must be positive");
  const std::size_t k = pca.k ? *pca.k : default_k();

  if (system == System::lorenz) {
    lorenz.params.validate();
    ode::StepSpec{0.0, lorenz.h, lorenz.steps}.validate();
    const std::size_t samples = lorenz.steps + 1;
    if (samples < 4) {
      throw InvalidArgument("insufficient data: " + std::to_string(samples) +
                            " samples cannot be embedded (increase lorenz.steps)");
    }
    if (embedding.windows.empty()) throw InvalidArgument("config: embedding.windows is empty");
    std::vector<std::size_t> all = embedding.windows;
    all.push_back(embedding.reconstruction_window);
    for (std::size_t w : all) {
      if (!embed::window_in_range(w, samples)) {
        throw InvalidArgument("window length " + std::to_string(w) +
                              " out of range: need 2 <= L <= N/2 with N = " + std::to_string(samples));
      }
    }
    if (!pca.energy && k > embedding.reconstruction_window) {
      throw InvalidArgument("k out of range: k = " + std::to_string(k) + " exceeds window " +
                            std::to_string(embedding.reconstruction_window));
    }
  } else {
    if (kdv.runs.empty()) throw InvalidArgument("config: kdv.runs is empty");
    std::set<std::string> ids;
    for (const auto& run : kdv.runs) {
      const kdv::Params p = kdv.params_for(run);
      p.validate();
      if (!detail::safe_name(run.group)) throw InvalidArgument("config: bad kdv run group name");
      if (!ids.insert(run.id()).second) throw InvalidArgument("config: duplicate kdv run " + run.id());
      const std::size_t snapshots = (p.steps + p.record_stride - 1) / p.record_stride + 1;
      if (embedding.rows < 2) throw InvalidArgument("config: embedding.rows must be >= 2");
      const std::size_t stride = embedding.stride ? *embedding.stride
                                                  : embed::even_stride(snapshots, embedding.rows);
      if (stride == 0 || (embedding.rows - 1) * stride > snapshots - 1) {
        throw InvalidArgument("insufficient snapshots for run " + run.id() + ": " +
                              std::to_string(embedding.rows) + " rows at stride " +
                              std::to_string(stride) + " from " + std::to_string(snapshots));
      }
      if (!pca.energy && k > p.grid) {
        throw InvalidArgument("k out of range: k = " + std::to_string(k) + " exceeds grid " +
                              std::to_string(p.grid));
      }
    }
  }
}

}  // namespace phaselens::config
