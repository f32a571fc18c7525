#pragma once

// Built-in experiment presets. The same JSON ships under presets/ in the repository.

#include <string_view>
#include <vector>

#include <json.hpp>

#include "phaselens/config.hpp"
#include "phaselens/error.hpp"

namespace phaselens::presets {

struct Preset {
  std::string_view name;
  std::string_view description;
  std::string_view json;
};

inline const std::vector<Preset>& all() {
  static const std::vector<Preset> presets{
      {"lorenz-fig123",
       "Lorenz time series, phase portraits, windowed singular spectra and 3-component reconstruction",
       R"json({
  "name": "lorenz-fig123",
  "system": "lorenz",
  "lorenz": {
    "sigma": 10.0,
    "r": 28.0,
    "b": 2.6666666666666665,
    "initial": [0.0, 1.0, 0.0],
    "h": 0.01,
    "steps": 5000
  },
  "embedding": {
    "windows": [25, 13, 9, 7, 5, 3],
    "reconstruction_window": 25
  },
  "pca": {
    "k": 3,
    "center": true,
    "decompose": "covariance",
    "project_centered": false
  }
}
)json"},
      {"kdv-evolution-fig4",
       "KdV soliton evolution for N = 16, 32, 64, 128 at v = 9, 16, 121, 324",
       R"json({
  "name": "kdv-evolution-fig4",
  "system": "kdv",
  "kdv": {
    "half_length": 3.141592653589793,
    "record_stride": 1,
    "dealias": false,
    "runs": [
      {"grid": 16, "velocity": 9.0},
      {"grid": 32, "velocity": 16.0},
      {"grid": 64, "velocity": 121.0},
      {"grid": 128, "velocity": 324.0}
    ]
  },
  "embedding": {"rows": 26},
  "pca": {"k": 4, "center": true, "decompose": "covariance", "project_centered": false}
}
)json"},
      {"kdv-reconstruction-fig678",
       "KdV 4-component phase-space reconstruction for N = 16, 32, 64 at v = 4, 9, 16",
       R"json({
  "name": "kdv-reconstruction-fig678",
  "system": "kdv",
  "kdv": {
    "half_length": 3.141592653589793,
    "record_stride": 1,
    "dealias": false,
    "runs": [
      {"grid": 16, "velocity": 4.0},
      {"grid": 32, "velocity": 9.0},
      {"grid": 64, "velocity": 16.0}
    ]
  },
  "embedding": {"rows": 26},
  "pca": {"k": 4, "center": true, "decompose": "covariance", "project_centered": false}
}
)json"},
      {"kdv-spectrum-fig5-9",
       "KdV normalized singular spectra at the evolution and the small velocities",
       R"json({
  "name": "kdv-spectrum-fig5-9",
  "system": "kdv",
  "kdv": {
    "half_length": 3.141592653589793,
    "record_stride": 1,
    "dealias": false,
    "runs": [
      {"grid": 16, "velocity": 9.0, "group": "evolution-velocities"},
      {"grid": 32, "velocity": 16.0, "group": "evolution-velocities"},
      {"grid": 64, "velocity": 121.0, "group": "evolution-velocities"},
      {"grid": 128, "velocity": 324.0, "group": "evolution-velocities"},
      {"grid": 16, "velocity": 4.0, "group": "small-velocities"},
      {"grid": 32, "velocity": 9.0, "group": "small-velocities"},
      {"grid": 64, "velocity": 16.0, "group": "small-velocities"},
      {"grid": 128, "velocity": 25.0, "group": "small-velocities"}
    ]
  },
  "embedding": {"rows": 26},
  "pca": {"k": 4, "center": true, "decompose": "covariance", "project_centered": false}
}
)json"},
  };
  return presets;
}

inline const Preset* find(std::string_view name) {
  for (const auto& p : all())
    if (p.name == name) return &p;
  return nullptr;
}

inline config::ExperimentConfig load(std::string_view name) {
  const Preset* p = find(name);
  if (!p) throw InvalidArgument("unknown preset '" + std::string(name) + "'");
  return config::from_json(nlohmann::json::parse(p->json));
}

}  // namespace phaselens::presets
