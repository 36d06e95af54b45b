#pragma once

#include <string>

#include <json.hpp>

#include "radarclass/classifier.hpp"
#include "radarclass/features.hpp"
#include "radarclass/simulator.hpp"

namespace radarclass {

struct PipelinePaths {
  std::string windows = "windows.ndjson";
  std::string features = "features.csv";
  std::string model = "model.json";
  std::string report = "report.json";
};

/// Every knob of the generate -> extract -> train -> eval pipeline.
struct PipelineConfig {
  SimConfig simulator;
  ClassCounts counts{400, 400, 400, 400, 400};
  FeatureConfig features;
  // Also carries the evaluation section (split mode and test fraction).
  TrainConfig training;
  PipelinePaths paths;

  void validate() const;
};

// JSON layout:
// {
//   "simulator":  { "seed", "frames_per_window", "standoff_mm", "noise_sigma",
//                   "pulse_width_bins", "pulse_support_bins", "windows_per_container",
//                   "axis": {"start_mm","step_mm","num_bins"},
//                   "counts": {"metal": n, ...},
//                   "angular_modulation_depth": {"metal": d, ...},
//                   "profiles": {"glass": {"front_amp_range": [lo, hi], ...}, ...} },
//   "features":   { "guard_bins", "ratio_epsilon", "ratio_clamp" },
//   "training":   { "epochs", "batch_size", "learning_rate", "beta1", "beta2",
//                   "adam_epsilon", "seed", "use_class_weights", "hidden_sizes",
//                   "dropout_rate", "dropout_after" },
//   "evaluation": { "split_mode", "test_fraction" },
//   "paths":      { "windows", "features", "model", "report" }
// }
// All sections and keys are optional; unknown keys are rejected.
PipelineConfig parse_config(const std::string& json_text);
PipelineConfig load_config(const std::string& path);
nlohmann::ordered_json to_json(const PipelineConfig& cfg);

nlohmann::ordered_json train_config_to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const nlohmann::json& j);

}  // namespace radarclass
