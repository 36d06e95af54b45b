#include "radarclass/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace radarclass {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& section) {
  if (!obj.is_object()) throw Error(ErrorKind::Config, "section '" + section + "' must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!known.count(it.key())) {
      throw Error(ErrorKind::Config, "unknown key '" + it.key() + "' in section '" + section + "'");
    }
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

Interval read_interval(const json& j) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorKind::Config, "ranges are [low, high] pairs");
  return Interval{j[0].get<double>(), j[1].get<double>()};
}

ojson interval_json(const Interval& iv) { return ojson::array({iv.low, iv.high}); }

void read_profile(const json& j, MaterialProfile& p, const std::string& name) {
  reject_unknown(j, {"front_amp_range", "back_to_front_ratio_range", "front_var_scale",
                     "back_var_scale", "overall_scale", "radius_range_mm"},
                 "simulator.profiles." + name);
  if (j.contains("front_amp_range")) p.front_amp_range = read_interval(j.at("front_amp_range"));
  if (j.contains("back_to_front_ratio_range")) {
    p.back_to_front_ratio_range = read_interval(j.at("back_to_front_ratio_range"));
  }
  if (j.contains("radius_range_mm")) p.radius_range_mm = read_interval(j.at("radius_range_mm"));
  read(j, "front_var_scale", p.front_var_scale);
  read(j, "back_var_scale", p.back_var_scale);
  read(j, "overall_scale", p.overall_scale);
}

void read_simulator(const json& j, PipelineConfig& cfg) {
  reject_unknown(j, {"seed", "frames_per_window", "standoff_mm", "noise_sigma", "pulse_width_bins",
                     "pulse_support_bins", "windows_per_container", "axis", "counts",
                     "angular_modulation_depth", "profiles"},
                 "simulator");
  SimConfig& s = cfg.simulator;
  read(j, "seed", s.seed);
  read(j, "frames_per_window", s.frames_per_window);
  read(j, "standoff_mm", s.standoff_mm);
  read(j, "noise_sigma", s.noise_sigma);
  read(j, "pulse_width_bins", s.pulse_width_bins);
  read(j, "pulse_support_bins", s.pulse_support_bins);
  read(j, "windows_per_container", s.windows_per_container);
  if (j.contains("axis")) {
    const auto& a = j.at("axis");
    reject_unknown(a, {"start_mm", "step_mm", "num_bins"}, "simulator.axis");
    RangeAxis axis = s.axis;
    read(a, "start_mm", axis.start_mm);
    read(a, "step_mm", axis.step_mm);
    read(a, "num_bins", axis.num_bins);
    s.axis = RangeAxis(axis.start_mm, axis.step_mm, axis.num_bins);
  }
  auto per_class = [](const json& obj, const std::string& section, auto&& apply) {
    if (!obj.is_object()) throw Error(ErrorKind::Config, "section '" + section + "' must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      MaterialClass c;
      try {
        c = class_from_name(it.key());
      } catch (const Error&) {
        throw Error(ErrorKind::Config, "unknown class '" + it.key() + "' in " + section);
      }
      apply(c, it.value());
    }
  };
  if (j.contains("counts")) {
    per_class(j.at("counts"), "simulator.counts", [&](MaterialClass c, const json& v) {
      const auto n = v.get<long long>();
      if (n < 0) throw Error(ErrorKind::Config, "per-class counts must be >= 0");
      cfg.counts[static_cast<std::size_t>(class_code(c))] = static_cast<std::size_t>(n);
    });
  }
  if (j.contains("angular_modulation_depth")) {
    per_class(j.at("angular_modulation_depth"), "simulator.angular_modulation_depth",
              [&](MaterialClass c, const json& v) {
                s.angular_modulation_depth[static_cast<std::size_t>(class_code(c))] = v.get<double>();
              });
  }
  if (j.contains("profiles")) {
    per_class(j.at("profiles"), "simulator.profiles", [&](MaterialClass c, const json& v) {
      if (c == MaterialClass::Empty) throw Error(ErrorKind::Config, "the empty class has no profile");
      read_profile(v, s.profile(c), std::string(class_name(c)));
    });
  }
}

}  // namespace

TrainConfig train_config_from_json(const json& j) {
  reject_unknown(j, {"epochs", "batch_size", "learning_rate", "beta1", "beta2", "adam_epsilon", "seed",
                     "use_class_weights", "hidden_sizes", "dropout_rate", "dropout_after",
                     "split_mode", "test_fraction"},
                 "training");
  TrainConfig t;
  auto read_count = [&](const char* key, std::size_t& out) {
    if (!j.contains(key)) return;
    const auto v = j.at(key).get<long long>();
    if (v < 0) throw Error(ErrorKind::Config, std::string(key) + " must be >= 0");
    out = static_cast<std::size_t>(v);
  };
  read_count("epochs", t.epochs);
  read_count("batch_size", t.batch_size);
  read(j, "learning_rate", t.adam.learning_rate);
  read(j, "beta1", t.adam.beta1);
  read(j, "beta2", t.adam.beta2);
  read(j, "adam_epsilon", t.adam.epsilon);
  read(j, "seed", t.seed);
  read(j, "use_class_weights", t.use_class_weights);
  read(j, "hidden_sizes", t.hidden_sizes);
  read(j, "dropout_rate", t.dropout_rate);
  read(j, "dropout_after", t.dropout_after);
  read(j, "test_fraction", t.test_fraction);
  if (j.contains("split_mode")) t.split_mode = split_mode_from_string(j.at("split_mode").get<std::string>());
  return t;
}

ojson train_config_to_json(const TrainConfig& t) {
  ojson j;
  j["epochs"] = t.epochs;
  j["batch_size"] = t.batch_size;
  j["learning_rate"] = t.adam.learning_rate;
  j["beta1"] = t.adam.beta1;
  j["beta2"] = t.adam.beta2;
  j["adam_epsilon"] = t.adam.epsilon;
  j["seed"] = t.seed;
  j["use_class_weights"] = t.use_class_weights;
  j["hidden_sizes"] = t.hidden_sizes;
  j["dropout_rate"] = t.dropout_rate;
  j["dropout_after"] = t.dropout_after;
  j["split_mode"] = to_string(t.split_mode);
  j["test_fraction"] = t.test_fraction;
  return j;
}

void PipelineConfig::validate() const {
  simulator.validate();
  features.validate();
  training.validate();
  std::size_t total = 0;
  for (auto n : counts) total += n;
  if (total == 0) throw Error(ErrorKind::Config, "all per-class counts are zero");
  if (features.guard_bins + 2 > simulator.axis.num_bins) {
    throw Error(ErrorKind::Config, "guard_bins leaves no room on the range axis");
  }
}

PipelineConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, std::string("config is not valid JSON: ") + e.what());
  }
  PipelineConfig cfg;
  try {
    reject_unknown(root, {"simulator", "features", "training", "evaluation", "paths"}, "<root>");
    if (root.contains("simulator")) read_simulator(root.at("simulator"), cfg);
    if (root.contains("features")) {
      const auto& f = root.at("features");
      reject_unknown(f, {"guard_bins", "ratio_epsilon", "ratio_clamp"}, "features");
      read(f, "guard_bins", cfg.features.guard_bins);
      read(f, "ratio_epsilon", cfg.features.ratio_epsilon);
      read(f, "ratio_clamp", cfg.features.ratio_clamp);
    }
    if (root.contains("training")) cfg.training = train_config_from_json(root.at("training"));
    if (root.contains("evaluation")) {
      const auto& e = root.at("evaluation");
      reject_unknown(e, {"split_mode", "test_fraction"}, "evaluation");
      read(e, "test_fraction", cfg.training.test_fraction);
      if (e.contains("split_mode")) {
        cfg.training.split_mode = split_mode_from_string(e.at("split_mode").get<std::string>());
      }
    }
    if (root.contains("paths")) {
      const auto& p = root.at("paths");
      reject_unknown(p, {"windows", "features", "model", "report"}, "paths");
      read(p, "windows", cfg.paths.windows);
      read(p, "features", cfg.paths.features);
      read(p, "model", cfg.paths.model);
      read(p, "report", cfg.paths.report);
    }
    cfg.validate();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, std::string("config: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw;
    throw Error(ErrorKind::Config, e.what());
  }
  return cfg;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

ojson to_json(const PipelineConfig& cfg) {
  ojson root;
  const SimConfig& s = cfg.simulator;
  ojson sim;
  sim["seed"] = s.seed;
  sim["frames_per_window"] = s.frames_per_window;
  sim["standoff_mm"] = s.standoff_mm;
  sim["noise_sigma"] = s.noise_sigma;
  sim["pulse_width_bins"] = s.pulse_width_bins;
  sim["pulse_support_bins"] = s.pulse_support_bins;
  sim["windows_per_container"] = s.windows_per_container;
  sim["axis"] = ojson{{"start_mm", s.axis.start_mm}, {"step_mm", s.axis.step_mm}, {"num_bins", s.axis.num_bins}};
  ojson counts, depth, profiles;
  for (auto c : kAllClasses) {
    const auto i = static_cast<std::size_t>(class_code(c));
    const std::string name(class_name(c));
    counts[name] = cfg.counts[i];
    depth[name] = s.angular_modulation_depth[i];
    if (c == MaterialClass::Empty) continue;
    const auto& p = s.profile(c);
    profiles[name] = ojson{{"front_amp_range", interval_json(p.front_amp_range)},
                           {"back_to_front_ratio_range", interval_json(p.back_to_front_ratio_range)},
                           {"front_var_scale", p.front_var_scale},
                           {"back_var_scale", p.back_var_scale},
                           {"overall_scale", p.overall_scale},
                           {"radius_range_mm", interval_json(p.radius_range_mm)}};
  }
  sim["counts"] = counts;
  sim["angular_modulation_depth"] = depth;
  sim["profiles"] = profiles;
  root["simulator"] = sim;
  root["features"] = ojson{{"guard_bins", cfg.features.guard_bins},
                           {"ratio_epsilon", cfg.features.ratio_epsilon},
                           {"ratio_clamp", cfg.features.ratio_clamp}};
  ojson training = train_config_to_json(cfg.training);
  training.erase("split_mode");
  training.erase("test_fraction");
  root["training"] = training;
  root["evaluation"] = ojson{{"split_mode", to_string(cfg.training.split_mode)},
                             {"test_fraction", cfg.training.test_fraction}};
  root["paths"] = ojson{{"windows", cfg.paths.windows},
                        {"features", cfg.paths.features},
                        {"model", cfg.paths.model},
                        {"report", cfg.paths.report}};
  return root;
}

}  // namespace radarclass
