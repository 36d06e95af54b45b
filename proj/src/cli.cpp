#include "radarclass/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "radarclass/data_io.hpp"
#include "radarclass/model_io.hpp"

namespace radarclass::cli {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
  out << contents;
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "failed writing '" + path + "'");
}

namespace {

WindowDataset load_windows(const std::string& path) {
  std::istringstream in(read_file(path));
  return read_windows(in);
}

Dataset load_features(const std::string& path, std::string* digest = nullptr) {
  const std::string text = read_file(path);
  if (digest) *digest = fnv1a_hex(text);
  std::istringstream in(text);
  return read_features(in);
}

}  // namespace

void cmd_generate(const PipelineConfig& cfg, Console& io) {
  cfg.validate();
  for (auto c : kAllClasses) {
    if (cfg.counts[static_cast<std::size_t>(class_code(c))] == 0) {
      io.err << "warning: count for class '" << class_name(c) << "' is 0; it will be absent\n";
    }
  }
  const WindowDataset data = generate_dataset(cfg.counts, cfg.simulator);
  std::ostringstream os;
  write_windows(os, data);
  write_file(cfg.paths.windows, os.str());
  if (!io.quiet) {
    io.out << "wrote " << data.windows.size() << " windows to " << cfg.paths.windows << '\n';
    for (auto c : kAllClasses) {
      io.out << "  " << std::left << std::setw(8) << class_name(c) << std::right
             << cfg.counts[static_cast<std::size_t>(class_code(c))] << '\n';
    }
  }
}

void cmd_extract(const PipelineConfig& cfg, Console& io) {
  cfg.features.validate();
  const WindowDataset windows = load_windows(cfg.paths.windows);
  const Dataset data = extract_dataset(windows, cfg.features);
  std::ostringstream os;
  write_features(os, data);
  write_file(cfg.paths.features, os.str());
  if (!io.quiet) io.out << "wrote " << data.records.size() << " feature rows to " << cfg.paths.features << '\n';
}

void cmd_train(const PipelineConfig& cfg, Console& io) {
  cfg.training.validate();
  std::string digest;
  const Dataset data = load_features(cfg.paths.features, &digest);
  const TrainResult result = fit(data, cfg.training);
  for (const auto& w : result.split.warnings) io.err << "warning: " << w << '\n';

  ModelBundle bundle;
  bundle.model = result.model;
  bundle.train_config = cfg.training;
  bundle.test_indices = result.split.test;
  bundle.dataset_size = data.records.size();
  bundle.dataset_digest = digest;
  bundle.epoch_loss = result.epoch_loss;
  bundle.train_accuracy = result.train_accuracy;
  bundle.test_accuracy = result.test_accuracy;
  write_file(cfg.paths.model, save_model(bundle));

  if (!io.quiet) {
    const auto& loss = result.epoch_loss;
    io.out << "trained on " << result.split.train.size() << " records, held out "
           << result.split.test.size() << " (" << to_string(cfg.training.split_mode) << " split)\n";
    io.out << std::setprecision(6) << "loss: epoch 1 " << loss.front();
    if (loss.size() > 2) io.out << ", epoch " << loss.size() / 2 << ' ' << loss[loss.size() / 2 - 1];
    io.out << ", epoch " << loss.size() << ' ' << loss.back() << '\n';
    io.out << std::fixed << std::setprecision(4) << "train accuracy " << result.train_accuracy
           << "\ntest accuracy " << result.test_accuracy << '\n'
           << std::defaultfloat;
    io.out << "model written to " << cfg.paths.model << '\n';
  }
}

EvaluationReport cmd_eval(const PipelineConfig& cfg, bool all_rows, Console& io) {
  const ModelBundle bundle = load_model(read_file(cfg.paths.model));
  std::string digest;
  const Dataset data = load_features(cfg.paths.features, &digest);
  if (data.records.empty()) throw Error(ErrorKind::EmptyEvaluation, "features file has no rows");

  std::vector<LabeledFeatures> rows;
  const bool use_split = !all_rows && digest == bundle.dataset_digest;
  if (use_split) {
    for (auto i : bundle.test_indices) {
      if (i >= data.records.size()) throw Error(ErrorKind::Input, "recorded test index out of range");
      rows.push_back(data.records[i]);
    }
  } else {
    rows = data.records;
  }
  const auto preds = predict_batch(bundle.model, rows);
  std::vector<MaterialClass> actual, predicted;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    actual.push_back(rows[i].label);
    predicted.push_back(preds[i].label);
  }
  const EvaluationReport r = report(confusion_matrix(actual, predicted));
  write_file(cfg.paths.report, render_json(r));
  if (!io.quiet) {
    io.out << (use_split ? "evaluated the model's recorded test split" : "evaluated all rows") << " ("
           << rows.size() << " records)\n"
           << render_text(r) << "report written to " << cfg.paths.report << '\n';
  }
  return r;
}

void cmd_predict(const PipelineConfig& cfg, const std::string& windows_path,
                 const std::string& out_path, Console& io) {
  const ModelBundle bundle = load_model(read_file(cfg.paths.model));
  const WindowDataset windows = load_windows(windows_path);
  std::ostringstream os;
  char buf[64];
  for (std::size_t i = 0; i < windows.windows.size(); ++i) {
    const Prediction p = predict(bundle.model, extract_features(windows.windows[i].window, cfg.features));
    os << i << ' ' << class_name(p.label);
    for (double prob : p.probabilities) {
      std::snprintf(buf, sizeof buf, " %.6f", prob);
      os << buf;
    }
    os << '\n';
  }
  if (out_path.empty()) {
    io.out << os.str();
  } else {
    write_file(out_path, os.str());
    if (!io.quiet) io.out << "wrote " << windows.windows.size() << " predictions to " << out_path << '\n';
  }
}

EvaluationReport run_demo(PipelineConfig cfg, const std::filesystem::path& dir, Console& io) {
  std::filesystem::create_directories(dir);
  cfg.paths.windows = (dir / "windows.ndjson").string();
  cfg.paths.features = (dir / "features.csv").string();
  cfg.paths.model = (dir / "model.json").string();
  cfg.paths.report = (dir / "report.json").string();
  cfg.validate();

  Console quiet{io.out, io.err, true};
  auto stage = [&](const char* name, auto&& fn) {
    try {
      return fn();
    } catch (const Error& e) {
      throw Error(e.kind(), std::string("demo stage '") + name + "': " + e.what());
    }
  };
  stage("generate", [&] { cmd_generate(cfg, quiet); });
  stage("extract", [&] { cmd_extract(cfg, quiet); });
  stage("train", [&] { cmd_train(cfg, quiet); });
  const EvaluationReport r = stage("eval", [&] { return cmd_eval(cfg, false, quiet); });
  if (!io.quiet) {
    io.out << "demo run in " << dir.string() << "\n" << render_text(r);
    io.out << (r.accuracy >= kDemoAccuracyGate ? "PASS" : "FAIL") << ": held-out accuracy "
           << std::fixed << std::setprecision(4) << r.accuracy << " (gate " << kDemoAccuracyGate
           << ")\n"
           << std::defaultfloat;
  }
  return r;
}

namespace {

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::InvalidArgument:
      return kUsageError;
    default:
      return kDataError;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Container material classification from radar range sweeps", "radarclass"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  bool quiet = false;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "pipeline config (JSON)");
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--out", out_path, "output path");
    sub->add_flag("--quiet", quiet, "suppress progress output");
  };

  auto* gen = app.add_subcommand("generate", "simulate labeled classification windows");
  common(gen);
  std::optional<long long> count;
  gen->add_option("--count", count, "windows per class (all classes)");

  auto* ext = app.add_subcommand("extract", "extract peak features from a windows file");
  common(ext);
  std::string in_path;
  ext->add_option("--in", in_path, "windows file");

  auto* trn = app.add_subcommand("train", "train the classifier on a features file");
  common(trn);
  std::string features_path;
  std::optional<long long> epochs;
  std::optional<std::string> split_mode;
  bool no_weights = false;
  trn->add_option("--features", features_path, "features file");
  trn->add_option("--epochs", epochs, "training epochs");
  trn->add_option("--split", split_mode, "split mode: stratified, shuffled or container");
  trn->add_flag("--no-class-weights", no_weights, "train without class weights");

  auto* evl = app.add_subcommand("eval", "evaluate a model and write a report");
  common(evl);
  std::string model_path;
  bool all_rows = false;
  evl->add_option("--model", model_path, "model file");
  evl->add_option("--features", features_path, "features file");
  evl->add_flag("--all", all_rows, "evaluate every row, not the recorded test split");

  auto* prd = app.add_subcommand("predict", "classify every window of a windows file");
  common(prd);
  std::string windows_path;
  prd->add_option("--model", model_path, "model file");
  prd->add_option("--windows", windows_path, "windows file")->required();

  auto* demo = app.add_subcommand("demo", "run generate, extract, train and eval end to end");
  common(demo);
  demo->add_option("--count", count, "windows per class (all classes)");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, eo;
    const int code = app.exit(e, o, eo);
    out << o.str();
    err << eo.str();
    return code == 0 ? kOk : kUsageError;
  }

  Console io{out, err, quiet};
  try {
    PipelineConfig cfg = config_path.empty() ? PipelineConfig{} : load_config(config_path);
    if (count) {
      if (*count < 0) throw Error(ErrorKind::Config, "--count must be >= 0");
      cfg.counts.fill(static_cast<std::size_t>(*count));
    }
    if (gen->parsed()) {
      if (seed) cfg.simulator.seed = *seed;
      if (!out_path.empty()) cfg.paths.windows = out_path;
      cmd_generate(cfg, io);
    } else if (ext->parsed()) {
      if (!in_path.empty()) cfg.paths.windows = in_path;
      if (!out_path.empty()) cfg.paths.features = out_path;
      cmd_extract(cfg, io);
    } else if (trn->parsed()) {
      if (seed) cfg.training.seed = *seed;
      if (epochs) {
        if (*epochs < 1) throw Error(ErrorKind::Config, "--epochs must be at least 1");
        cfg.training.epochs = static_cast<std::size_t>(*epochs);
      }
      if (split_mode) cfg.training.split_mode = split_mode_from_string(*split_mode);
      if (no_weights) cfg.training.use_class_weights = false;
      if (!features_path.empty()) cfg.paths.features = features_path;
      if (!out_path.empty()) cfg.paths.model = out_path;
      cmd_train(cfg, io);
    } else if (evl->parsed()) {
      if (!model_path.empty()) cfg.paths.model = model_path;
      if (!features_path.empty()) cfg.paths.features = features_path;
      if (!out_path.empty()) cfg.paths.report = out_path;
      cmd_eval(cfg, all_rows, io);
    } else if (prd->parsed()) {
      if (!model_path.empty()) cfg.paths.model = model_path;
      cmd_predict(cfg, windows_path, out_path, io);
    } else if (demo->parsed()) {
      if (seed) {
        cfg.simulator.seed = *seed;
        cfg.training.seed = *seed;
      }
      const std::filesystem::path dir =
          out_path.empty() ? std::filesystem::temp_directory_path() /
                                 ("radarclass-demo-" + std::to_string(cfg.simulator.seed))
                           : std::filesystem::path(out_path);
      const EvaluationReport r = run_demo(cfg, dir, io);
      return r.accuracy >= kDemoAccuracyGate ? kOk : kGateFailure;
    }
  } catch (const Error& e) {
    err << "radarclass: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "radarclass: " << e.what() << '\n';
    return kDataError;
  }
  return kOk;
}

}  // namespace radarclass::cli
