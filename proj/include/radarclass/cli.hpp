#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "radarclass/config.hpp"
#include "radarclass/evaluation.hpp"

namespace radarclass::cli {

enum ExitCode : int {
  kOk = 0,
  kUsageError = 1,
  kDataError = 2,
  kGateFailure = 3,
};

inline constexpr double kDemoAccuracyGate = 0.95;

struct Console {
  std::ostream& out;
  std::ostream& err;
  bool quiet = false;
};

// Each command reads and writes the paths in cfg.paths.
void cmd_generate(const PipelineConfig& cfg, Console& io);
void cmd_extract(const PipelineConfig& cfg, Console& io);
void cmd_train(const PipelineConfig& cfg, Console& io);

/// Evaluates on the model's recorded test split when the features file is the
/// one it was trained on (same digest), otherwise on every row. `all_rows`
/// forces the latter.
EvaluationReport cmd_eval(const PipelineConfig& cfg, bool all_rows, Console& io);

/// One line per window: index, predicted class, five probabilities.
void cmd_predict(const PipelineConfig& cfg, const std::string& windows_path,
                 const std::string& out_path, Console& io);

/// generate -> extract -> train -> eval inside `dir`.
EvaluationReport run_demo(PipelineConfig cfg, const std::filesystem::path& dir, Console& io);

/// Parses argv and dispatches; returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace radarclass::cli
