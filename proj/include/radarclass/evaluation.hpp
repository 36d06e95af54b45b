#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "radarclass/domain.hpp"

namespace radarclass {

enum class SplitMode {
  Stratified,  // shuffle, then split within each class
  Shuffled,    // plain shuffle, first round(N * fraction) to test
  Container,   // whole containers go to one side, stratified by class
};

const char* to_string(SplitMode m) noexcept;
SplitMode split_mode_from_string(const std::string& s);

struct SplitResult {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  std::vector<std::string> warnings;
};

/// Partition record indices 0..N-1 into train and test. Deterministic given
/// (labels, fraction, seed, mode). In stratified mode each class contributes
/// floor or ceil of N_c * fraction test records, the total is round(N *
/// fraction), and a class with a single record keeps it in train (with a
/// warning). Container mode requires `container_ids` (negative ids count as
/// their own container).
SplitResult train_test_split(std::span<const MaterialClass> labels, double test_fraction,
                             std::uint64_t seed, SplitMode mode = SplitMode::Stratified,
                             std::span<const std::int64_t> container_ids = {});

using CountMatrix = Eigen::Matrix<std::int64_t, static_cast<int>(kNumClasses),
                                  static_cast<int>(kNumClasses)>;

/// Rows are the actual class, columns the predicted class, both in code order.
struct ConfusionMatrix {
  CountMatrix counts = CountMatrix::Zero();

  [[nodiscard]] std::int64_t total() const { return counts.sum(); }
  [[nodiscard]] std::int64_t correct() const { return counts.trace(); }
  [[nodiscard]] double accuracy() const;
  [[nodiscard]] std::int64_t at(MaterialClass actual, MaterialClass predicted) const {
    return counts(class_code(actual), class_code(predicted));
  }

  friend bool operator==(const ConfusionMatrix& a, const ConfusionMatrix& b) {
    return a.counts == b.counts;
  }
};

ConfusionMatrix confusion_matrix(std::span<const MaterialClass> actuals,
                                 std::span<const MaterialClass> predictions);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  std::int64_t support = 0;
  // Set when the denominator was zero and the 0 convention applied.
  bool precision_undefined = false;
  bool recall_undefined = false;
};

struct EvaluationReport {
  double accuracy = 0.0;
  std::int64_t total = 0;
  std::array<ClassMetrics, kNumClasses> per_class{};
  ConfusionMatrix matrix;
};

EvaluationReport report(const ConfusionMatrix& cm);

/// Grid with class names plus the per-class table.
std::string render_text(const EvaluationReport& r);

/// Structured text with fields accuracy, per_class, matrix in a fixed order.
std::string render_json(const EvaluationReport& r);

/// Reads the matrix back out of render_json output.
ConfusionMatrix parse_report_matrix(const std::string& json_text);

}  // namespace radarclass
