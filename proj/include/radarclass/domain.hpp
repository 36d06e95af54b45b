#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "radarclass/error.hpp"

namespace radarclass {

/// Uniformly spaced distance axis of the radar sweep, in millimetres.
struct RangeAxis {
  double start_mm = 100.0;
  double step_mm = 2.5;
  std::size_t num_bins = 120;

  RangeAxis() = default;
  RangeAxis(double start, double step, std::size_t bins);

  [[nodiscard]] double bin_center(std::size_t i) const noexcept {
    return start_mm + static_cast<double>(i) * step_mm;
  }
  [[nodiscard]] double end_mm() const noexcept { return bin_center(num_bins - 1); }

  friend bool operator==(const RangeAxis&, const RangeAxis&) = default;
};

/// Index of the bin whose centre is nearest `distance_mm`; ties go to the lower index.
std::size_t bin_for_distance(const RangeAxis& axis, double distance_mm);

/// One sweep: amplitude per range bin, non-negative and finite.
class Frame {
 public:
  Frame(const RangeAxis& axis, Eigen::VectorXd amplitudes);

  [[nodiscard]] const Eigen::VectorXd& amplitudes() const noexcept { return amplitudes_; }
  [[nodiscard]] const RangeAxis& axis() const noexcept { return axis_; }
  [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(amplitudes_.size()); }

 private:
  RangeAxis axis_;
  Eigen::VectorXd amplitudes_;
};

inline constexpr std::size_t kDefaultFramesPerWindow = 30;

/// One revolution of frames, stored row-per-frame (frames x bins).
class ClassificationWindow {
 public:
  ClassificationWindow(const RangeAxis& axis, Eigen::MatrixXd amplitudes);
  ClassificationWindow(const RangeAxis& axis, const std::vector<Frame>& frames);

  [[nodiscard]] const RangeAxis& axis() const noexcept { return axis_; }
  [[nodiscard]] const Eigen::MatrixXd& amplitudes() const noexcept { return amplitudes_; }
  [[nodiscard]] std::size_t frames_per_window() const noexcept {
    return static_cast<std::size_t>(amplitudes_.rows());
  }
  [[nodiscard]] Frame frame(std::size_t k) const;

 private:
  RangeAxis axis_;
  Eigen::MatrixXd amplitudes_;
};

enum class MaterialClass : int { Metal = 0, Plastic = 1, Glass = 2, Paper = 3, Empty = 4 };

inline constexpr std::size_t kNumClasses = 5;
inline constexpr std::array<MaterialClass, kNumClasses> kAllClasses = {
    MaterialClass::Metal, MaterialClass::Plastic, MaterialClass::Glass, MaterialClass::Paper,
    MaterialClass::Empty};

[[nodiscard]] constexpr int class_code(MaterialClass c) noexcept { return static_cast<int>(c); }
MaterialClass code_class(int code);

std::string_view class_name(MaterialClass c) noexcept;
MaterialClass class_from_name(std::string_view name);

inline constexpr std::size_t kNumFeatures = 6;
using FeatureArray = Eigen::Matrix<double, kNumFeatures, 1>;

/// The six peak statistics of a classification window.
struct FeatureVector {
  double main_peak_mean = 0.0;
  double secondary_peak_mean = 0.0;
  double peak_amplitude_ratio = 0.0;
  double main_peak_variance = 0.0;
  double secondary_peak_variance = 0.0;
  double peak_variance_ratio = 0.0;

  [[nodiscard]] FeatureArray to_array() const;
  static FeatureVector from_array(const FeatureArray& a);

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

inline constexpr std::array<std::string_view, kNumFeatures> kFeatureNames = {
    "main_peak_mean",          "secondary_peak_mean",     "peak_amplitude_ratio",
    "main_peak_variance",      "secondary_peak_variance", "peak_variance_ratio"};

struct LabeledFeatures {
  FeatureVector features;
  MaterialClass label = MaterialClass::Empty;
  // Physical container the window came from; -1 for empty scenes / unknown.
  std::int64_t container_id = -1;
};

struct Provenance {
  std::uint64_t seed = 0;
  std::string config_digest;
};

struct Dataset {
  std::vector<LabeledFeatures> records;
  Provenance provenance;

  [[nodiscard]] std::array<std::size_t, kNumClasses> class_counts() const;
  [[nodiscard]] std::vector<MaterialClass> labels() const;
};

}  // namespace radarclass
