#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "radarclass/domain.hpp"
#include "radarclass/random.hpp"

namespace radarclass {

struct Interval {
  double low = 0.0;
  double high = 0.0;

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Distribution of container draws for one material.
struct MaterialProfile {
  Interval front_amp_range;
  Interval back_to_front_ratio_range;
  double front_var_scale = 1.0;
  double back_var_scale = 1.0;
  double overall_scale = 1.0;
  Interval radius_range_mm{15.0, 50.0};

  void validate(MaterialClass material) const;

  friend bool operator==(const MaterialProfile&, const MaterialProfile&) = default;
};

/// Built-in profile for a non-empty material.
MaterialProfile default_profile(MaterialClass material);

/// One physical container. Besides the radius and reflectivities it carries the
/// container's rotation signature: a depth gain and the phases of the
/// cosine series that modulates front and back reflections with angle.
struct ContainerSpec {
  MaterialClass material = MaterialClass::Plastic;
  double radius_mm = 30.0;
  double front_reflectivity = 0.5;
  double back_reflectivity = 0.0;
  double modulation_gain = 1.0;
  std::array<double, 2> front_phase{0.0, 0.0};
  std::array<double, 2> back_phase{0.0, 0.0};

  void validate() const;

  friend bool operator==(const ContainerSpec&, const ContainerSpec&) = default;
};

struct SimConfig {
  RangeAxis axis;
  std::size_t frames_per_window = kDefaultFramesPerWindow;
  double standoff_mm = 250.0;
  double noise_sigma = 0.01;
  double pulse_width_bins = 2.0;
  // Pulses are truncated beyond this many bins from their centre.
  std::size_t pulse_support_bins = 3;
  // Indexed by class code; the Empty entry is unused.
  std::array<double, kNumClasses> angular_modulation_depth{0.03, 0.07, 0.08, 0.07, 0.0};
  // Indexed by class code for Metal..Paper.
  std::array<MaterialProfile, 4> profiles{
      default_profile(MaterialClass::Metal), default_profile(MaterialClass::Plastic),
      default_profile(MaterialClass::Glass), default_profile(MaterialClass::Paper)};
  std::size_t windows_per_container = 20;
  std::uint64_t seed = 42;

  void validate() const;
  [[nodiscard]] const MaterialProfile& profile(MaterialClass material) const;
  [[nodiscard]] MaterialProfile& profile(MaterialClass material);

  /// Canonical text rendering; equal configs render identically.
  [[nodiscard]] std::string canonical() const;
  [[nodiscard]] std::string digest() const;
};

ContainerSpec sample_container(MaterialClass material, const SimConfig& cfg, Rng& rng);

/// Low-order cosine series in the rotation angle, bounded by 1 in magnitude.
double angular_series(double angle, const std::array<double, 2>& phase) noexcept;

Frame simulate_frame(const ContainerSpec& spec, double angle, const SimConfig& cfg, Rng& rng);

/// `spec == nullopt` simulates an empty scene.
ClassificationWindow simulate_window(const std::optional<ContainerSpec>& spec, const SimConfig& cfg,
                                     Rng& rng);

struct LabeledWindow {
  ClassificationWindow window;
  MaterialClass label;
  std::int64_t container_id;
};

struct WindowDataset {
  std::vector<LabeledWindow> windows;
  Provenance provenance;
};

using ClassCounts = std::array<std::size_t, kNumClasses>;

inline constexpr std::int64_t kContainerIdStride = 1'000'000;

/// Windows for every class in code order. Each window's noise stream and each
/// container's draw are seeded from (master seed, class, index), so the result
/// does not depend on generation order.
WindowDataset generate_dataset(const ClassCounts& per_class_counts, const SimConfig& cfg);

}  // namespace radarclass
