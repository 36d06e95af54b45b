#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "radarclass/domain.hpp"

namespace radarclass {

struct FeatureConfig {
  std::size_t guard_bins = 3;
  double ratio_epsilon = 1e-6;
  double ratio_clamp = 1e3;

  void validate() const;
};

/// Front (main) and back (secondary) reflection bins.
struct PeakLocations {
  std::size_t main_bin = 0;
  std::size_t secondary_bin = 0;
  std::size_t guard_bins = 3;
};

/// Per-bin mean over the frames of a window.
Eigen::VectorXd mean_sweep(const ClassificationWindow& window);

/// Main peak is the argmax over bins that still leave room for a secondary
/// beyond the guard; the secondary is the argmax strictly past
/// main_bin + guard_bins. Ties resolve to the lowest index.
PeakLocations detect_peaks(const Eigen::Ref<const Eigen::VectorXd>& mean, std::size_t guard_bins);

/// Unbiased (N-1) sample variance; throws when fewer than two samples. The
/// mean is taken relative to the first sample, so a constant series gives 0.
template <typename Derived>
double sample_variance(const Eigen::DenseBase<Derived>& x) {
  if (x.size() < 2) {
    throw Error(ErrorKind::VarianceUndefined, "variance needs at least two frames");
  }
  const double origin = x(0);
  const double mean = origin + (x.derived().array() - origin).sum() / static_cast<double>(x.size());
  return (x.derived().array() - mean).square().sum() / static_cast<double>(x.size() - 1);
}

/// Everything extract_features computes, before ratio clamping.
struct FeatureDetail {
  PeakLocations peaks;
  FeatureVector unclamped;
  FeatureVector clamped;
};

FeatureDetail extract_feature_detail(const ClassificationWindow& window, const FeatureConfig& cfg = {});

inline FeatureVector extract_features(const ClassificationWindow& window,
                                      const FeatureConfig& cfg = {}) {
  return extract_feature_detail(window, cfg).clamped;
}

}  // namespace radarclass
