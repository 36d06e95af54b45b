#include "radarclass/features.hpp"

#include <algorithm>
#include <cmath>

namespace radarclass {

void FeatureConfig::validate() const {
  if (!(ratio_epsilon > 0.0) || !std::isfinite(ratio_epsilon)) {
    throw Error(ErrorKind::Config, "ratio epsilon must be positive");
  }
  if (!(ratio_clamp > 0.0) || !std::isfinite(ratio_clamp)) {
    throw Error(ErrorKind::Config, "ratio clamp must be positive");
  }
}

Eigen::VectorXd mean_sweep(const ClassificationWindow& window) {
  return window.amplitudes().colwise().mean().transpose();
}

namespace {

// First index of the maximum over [first, last).
Eigen::Index argmax_range(const Eigen::Ref<const Eigen::VectorXd>& v, Eigen::Index first,
                          Eigen::Index last) {
  Eigen::Index best = first;
  for (Eigen::Index i = first + 1; i < last; ++i) {
    if (v(i) > v(best)) best = i;
  }
  return best;
}

}  // namespace

PeakLocations detect_peaks(const Eigen::Ref<const Eigen::VectorXd>& mean, std::size_t guard_bins) {
  const auto n = static_cast<std::size_t>(mean.size());
  if (n < guard_bins + 2) {
    throw Error(ErrorKind::Detection, "sweep of " + std::to_string(n) +
                                          " bins has no bins beyond a guard of " +
                                          std::to_string(guard_bins));
  }
  // The last main-peak candidate must leave at least one bin past the guard.
  const auto main_last = static_cast<Eigen::Index>(n - guard_bins - 1);
  const Eigen::Index main = argmax_range(mean, 0, main_last);
  const Eigen::Index secondary =
      argmax_range(mean, main + static_cast<Eigen::Index>(guard_bins) + 1, mean.size());
  return PeakLocations{static_cast<std::size_t>(main), static_cast<std::size_t>(secondary),
                       guard_bins};
}

FeatureDetail extract_feature_detail(const ClassificationWindow& window, const FeatureConfig& cfg) {
  cfg.validate();
  if (window.frames_per_window() < 2) {
    throw Error(ErrorKind::VarianceUndefined, "window needs at least two frames");
  }
  FeatureDetail out;
  out.peaks = detect_peaks(mean_sweep(window), cfg.guard_bins);

  const auto& a = window.amplitudes();
  const auto main_series = a.col(static_cast<Eigen::Index>(out.peaks.main_bin));
  const auto secondary_series = a.col(static_cast<Eigen::Index>(out.peaks.secondary_bin));

  FeatureVector& f = out.unclamped;
  f.main_peak_mean = main_series.mean();
  f.secondary_peak_mean = secondary_series.mean();
  f.main_peak_variance = sample_variance(main_series);
  f.secondary_peak_variance = sample_variance(secondary_series);
  f.peak_amplitude_ratio = f.main_peak_mean / (f.secondary_peak_mean + cfg.ratio_epsilon);
  f.peak_variance_ratio = f.main_peak_variance / (f.secondary_peak_variance + cfg.ratio_epsilon);

  out.clamped = f;
  out.clamped.peak_amplitude_ratio = std::clamp(f.peak_amplitude_ratio, 0.0, cfg.ratio_clamp);
  out.clamped.peak_variance_ratio = std::clamp(f.peak_variance_ratio, 0.0, cfg.ratio_clamp);
  return out;
}

}  // namespace radarclass
