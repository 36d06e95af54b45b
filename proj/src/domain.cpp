#include "radarclass/domain.hpp"

#include <cmath>
#include <sstream>

namespace radarclass {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Range: return "range";
    case ErrorKind::InvalidCode: return "invalid-code";
    case ErrorKind::InvalidMaterial: return "invalid-material";
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::Geometry: return "geometry";
    case ErrorKind::EmptyDataset: return "empty-dataset";
    case ErrorKind::Detection: return "detection";
    case ErrorKind::VarianceUndefined: return "variance-undefined";
    case ErrorKind::InsufficientData: return "insufficient-data";
    case ErrorKind::NumericOverflow: return "numeric-overflow";
    case ErrorKind::DegenerateTraining: return "degenerate-training";
    case ErrorKind::Internal: return "internal-consistency";
    case ErrorKind::Input: return "input";
    case ErrorKind::EmptyEvaluation: return "empty-evaluation";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Compatibility: return "compatibility";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

RangeAxis::RangeAxis(double start, double step, std::size_t bins)
    : start_mm(start), step_mm(step), num_bins(bins) {
  if (!(step > 0.0) || !std::isfinite(start) || !std::isfinite(step)) {
    throw Error(ErrorKind::InvalidArgument, "range axis step must be positive and finite");
  }
  if (bins < 2) {
    throw Error(ErrorKind::InvalidArgument, "range axis needs at least 2 bins");
  }
}

std::size_t bin_for_distance(const RangeAxis& axis, double distance_mm) {
  if (!(distance_mm >= axis.start_mm && distance_mm <= axis.end_mm())) {
    std::ostringstream msg;
    msg << "distance " << distance_mm << " mm outside axis [" << axis.start_mm << ", "
        << axis.end_mm() << "] mm";
    throw Error(ErrorKind::Range, msg.str());
  }
  const double pos = (distance_mm - axis.start_mm) / axis.step_mm;
  auto lower = static_cast<std::size_t>(std::floor(pos));
  if (lower >= axis.num_bins - 1) return axis.num_bins - 1;
  // Compare distances to the two neighbouring centres; equality keeps the lower bin.
  const double to_lower = distance_mm - axis.bin_center(lower);
  const double to_upper = axis.bin_center(lower + 1) - distance_mm;
  return to_upper < to_lower ? lower + 1 : lower;
}

namespace {

void check_amplitudes(const Eigen::Ref<const Eigen::MatrixXd>& a) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double v = a.data()[i];
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorKind::InvalidArgument, "amplitudes must be finite and non-negative");
    }
  }
}

}  // namespace

Frame::Frame(const RangeAxis& axis, Eigen::VectorXd amplitudes)
    : axis_(axis), amplitudes_(std::move(amplitudes)) {
  if (static_cast<std::size_t>(amplitudes_.size()) != axis_.num_bins) {
    throw Error(ErrorKind::InvalidArgument, "frame length does not match axis bin count");
  }
  check_amplitudes(amplitudes_);
}

ClassificationWindow::ClassificationWindow(const RangeAxis& axis, Eigen::MatrixXd amplitudes)
    : axis_(axis), amplitudes_(std::move(amplitudes)) {
  if (static_cast<std::size_t>(amplitudes_.cols()) != axis_.num_bins) {
    throw Error(ErrorKind::InvalidArgument, "window frame length does not match axis bin count");
  }
  if (amplitudes_.rows() == 0) {
    throw Error(ErrorKind::InvalidArgument, "window has no frames");
  }
  check_amplitudes(amplitudes_);
}

ClassificationWindow::ClassificationWindow(const RangeAxis& axis, const std::vector<Frame>& frames)
    : axis_(axis) {
  if (frames.empty()) throw Error(ErrorKind::InvalidArgument, "window has no frames");
  amplitudes_.resize(static_cast<Eigen::Index>(frames.size()),
                     static_cast<Eigen::Index>(axis.num_bins));
  for (std::size_t k = 0; k < frames.size(); ++k) {
    if (!(frames[k].axis() == axis)) {
      throw Error(ErrorKind::InvalidArgument, "all frames of a window must share its axis");
    }
    amplitudes_.row(static_cast<Eigen::Index>(k)) = frames[k].amplitudes().transpose();
  }
}

Frame ClassificationWindow::frame(std::size_t k) const {
  if (k >= frames_per_window()) throw Error(ErrorKind::Range, "frame index out of range");
  return Frame(axis_, amplitudes_.row(static_cast<Eigen::Index>(k)).transpose());
}

MaterialClass code_class(int code) {
  if (code < 0 || code >= static_cast<int>(kNumClasses)) {
    throw Error(ErrorKind::InvalidCode, "class code " + std::to_string(code) + " not in 0..4");
  }
  return static_cast<MaterialClass>(code);
}

std::string_view class_name(MaterialClass c) noexcept {
  switch (c) {
    case MaterialClass::Metal: return "metal";
    case MaterialClass::Plastic: return "plastic";
    case MaterialClass::Glass: return "glass";
    case MaterialClass::Paper: return "paper";
    case MaterialClass::Empty: return "empty";
  }
  return "?";
}

MaterialClass class_from_name(std::string_view name) {
  for (auto c : kAllClasses) {
    if (class_name(c) == name) return c;
  }
  throw Error(ErrorKind::InvalidCode, "unknown class name '" + std::string(name) + "'");
}

FeatureArray FeatureVector::to_array() const {
  FeatureArray a;
  a << main_peak_mean, secondary_peak_mean, peak_amplitude_ratio, main_peak_variance,
      secondary_peak_variance, peak_variance_ratio;
  return a;
}

FeatureVector FeatureVector::from_array(const FeatureArray& a) {
  return FeatureVector{a(0), a(1), a(2), a(3), a(4), a(5)};
}

std::array<std::size_t, kNumClasses> Dataset::class_counts() const {
  std::array<std::size_t, kNumClasses> counts{};
  for (const auto& r : records) ++counts[static_cast<std::size_t>(class_code(r.label))];
  return counts;
}

std::vector<MaterialClass> Dataset::labels() const {
  std::vector<MaterialClass> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.label);
  return out;
}

}  // namespace radarclass
