#include "radarclass/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

namespace radarclass {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t profile_index(MaterialClass material) {
  if (material == MaterialClass::Empty) {
    throw Error(ErrorKind::InvalidMaterial, "the empty class has no container profile");
  }
  return static_cast<std::size_t>(class_code(material));
}

void check_interval(const Interval& iv, double lo, double hi, const char* what) {
  if (!(iv.low >= lo && iv.low <= iv.high && iv.high <= hi)) {
    std::ostringstream msg;
    msg << what << " range [" << iv.low << ", " << iv.high << "] must satisfy " << lo
        << " <= low <= high <= " << hi;
    throw Error(ErrorKind::Config, msg.str());
  }
}

}  // namespace

MaterialProfile default_profile(MaterialClass material) {
  MaterialProfile p;
  switch (material) {
    case MaterialClass::Metal:
      p.front_amp_range = {0.70, 0.95};
      p.back_to_front_ratio_range = {0.0, 0.0};
      break;
    case MaterialClass::Plastic:
      p.front_amp_range = {0.35, 0.60};
      p.back_to_front_ratio_range = {0.60, 0.95};
      break;
    case MaterialClass::Glass:
      p.front_amp_range = {0.30, 0.70};
      p.back_to_front_ratio_range = {0.20, 0.90};
      p.front_var_scale = 2.0;
      p.back_var_scale = 2.0;
      break;
    case MaterialClass::Paper:
      p.front_amp_range = {0.10, 0.30};
      p.back_to_front_ratio_range = {0.30, 0.80};
      p.overall_scale = 0.5;
      break;
    case MaterialClass::Empty:
      throw Error(ErrorKind::InvalidMaterial, "the empty class has no container profile");
  }
  return p;
}

void MaterialProfile::validate(MaterialClass material) const {
  check_interval(front_amp_range, 0.0, 1.0, "front amplitude");
  check_interval(back_to_front_ratio_range, 0.0, 1.0, "back/front ratio");
  check_interval(radius_range_mm, 10.0, 60.0, "radius");
  if (front_var_scale < 0.0 || back_var_scale < 0.0 || overall_scale < 0.0) {
    throw Error(ErrorKind::Config, "profile scales must be non-negative");
  }
  if (material == MaterialClass::Metal &&
      !(back_to_front_ratio_range.low == 0.0 && back_to_front_ratio_range.high == 0.0)) {
    throw Error(ErrorKind::Config, "metal profile must have a zero back/front ratio");
  }
}

void ContainerSpec::validate() const {
  if (material == MaterialClass::Empty) {
    throw Error(ErrorKind::InvalidMaterial, "a container cannot be of the empty class");
  }
  if (!(radius_mm >= 10.0 && radius_mm <= 60.0)) {
    throw Error(ErrorKind::InvalidArgument, "container radius must lie in [10, 60] mm");
  }
  if (!(front_reflectivity >= 0.0 && front_reflectivity <= 1.0 && back_reflectivity >= 0.0 &&
        back_reflectivity <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "reflectivities must lie in [0, 1]");
  }
  if (!(modulation_gain >= 0.0) || !std::isfinite(modulation_gain)) {
    throw Error(ErrorKind::InvalidArgument, "modulation gain must be finite and non-negative");
  }
}

void SimConfig::validate() const {
  if (!(axis.step_mm > 0.0) || axis.num_bins < 2) {
    throw Error(ErrorKind::Config, "range axis needs step > 0 and at least 2 bins");
  }
  if (frames_per_window < 2) {
    throw Error(ErrorKind::Config, "frames_per_window must be at least 2");
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw Error(ErrorKind::Config, "noise_sigma must be finite and non-negative");
  }
  if (!(pulse_width_bins > 0.0)) throw Error(ErrorKind::Config, "pulse_width_bins must be positive");
  if (windows_per_container == 0) {
    throw Error(ErrorKind::Config, "windows_per_container must be at least 1");
  }
  for (double d : angular_modulation_depth) {
    if (!(d >= 0.0) || !std::isfinite(d)) {
      throw Error(ErrorKind::Config, "angular modulation depths must be finite and non-negative");
    }
  }
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    profiles[i].validate(code_class(static_cast<int>(i)));
  }
}

const MaterialProfile& SimConfig::profile(MaterialClass material) const {
  return profiles[profile_index(material)];
}

MaterialProfile& SimConfig::profile(MaterialClass material) {
  return profiles[profile_index(material)];
}

std::string SimConfig::canonical() const {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  os << "axis " << axis.start_mm << ' ' << axis.step_mm << ' ' << axis.num_bins << '\n'
     << "frames " << frames_per_window << '\n'
     << "standoff " << standoff_mm << '\n'
     << "noise " << noise_sigma << '\n'
     << "pulse " << pulse_width_bins << ' ' << pulse_support_bins << '\n'
     << "depth";
  for (double d : angular_modulation_depth) os << ' ' << d;
  os << '\n';
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const auto& p = profiles[i];
    os << "profile " << i << ' ' << p.front_amp_range.low << ' ' << p.front_amp_range.high << ' '
       << p.back_to_front_ratio_range.low << ' ' << p.back_to_front_ratio_range.high << ' '
       << p.front_var_scale << ' ' << p.back_var_scale << ' ' << p.overall_scale << ' '
       << p.radius_range_mm.low << ' ' << p.radius_range_mm.high << '\n';
  }
  os << "windows_per_container " << windows_per_container << '\n';
  return os.str();
}

std::string SimConfig::digest() const { return fnv1a_hex(canonical()); }

ContainerSpec sample_container(MaterialClass material, const SimConfig& cfg, Rng& rng) {
  const MaterialProfile& p = cfg.profile(material);
  ContainerSpec spec;
  spec.material = material;
  spec.radius_mm = rng.uniform(p.radius_range_mm.low, p.radius_range_mm.high);
  const double front = rng.uniform(p.front_amp_range.low, p.front_amp_range.high);
  const double ratio = rng.uniform(p.back_to_front_ratio_range.low, p.back_to_front_ratio_range.high);
  spec.front_reflectivity = p.overall_scale * front;
  spec.back_reflectivity = spec.front_reflectivity * ratio;
  spec.modulation_gain = rng.uniform(0.5, 1.5);
  for (auto& ph : spec.front_phase) ph = rng.uniform(0.0, kTwoPi);
  for (auto& ph : spec.back_phase) ph = rng.uniform(0.0, kTwoPi);
  return spec;
}

double angular_series(double angle, const std::array<double, 2>& phase) noexcept {
  return (std::cos(angle + phase[0]) + 0.5 * std::cos(2.0 * angle + phase[1])) / 1.5;
}

namespace {

void add_pulse(Eigen::VectorXd& amps, std::size_t center, double height, const SimConfig& cfg) {
  const auto n = static_cast<std::ptrdiff_t>(amps.size());
  const auto c = static_cast<std::ptrdiff_t>(center);
  const auto support = static_cast<std::ptrdiff_t>(cfg.pulse_support_bins);
  const double two_var = 2.0 * cfg.pulse_width_bins * cfg.pulse_width_bins;
  for (std::ptrdiff_t i = std::max<std::ptrdiff_t>(0, c - support);
       i <= std::min(n - 1, c + support); ++i) {
    const double d = static_cast<double>(i - c);
    amps(i) += height * std::exp(-d * d / two_var);
  }
}

void add_noise_and_clamp(Eigen::VectorXd& amps, double sigma, Rng& rng) {
  for (Eigen::Index i = 0; i < amps.size(); ++i) {
    if (sigma > 0.0) amps(i) += std::abs(sigma * rng.normal());
    amps(i) = std::clamp(amps(i), 0.0, 1.0);
  }
}

std::size_t surface_bin(const SimConfig& cfg, double distance_mm) {
  try {
    return bin_for_distance(cfg.axis, distance_mm);
  } catch (const Error& e) {
    throw Error(ErrorKind::Geometry, std::string("container surface off the range axis: ") + e.what());
  }
}

}  // namespace

Frame simulate_frame(const ContainerSpec& spec, double angle, const SimConfig& cfg, Rng& rng) {
  spec.validate();
  const std::size_t front_bin = surface_bin(cfg, cfg.standoff_mm - spec.radius_mm);
  const std::size_t back_bin = surface_bin(cfg, cfg.standoff_mm + spec.radius_mm);

  const double depth = cfg.angular_modulation_depth[static_cast<std::size_t>(class_code(spec.material))] *
                       spec.modulation_gain;
  const MaterialProfile& p = cfg.profile(spec.material);
  const double front_height =
      std::max(0.0, spec.front_reflectivity *
                        (1.0 + depth * p.front_var_scale * angular_series(angle, spec.front_phase)));
  const double back_height =
      std::max(0.0, spec.back_reflectivity *
                        (1.0 + depth * p.back_var_scale * angular_series(angle, spec.back_phase)));

  Eigen::VectorXd amps = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cfg.axis.num_bins));
  add_pulse(amps, front_bin, front_height, cfg);
  if (back_height > 0.0) add_pulse(amps, back_bin, back_height, cfg);
  add_noise_and_clamp(amps, cfg.noise_sigma, rng);
  return Frame(cfg.axis, std::move(amps));
}

ClassificationWindow simulate_window(const std::optional<ContainerSpec>& spec, const SimConfig& cfg,
                                     Rng& rng) {
  cfg.validate();
  const auto n_frames = static_cast<Eigen::Index>(cfg.frames_per_window);
  const auto n_bins = static_cast<Eigen::Index>(cfg.axis.num_bins);
  Eigen::MatrixXd amps(n_frames, n_bins);
  for (Eigen::Index k = 0; k < n_frames; ++k) {
    if (spec) {
      const double angle = kTwoPi * static_cast<double>(k) / static_cast<double>(n_frames);
      amps.row(k) = simulate_frame(*spec, angle, cfg, rng).amplitudes().transpose();
    } else {
      Eigen::VectorXd row = Eigen::VectorXd::Zero(n_bins);
      add_noise_and_clamp(row, cfg.noise_sigma, rng);
      amps.row(k) = row.transpose();
    }
  }
  return ClassificationWindow(cfg.axis, std::move(amps));
}

namespace {

constexpr std::uint64_t kWindowStream = 0;
constexpr std::uint64_t kContainerStream = 1;

}  // namespace

WindowDataset generate_dataset(const ClassCounts& per_class_counts, const SimConfig& cfg) {
  cfg.validate();
  std::size_t total = 0;
  for (auto n : per_class_counts) total += n;
  if (total == 0) throw Error(ErrorKind::EmptyDataset, "all per-class window counts are zero");

  WindowDataset out;
  out.provenance = Provenance{cfg.seed, cfg.digest()};
  out.windows.reserve(total);

  for (MaterialClass material : kAllClasses) {
    const auto code = static_cast<std::uint64_t>(class_code(material));
    const std::size_t count = per_class_counts[code];
    const std::size_t n_containers =
        (count + cfg.windows_per_container - 1) / cfg.windows_per_container;

    std::vector<std::optional<ContainerSpec>> containers(n_containers);
    if (material != MaterialClass::Empty) {
      for (std::size_t k = 0; k < n_containers; ++k) {
        Rng rng(derive_seed(cfg.seed, {kContainerStream, code, k}));
        containers[k] = sample_container(material, cfg, rng);
      }
    }

    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t k = i / cfg.windows_per_container;
      Rng rng(derive_seed(cfg.seed, {kWindowStream, code, i}));
      const auto id = material == MaterialClass::Empty
                          ? std::int64_t{-1}
                          : static_cast<std::int64_t>(code) * kContainerIdStride +
                                static_cast<std::int64_t>(k);
      out.windows.push_back(LabeledWindow{simulate_window(containers[k], cfg, rng), material, id});
    }
  }
  return out;
}

}  // namespace radarclass
