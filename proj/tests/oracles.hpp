#pragma once

// Independent reference computations used only by tests. Nothing here calls
// into the code paths it is used to check.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "radarclass/classifier.hpp"
#include "radarclass/domain.hpp"
#include "radarclass/network.hpp"

namespace radarclass::oracle {

/// Plain nested-loop column sums of a frames x bins matrix, divided by N.
inline std::vector<double> per_bin_mean(const Eigen::MatrixXd& a) {
  std::vector<double> sum(static_cast<std::size_t>(a.cols()), 0.0);
  for (Eigen::Index k = 0; k < a.rows(); ++k)
    for (Eigen::Index i = 0; i < a.cols(); ++i) sum[static_cast<std::size_t>(i)] += a(k, i);
  for (auto& s : sum) s /= static_cast<double>(a.rows());
  return sum;
}

/// Two exhaustive scans: main over the bins that leave room past the guard,
/// secondary over everything past main + guard. Strict > keeps the lowest index.
inline std::pair<std::size_t, std::size_t> two_pass_peaks(const std::vector<double>& v,
                                                          std::size_t guard) {
  std::size_t main = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + guard + 1 < v.size(); ++i) {
    if (v[i] > best) {
      best = v[i];
      main = i;
    }
  }
  std::size_t secondary = main + guard + 1;
  best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = main + guard + 1; i < v.size(); ++i) {
    if (v[i] > best) {
      best = v[i];
      secondary = i;
    }
  }
  return {main, secondary};
}

/// Mean of a series by direct summation.
inline double series_mean(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

/// Unbiased variance from the pairwise-difference identity
/// var = sum_{i<j} (x_i - x_j)^2 / (N (N - 1)).
inline double pairwise_variance(const std::vector<double>& x) {
  const std::size_t n = x.size();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) s += (x[i] - x[j]) * (x[i] - x[j]);
  return s / static_cast<double>(n * (n - 1));
}

/// Recomputes the six unclamped features straight from the raw frame series.
inline FeatureVector brute_force_features(const Eigen::MatrixXd& a, std::size_t guard, double eps) {
  const auto [m, s] = two_pass_peaks(per_bin_mean(a), guard);
  std::vector<double> main_series, secondary_series;
  for (Eigen::Index k = 0; k < a.rows(); ++k) {
    main_series.push_back(a(k, static_cast<Eigen::Index>(m)));
    secondary_series.push_back(a(k, static_cast<Eigen::Index>(s)));
  }
  FeatureVector f;
  f.main_peak_mean = series_mean(main_series);
  f.secondary_peak_mean = series_mean(secondary_series);
  f.main_peak_variance = pairwise_variance(main_series);
  f.secondary_peak_variance = pairwise_variance(secondary_series);
  f.peak_amplitude_ratio = f.main_peak_mean / (f.secondary_peak_mean + eps);
  f.peak_variance_ratio = f.main_peak_variance / (f.secondary_peak_variance + eps);
  return f;
}

/// Confusion counts by scanning every (actual, predicted) cell against every pair.
inline std::array<std::array<long, kNumClasses>, kNumClasses> tally_pairs(
    std::span<const MaterialClass> actual, std::span<const MaterialClass> predicted) {
  std::array<std::array<long, kNumClasses>, kNumClasses> out{};
  for (auto a : kAllClasses)
    for (auto p : kAllClasses)
      for (std::size_t i = 0; i < actual.size(); ++i)
        if (actual[i] == a && predicted[i] == p) ++out[static_cast<std::size_t>(class_code(a))][static_cast<std::size_t>(class_code(p))];
  return out;
}

/// Scalar-loop dense layer: out_r = b_r + sum_c W_rc in_c.
inline std::vector<double> dense_by_hand(const Eigen::MatrixXd& w, const Eigen::VectorXd& b,
                                         const std::vector<double>& in) {
  std::vector<double> out(static_cast<std::size_t>(w.rows()));
  for (Eigen::Index r = 0; r < w.rows(); ++r) {
    double acc = b(r);
    for (Eigen::Index c = 0; c < w.cols(); ++c) acc += w(r, c) * in[static_cast<std::size_t>(c)];
    out[static_cast<std::size_t>(r)] = acc;
  }
  return out;
}

/// Infer-mode loss of a model on a batch, used as the finite-difference target.
inline double model_loss(const Mlp& model, const Eigen::MatrixXd& x, std::span<const MaterialClass> labels,
                         const std::array<double, kNumClasses>& weights) {
  const Eigen::MatrixXd probs = forward(model, x, ForwardMode::Infer);
  double total = 0.0;
  for (Eigen::Index j = 0; j < probs.cols(); ++j) {
    const auto y = static_cast<Eigen::Index>(class_code(labels[static_cast<std::size_t>(j)]));
    total += -weights[static_cast<std::size_t>(y)] * std::log(probs(y, j) + kLogGuard);
  }
  return total / static_cast<double>(probs.cols());
}

struct ParamRef {
  std::size_t layer;
  bool is_bias;
  Eigen::Index row;
  Eigen::Index col;
};

inline double& param(Mlp& m, const ParamRef& p) {
  auto& l = m.layers[p.layer];
  return p.is_bias ? l.biases(p.row) : l.weights(p.row, p.col);
}

inline double finite_difference(const Mlp& model, const ParamRef& p, const Eigen::MatrixXd& x,
                                std::span<const MaterialClass> labels,
                                const std::array<double, kNumClasses>& weights, double h) {
  Mlp plus = model;
  Mlp minus = model;
  param(plus, p) += h;
  param(minus, p) -= h;
  return (model_loss(plus, x, labels, weights) - model_loss(minus, x, labels, weights)) / (2.0 * h);
}

struct GradientCheck {
  double max_relative_error = 0.0;
  std::size_t probes = 0;
};

/// Seeded default-architecture model with small random biases, a random batch
/// and random class weights; dropout is disabled. Compares backward() against
/// central differences on `probes` randomly chosen parameters. The relative
/// error is |analytic - numeric| / max(|analytic|, |numeric|, floor).
inline GradientCheck gradient_check(std::uint64_t seed, std::size_t probes, double h = 1e-5,
                                    double floor = 1e-7) {
  Rng rng(seed);
  const Eigen::Index batch = 8;
  Eigen::MatrixXd x(static_cast<Eigen::Index>(kNumFeatures), batch);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform(0.0, 2.0);
  std::vector<MaterialClass> labels;
  for (Eigen::Index j = 0; j < batch; ++j) labels.push_back(code_class(static_cast<int>(rng.below(kNumClasses))));
  std::array<double, kNumClasses> weights{};
  for (auto& w : weights) w = rng.uniform(0.5, 2.0);

  TrainConfig cfg;
  cfg.seed = seed;
  Mlp model = init_model(fit_normalizer_matrix(x), cfg);
  for (auto& l : model.layers)
    for (Eigen::Index i = 0; i < l.biases.size(); ++i) l.biases(i) = rng.uniform(-0.1, 0.1);
  model.dropout_rate = 0.0;

  ForwardCache<double> cache;
  forward(model, x, ForwardMode::Train, &rng, &cache);
  const Gradients<double> grads = backward(model, cache, std::span<const MaterialClass>(labels), weights);

  GradientCheck out;
  for (std::size_t n = 0; n < probes; ++n) {
    ParamRef p;
    p.layer = static_cast<std::size_t>(rng.below(model.layers.size()));
    const auto& l = model.layers[p.layer];
    p.is_bias = rng.below(static_cast<std::uint64_t>(l.weights.size() + l.biases.size())) <
                static_cast<std::uint64_t>(l.biases.size());
    p.row = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(l.out_size())));
    p.col = p.is_bias ? 0 : static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(l.in_size())));
    const double analytic = p.is_bias ? grads.biases[p.layer](p.row) : grads.weights[p.layer](p.row, p.col);
    const double numeric = finite_difference(model, p, x, labels, weights, h);
    const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
    out.max_relative_error = std::max(out.max_relative_error, std::abs(analytic - numeric) / denom);
    ++out.probes;
  }
  return out;
}

}  // namespace radarclass::oracle
