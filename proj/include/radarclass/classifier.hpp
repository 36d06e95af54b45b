#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "radarclass/domain.hpp"
#include "radarclass/evaluation.hpp"
#include "radarclass/network.hpp"

namespace radarclass {

using ClassWeights = std::array<double, kNumClasses>;

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;
};

struct TrainConfig {
  std::size_t epochs = 100;
  std::size_t batch_size = 32;
  double test_fraction = 0.30;
  SplitMode split_mode = SplitMode::Stratified;
  AdamConfig adam;
  std::uint64_t seed = 42;
  bool use_class_weights = true;
  std::vector<std::size_t> hidden_sizes{50, 40, 10};
  double dropout_rate = 0.1;
  // Hidden layers (by index) followed by dropout.
  std::vector<std::size_t> dropout_after{0, 1};

  void validate() const;
  [[nodiscard]] std::string canonical() const;
  [[nodiscard]] std::string digest() const;
};

/// w_c = N / (K_present * N_c) for classes present, 0 otherwise.
ClassWeights class_weights(const std::array<std::size_t, kNumClasses>& label_counts);

/// Features as a 6 x N matrix, one column per record.
Eigen::MatrixXd feature_matrix(std::span<const LabeledFeatures> records);

Normalizer<double> fit_normalizer(std::span<const LabeledFeatures> train);

/// Layers in -> hidden... -> 5 (softmax), Glorot-uniform weights, zero biases.
Mlp init_model(const Normalizer<double>& normalizer, const TrainConfig& cfg);

/// Adam state for every parameter of a model.
class AdamOptimizer {
 public:
  AdamOptimizer(const Mlp& model, const AdamConfig& cfg);

  void step(Mlp& model, const Gradients<double>& grads);
  [[nodiscard]] std::size_t steps() const noexcept { return t_; }

 private:
  AdamConfig cfg_;
  std::size_t t_ = 0;
  std::vector<Eigen::MatrixXd> m_w_, v_w_;
  std::vector<Eigen::VectorXd> m_b_, v_b_;
};

struct TrainResult {
  Mlp model;
  std::vector<double> epoch_loss;
  SplitResult split;
  ClassWeights weights{};
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
};

/// Training on an explicit list of training records; the normalizer is fit on
/// exactly these records. Deterministic given the records and cfg.
TrainResult fit_records(std::span<const LabeledFeatures> train, const TrainConfig& cfg);

/// Full procedure: split, normalize on the train side, train, score both sides.
TrainResult fit(const Dataset& dataset, const TrainConfig& cfg);

struct Prediction {
  MaterialClass label = MaterialClass::Metal;
  std::array<double, kNumClasses> probabilities{};
};

/// Lowest class code wins ties.
MaterialClass argmax_class(std::span<const double> scores);

Prediction predict(const Mlp& model, const FeatureVector& features);
std::vector<Prediction> predict_batch(const Mlp& model, std::span<const LabeledFeatures> records);

double accuracy(const Mlp& model, std::span<const LabeledFeatures> records);

}  // namespace radarclass
