#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "radarclass/classifier.hpp"

namespace radarclass {

inline constexpr int kModelFormatVersion = 1;

/// Everything a model file carries: the network, how it was trained, and the
/// exact held-out split so evaluation can be reproduced.
struct ModelBundle {
  Mlp model;
  TrainConfig train_config;
  std::vector<std::size_t> test_indices;
  std::size_t dataset_size = 0;
  std::string dataset_digest;
  std::vector<double> epoch_loss;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
};

std::string save_model(const ModelBundle& bundle);
ModelBundle load_model(const std::string& text);

}  // namespace radarclass
