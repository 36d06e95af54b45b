#include "radarclass/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

namespace radarclass {

const char* to_string(Activation a) noexcept {
  switch (a) {
    case Activation::Relu: return "relu";
    case Activation::Softmax: return "softmax";
    case Activation::None: return "none";
  }
  return "?";
}

Activation activation_from_string(const std::string& s) {
  if (s == "relu") return Activation::Relu;
  if (s == "softmax") return Activation::Softmax;
  if (s == "none") return Activation::None;
  throw Error(ErrorKind::Parse, "unknown activation '" + s + "'");
}

void TrainConfig::validate() const {
  if (epochs < 1) throw Error(ErrorKind::Config, "epochs must be at least 1");
  if (batch_size < 1) throw Error(ErrorKind::Config, "batch_size must be at least 1");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorKind::Config, "test_fraction must lie strictly between 0 and 1");
  }
  if (!(adam.learning_rate >= 0.0) || !std::isfinite(adam.learning_rate)) {
    throw Error(ErrorKind::Config, "learning_rate must be finite and non-negative");
  }
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0 && adam.beta2 >= 0.0 && adam.beta2 < 1.0)) {
    throw Error(ErrorKind::Config, "adam betas must lie in [0, 1)");
  }
  if (!(adam.epsilon > 0.0)) throw Error(ErrorKind::Config, "adam epsilon must be positive");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw Error(ErrorKind::Config, "dropout_rate must lie in [0, 1)");
  }
  for (auto h : hidden_sizes) {
    if (h == 0) throw Error(ErrorKind::Config, "hidden layer sizes must be positive");
  }
  for (auto d : dropout_after) {
    if (d >= hidden_sizes.size()) {
      throw Error(ErrorKind::Config, "dropout can only follow a hidden layer");
    }
  }
}

std::string TrainConfig::canonical() const {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  os << "epochs " << epochs << "\nbatch_size " << batch_size << "\ntest_fraction " << test_fraction
     << "\nsplit " << to_string(split_mode) << "\nadam " << adam.learning_rate << ' ' << adam.beta1
     << ' ' << adam.beta2 << ' ' << adam.epsilon << "\nseed " << seed << "\nclass_weights "
     << use_class_weights << "\nhidden";
  for (auto h : hidden_sizes) os << ' ' << h;
  os << "\ndropout " << dropout_rate;
  for (auto d : dropout_after) os << ' ' << d;
  os << '\n';
  return os.str();
}

std::string TrainConfig::digest() const { return fnv1a_hex(canonical()); }

ClassWeights class_weights(const std::array<std::size_t, kNumClasses>& label_counts) {
  std::size_t total = 0;
  std::size_t present = 0;
  for (auto n : label_counts) {
    total += n;
    present += n > 0 ? 1 : 0;
  }
  if (total == 0) throw Error(ErrorKind::EmptyDataset, "class weights need at least one record");
  ClassWeights w{};
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (label_counts[c] > 0) {
      w[c] = static_cast<double>(total) /
             (static_cast<double>(present) * static_cast<double>(label_counts[c]));
    }
  }
  return w;
}

Eigen::MatrixXd feature_matrix(std::span<const LabeledFeatures> records) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(kNumFeatures), static_cast<Eigen::Index>(records.size()));
  for (std::size_t i = 0; i < records.size(); ++i) {
    x.col(static_cast<Eigen::Index>(i)) = records[i].features.to_array();
  }
  return x;
}

Normalizer<double> fit_normalizer(std::span<const LabeledFeatures> train) {
  return fit_normalizer_matrix(feature_matrix(train));
}

namespace {

constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kShuffleStream = 2;
constexpr std::uint64_t kDropoutStream = 3;

std::vector<MaterialClass> labels_of(std::span<const LabeledFeatures> records) {
  std::vector<MaterialClass> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.label);
  return out;
}

std::size_t distinct_classes(std::span<const LabeledFeatures> records) {
  std::set<MaterialClass> seen;
  for (const auto& r : records) seen.insert(r.label);
  return seen.size();
}

}  // namespace

Mlp init_model(const Normalizer<double>& normalizer, const TrainConfig& cfg) {
  Mlp model;
  model.normalizer = normalizer;
  model.dropout_rate = cfg.dropout_rate;
  model.dropout_after = cfg.dropout_after;

  Rng rng(derive_seed(cfg.seed, {kInitStream}));
  std::vector<std::size_t> sizes{kNumFeatures};
  sizes.insert(sizes.end(), cfg.hidden_sizes.begin(), cfg.hidden_sizes.end());
  sizes.push_back(kNumClasses);
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const auto fan_in = static_cast<Eigen::Index>(sizes[l]);
    const auto fan_out = static_cast<Eigen::Index>(sizes[l + 1]);
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    DenseLayer<double> layer;
    layer.weights.resize(fan_out, fan_in);
    // Row-major draw order, so the stream maps onto the serialized layout.
    for (Eigen::Index r = 0; r < fan_out; ++r)
      for (Eigen::Index c = 0; c < fan_in; ++c) layer.weights(r, c) = rng.uniform(-limit, limit);
    layer.biases = Eigen::VectorXd::Zero(fan_out);
    layer.activation = l + 2 == sizes.size() ? Activation::Softmax : Activation::Relu;
    model.layers.push_back(std::move(layer));
  }
  model.check_shapes();
  return model;
}

AdamOptimizer::AdamOptimizer(const Mlp& model, const AdamConfig& cfg) : cfg_(cfg) {
  for (const auto& l : model.layers) {
    m_w_.push_back(Eigen::MatrixXd::Zero(l.weights.rows(), l.weights.cols()));
    v_w_.push_back(Eigen::MatrixXd::Zero(l.weights.rows(), l.weights.cols()));
    m_b_.push_back(Eigen::VectorXd::Zero(l.biases.size()));
    v_b_.push_back(Eigen::VectorXd::Zero(l.biases.size()));
  }
}

void AdamOptimizer::step(Mlp& model, const Gradients<double>& grads) {
  if (grads.weights.size() != model.layers.size() || grads.biases.size() != model.layers.size()) {
    throw Error(ErrorKind::Internal, "gradient set does not match the model");
  }
  ++t_;
  const double t = static_cast<double>(t_);
  const double lr_t = cfg_.learning_rate * std::sqrt(1.0 - std::pow(cfg_.beta2, t)) /
                      (1.0 - std::pow(cfg_.beta1, t));
  auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
    m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * g;
    v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * g.cwiseProduct(g);
    param.array() -= lr_t * m.array() / (v.array().sqrt() + cfg_.epsilon);
  };
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    update(model.layers[l].weights, m_w_[l], v_w_[l], grads.weights[l]);
    update(model.layers[l].biases, m_b_[l], v_b_[l], grads.biases[l]);
  }
}

TrainResult fit_records(std::span<const LabeledFeatures> train, const TrainConfig& cfg) {
  cfg.validate();
  if (train.size() < 2) throw Error(ErrorKind::InsufficientData, "training needs at least 2 records");
  if (distinct_classes(train) < 2) {
    throw Error(ErrorKind::DegenerateTraining, "training data contains a single class");
  }

  TrainResult result;
  std::array<std::size_t, kNumClasses> counts{};
  for (const auto& r : train) ++counts[static_cast<std::size_t>(class_code(r.label))];
  result.weights.fill(1.0);
  if (cfg.use_class_weights) result.weights = class_weights(counts);

  result.model = init_model(fit_normalizer(train), cfg);
  Mlp& model = result.model;
  AdamOptimizer adam(model, cfg.adam);

  const Eigen::MatrixXd x = feature_matrix(train);
  const std::vector<MaterialClass> labels = labels_of(train);
  Rng shuffle_rng(derive_seed(cfg.seed, {kShuffleStream}));
  Rng dropout_rng(derive_seed(cfg.seed, {kDropoutStream}));

  const std::size_t n = train.size();
  ForwardCache<double> cache;
  Eigen::MatrixXd batch_x;
  std::vector<MaterialClass> batch_y;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto order = random_permutation(n, shuffle_rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t len = std::min(cfg.batch_size, n - start);
      batch_x.resize(x.rows(), static_cast<Eigen::Index>(len));
      batch_y.resize(len);
      for (std::size_t j = 0; j < len; ++j) {
        batch_x.col(static_cast<Eigen::Index>(j)) = x.col(static_cast<Eigen::Index>(order[start + j]));
        batch_y[j] = labels[order[start + j]];
      }
      const Eigen::MatrixXd probs = forward(model, batch_x, ForwardMode::Train, &dropout_rng, &cache);
      loss_sum += batch_loss<double>(probs, batch_y, result.weights) * static_cast<double>(len);
      adam.step(model, backward(model, cache, std::span<const MaterialClass>(batch_y), result.weights));
    }
    result.epoch_loss.push_back(loss_sum / static_cast<double>(n));
  }
  result.train_accuracy = accuracy(model, train);
  return result;
}

TrainResult fit(const Dataset& dataset, const TrainConfig& cfg) {
  cfg.validate();
  if (distinct_classes(dataset.records) < 2) {
    throw Error(ErrorKind::DegenerateTraining, "dataset contains fewer than 2 classes");
  }
  const auto labels = dataset.labels();
  std::vector<std::int64_t> containers;
  containers.reserve(dataset.records.size());
  for (const auto& r : dataset.records) containers.push_back(r.container_id);

  SplitResult split = train_test_split(labels, cfg.test_fraction, cfg.seed, cfg.split_mode, containers);
  std::vector<LabeledFeatures> train, test;
  for (auto i : split.train) train.push_back(dataset.records[i]);
  for (auto i : split.test) test.push_back(dataset.records[i]);

  TrainResult result = fit_records(train, cfg);
  result.split = std::move(split);
  result.test_accuracy = test.empty() ? 0.0 : accuracy(result.model, test);
  return result;
}

MaterialClass argmax_class(std::span<const double> scores) {
  if (scores.size() != kNumClasses) {
    throw Error(ErrorKind::Internal, "expected one score per class");
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c) {
    if (scores[c] > scores[best]) best = c;
  }
  return code_class(static_cast<int>(best));
}

namespace {

Prediction to_prediction(const Eigen::Ref<const Eigen::VectorXd>& probs) {
  Prediction p;
  for (std::size_t c = 0; c < kNumClasses; ++c) p.probabilities[c] = probs(static_cast<Eigen::Index>(c));
  p.label = argmax_class(p.probabilities);
  return p;
}

}  // namespace

Prediction predict(const Mlp& model, const FeatureVector& features) {
  const Eigen::MatrixXd probs = forward(model, features.to_array(), ForwardMode::Infer);
  return to_prediction(probs.col(0));
}

std::vector<Prediction> predict_batch(const Mlp& model, std::span<const LabeledFeatures> records) {
  std::vector<Prediction> out;
  if (records.empty()) return out;
  const Eigen::MatrixXd probs = forward(model, feature_matrix(records), ForwardMode::Infer);
  out.reserve(records.size());
  for (Eigen::Index j = 0; j < probs.cols(); ++j) out.push_back(to_prediction(probs.col(j)));
  return out;
}

double accuracy(const Mlp& model, std::span<const LabeledFeatures> records) {
  if (records.empty()) return 0.0;
  const auto preds = predict_batch(model, records);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < records.size(); ++i) correct += preds[i].label == records[i].label ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(records.size());
}

}  // namespace radarclass
