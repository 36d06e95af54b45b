#pragma once

// Dense feed-forward network core: normalizer, dense layers, softmax, inverted
// dropout and analytic backpropagation. Everything here is templated on the
// scalar type; training and serialization use double.

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "radarclass/domain.hpp"
#include "radarclass/random.hpp"

namespace radarclass {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

enum class Activation { Relu, Softmax, None };

const char* to_string(Activation a) noexcept;
Activation activation_from_string(const std::string& s);

inline constexpr double kStdFloor = 1e-8;
inline constexpr double kLogGuard = 1e-12;

/// Column-wise softmax. The column maximum is subtracted first, so any finite
/// logits are safe from overflow.
template <typename Derived>
MatrixX<typename Derived::Scalar> softmax(const Eigen::MatrixBase<Derived>& logits) {
  using Scalar = typename Derived::Scalar;
  MatrixX<Scalar> out(logits.rows(), logits.cols());
  for (Eigen::Index j = 0; j < logits.cols(); ++j) {
    const Scalar shift = logits.col(j).maxCoeff();
    out.col(j) = (logits.col(j).array() - shift).exp().matrix();
    out.col(j) /= out.col(j).sum();
  }
  return out;
}

template <typename Derived>
MatrixX<typename Derived::Scalar> relu(const Eigen::MatrixBase<Derived>& x) {
  return x.cwiseMax(typename Derived::Scalar(0));
}

/// Per-feature affine standardization, (x - mean) / std.
template <typename Scalar>
struct Normalizer {
  VectorX<Scalar> mean;
  VectorX<Scalar> stddev;

  /// Columns of `x` are samples.
  template <typename Derived>
  MatrixX<Scalar> transform(const Eigen::MatrixBase<Derived>& x) const {
    return (x.colwise() - mean).array().colwise() / stddev.array();
  }
};

/// Fits mean and population std per row of `x` (rows = features, columns =
/// samples). The mean is accumulated relative to the first sample, so a
/// constant row gets that constant back exactly and transforms to zeros.
template <typename Derived>
Normalizer<typename Derived::Scalar> fit_normalizer_matrix(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  if (x.cols() < 2) {
    throw Error(ErrorKind::InsufficientData, "normalizer needs at least 2 training records");
  }
  const auto n = static_cast<Scalar>(x.cols());
  Normalizer<Scalar> norm;
  norm.mean.resize(x.rows());
  norm.stddev.resize(x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const Scalar origin = x(r, 0);
    const Scalar shift = (x.row(r).array() - origin).sum() / n;
    const Scalar mean = origin + shift;
    const Scalar var = (x.row(r).array() - mean).square().sum() / n;
    norm.mean(r) = mean;
    norm.stddev(r) = std::max(std::sqrt(var), static_cast<Scalar>(kStdFloor));
  }
  return norm;
}

template <typename Scalar>
struct DenseLayer {
  MatrixX<Scalar> weights;  // out x in
  VectorX<Scalar> biases;
  Activation activation = Activation::Relu;

  [[nodiscard]] Eigen::Index in_size() const { return weights.cols(); }
  [[nodiscard]] Eigen::Index out_size() const { return weights.rows(); }
  [[nodiscard]] std::size_t parameter_count() const {
    return static_cast<std::size_t>(weights.size() + biases.size());
  }
};

/// Normalizer followed by a chain of dense layers. Inverted dropout is applied
/// after every layer listed in `dropout_after`, in training mode only.
template <typename Scalar>
struct BasicMlp {
  Normalizer<Scalar> normalizer;
  std::vector<DenseLayer<Scalar>> layers;
  double dropout_rate = 0.1;
  std::vector<std::size_t> dropout_after{0, 1};

  [[nodiscard]] std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.parameter_count();
    return n;
  }

  [[nodiscard]] bool has_dropout_after(std::size_t layer) const {
    for (auto d : dropout_after)
      if (d == layer) return true;
    return false;
  }

  /// Throws Internal when the layer chain is inconsistent.
  void check_shapes() const {
    if (layers.empty()) throw Error(ErrorKind::Internal, "model has no layers");
    if (normalizer.mean.size() != layers.front().in_size() ||
        normalizer.stddev.size() != normalizer.mean.size()) {
      throw Error(ErrorKind::Internal, "normalizer size does not match the first layer");
    }
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const auto& layer = layers[l];
      if (layer.biases.size() != layer.out_size()) {
        throw Error(ErrorKind::Internal, "layer " + std::to_string(l) + " bias size mismatch");
      }
      if (l > 0 && layer.in_size() != layers[l - 1].out_size()) {
        throw Error(ErrorKind::Internal, "layer " + std::to_string(l) + " input size mismatch");
      }
      if (!layer.weights.allFinite() || !layer.biases.allFinite()) {
        throw Error(ErrorKind::Internal, "layer " + std::to_string(l) + " has non-finite parameters");
      }
    }
    if (layers.back().activation != Activation::Softmax) {
      throw Error(ErrorKind::Internal, "output layer must use softmax");
    }
  }
};

using Mlp = BasicMlp<double>;

enum class ForwardMode { Infer, Train };

/// Intermediate values of a training-mode pass, consumed by backward().
template <typename Scalar>
struct ForwardCache {
  MatrixX<Scalar> input;                    // normalized features
  std::vector<MatrixX<Scalar>> pre;         // z per layer
  std::vector<MatrixX<Scalar>> post;        // activation per layer, after dropout
  std::vector<MatrixX<Scalar>> masks;       // scaled keep-masks; empty when no dropout
};

/// Forward pass over a batch (columns are samples). Returns class
/// probabilities, one column per sample. `rng` is only drawn from in Train
/// mode when dropout is active; `cache` may be null.
template <typename Scalar, typename Derived>
MatrixX<Scalar> forward(const BasicMlp<Scalar>& model, const Eigen::MatrixBase<Derived>& x,
                        ForwardMode mode, Rng* rng = nullptr, ForwardCache<Scalar>* cache = nullptr) {
  MatrixX<Scalar> a = model.normalizer.transform(x);
  if (cache) {
    cache->input = a;
    cache->pre.clear();
    cache->post.clear();
    cache->masks.clear();
  }
  const bool dropout = mode == ForwardMode::Train && model.dropout_rate > 0.0;
  if (dropout && rng == nullptr) throw Error(ErrorKind::Internal, "training dropout needs an rng");
  const Scalar keep_scale = static_cast<Scalar>(1.0 / (1.0 - model.dropout_rate));

  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const auto& layer = model.layers[l];
    MatrixX<Scalar> z = (layer.weights * a).colwise() + layer.biases;
    if (!z.allFinite()) {
      throw Error(ErrorKind::NumericOverflow, "non-finite pre-activation in dense layer " +
                                                  std::to_string(l) + " (" +
                                                  std::to_string(layer.out_size()) + " units)");
    }
    switch (layer.activation) {
      case Activation::Relu: a = relu(z); break;
      case Activation::Softmax: a = softmax(z); break;
      case Activation::None: a = z; break;
    }
    MatrixX<Scalar> mask;
    if (dropout && model.has_dropout_after(l)) {
      mask.resize(a.rows(), a.cols());
      for (Eigen::Index i = 0; i < mask.size(); ++i) {
        mask.data()[i] = rng->bernoulli(model.dropout_rate) ? Scalar(0) : keep_scale;
      }
      a = a.cwiseProduct(mask);
    }
    if (cache) {
      cache->pre.push_back(std::move(z));
      cache->post.push_back(a);
      cache->masks.push_back(std::move(mask));
    }
  }
  return a;
}

/// -w[label] * log(p[label] + guard).
template <typename Scalar, typename Derived>
Scalar weighted_cross_entropy(const Eigen::MatrixBase<Derived>& probs, MaterialClass label,
                              const std::array<double, kNumClasses>& weights) {
  const auto c = static_cast<std::size_t>(class_code(label));
  return -static_cast<Scalar>(weights[c]) *
         std::log(probs(static_cast<Eigen::Index>(c)) + static_cast<Scalar>(kLogGuard));
}

/// Mean weighted cross-entropy over the columns of `probs`.
template <typename Scalar>
Scalar batch_loss(const MatrixX<Scalar>& probs, std::span<const MaterialClass> labels,
                  const std::array<double, kNumClasses>& weights) {
  Scalar total = 0;
  for (Eigen::Index j = 0; j < probs.cols(); ++j) {
    total += weighted_cross_entropy<Scalar>(probs.col(j), labels[static_cast<std::size_t>(j)], weights);
  }
  return total / static_cast<Scalar>(probs.cols());
}

template <typename Scalar>
struct Gradients {
  std::vector<MatrixX<Scalar>> weights;
  std::vector<VectorX<Scalar>> biases;
};

/// Exact gradient of batch_loss with respect to every weight and bias, given
/// the cache of a training-mode forward pass on the same batch (its dropout
/// masks are reused).
template <typename Scalar>
Gradients<Scalar> backward(const BasicMlp<Scalar>& model, const ForwardCache<Scalar>& cache,
                           std::span<const MaterialClass> labels,
                           const std::array<double, kNumClasses>& weights) {
  const std::size_t n_layers = model.layers.size();
  if (cache.pre.size() != n_layers || cache.post.size() != n_layers ||
      cache.masks.size() != n_layers) {
    throw Error(ErrorKind::Internal, "forward cache does not match the model's layer count");
  }
  const Eigen::Index batch = cache.input.cols();
  if (static_cast<std::size_t>(batch) != labels.size()) {
    throw Error(ErrorKind::Internal, "label count does not match the cached batch");
  }
  // The closed-form output delta below assumes a plain softmax output.
  if (model.layers.back().activation != Activation::Softmax || cache.masks.back().size() != 0) {
    throw Error(ErrorKind::Internal, "output layer must be softmax without dropout");
  }

  Gradients<Scalar> grads;
  grads.weights.resize(n_layers);
  grads.biases.resize(n_layers);

  // d loss / d logits = w_y * p_y / (p_y + guard) * (p - onehot(y)) / batch
  const MatrixX<Scalar>& probs = cache.post.back();
  MatrixX<Scalar> delta = probs;
  for (Eigen::Index j = 0; j < batch; ++j) {
    const auto y = static_cast<Eigen::Index>(class_code(labels[static_cast<std::size_t>(j)]));
    if (y >= delta.rows()) throw Error(ErrorKind::Internal, "label outside the output layer");
    const Scalar p_y = probs(y, j);
    const Scalar scale = static_cast<Scalar>(weights[static_cast<std::size_t>(y)]) * p_y /
                         (p_y + static_cast<Scalar>(kLogGuard)) / static_cast<Scalar>(batch);
    delta(y, j) -= Scalar(1);
    delta.col(j) *= scale;
  }

  for (std::size_t l = n_layers; l-- > 0;) {
    const MatrixX<Scalar>& prev = l == 0 ? cache.input : cache.post[l - 1];
    grads.weights[l] = delta * prev.transpose();
    grads.biases[l] = delta.rowwise().sum();
    if (l == 0) break;
    MatrixX<Scalar> upstream = model.layers[l].weights.transpose() * delta;
    if (cache.masks[l - 1].size() != 0) upstream = upstream.cwiseProduct(cache.masks[l - 1]);
    switch (model.layers[l - 1].activation) {
      case Activation::Relu:
        delta = upstream.cwiseProduct(
            (cache.pre[l - 1].array() > Scalar(0)).template cast<Scalar>().matrix());
        break;
      case Activation::None: delta = std::move(upstream); break;
      case Activation::Softmax:
        throw Error(ErrorKind::Internal, "softmax is only supported on the output layer");
    }
  }
  return grads;
}

}  // namespace radarclass
