#include "radarclass/model_io.hpp"

#include "radarclass/config.hpp"

namespace radarclass {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

template <typename Derived>
ojson flat_row_major(const Eigen::MatrixBase<Derived>& m) {
  ojson out = ojson::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
  return out;
}

Eigen::VectorXd vector_from(const json& j, std::size_t expected, const std::string& what) {
  if (!j.is_array() || j.size() != expected) {
    throw Error(ErrorKind::Parse, what + " must hold " + std::to_string(expected) + " values");
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(expected));
  for (std::size_t i = 0; i < expected; ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

}  // namespace

std::string save_model(const ModelBundle& bundle) {
  const Mlp& m = bundle.model;
  m.check_shapes();
  ojson j;
  j["format"] = "radarclass.model";
  j["version"] = kModelFormatVersion;
  ojson order = ojson::array();
  for (auto c : kAllClasses) order.push_back(class_name(c));
  j["class_order"] = order;
  ojson features = ojson::array();
  for (auto f : kFeatureNames) features.push_back(f);
  j["feature_order"] = features;
  j["normalizer"] = ojson{{"mean", flat_row_major(m.normalizer.mean)},
                          {"std", flat_row_major(m.normalizer.stddev)}};
  ojson layers = ojson::array();
  for (const auto& l : m.layers) {
    ojson e;
    e["in"] = l.in_size();
    e["out"] = l.out_size();
    e["activation"] = to_string(l.activation);
    e["weights"] = flat_row_major(l.weights);
    e["biases"] = flat_row_major(l.biases);
    layers.push_back(e);
  }
  j["layers"] = layers;
  j["dropout_rate"] = m.dropout_rate;
  j["dropout_after"] = m.dropout_after;
  j["train_config"] = train_config_to_json(bundle.train_config);
  j["train_config_digest"] = bundle.train_config.digest();
  j["dataset"] = ojson{{"size", bundle.dataset_size}, {"digest", bundle.dataset_digest}};
  j["split"] = ojson{{"mode", to_string(bundle.train_config.split_mode)},
                     {"test_fraction", bundle.train_config.test_fraction},
                     {"test_indices", bundle.test_indices}};
  j["metrics"] = ojson{{"train_accuracy", bundle.train_accuracy},
                       {"test_accuracy", bundle.test_accuracy},
                       {"epoch_loss", bundle.epoch_loss}};
  return j.dump(1) + "\n";
}

ModelBundle load_model(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("model file: ") + e.what());
  }
  ModelBundle b;
  try {
    if (j.value("format", "") != "radarclass.model") throw Error(ErrorKind::Parse, "not a model file");
    const int version = j.value("version", -1);
    if (version != kModelFormatVersion) {
      throw Error(ErrorKind::Parse, "model format version " + std::to_string(version) +
                                        " unsupported, expected " + std::to_string(kModelFormatVersion));
    }
    const auto& order = j.at("class_order");
    bool same_order = order.is_array() && order.size() == kNumClasses;
    for (std::size_t c = 0; same_order && c < kNumClasses; ++c) {
      same_order = order[c].get<std::string>() == class_name(code_class(static_cast<int>(c)));
    }
    if (!same_order) {
      throw Error(ErrorKind::Compatibility, "model class order " + order.dump() +
                                                " differs from metal,plastic,glass,paper,empty");
    }

    Mlp& m = b.model;
    m.normalizer.mean = vector_from(j.at("normalizer").at("mean"), kNumFeatures, "normalizer mean");
    m.normalizer.stddev = vector_from(j.at("normalizer").at("std"), kNumFeatures, "normalizer std");
    for (const auto& e : j.at("layers")) {
      const auto in = e.at("in").get<std::size_t>();
      const auto out = e.at("out").get<std::size_t>();
      DenseLayer<double> layer;
      const Eigen::VectorXd w = vector_from(e.at("weights"), in * out, "layer weights");
      layer.weights.resize(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(in));
      for (Eigen::Index r = 0; r < layer.weights.rows(); ++r)
        for (Eigen::Index c = 0; c < layer.weights.cols(); ++c)
          layer.weights(r, c) = w(r * layer.weights.cols() + c);
      layer.biases = vector_from(e.at("biases"), out, "layer biases");
      layer.activation = activation_from_string(e.at("activation").get<std::string>());
      m.layers.push_back(std::move(layer));
    }
    m.dropout_rate = j.at("dropout_rate").get<double>();
    m.dropout_after = j.at("dropout_after").get<std::vector<std::size_t>>();
    m.check_shapes();
    if (m.layers.back().out_size() != static_cast<Eigen::Index>(kNumClasses)) {
      throw Error(ErrorKind::Parse, "model output layer must have 5 units");
    }

    b.train_config = train_config_from_json(j.at("train_config"));
    if (j.at("train_config_digest").get<std::string>() != b.train_config.digest()) {
      throw Error(ErrorKind::Parse, "train_config_digest does not match train_config");
    }
    b.dataset_size = j.at("dataset").at("size").get<std::size_t>();
    b.dataset_digest = j.at("dataset").at("digest").get<std::string>();
    b.test_indices = j.at("split").at("test_indices").get<std::vector<std::size_t>>();
    const auto& metrics = j.at("metrics");
    b.train_accuracy = metrics.at("train_accuracy").get<double>();
    b.test_accuracy = metrics.at("test_accuracy").get<double>();
    b.epoch_loss = metrics.at("epoch_loss").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("model file: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Compatibility || e.kind() == ErrorKind::Parse) throw;
    throw Error(ErrorKind::Parse, std::string("model file: ") + e.what());
  }
  return b;
}

}  // namespace radarclass
