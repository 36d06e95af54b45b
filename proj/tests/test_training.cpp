#include <doctest.h>

#include <cmath>

#include "radarclass/classifier.hpp"

using namespace radarclass;

namespace {

// Two well separated blobs in the first two features; the rest are constant.
Dataset separable_toy(std::size_t per_class, std::uint64_t seed) {
  Rng rng(seed);
  Dataset d;
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    const bool second = i % 2 == 1;
    FeatureArray a = FeatureArray::Constant(0.5);
    a(0) = (second ? 2.0 : -2.0) + rng.uniform(-0.5, 0.5);
    a(1) = (second ? -1.0 : 1.0) + rng.uniform(-0.5, 0.5);
    a(0) = std::abs(a(0)) + (second ? 10.0 : 0.0);
    d.records.push_back({FeatureVector::from_array(a), second ? MaterialClass::Glass : MaterialClass::Metal, -1});
  }
  return d;
}

Dataset balanced_five(std::size_t per_class, std::uint64_t seed) {
  Rng rng(seed);
  Dataset d;
  for (std::size_t i = 0; i < per_class * kNumClasses; ++i) {
    const auto c = code_class(static_cast<int>(i % kNumClasses));
    FeatureArray a;
    for (Eigen::Index k = 0; k < a.size(); ++k) a(k) = rng.uniform(0.0, 1.0) + class_code(c) * 0.3 * (k + 1);
    d.records.push_back({FeatureVector::from_array(a), c, -1});
  }
  return d;
}

bool same_parameters(const Mlp& a, const Mlp& b) {
  if (a.layers.size() != b.layers.size()) return false;
  for (std::size_t l = 0; l < a.layers.size(); ++l) {
    if (a.layers[l].weights != b.layers[l].weights || a.layers[l].biases != b.layers[l].biases) return false;
  }
  return a.normalizer.mean == b.normalizer.mean && a.normalizer.stddev == b.normalizer.stddev;
}

}  // namespace

TEST_CASE("class weights") {
  for (auto w : class_weights({100, 100, 100, 100, 100})) CHECK(w == 1.0);
  const auto imb = class_weights({400, 800, 400, 400, 400});
  CHECK(imb[0] == doctest::Approx(1.2));
  CHECK(imb[1] == doctest::Approx(0.6));
  CHECK(imb[2] == doctest::Approx(1.2));
  CHECK(imb[3] == doctest::Approx(1.2));
  CHECK(imb[4] == doctest::Approx(1.2));
  const auto absent = class_weights({100, 100, 0, 100, 100});
  CHECK(absent[2] == 0.0);
  CHECK(absent[0] == doctest::Approx(1.0));
  const auto skew = class_weights({10, 30, 0, 0, 0});
  CHECK(skew[0] == doctest::Approx(2.0));
  CHECK(skew[1] == doctest::Approx(40.0 / 60.0));
  try {
    (void)class_weights({0, 0, 0, 0, 0});
    FAIL("expected empty dataset");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyDataset);
  }
}

TEST_CASE("weighted cross-entropy") {
  const std::array<double, kNumClasses> ones{1, 1, 1, 1, 1};
  Eigen::VectorXd perfect = Eigen::VectorXd::Zero(5);
  perfect(2) = 1.0;
  CHECK(std::abs(weighted_cross_entropy<double>(perfect, MaterialClass::Glass, ones)) < 1e-11);
  const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(5, 0.2);
  CHECK(weighted_cross_entropy<double>(uniform, MaterialClass::Paper, ones) ==
        doctest::Approx(1.6094379124341003).epsilon(1e-10));
  std::array<double, kNumClasses> twos = ones;
  twos[3] = 2.0;
  CHECK(weighted_cross_entropy<double>(uniform, MaterialClass::Paper, twos) ==
        2.0 * weighted_cross_entropy<double>(uniform, MaterialClass::Paper, ones));
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(5);
  zero(0) = 1.0;
  CHECK(std::isfinite(weighted_cross_entropy<double>(zero, MaterialClass::Empty, ones)));
}

TEST_CASE("a zero learning-rate step leaves parameters bit-identical") {
  TrainConfig cfg;
  cfg.adam.learning_rate = 0.0;
  Rng rng(3);
  Eigen::MatrixXd x(6, 32);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform01();
  Mlp model = init_model(fit_normalizer_matrix(x), cfg);
  const Mlp before = model;
  std::vector<MaterialClass> y;
  for (int j = 0; j < 32; ++j) y.push_back(code_class(j % 5));
  ForwardCache<double> cache;
  forward(model, x, ForwardMode::Train, &rng, &cache);
  AdamOptimizer adam(model, cfg.adam);
  adam.step(model, backward(model, cache, std::span<const MaterialClass>(y), ClassWeights{1, 1, 1, 1, 1}));
  CHECK(adam.steps() == 1);
  CHECK(same_parameters(model, before));
}

TEST_CASE("training on separable data") {
  const Dataset d = separable_toy(100, 8);
  TrainConfig cfg;
  cfg.epochs = 30;
  const TrainResult r = fit(d, cfg);
  REQUIRE(r.epoch_loss.size() == 30);
  for (std::size_t e = 1; e < 10; ++e) CHECK(r.epoch_loss[e] < r.epoch_loss[e - 1]);
  CHECK(r.train_accuracy == 1.0);
  CHECK(r.test_accuracy == 1.0);
  CHECK(r.split.test.size() == 60);
}

TEST_CASE("class weights of 1 do not change a balanced run") {
  const Dataset d = balanced_five(40, 2);
  TrainConfig with;
  with.epochs = 5;
  TrainConfig without = with;
  without.use_class_weights = false;
  const TrainResult a = fit(d, with);
  const TrainResult b = fit(d, without);
  for (auto w : a.weights) CHECK(w == 1.0);
  CHECK(a.epoch_loss == b.epoch_loss);
  CHECK(same_parameters(a.model, b.model));
}

TEST_CASE("training is deterministic for a fixed seed") {
  const Dataset d = balanced_five(30, 4);
  TrainConfig cfg;
  cfg.epochs = 5;
  const TrainResult a = fit(d, cfg);
  const TrainResult b = fit(d, cfg);
  CHECK(a.epoch_loss == b.epoch_loss);
  CHECK(same_parameters(a.model, b.model));
  cfg.seed = 43;
  CHECK_FALSE(same_parameters(a.model, fit(d, cfg).model));
}

TEST_CASE("single-class data cannot be trained on") {
  Dataset d;
  for (int i = 0; i < 10; ++i) d.records.push_back({FeatureVector{0.1 * i, 0, 0, 0, 0, 0}, MaterialClass::Paper, -1});
  try {
    (void)fit(d, TrainConfig{});
    FAIL("expected degenerate training");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateTraining);
  }
}

TEST_CASE("train config validation") {
  TrainConfig cfg;
  cfg.epochs = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = TrainConfig{};
  cfg.batch_size = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  for (double f : {0.0, 1.0, -0.2, 1.5}) {
    cfg = TrainConfig{};
    cfg.test_fraction = f;
    CHECK_THROWS_AS(cfg.validate(), Error);
  }
}

TEST_CASE("the normalizer depends only on the training split") {
  Dataset d = balanced_five(20, 6);
  TrainConfig cfg;
  cfg.epochs = 1;
  const TrainResult a = fit(d, cfg);
  for (auto i : a.split.test) d.records[i].features.main_peak_mean += 100.0;
  const TrainResult b = fit(d, cfg);
  CHECK(a.model.normalizer.mean == b.model.normalizer.mean);
  CHECK(a.model.normalizer.stddev == b.model.normalizer.stddev);
}

TEST_CASE("argmax tie-break and monotone invariance") {
  CHECK(argmax_class(std::array<double, 5>{0.1, 0.7, 0.1, 0.05, 0.05}) == MaterialClass::Plastic);
  CHECK(argmax_class(std::array<double, 5>{0.2, 0.2, 0.2, 0.2, 0.2}) == MaterialClass::Metal);
  CHECK(argmax_class(std::array<double, 5>{0.1, 0.3, 0.3, 0.2, 0.1}) == MaterialClass::Plastic);
  Rng rng(10);
  for (int t = 0; t < 200; ++t) {
    std::array<double, 5> z{};
    for (auto& v : z) v = std::round(rng.uniform(-5.0, 5.0));
    std::array<double, 5> t1{}, t2{};
    for (std::size_t i = 0; i < 5; ++i) {
      t1[i] = std::exp(z[i]);
      t2[i] = 3.0 * z[i] * z[i] * z[i] - 7.0;
    }
    CHECK(argmax_class(t1) == argmax_class(z));
    CHECK(argmax_class(t2) == argmax_class(z));
  }
}

TEST_CASE("predict returns a distribution and its argmax") {
  const Dataset d = balanced_five(20, 12);
  TrainConfig cfg;
  cfg.epochs = 3;
  const TrainResult r = fit(d, cfg);
  for (const auto& rec : d.records) {
    const auto p = predict(r.model, rec.features);
    double s = 0;
    for (double v : p.probabilities) s += v;
    CHECK(std::abs(s - 1.0) < 1e-9);
    CHECK(p.label == argmax_class(p.probabilities));
  }
}
