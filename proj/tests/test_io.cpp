#include <doctest.h>

#include <sstream>

#include "radarclass/config.hpp"
#include "radarclass/data_io.hpp"
#include "radarclass/model_io.hpp"

using namespace radarclass;

namespace {

WindowDataset small_windows() {
  SimConfig cfg;
  cfg.frames_per_window = 5;
  cfg.windows_per_container = 2;
  return generate_dataset({3, 2, 2, 1, 2}, cfg);
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Internal;
}

}  // namespace

TEST_CASE("doubles survive text exactly") {
  Rng rng(4);
  for (int i = 0; i < 1000; ++i) {
    const double v = std::ldexp(rng.uniform01(), static_cast<int>(rng.below(80)) - 40);
    CHECK(parse_double(format_double(v)) == v);
  }
  CHECK(parse_double("1e3") == 1000.0);
  CHECK_THROWS_AS(parse_double("1.5x"), Error);
  CHECK_THROWS_AS(parse_double(""), Error);
}

TEST_CASE("windows file round trip") {
  const auto data = small_windows();
  std::stringstream ss;
  write_windows(ss, data);
  const auto back = read_windows(ss);
  REQUIRE(back.windows.size() == data.windows.size());
  CHECK(back.provenance.seed == data.provenance.seed);
  CHECK(back.provenance.config_digest == data.provenance.config_digest);
  for (std::size_t i = 0; i < data.windows.size(); ++i) {
    CHECK(back.windows[i].label == data.windows[i].label);
    CHECK(back.windows[i].container_id == data.windows[i].container_id);
    CHECK(back.windows[i].window.amplitudes() == data.windows[i].window.amplitudes());
  }
  std::stringstream again;
  write_windows(again, back);
  std::stringstream first;
  write_windows(first, data);
  CHECK(again.str() == first.str());
}

TEST_CASE("windows file rejects bad input") {
  const auto data = small_windows();
  std::stringstream ss;
  write_windows(ss, data);
  const std::string text = ss.str();

  std::string wrong_version = text;
  wrong_version.replace(wrong_version.find("\"version\":1"), 11, "\"version\":9");
  std::istringstream a(wrong_version);
  CHECK(kind_of([&] { read_windows(a); }) == ErrorKind::Parse);

  std::istringstream truncated(text.substr(0, text.rfind('\n', text.size() - 2) + 1));
  CHECK(kind_of([&] { read_windows(truncated); }) == ErrorKind::Parse);

  std::istringstream empty("");
  CHECK(kind_of([&] { read_windows(empty); }) == ErrorKind::Parse);
}

TEST_CASE("features file round trip") {
  const auto windows = small_windows();
  const Dataset d = extract_dataset(windows, FeatureConfig{});
  REQUIRE(d.records.size() == windows.windows.size());
  std::stringstream ss;
  write_features(ss, d);
  const Dataset back = read_features(ss);
  REQUIRE(back.records.size() == d.records.size());
  for (std::size_t i = 0; i < d.records.size(); ++i) {
    CHECK(back.records[i].features.to_array() == d.records[i].features.to_array());
    CHECK(back.records[i].label == d.records[i].label);
    CHECK(back.records[i].container_id == d.records[i].container_id);
  }
  CHECK(back.provenance.seed == d.provenance.seed);
}

TEST_CASE("features file version and class order are checked") {
  const Dataset d = extract_dataset(small_windows(), FeatureConfig{});
  std::stringstream ss;
  write_features(ss, d);
  const std::string text = ss.str();

  std::string v2 = text;
  v2.replace(v2.find(" v1 "), 4, " v2 ");
  std::istringstream a(v2);
  CHECK(kind_of([&] { read_features(a); }) == ErrorKind::Parse);

  std::string reordered = text;
  reordered.replace(reordered.find("metal,plastic"), 13, "plastic,metal");
  std::istringstream b(reordered);
  CHECK(kind_of([&] { read_features(b); }) == ErrorKind::Compatibility);

  std::string negative = text;
  const auto row = negative.find('\n', negative.find('\n') + 1) + 1;
  negative.insert(row, "-");
  std::istringstream c(negative);
  CHECK(kind_of([&] { read_features(c); }) == ErrorKind::Parse);
}

TEST_CASE("model round trip predicts bit-identically") {
  const Dataset d = extract_dataset(small_windows(), FeatureConfig{});
  TrainConfig cfg;
  cfg.epochs = 3;
  const TrainResult r = fit(d, cfg);
  ModelBundle b;
  b.model = r.model;
  b.train_config = cfg;
  b.test_indices = r.split.test;
  b.dataset_size = d.records.size();
  b.dataset_digest = "abc";
  b.epoch_loss = r.epoch_loss;
  b.train_accuracy = r.train_accuracy;
  b.test_accuracy = r.test_accuracy;
  const std::string text = save_model(b);
  const ModelBundle back = load_model(text);
  CHECK(save_model(back) == text);
  CHECK(back.test_indices == b.test_indices);
  CHECK(back.epoch_loss == b.epoch_loss);
  CHECK(back.train_config.digest() == cfg.digest());
  for (const auto& rec : d.records) {
    CHECK(predict(back.model, rec.features).probabilities == predict(r.model, rec.features).probabilities);
  }
}

TEST_CASE("model files are validated") {
  const Dataset d = extract_dataset(small_windows(), FeatureConfig{});
  TrainConfig cfg;
  cfg.epochs = 1;
  ModelBundle b;
  b.model = fit(d, cfg).model;
  b.train_config = cfg;
  const std::string text = save_model(b);

  std::string v = text;
  v.replace(v.find("\"version\": 1"), 12, "\"version\": 2");
  CHECK(kind_of([&] { load_model(v); }) == ErrorKind::Parse);
  CHECK(kind_of([&] { load_model("{}"); }) == ErrorKind::Parse);
  CHECK(kind_of([&] { load_model("garbage"); }) == ErrorKind::Parse);
  std::string order = text;
  order.replace(order.find("\"metal\""), 7, "\"paper\"");
  CHECK(kind_of([&] { load_model(order); }) != ErrorKind::Internal);
}

TEST_CASE("config parsing") {
  const PipelineConfig def = parse_config("{}");
  CHECK(def.simulator.seed == 42);
  CHECK(def.training.epochs == 100);
  CHECK(def.counts[0] == 400);

  const auto cfg = parse_config(R"({
    "simulator": {"seed": 7, "counts": {"metal": 10, "empty": 0}, "frames_per_window": 12,
                  "profiles": {"glass": {"front_amp_range": [0.2, 0.6]}}},
    "features": {"guard_bins": 4},
    "training": {"epochs": 3, "hidden_sizes": [8, 4], "dropout_after": [0]},
    "evaluation": {"split_mode": "container", "test_fraction": 0.25},
    "paths": {"model": "m.json"}
  })");
  CHECK(cfg.simulator.seed == 7);
  CHECK(cfg.counts[0] == 10);
  CHECK(cfg.counts[4] == 0);
  CHECK(cfg.counts[1] == 400);
  CHECK(cfg.simulator.frames_per_window == 12);
  CHECK(cfg.simulator.profile(MaterialClass::Glass).front_amp_range == Interval{0.2, 0.6});
  CHECK(cfg.features.guard_bins == 4);
  CHECK(cfg.training.hidden_sizes == std::vector<std::size_t>{8, 4});
  CHECK(cfg.training.split_mode == SplitMode::Container);
  CHECK(cfg.training.test_fraction == 0.25);
  CHECK(cfg.paths.model == "m.json");

  const PipelineConfig round = parse_config(to_json(cfg).dump());
  CHECK(to_json(round).dump() == to_json(cfg).dump());
}

TEST_CASE("config errors") {
  for (const char* bad : {R"({"simulator": {"sed": 1}})", R"({"extra": {}})", R"({"training": {"epochs": 0}})",
                          R"({"evaluation": {"test_fraction": 1.5}})", R"({"evaluation": {"split_mode": "x"}})",
                          R"({"simulator": {"counts": {"wood": 3}}})", "[1, 2", R"({"simulator": {"noise_sigma": -1}})"}) {
    INFO(std::string(bad));
    CHECK(kind_of([&] { parse_config(bad); }) == ErrorKind::Config);
  }
}
