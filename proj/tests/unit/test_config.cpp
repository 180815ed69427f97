#include <gtest/gtest.h>

#include <string>

#include "tvqs/config.hpp"

using tvqs::config::ConfigError;
using tvqs::config::ExperimentConfig;

namespace {

std::string field_of(const std::string& yaml) {
  try {
    tvqs::config::parse(yaml).validate();
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST(Config, DefaultsWhenEmpty) {
  const auto c = tvqs::config::parse("model: {n: 4}\n");
  EXPECT_EQ(c.model.n, 4);
  EXPECT_EQ(c.train, tvqs::vfe::TrainConfig{});
  EXPECT_EQ(c.layer_order, tvqs::ansatz::LayerOrder::EntanglerFirst);
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, RoundTrip) {
  const std::string yaml = R"(
model: {n: 6, delta: 0.3, h: -0.25}
circuit: {layer_order: rz_first}
train:
  beta: 1.5
  n_layers: 7
  n_batch: 3
  n_spsa: 5
  n_iter_max: 321
  learning_rate: 0.01
  adam_beta1: 0.8
  adam_beta2: 0.99
  adam_epsilon: 1.0e-7
  spsa_c: 0.05
  mode: sample
  grad_theta: spsa
  psr_engine: shift
  fullspace_reeval: false
  smoothing_window: 7
noise: {shots_per_setting: 128, nnn_ratio: 0.0782}
output: {dir: somewhere}
seed: 18446744073709551615
sweep: {betas: [0.1, 0.7], n_samples: 3, n_repeats: 4, direct_samples: 0}
campaign:
  kind: spsa
  n_values: [4, 6]
  layer_values: [1, 2]
  stop_at_contour: true
  layers_per_n: [3, 5]
  n_spsa_values: [2, 4]
  trials: 3
  target_epsilon: 0.02
  n_iter_max: 99
  max_divergent_fraction: 0.25
)";
  const auto a = tvqs::config::parse(yaml);
  EXPECT_EQ(a.train.seed, 18446744073709551615ull);
  EXPECT_EQ(a.train.shots_per_setting, 128u);
  EXPECT_EQ(a.layer_order, tvqs::ansatz::LayerOrder::RzFirst);
  EXPECT_NO_THROW(a.validate());
  const auto b = tvqs::config::parse(tvqs::config::serialize(a));
  EXPECT_EQ(a, b);
  EXPECT_EQ(tvqs::config::serialize(a), tvqs::config::serialize(b));
}

TEST(Config, EntanglerFollowsConfig) {
  const auto c = tvqs::config::parse("model: {n: 4}\nnoise: {nnn_ratio: 0.5}\ncircuit: {layer_order: rz_first}\n");
  const auto e = c.entangler();
  EXPECT_EQ(e.n_qubits, 4);
  ASSERT_EQ(e.nnn_couplings.size(), 2u);
  EXPECT_EQ(e.nnn_couplings[0], 0.5);
  EXPECT_EQ(e.order, tvqs::ansatz::LayerOrder::RzFirst);
}

TEST(Config, ErrorsNameTheField) {
  EXPECT_EQ(field_of("model: {n: 0}"), "model.n");
  EXPECT_EQ(field_of("model: {n: 20}"), "model.n");
  EXPECT_EQ(field_of("train: {beta: -1}"), "train.beta");
  EXPECT_EQ(field_of("train: {beta: abc}"), "train.beta");
  EXPECT_EQ(field_of("train: {mode: maybe}"), "train.mode");
  EXPECT_EQ(field_of("train: {grad_theta: adagrad}"), "train.grad_theta");
  EXPECT_EQ(field_of("train: {n_iter_max: 0}"), "train.n_iter_max");
  EXPECT_EQ(field_of("train: {bogus: 1}"), "train.bogus");
  EXPECT_EQ(field_of("circuit: {layer_order: diagonal}"), "circuit.layer_order");
  EXPECT_EQ(field_of("noise: {shots_per_setting: -5}"), "noise.shots_per_setting");
  EXPECT_EQ(field_of("noise: {nnn_ratio: -0.1}"), "noise.nnn_ratio");
  EXPECT_EQ(field_of("seed: -3"), "seed");
  EXPECT_EQ(field_of("sweep: {betas: []}"), "sweep.betas");
  EXPECT_EQ(field_of("campaign: {kind: psr, n_values: [4, 5], layers_per_n: [3]}"), "campaign.layers_per_n");
  EXPECT_EQ(field_of("colour: blue"), "colour");
  EXPECT_EQ(field_of("model: [1, 2]"), "model");
  EXPECT_EQ(field_of("model: {n: [unclosed"), "config");
}

TEST(Config, LoadMissingFile) {
  try {
    tvqs::config::load("/nonexistent/config.yaml");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "config");
  }
}
