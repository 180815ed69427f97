#pragma once

// Experiment configuration: one YAML file with the sections
// model, circuit, train, noise, output, seed, sweep and campaign.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "tvqs/ansatz.hpp"
#include "tvqs/spinchain.hpp"
#include "tvqs/train.hpp"

namespace tvqs::config {

// Validation failure; the message names the offending field.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct SweepConfig {
  std::vector<double> betas{0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  std::size_t n_samples = 5;
  std::size_t n_repeats = 20;
  // Extra direct sample-mean row with this many samples; 0 disables.
  std::size_t direct_samples = 200;

  bool operator==(const SweepConfig&) const = default;
};

enum class CampaignKind { Layers, Psr, Spsa };

std::string to_string(CampaignKind k);
CampaignKind parse_campaign_kind(const std::string& s);

struct CampaignConfig {
  CampaignKind kind = CampaignKind::Psr;
  std::vector<int> n_values{4, 5, 6, 7, 8};
  // Layers kind: depth grid scanned per N.
  std::vector<int> layer_values{3, 4, 5, 6, 7, 8, 9, 10};
  // Layers kind: stop scanning an N once the mean error meets the target.
  bool stop_at_contour = false;
  // Psr / spsa kinds: circuit depth for each entry of n_values.
  std::vector<int> layers_per_n{4, 5, 6, 7, 8};
  std::vector<int> n_spsa_values{1, 3, 5, 7, 9, 11, 13};
  int trials = 20;
  double target_epsilon = 0.01;
  int n_iter_max = 1000;
  // Spsa kind: an n_spsa value qualifies for an N when at most this
  // fraction of its trials diverge.
  double max_divergent_fraction = 0.0;

  bool operator==(const CampaignConfig&) const = default;
};

struct ExperimentConfig {
  spinchain::XXZSpec model;
  vfe::TrainConfig train;  // train.seed and train.shots_per_setting come from seed and noise
  double nnn_ratio = 0.0;
  ansatz::LayerOrder layer_order = ansatz::LayerOrder::EntanglerFirst;
  std::string output_dir = "out";
  SweepConfig sweep;
  CampaignConfig campaign;

  ansatz::EntanglerSpec entangler() const;
  void validate() const;

  bool operator==(const ExperimentConfig&) const = default;
};

ExperimentConfig parse(const std::string& yaml_text);
ExperimentConfig load(const std::string& path);
std::string serialize(const ExperimentConfig& config);

}  // namespace tvqs::config
