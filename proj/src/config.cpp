#include "tvqs/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace tvqs::config {

std::string to_string(CampaignKind k) {
  switch (k) {
    case CampaignKind::Layers:
      return "layers";
    case CampaignKind::Psr:
      return "psr";
    case CampaignKind::Spsa:
      return "spsa";
  }
  return "psr";
}

CampaignKind parse_campaign_kind(const std::string& s) {
  if (s == "layers") return CampaignKind::Layers;
  if (s == "psr") return CampaignKind::Psr;
  if (s == "spsa") return CampaignKind::Spsa;
  throw ConfigError("campaign.kind", "must be layers, psr or spsa, got '" + s + "'");
}

ansatz::EntanglerSpec ExperimentConfig::entangler() const {
  return ansatz::EntanglerSpec::uniform(model.n, 1.0, nnn_ratio, std::numbers::pi / 4, layer_order);
}

namespace {

void require(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw ConfigError(field, message);
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

void ExperimentConfig::validate() const {
  require(model.n >= 1 && model.n <= spinchain::kOracleCap, "model.n",
          "must be in [1, " + std::to_string(spinchain::kOracleCap) + "]");
  require(finite(model.delta), "model.delta", "must be finite");
  require(finite(model.h), "model.h", "must be finite");

  const auto& t = train;
  require(t.beta > 0.0 && finite(t.beta), "train.beta", "must be positive and finite");
  require(t.n_layers >= 0, "train.n_layers", "must be non-negative");
  require(t.mode != vfe::LossMode::Sample || t.n_batch >= 1, "train.n_batch", "must be at least 1 in sample mode");
  require(t.n_spsa >= 1, "train.n_spsa", "must be at least 1");
  require(t.n_iter_max >= 1, "train.n_iter_max", "must be at least 1");
  require(t.adam.learning_rate > 0.0 && finite(t.adam.learning_rate), "train.learning_rate", "must be positive");
  require(t.adam.beta1 >= 0.0 && t.adam.beta1 < 1.0, "train.adam_beta1", "must lie in [0, 1)");
  require(t.adam.beta2 >= 0.0 && t.adam.beta2 < 1.0, "train.adam_beta2", "must lie in [0, 1)");
  require(t.adam.epsilon > 0.0 && finite(t.adam.epsilon), "train.adam_epsilon", "must be positive");
  require(t.spsa_c > 0.0 && finite(t.spsa_c), "train.spsa_c", "must be positive");
  require(t.target_epsilon >= 0.0 && finite(t.target_epsilon), "train.target_epsilon", "must be non-negative");
  require(t.target_epsilon == 0.0 || t.fullspace_reeval, "train.target_epsilon", "needs train.fullspace_reeval");
  require(t.smoothing_window >= 1, "train.smoothing_window", "must be at least 1");
  require(!(t.psr_engine == vfe::PsrEngine::Adjoint && t.shots_per_setting > 0), "train.psr_engine",
          "adjoint needs exact energies (noise.shots_per_setting = 0)");
  const bool enumerates = t.mode == vfe::LossMode::FullSpace || t.fullspace_reeval;
  require(!enumerates || model.n <= probmodel::kDefaultEnumerationCap, "model.n",
          "full-space evaluation needs n <= " + std::to_string(probmodel::kDefaultEnumerationCap));

  require(nnn_ratio >= 0.0 && finite(nnn_ratio), "noise.nnn_ratio", "must be non-negative");
  require(!output_dir.empty(), "output.dir", "must not be empty");

  require(!sweep.betas.empty(), "sweep.betas", "must list at least one beta");
  for (double b : sweep.betas) require(b > 0.0 && finite(b), "sweep.betas", "entries must be positive");
  require(sweep.n_samples >= 1, "sweep.n_samples", "must be at least 1");
  require(sweep.n_repeats >= 1, "sweep.n_repeats", "must be at least 1");

  const auto& c = campaign;
  require(!c.n_values.empty(), "campaign.n_values", "must list at least one N");
  for (int n : c.n_values) {
    require(n >= 1 && n <= probmodel::kDefaultEnumerationCap, "campaign.n_values",
            "entries must be in [1, " + std::to_string(probmodel::kDefaultEnumerationCap) + "]");
  }
  require(!c.layer_values.empty(), "campaign.layer_values", "must list at least one depth");
  for (int d : c.layer_values) require(d >= 0, "campaign.layer_values", "entries must be non-negative");
  require(c.kind == CampaignKind::Layers || c.layers_per_n.size() == c.n_values.size(), "campaign.layers_per_n",
          "needs one depth per entry of campaign.n_values");
  for (int d : c.layers_per_n) require(d >= 0, "campaign.layers_per_n", "entries must be non-negative");
  require(!c.n_spsa_values.empty(), "campaign.n_spsa_values", "must list at least one value");
  for (int s : c.n_spsa_values) require(s >= 1, "campaign.n_spsa_values", "entries must be at least 1");
  require(c.trials >= 1, "campaign.trials", "must be at least 1");
  require(c.target_epsilon > 0.0 && finite(c.target_epsilon), "campaign.target_epsilon", "must be positive");
  require(c.n_iter_max >= 1, "campaign.n_iter_max", "must be at least 1");
  require(c.max_divergent_fraction >= 0.0 && c.max_divergent_fraction <= 1.0, "campaign.max_divergent_fraction",
          "must lie in [0, 1]");
}

namespace {

class Section {
 public:
  Section(const YAML::Node& root, std::string name, std::set<std::string> keys)
      : name_(std::move(name)), node_(root[name_]) {
    if (!node_) return;
    if (!node_.IsMap()) throw ConfigError(name_, "must be a mapping");
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!keys.count(key)) throw ConfigError(name_ + "." + key, "unknown key");
    }
  }

  template <class T>
  void get(const std::string& key, T& out) const {
    if (!node_) return;
    const YAML::Node v = node_[key];
    if (!v) return;
    try {
      out = v.as<T>();
    } catch (const YAML::Exception&) {
      throw ConfigError(name_ + "." + key, "has the wrong type");
    }
  }

  template <class T, class F>
  void get_as(const std::string& key, T& out, F convert) const {
    std::string text;
    get(key, text);
    if (text.empty()) return;
    try {
      out = convert(text);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(name_ + "." + key, e.what());
    }
  }

 private:
  std::string name_;
  YAML::Node node_;
};

}  // namespace

ExperimentConfig parse(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("config", std::string("malformed YAML: ") + e.what());
  }
  ExperimentConfig c;
  if (root.IsNull()) {
    c.validate();
    return c;
  }
  if (!root.IsMap()) throw ConfigError("config", "top level must be a mapping");
  static const std::set<std::string> kTop{"model", "circuit", "train", "noise", "output", "seed", "sweep", "campaign"};
  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    if (!kTop.count(key)) throw ConfigError(key, "unknown section");
  }

  const Section model(root, "model", {"n", "delta", "h"});
  model.get("n", c.model.n);
  model.get("delta", c.model.delta);
  model.get("h", c.model.h);

  const Section circuit(root, "circuit", {"layer_order"});
  circuit.get_as("layer_order", c.layer_order, ansatz::parse_layer_order);

  const Section train(root, "train",
                      {"beta", "n_layers", "n_batch", "n_spsa", "n_iter_max", "learning_rate", "adam_beta1",
                       "adam_beta2", "adam_epsilon", "spsa_c", "mode", "grad_theta", "psr_engine",
                       "fullspace_reeval", "target_epsilon", "smoothing_window"});
  auto& t = c.train;
  train.get("beta", t.beta);
  train.get("n_layers", t.n_layers);
  train.get("n_batch", t.n_batch);
  train.get("n_spsa", t.n_spsa);
  train.get("n_iter_max", t.n_iter_max);
  train.get("learning_rate", t.adam.learning_rate);
  train.get("adam_beta1", t.adam.beta1);
  train.get("adam_beta2", t.adam.beta2);
  train.get("adam_epsilon", t.adam.epsilon);
  train.get("spsa_c", t.spsa_c);
  train.get_as("mode", t.mode, vfe::parse_loss_mode);
  train.get_as("grad_theta", t.grad_theta, vfe::parse_theta_gradient);
  train.get_as("psr_engine", t.psr_engine, vfe::parse_psr_engine);
  train.get("fullspace_reeval", t.fullspace_reeval);
  train.get("target_epsilon", t.target_epsilon);
  train.get("smoothing_window", t.smoothing_window);

  const Section noise(root, "noise", {"shots_per_setting", "nnn_ratio"});
  long long shots = static_cast<long long>(t.shots_per_setting);
  noise.get("shots_per_setting", shots);
  if (shots < 0) throw ConfigError("noise.shots_per_setting", "must be non-negative");
  t.shots_per_setting = static_cast<std::size_t>(shots);
  noise.get("nnn_ratio", c.nnn_ratio);

  const Section output(root, "output", {"dir"});
  output.get("dir", c.output_dir);

  if (const auto seed = root["seed"]) {
    try {
      t.seed = seed.as<std::uint64_t>();
    } catch (const YAML::Exception&) {
      throw ConfigError("seed", "must be an unsigned 64-bit integer");
    }
  }

  const Section sweep(root, "sweep", {"betas", "n_samples", "n_repeats", "direct_samples"});
  sweep.get("betas", c.sweep.betas);
  sweep.get("n_samples", c.sweep.n_samples);
  sweep.get("n_repeats", c.sweep.n_repeats);
  sweep.get("direct_samples", c.sweep.direct_samples);

  const Section campaign(root, "campaign",
                         {"kind", "n_values", "layer_values", "stop_at_contour", "layers_per_n", "n_spsa_values",
                          "trials", "target_epsilon", "n_iter_max", "max_divergent_fraction"});
  auto& k = c.campaign;
  campaign.get_as("kind", k.kind, parse_campaign_kind);
  campaign.get("n_values", k.n_values);
  campaign.get("layer_values", k.layer_values);
  campaign.get("stop_at_contour", k.stop_at_contour);
  campaign.get("layers_per_n", k.layers_per_n);
  campaign.get("n_spsa_values", k.n_spsa_values);
  campaign.get("trials", k.trials);
  campaign.get("target_epsilon", k.target_epsilon);
  campaign.get("n_iter_max", k.n_iter_max);
  campaign.get("max_divergent_fraction", k.max_divergent_fraction);

  c.validate();
  return c;
}

ExperimentConfig load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str());
}

std::string serialize(const ExperimentConfig& c) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;

  out << YAML::Key << "model" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "n" << YAML::Value << c.model.n;
  out << YAML::Key << "delta" << YAML::Value << c.model.delta;
  out << YAML::Key << "h" << YAML::Value << c.model.h;
  out << YAML::EndMap;

  out << YAML::Key << "circuit" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "layer_order" << YAML::Value << ansatz::to_string(c.layer_order);
  out << YAML::EndMap;

  const auto& t = c.train;
  out << YAML::Key << "train" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "beta" << YAML::Value << t.beta;
  out << YAML::Key << "n_layers" << YAML::Value << t.n_layers;
  out << YAML::Key << "n_batch" << YAML::Value << t.n_batch;
  out << YAML::Key << "n_spsa" << YAML::Value << t.n_spsa;
  out << YAML::Key << "n_iter_max" << YAML::Value << t.n_iter_max;
  out << YAML::Key << "learning_rate" << YAML::Value << t.adam.learning_rate;
  out << YAML::Key << "adam_beta1" << YAML::Value << t.adam.beta1;
  out << YAML::Key << "adam_beta2" << YAML::Value << t.adam.beta2;
  out << YAML::Key << "adam_epsilon" << YAML::Value << t.adam.epsilon;
  out << YAML::Key << "spsa_c" << YAML::Value << t.spsa_c;
  out << YAML::Key << "mode" << YAML::Value << vfe::to_string(t.mode);
  out << YAML::Key << "grad_theta" << YAML::Value << vfe::to_string(t.grad_theta);
  out << YAML::Key << "psr_engine" << YAML::Value << vfe::to_string(t.psr_engine);
  out << YAML::Key << "fullspace_reeval" << YAML::Value << t.fullspace_reeval;
  out << YAML::Key << "target_epsilon" << YAML::Value << t.target_epsilon;
  out << YAML::Key << "smoothing_window" << YAML::Value << t.smoothing_window;
  out << YAML::EndMap;

  out << YAML::Key << "noise" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "shots_per_setting" << YAML::Value << static_cast<unsigned long long>(t.shots_per_setting);
  out << YAML::Key << "nnn_ratio" << YAML::Value << c.nnn_ratio;
  out << YAML::EndMap;

  out << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "dir" << YAML::Value << c.output_dir;
  out << YAML::EndMap;

  out << YAML::Key << "seed" << YAML::Value << static_cast<unsigned long long>(t.seed);

  out << YAML::Key << "sweep" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "betas" << YAML::Value << YAML::Flow << c.sweep.betas;
  out << YAML::Key << "n_samples" << YAML::Value << static_cast<unsigned long long>(c.sweep.n_samples);
  out << YAML::Key << "n_repeats" << YAML::Value << static_cast<unsigned long long>(c.sweep.n_repeats);
  out << YAML::Key << "direct_samples" << YAML::Value << static_cast<unsigned long long>(c.sweep.direct_samples);
  out << YAML::EndMap;

  const auto& k = c.campaign;
  out << YAML::Key << "campaign" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << to_string(k.kind);
  out << YAML::Key << "n_values" << YAML::Value << YAML::Flow << k.n_values;
  out << YAML::Key << "layer_values" << YAML::Value << YAML::Flow << k.layer_values;
  out << YAML::Key << "stop_at_contour" << YAML::Value << k.stop_at_contour;
  out << YAML::Key << "layers_per_n" << YAML::Value << YAML::Flow << k.layers_per_n;
  out << YAML::Key << "n_spsa_values" << YAML::Value << YAML::Flow << k.n_spsa_values;
  out << YAML::Key << "trials" << YAML::Value << k.trials;
  out << YAML::Key << "target_epsilon" << YAML::Value << k.target_epsilon;
  out << YAML::Key << "n_iter_max" << YAML::Value << k.n_iter_max;
  out << YAML::Key << "max_divergent_fraction" << YAML::Value << k.max_divergent_fraction;
  out << YAML::EndMap;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace tvqs::config
