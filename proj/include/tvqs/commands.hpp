#pragma once

// Command implementations behind the tvqs executable. Each command writes its
// artifacts under the configured output directory.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tvqs/config.hpp"
#include "tvqs/observables.hpp"
#include "tvqs/train.hpp"

namespace tvqs::commands {

inline constexpr const char* kCsvHeader = "# thermal-vqs v1";
// Density-matrix and fidelity artifacts are written up to this size.
inline constexpr int kArtifactCap = 10;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> mode;
  std::optional<std::string> grad;
  std::optional<long long> shots;
};

// Loads, applies overrides, validates. Throws config::ConfigError.
config::ExperimentConfig resolve(const std::string& config_path, const Overrides& overrides);
void apply_overrides(config::ExperimentConfig& config, const Overrides& overrides);

// Stream index i of a master seed, for per-beta and per-trial runs.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

std::string format_double(double x);
std::string trace_csv(const vfe::RunRecord& run);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double max_abs_residual = 0.0;
  std::size_t n_points = 0;
};

// Least squares y = intercept + slope x. Needs two distinct x values.
LineFit fit_line(std::span<const double> x, std::span<const double> y);
// Least squares ln y = intercept + slope ln x.
LineFit fit_power_law(std::span<const double> x, std::span<const double> y);

struct ScalingRow {
  int n = 0;
  int n_layers = 0;
  int n_batch = 0;
  int n_spsa = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  int n_iter = 0;        // iterations executed
  double epsilon = 0.0;  // of the selected parameters
  bool converged = false;
  double cost = 0.0;
};

struct ScalingPoint {
  int n = 0;
  int n_layers = 0;
  int n_spsa = 0;
  int n_trials = 0;
  int n_converged = 0;
  double mean_epsilon = 0.0;
  double mean_cost = 0.0;  // over converged trials
  bool qualifies = false;
};

struct ScalingResult {
  config::CampaignKind kind = config::CampaignKind::Psr;
  std::vector<ScalingRow> rows;
  std::vector<ScalingPoint> points;
  // Per N: the minimum qualifying depth (layers) or mean cost (psr, spsa).
  std::vector<int> fit_n;
  std::vector<double> fit_value;
  std::optional<LineFit> power_law;
  std::optional<LineFit> linear;  // layers kind only
};

ScalingResult run_scaling(const config::ExperimentConfig& config);

struct SweepRun {
  double beta = 0.0;
  std::uint64_t seed = 0;
  vfe::RunRecord run;
  spinchain::ThermalValues exact;
  std::vector<observables::ThermalEstimates> estimates;  // full_space, sample, thermal_relation[, direct sample]
};

std::vector<SweepRun> run_thermal_sweep(const config::ExperimentConfig& config);

int cmd_train(const config::ExperimentConfig& config);
int cmd_thermal_sweep(const config::ExperimentConfig& config);
int cmd_scaling(const config::ExperimentConfig& config);
int cmd_exact(const config::ExperimentConfig& config, std::ostream& out);

}  // namespace tvqs::commands
