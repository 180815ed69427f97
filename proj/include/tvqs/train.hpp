#pragma once

// Hybrid training loop: Adam on the logits (REINFORCE) and on the circuit
// angles (shift rule or SPSA), with per-iteration traces.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tvqs/vfe.hpp"

namespace tvqs::vfe {

enum class LossMode { FullSpace, Sample };
enum class ThetaGradient { Psr, Spsa };
// Auto picks the adjoint engine for exact energies and the literal shift
// rule when energies come from shots. Both give the same exact gradient.
enum class PsrEngine { Auto, Shift, Adjoint };

std::string to_string(LossMode m);
std::string to_string(ThetaGradient g);
std::string to_string(PsrEngine e);
LossMode parse_loss_mode(const std::string& s);
ThetaGradient parse_theta_gradient(const std::string& s);
PsrEngine parse_psr_engine(const std::string& s);

struct TrainConfig {
  double beta = 0.5;
  int n_layers = 5;
  int n_batch = 2;
  int n_spsa = 10;
  int n_iter_max = 150;
  AdamConfig adam;
  double spsa_c = 0.1;
  LossMode mode = LossMode::FullSpace;
  ThetaGradient grad_theta = ThetaGradient::Psr;
  PsrEngine psr_engine = PsrEngine::Auto;
  std::size_t shots_per_setting = 0;  // 0 = exact energies
  std::uint64_t seed = 1;
  // Evaluate the exact full-space loss every iteration (needs N within the enumeration cap).
  bool fullspace_reeval = true;
  // Stop as soon as the relative free-energy error drops below this; 0 disables.
  double target_epsilon = 0.0;
  // Trailing window of the smoothed sample loss used for selection without re-evaluation.
  int smoothing_window = 20;

  void validate(int n_qubits) const;
  bool operator==(const TrainConfig&) const = default;
};

struct IterationRecord {
  int iter = 0;
  double loss_sample = 0.0;
  std::optional<double> loss_fullspace;
  double variance = 0.0;
  double grad_phi_norm = 0.0;
  double grad_theta_norm = 0.0;
  std::optional<double> epsilon;
};

struct RunRecord {
  TrainConfig config;
  std::vector<IterationRecord> trace;
  std::vector<double> wall_seconds;  // cumulative, one per iteration
  CircuitParams theta_best;
  std::vector<double> logits_best;
  int selected_iteration = 0;
  double selected_loss = 0.0;
  std::optional<double> f_exact;
  std::optional<double> epsilon;  // of the selected parameters
  std::optional<int> iterations_to_target;
  bool divergent = false;
};

double relative_error(double f, double f_exact);

RunRecord train(const TrainConfig& config, const Problem& problem, std::optional<double> f_exact);

// Builds the problem and, when N is within the oracle cap, the exact free energy.
RunRecord train(const TrainConfig& config, const spinchain::XXZSpec& model, const ansatz::EntanglerSpec& entangler);

}  // namespace tvqs::vfe
