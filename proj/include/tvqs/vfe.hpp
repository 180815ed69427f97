#pragma once

// Variational free energy of the mixed ensemble
//   rho = sum_x p(x) U|x><x|U^dagger,
//   L = E_{x~p}[ R(x) ],  R(x) = ln p(x) / beta + <psi(x)|H|psi(x)>,
// its estimators, and gradient estimators for both parameter sets.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "tvqs/ansatz.hpp"
#include "tvqs/probmodel.hpp"
#include "tvqs/qsim.hpp"
#include "tvqs/rng.hpp"
#include "tvqs/spinchain.hpp"

namespace tvqs::vfe {

using ansatz::CircuitParams;
using probmodel::BernoulliProduct;
using qsim::Bits;
using qsim::StateVector;

// Target Hamiltonian, circuit entangler and inverse temperature.
class Problem {
 public:
  Problem(const spinchain::XXZSpec& model, const ansatz::EntanglerSpec& entangler, double beta);

  int n_qubits() const { return model_.n; }
  double beta() const { return beta_; }
  const spinchain::XXZSpec& model() const { return model_; }
  std::span<const qsim::PauliString> terms() const { return terms_; }
  const qsim::PauliOperator& hamiltonian() const { return hamiltonian_; }
  const ansatz::Entangler& entangler() const { return entangler_; }

 private:
  spinchain::XXZSpec model_;
  double beta_;
  std::vector<qsim::PauliString> terms_;
  qsim::PauliOperator hamiltonian_;
  ansatz::Entangler entangler_;
};

// <H> of a prepared state, either exact or from finite shots per setting.
class EnergyEstimator {
 public:
  explicit EnergyEstimator(const Problem& problem, std::size_t shots_per_setting = 0)
      : problem_(&problem), shots_(shots_per_setting) {}

  bool exact() const { return shots_ == 0; }
  std::size_t shots_per_setting() const { return shots_; }
  double operator()(const StateVector& state, Rng& rng) const;

 private:
  const Problem* problem_;
  std::size_t shots_;
};

// One input state of a gradient batch; weights are 1/n for sampled batches
// and p(x) for full-space sums.
struct WeightedInput {
  Bits x;
  double weight;
};

double reward(Bits x, const BernoulliProduct& model, const CircuitParams& params, const Problem& problem);

// Exact energies E(x) for every basis state x.
std::vector<double> full_space_energies(const CircuitParams& params, const Problem& problem);

struct FullSpaceLoss {
  double loss = 0.0;      // sum_x p(x) R(x)
  double variance = 0.0;  // sum_x p(x) (R(x) - loss)^2
  double energy = 0.0;    // sum_x p(x) E(x)
  double entropy = 0.0;   // analytic
  std::vector<double> probs;
  std::vector<double> energies;
  std::vector<double> rewards;
};

FullSpaceLoss evaluate_full_space(const BernoulliProduct& model, std::span<const double> energies, double beta);
double loss_full_space(const BernoulliProduct& model, const CircuitParams& params, const Problem& problem);

struct SampleLoss {
  double mean = 0.0;
  double variance = 0.0;  // unbiased sample variance of the rewards; 0 for a single sample
  std::vector<Bits> batch;
  std::vector<double> energies;
  std::vector<double> rewards;
};

SampleLoss loss_sample(const BernoulliProduct& model, const CircuitParams& params, const Problem& problem,
                       std::size_t n_batch, Rng& rng);
SampleLoss loss_sample(const BernoulliProduct& model, const CircuitParams& params, const Problem& problem,
                       std::size_t n_batch, Rng& rng, const EnergyEstimator& estimator);

// Score-function estimate with the batch-mean baseline:
//   (1/n) sum_k (R_k - mean R) * grad ln p(x_k)
std::vector<double> grad_phi_reinforce(const BernoulliProduct& model, std::span<const Bits> batch,
                                       std::span<const double> rewards);

// Probability-weighted version over all x; the exact logit gradient of the
// full-space loss.
std::vector<double> grad_phi_full_space(const BernoulliProduct& model, std::span<const double> energies,
                                        double beta);

// Circuit gradients, laid out like CircuitParams (d x N, row-major), of
// sum_k w_k E_theta(x_k).

// Two-point shift rule with shifts of +-pi/2 for every angle.
std::vector<double> grad_theta_psr(std::span<const WeightedInput> batch, const CircuitParams& params,
                                   const Problem& problem, const EnergyEstimator& estimator, Rng& rng);
std::vector<double> grad_theta_psr(std::span<const WeightedInput> batch, const CircuitParams& params,
                                   const Problem& problem);

// Reverse-mode evaluation of the same exact gradient in O(depth) passes.
// Exact energies only.
std::vector<double> grad_theta_adjoint(std::span<const WeightedInput> batch, const CircuitParams& params,
                                       const Problem& problem);

// Mean over n_spsa Rademacher draws delta of
//   [f(theta + c delta) - f(theta - c delta)] / (2c) * delta.
std::vector<double> spsa_gradient(const std::function<double(std::span<const double>)>& f,
                                  std::span<const double> theta, int n_spsa, double c, Rng& rng);

std::vector<double> grad_theta_spsa(std::span<const WeightedInput> batch, const CircuitParams& params,
                                    const Problem& problem, int n_spsa, double c, Rng& rng,
                                    const EnergyEstimator& estimator);

struct AdamConfig {
  double learning_rate = 0.05;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  bool operator==(const AdamConfig&) const = default;
};

class Adam {
 public:
  Adam(std::size_t n_params, AdamConfig config);

  void step(std::span<double> params, std::span<const double> grads);
  long steps() const { return t_; }

 private:
  AdamConfig config_;
  std::vector<double> m_;
  std::vector<double> v_;
  long t_ = 0;
};

double l2_norm(std::span<const double> v);

}  // namespace tvqs::vfe
