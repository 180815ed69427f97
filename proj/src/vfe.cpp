#include "tvqs/vfe.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tvqs::vfe {

Problem::Problem(const spinchain::XXZSpec& model, const ansatz::EntanglerSpec& entangler, double beta)
    : model_(model),
      beta_(beta),
      terms_((model.validate(), spinchain::build_terms(model))),
      hamiltonian_(model.n, terms_),
      entangler_(entangler) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be positive and finite");
  if (entangler.n_qubits != model.n) throw std::invalid_argument("entangler and model qubit counts differ");
}

double EnergyEstimator::operator()(const StateVector& state, Rng& rng) const {
  if (shots_ == 0) return problem_->hamiltonian().expectation(state);
  return ansatz::energy_shots_state(state, problem_->terms(), shots_, rng);
}

namespace {

void check_shapes(const BernoulliProduct& model, const CircuitParams& params, const Problem& problem) {
  if (model.n_sites() != problem.n_qubits() || params.n_qubits() != problem.n_qubits()) {
    throw std::invalid_argument("model, circuit and Hamiltonian sizes differ");
  }
}

void check_batch(std::span<const WeightedInput> batch, const CircuitParams& params, const Problem& problem) {
  if (params.n_qubits() != problem.n_qubits()) throw std::invalid_argument("circuit and Hamiltonian sizes differ");
  const Bits limit = Bits{1} << problem.n_qubits();
  for (const auto& in : batch) {
    if (in.x >= limit) throw std::invalid_argument("batch bitstring out of range");
  }
}

}  // namespace

double reward(Bits x, const BernoulliProduct& model, const CircuitParams& params, const Problem& problem) {
  check_shapes(model, params, problem);
  const double e = ansatz::energy_exact(x, params, problem.entangler(), problem.hamiltonian());
  return model.log_prob(x) / problem.beta() + e;
}

std::vector<double> full_space_energies(const CircuitParams& params, const Problem& problem) {
  if (params.n_qubits() != problem.n_qubits()) throw std::invalid_argument("circuit and Hamiltonian sizes differ");
  const ansatz::Circuit circuit(params, problem.entangler());
  const std::size_t dim = std::size_t{1} << problem.n_qubits();
  std::vector<double> energies(dim);
  for (Bits x = 0; x < dim; ++x) energies[x] = problem.hamiltonian().expectation(circuit.prepare(x));
  return energies;
}

FullSpaceLoss evaluate_full_space(const BernoulliProduct& model, std::span<const double> energies, double beta) {
  const auto table = model.enumerate();
  if (energies.size() != table.size()) throw std::invalid_argument("energy table does not match the model size");
  FullSpaceLoss out;
  out.probs.resize(table.size());
  out.energies.assign(energies.begin(), energies.end());
  out.rewards.resize(table.size());
  for (std::size_t x = 0; x < table.size(); ++x) {
    out.probs[x] = table[x].second;
    out.rewards[x] = model.log_prob(x) / beta + energies[x];
    out.loss += out.probs[x] * out.rewards[x];
    out.energy += out.probs[x] * energies[x];
  }
  for (std::size_t x = 0; x < table.size(); ++x) {
    const double d = out.rewards[x] - out.loss;
    out.variance += out.probs[x] * d * d;
  }
  out.entropy = model.entropy();
  return out;
}

double loss_full_space(const BernoulliProduct& model, const CircuitParams& params, const Problem& problem) {
  check_shapes(model, params, problem);
  return evaluate_full_space(model, full_space_energies(params, problem), problem.beta()).loss;
}

SampleLoss loss_sample(const BernoulliProduct& model, const CircuitParams& params, const Problem& problem,
                       std::size_t n_batch, Rng& rng) {
  return loss_sample(model, params, problem, n_batch, rng, EnergyEstimator(problem));
}

SampleLoss loss_sample(const BernoulliProduct& model, const CircuitParams& params, const Problem& problem,
                       std::size_t n_batch, Rng& rng, const EnergyEstimator& estimator) {
  check_shapes(model, params, problem);
  if (n_batch == 0) throw std::invalid_argument("n_batch must be at least 1");
  const ansatz::Circuit circuit(params, problem.entangler());
  SampleLoss out;
  out.batch = model.sample(n_batch, rng);
  for (Bits x : out.batch) {
    const double e = estimator(circuit.prepare(x), rng);
    out.energies.push_back(e);
    out.rewards.push_back(model.log_prob(x) / problem.beta() + e);
  }
  for (double r : out.rewards) out.mean += r;
  out.mean /= static_cast<double>(n_batch);
  if (n_batch > 1) {
    for (double r : out.rewards) out.variance += (r - out.mean) * (r - out.mean);
    out.variance /= static_cast<double>(n_batch - 1);
  }
  return out;
}

std::vector<double> grad_phi_reinforce(const BernoulliProduct& model, std::span<const Bits> batch,
                                       std::span<const double> rewards) {
  if (batch.empty() || batch.size() != rewards.size()) {
    throw std::invalid_argument("REINFORCE needs one reward per sample");
  }
  double baseline = 0.0;
  for (double r : rewards) baseline += r;
  baseline /= static_cast<double>(rewards.size());

  std::vector<double> grad(static_cast<std::size_t>(model.n_sites()), 0.0);
  for (std::size_t k = 0; k < batch.size(); ++k) {
    const auto score = model.grad_log_prob(batch[k]);
    const double a = rewards[k] - baseline;
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += a * score[i];
  }
  for (double& g : grad) g /= static_cast<double>(batch.size());
  return grad;
}

std::vector<double> grad_phi_full_space(const BernoulliProduct& model, std::span<const double> energies,
                                        double beta) {
  const auto eval = evaluate_full_space(model, energies, beta);
  std::vector<double> grad(static_cast<std::size_t>(model.n_sites()), 0.0);
  for (Bits x = 0; x < eval.probs.size(); ++x) {
    const double a = eval.probs[x] * (eval.rewards[x] - eval.loss);
    if (a == 0.0) continue;
    const auto score = model.grad_log_prob(x);
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += a * score[i];
  }
  return grad;
}

std::vector<double> grad_theta_psr(std::span<const WeightedInput> batch, const CircuitParams& params,
                                   const Problem& problem) {
  Rng unused(0);
  return grad_theta_psr(batch, params, problem, EnergyEstimator(problem), unused);
}

std::vector<double> grad_theta_psr(std::span<const WeightedInput> batch, const CircuitParams& params,
                                   const Problem& problem, const EnergyEstimator& estimator, Rng& rng) {
  check_batch(batch, params, problem);
  const ansatz::Circuit circuit(params, problem.entangler());
  const int n = params.n_qubits();
  const int depth = params.depth();
  std::vector<double> grad(params.size(), 0.0);

  for (const auto& in : batch) {
    if (in.weight == 0.0) continue;
    // Prefix states: entering layer k.
    StateVector prefix = StateVector::basis(n, in.x);
    for (int k = 0; k < depth; ++k) {
      StateVector rotated = prefix;
      circuit.apply_before_rz(rotated);
      circuit.apply_rz_layer(k, rotated);
      for (int i = 0; i < n; ++i) {
        double e[2];
        for (int s = 0; s < 2; ++s) {
          StateVector shifted = rotated;
          qsim::apply_rz(shifted, i, s == 0 ? std::numbers::pi / 2 : -std::numbers::pi / 2);
          circuit.apply_after_rz(shifted);
          for (int l = k + 1; l < depth; ++l) circuit.apply_layer(l, shifted);
          e[s] = estimator(shifted, rng);
        }
        grad[static_cast<std::size_t>(k * n + i)] += in.weight * 0.5 * (e[0] - e[1]);
      }
      circuit.apply_layer(k, prefix);
    }
  }
  return grad;
}

std::vector<double> grad_theta_adjoint(std::span<const WeightedInput> batch, const CircuitParams& params,
                                       const Problem& problem) {
  check_batch(batch, params, problem);
  const ansatz::Circuit circuit(params, problem.entangler());
  const int n = params.n_qubits();
  const int depth = params.depth();
  const std::size_t dim = std::size_t{1} << n;
  std::vector<double> grad(params.size(), 0.0);

  StateVector lambda(n);
  for (const auto& in : batch) {
    if (in.weight == 0.0) continue;
    StateVector psi = circuit.prepare(in.x);
    problem.hamiltonian().apply(psi.amps(), lambda.amps());
    for (int k = depth - 1; k >= 0; --k) {
      circuit.apply_after_rz_adjoint(psi);
      circuit.apply_after_rz_adjoint(lambda);
      // dE/dtheta_{k,i} = Im <lambda| Z_i |psi> at the point just after Rz layer k.
      std::vector<double> acc(static_cast<std::size_t>(n), 0.0);
      double total = 0.0;
      for (std::size_t j = 0; j < dim; ++j) {
        const double w = std::imag(std::conj(lambda[j]) * psi[j]);
        if (w == 0.0) continue;
        total += w;
        for (int i = 0; i < n; ++i) {
          if ((j >> i) & 1) acc[static_cast<std::size_t>(i)] += w;
        }
      }
      for (int i = 0; i < n; ++i) {
        grad[static_cast<std::size_t>(k * n + i)] += in.weight * (total - 2.0 * acc[static_cast<std::size_t>(i)]);
      }
      circuit.apply_rz_layer_adjoint(k, psi);
      circuit.apply_rz_layer_adjoint(k, lambda);
      circuit.apply_before_rz_adjoint(psi);
      circuit.apply_before_rz_adjoint(lambda);
    }
  }
  return grad;
}

std::vector<double> spsa_gradient(const std::function<double(std::span<const double>)>& f,
                                  std::span<const double> theta, int n_spsa, double c, Rng& rng) {
  if (n_spsa < 1) throw std::invalid_argument("n_spsa must be at least 1");
  if (!(c > 0.0)) throw std::invalid_argument("SPSA step c must be positive");
  const std::size_t m = theta.size();
  std::vector<double> grad(m, 0.0), plus(m), minus(m), delta(m);
  for (int r = 0; r < n_spsa; ++r) {
    for (std::size_t k = 0; k < m; ++k) {
      delta[k] = rng.rademacher();
      plus[k] = theta[k] + c * delta[k];
      minus[k] = theta[k] - c * delta[k];
    }
    const double diff = (f(plus) - f(minus)) / (2.0 * c);
    for (std::size_t k = 0; k < m; ++k) grad[k] += diff * delta[k];
  }
  for (double& g : grad) g /= static_cast<double>(n_spsa);
  return grad;
}

std::vector<double> grad_theta_spsa(std::span<const WeightedInput> batch, const CircuitParams& params,
                                    const Problem& problem, int n_spsa, double c, Rng& rng,
                                    const EnergyEstimator& estimator) {
  check_batch(batch, params, problem);
  const auto objective = [&](std::span<const double> thetas) {
    const CircuitParams p(params.depth(), params.n_qubits(), std::vector<double>(thetas.begin(), thetas.end()));
    const ansatz::Circuit circuit(p, problem.entangler());
    double total = 0.0;
    for (const auto& in : batch) {
      if (in.weight == 0.0) continue;
      total += in.weight * estimator(circuit.prepare(in.x), rng);
    }
    return total;
  };
  return spsa_gradient(objective, params.values(), n_spsa, c, rng);
}

Adam::Adam(std::size_t n_params, AdamConfig config) : config_(config), m_(n_params, 0.0), v_(n_params, 0.0) {
  if (!(config.learning_rate > 0.0)) throw std::invalid_argument("Adam learning rate must be positive");
  if (!(config.beta1 >= 0.0 && config.beta1 < 1.0) || !(config.beta2 >= 0.0 && config.beta2 < 1.0)) {
    throw std::invalid_argument("Adam decay rates must lie in [0, 1)");
  }
  if (!(config.epsilon > 0.0)) throw std::invalid_argument("Adam epsilon must be positive");
}

void Adam::step(std::span<double> params, std::span<const double> grads) {
  if (params.size() != m_.size() || grads.size() != m_.size()) {
    throw std::invalid_argument("Adam parameter and gradient sizes must match");
  }
  ++t_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (std::size_t k = 0; k < m_.size(); ++k) {
    m_[k] = config_.beta1 * m_[k] + (1.0 - config_.beta1) * grads[k];
    v_[k] = config_.beta2 * v_[k] + (1.0 - config_.beta2) * grads[k] * grads[k];
    params[k] -= config_.learning_rate * (m_[k] / c1) / (std::sqrt(v_[k] / c2) + config_.epsilon);
  }
}

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace tvqs::vfe
