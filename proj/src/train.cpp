#include "tvqs/train.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace tvqs::vfe {

std::string to_string(LossMode m) { return m == LossMode::FullSpace ? "full_space" : "sample"; }
std::string to_string(ThetaGradient g) { return g == ThetaGradient::Psr ? "psr" : "spsa"; }
std::string to_string(PsrEngine e) {
  switch (e) {
    case PsrEngine::Auto:
      return "auto";
    case PsrEngine::Shift:
      return "shift";
    case PsrEngine::Adjoint:
      return "adjoint";
  }
  return "auto";
}

LossMode parse_loss_mode(const std::string& s) {
  if (s == "full_space") return LossMode::FullSpace;
  if (s == "sample") return LossMode::Sample;
  throw std::invalid_argument("mode must be full_space or sample, got '" + s + "'");
}

ThetaGradient parse_theta_gradient(const std::string& s) {
  if (s == "psr") return ThetaGradient::Psr;
  if (s == "spsa") return ThetaGradient::Spsa;
  throw std::invalid_argument("grad_theta must be psr or spsa, got '" + s + "'");
}

PsrEngine parse_psr_engine(const std::string& s) {
  if (s == "auto") return PsrEngine::Auto;
  if (s == "shift") return PsrEngine::Shift;
  if (s == "adjoint") return PsrEngine::Adjoint;
  throw std::invalid_argument("psr_engine must be auto, shift or adjoint, got '" + s + "'");
}

void TrainConfig::validate(int n_qubits) const {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("train.beta must be positive and finite");
  if (n_layers < 0) throw std::invalid_argument("train.n_layers must be non-negative");
  if (mode == LossMode::Sample && n_batch < 1) throw std::invalid_argument("train.n_batch must be at least 1");
  if (grad_theta == ThetaGradient::Spsa && n_spsa < 1) throw std::invalid_argument("train.n_spsa must be at least 1");
  if (n_iter_max < 1) throw std::invalid_argument("train.n_iter_max must be at least 1");
  if (!(adam.learning_rate > 0.0)) throw std::invalid_argument("train.learning_rate must be positive");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0)) throw std::invalid_argument("train.adam_beta1 must lie in [0, 1)");
  if (!(adam.beta2 >= 0.0 && adam.beta2 < 1.0)) throw std::invalid_argument("train.adam_beta2 must lie in [0, 1)");
  if (!(adam.epsilon > 0.0)) throw std::invalid_argument("train.adam_epsilon must be positive");
  if (!(spsa_c > 0.0) || !std::isfinite(spsa_c)) throw std::invalid_argument("train.spsa_c must be positive");
  if (psr_engine == PsrEngine::Adjoint && shots_per_setting > 0) {
    throw std::invalid_argument("train.psr_engine adjoint needs exact energies (noise.shots_per_setting = 0)");
  }
  if (!(target_epsilon >= 0.0)) throw std::invalid_argument("train.target_epsilon must be non-negative");
  if (target_epsilon > 0.0 && !fullspace_reeval) {
    throw std::invalid_argument("train.target_epsilon needs train.fullspace_reeval");
  }
  if (smoothing_window < 1) throw std::invalid_argument("train.smoothing_window must be at least 1");
  if ((mode == LossMode::FullSpace || fullspace_reeval) && n_qubits > probmodel::kDefaultEnumerationCap) {
    throw probmodel::CapacityError("full-space evaluation needs model.n <= " +
                                   std::to_string(probmodel::kDefaultEnumerationCap));
  }
}

double relative_error(double f, double f_exact) { return std::abs((f - f_exact) / f_exact); }

namespace {

std::vector<double> theta_gradient(const TrainConfig& config, std::span<const WeightedInput> inputs,
                                   const CircuitParams& theta, const Problem& problem,
                                   const EnergyEstimator& estimator, Rng& grad_rng) {
  if (config.grad_theta == ThetaGradient::Spsa) {
    return grad_theta_spsa(inputs, theta, problem, config.n_spsa, config.spsa_c, grad_rng, estimator);
  }
  const bool adjoint = config.psr_engine == PsrEngine::Adjoint ||
                       (config.psr_engine == PsrEngine::Auto && estimator.exact());
  if (adjoint) return grad_theta_adjoint(inputs, theta, problem);
  return grad_theta_psr(inputs, theta, problem, estimator, grad_rng);
}

}  // namespace

RunRecord train(const TrainConfig& config, const Problem& problem, std::optional<double> f_exact) {
  const int n = problem.n_qubits();
  config.validate(n);
  if (config.beta != problem.beta()) throw std::invalid_argument("train.beta differs from the problem's beta");
  if (config.target_epsilon > 0.0 && !f_exact) {
    throw std::invalid_argument("train.target_epsilon needs the exact free energy");
  }
  const auto start = std::chrono::steady_clock::now();

  Rng init_rng = Rng::derive(config.seed, 0);
  Rng sample_rng = Rng::derive(config.seed, 1);
  Rng grad_rng = Rng::derive(config.seed, 2);
  Rng shot_rng = Rng::derive(config.seed, 3);

  CircuitParams theta = CircuitParams::random(config.n_layers, n, init_rng);
  BernoulliProduct model(n);
  Adam adam_phi(static_cast<std::size_t>(n), config.adam);
  Adam adam_theta(theta.size(), config.adam);
  const EnergyEstimator estimator(problem, config.shots_per_setting);

  RunRecord run;
  run.config = config;
  run.f_exact = f_exact;
  double best = std::numeric_limits<double>::infinity();
  std::deque<double> window;
  double window_sum = 0.0;

  for (int t = 0; t < config.n_iter_max; ++t) {
    IterationRecord rec;
    rec.iter = t;
    std::vector<double> grad_phi;
    std::vector<WeightedInput> inputs;

    if (config.mode == LossMode::FullSpace) {
      std::vector<double> energies;
      if (estimator.exact()) {
        energies = full_space_energies(theta, problem);
      } else {
        const ansatz::Circuit circuit(theta, problem.entangler());
        const std::size_t dim = std::size_t{1} << n;
        energies.resize(dim);
        for (Bits x = 0; x < dim; ++x) energies[x] = estimator(circuit.prepare(x), shot_rng);
      }
      const auto eval = evaluate_full_space(model, energies, problem.beta());
      rec.loss_sample = eval.loss;
      rec.variance = eval.variance;
      grad_phi.assign(static_cast<std::size_t>(n), 0.0);
      for (Bits x = 0; x < eval.probs.size(); ++x) {
        if (eval.probs[x] == 0.0) continue;
        inputs.push_back({x, eval.probs[x]});
        const double a = eval.probs[x] * (eval.rewards[x] - eval.loss);
        const auto score = model.grad_log_prob(x);
        for (std::size_t i = 0; i < grad_phi.size(); ++i) grad_phi[i] += a * score[i];
      }
      if (estimator.exact()) {
        rec.loss_fullspace = eval.loss;
      } else if (config.fullspace_reeval) {
        rec.loss_fullspace = loss_full_space(model, theta, problem);
      }
    } else {
      const auto s = loss_sample(model, theta, problem, static_cast<std::size_t>(config.n_batch), sample_rng,
                                 estimator);
      rec.loss_sample = s.mean;
      rec.variance = s.variance;
      grad_phi = grad_phi_reinforce(model, s.batch, s.rewards);
      const double w = 1.0 / static_cast<double>(s.batch.size());
      for (Bits x : s.batch) inputs.push_back({x, w});
      if (config.fullspace_reeval) rec.loss_fullspace = loss_full_space(model, theta, problem);
    }

    const auto grad_theta = theta_gradient(config, inputs, theta, problem, estimator, grad_rng);
    rec.grad_phi_norm = l2_norm(grad_phi);
    rec.grad_theta_norm = l2_norm(grad_theta);
    if (rec.loss_fullspace && f_exact) rec.epsilon = relative_error(*rec.loss_fullspace, *f_exact);

    double score = 0.0;
    if (config.fullspace_reeval) {
      score = *rec.loss_fullspace;
    } else {
      window.push_back(rec.loss_sample);
      window_sum += rec.loss_sample;
      if (static_cast<int>(window.size()) > config.smoothing_window) {
        window_sum -= window.front();
        window.pop_front();
      }
      score = window_sum / static_cast<double>(window.size());
    }
    if (score < best) {
      best = score;
      run.selected_iteration = t;
      run.selected_loss = score;
      run.theta_best = theta;
      run.logits_best.assign(model.logits().begin(), model.logits().end());
      run.epsilon = rec.epsilon;
    }

    run.trace.push_back(rec);
    run.wall_seconds.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());

    if (config.target_epsilon > 0.0 && rec.epsilon && *rec.epsilon < config.target_epsilon) {
      run.iterations_to_target = t + 1;
      break;
    }

    adam_phi.step(model.logits(), grad_phi);
    adam_theta.step(theta.values(), grad_theta);
  }

  run.divergent = config.target_epsilon > 0.0 && !run.iterations_to_target;
  return run;
}

RunRecord train(const TrainConfig& config, const spinchain::XXZSpec& model, const ansatz::EntanglerSpec& entangler) {
  const Problem problem(model, entangler, config.beta);
  std::optional<double> f_exact;
  if (model.n <= spinchain::kOracleCap) f_exact = spinchain::SpectralOracle(model).thermal(config.beta).free_energy;
  return train(config, problem, f_exact);
}

}  // namespace tvqs::vfe
