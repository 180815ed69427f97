#pragma once

// Product-of-Bernoulli distribution over bitstrings with sigmoid-parameterized
// site probabilities phi_i = 1 / (1 + exp(-s_i)).

#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tvqs/qsim.hpp"
#include "tvqs/rng.hpp"

namespace tvqs::probmodel {

using qsim::Bits;

// Logits are clamped to this magnitude before exponentiation.
inline constexpr double kLogitClamp = 30.0;
inline constexpr int kDefaultEnumerationCap = 14;

class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BernoulliProduct {
 public:
  // Uniform distribution (all logits zero).
  explicit BernoulliProduct(int n_sites);
  explicit BernoulliProduct(std::vector<double> logits);

  int n_sites() const { return static_cast<int>(logits_.size()); }
  std::span<const double> logits() const { return logits_; }
  std::span<double> logits() { return logits_; }

  // phi_i, probability that site i is 1.
  double prob_one(int site) const;
  std::vector<double> probs() const;

  std::vector<Bits> sample(std::size_t n, Rng& rng) const;
  double log_prob(Bits x) const;
  double prob(Bits x) const;
  // Analytic entropy in nats.
  double entropy() const;
  // d ln p(x) / d s_i = x_i - phi_i
  std::vector<double> grad_log_prob(Bits x) const;
  // All (x, p(x)) pairs ordered by x.
  std::vector<std::pair<Bits, double>> enumerate(int cap = kDefaultEnumerationCap) const;

 private:
  double clamped(int site) const;

  std::vector<double> logits_;
};

}  // namespace tvqs::probmodel
