#include "tvqs/probmodel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tvqs::probmodel {

namespace {

// ln sigmoid(s), stable for either sign.
double log_sigmoid(double s) { return s >= 0 ? -std::log1p(std::exp(-s)) : s - std::log1p(std::exp(s)); }

}  // namespace

BernoulliProduct::BernoulliProduct(int n_sites) {
  if (n_sites < 1) throw std::invalid_argument("model needs at least one site");
  logits_.assign(static_cast<std::size_t>(n_sites), 0.0);
}

BernoulliProduct::BernoulliProduct(std::vector<double> logits) : logits_(std::move(logits)) {
  if (logits_.empty()) throw std::invalid_argument("model needs at least one site");
}

double BernoulliProduct::clamped(int site) const {
  const double s = logits_[static_cast<std::size_t>(site)];
  if (std::isnan(s)) throw std::invalid_argument("model logit is NaN");
  return std::clamp(s, -kLogitClamp, kLogitClamp);
}

double BernoulliProduct::prob_one(int site) const { return 1.0 / (1.0 + std::exp(-clamped(site))); }

std::vector<double> BernoulliProduct::probs() const {
  std::vector<double> p(logits_.size());
  for (int i = 0; i < n_sites(); ++i) p[static_cast<std::size_t>(i)] = prob_one(i);
  return p;
}

std::vector<Bits> BernoulliProduct::sample(std::size_t n, Rng& rng) const {
  if (n == 0) throw std::invalid_argument("sample size must be at least 1");
  const auto p = probs();
  std::vector<Bits> out(n, 0);
  for (auto& x : out) {
    for (int i = 0; i < n_sites(); ++i) {
      if (rng.uniform() < p[static_cast<std::size_t>(i)]) x |= Bits{1} << i;
    }
  }
  return out;
}

double BernoulliProduct::log_prob(Bits x) const {
  double lp = 0.0;
  for (int i = 0; i < n_sites(); ++i) {
    const double s = clamped(i);
    lp += ((x >> i) & 1U) ? log_sigmoid(s) : log_sigmoid(-s);
  }
  return lp;
}

double BernoulliProduct::prob(Bits x) const { return std::exp(log_prob(x)); }

double BernoulliProduct::entropy() const {
  double h = 0.0;
  for (int i = 0; i < n_sites(); ++i) {
    const double s = clamped(i);
    const double p1 = 1.0 / (1.0 + std::exp(-s));
    const double p0 = 1.0 - p1;
    h -= p1 * log_sigmoid(s) + p0 * log_sigmoid(-s);
  }
  return h;
}

std::vector<double> BernoulliProduct::grad_log_prob(Bits x) const {
  std::vector<double> g(logits_.size());
  for (int i = 0; i < n_sites(); ++i) {
    g[static_cast<std::size_t>(i)] = static_cast<double>((x >> i) & 1U) - prob_one(i);
  }
  return g;
}

std::vector<std::pair<Bits, double>> BernoulliProduct::enumerate(int cap) const {
  if (n_sites() > cap) {
    throw CapacityError("cannot enumerate 2^" + std::to_string(n_sites()) + " states; cap is N <= " +
                        std::to_string(cap));
  }
  const auto p = probs();
  const std::size_t dim = std::size_t{1} << n_sites();
  std::vector<std::pair<Bits, double>> out(dim);
  // Same doubling construction as the phase tables: extend one site at a time.
  std::vector<double> pr(dim);
  pr[0] = 1.0;
  std::size_t len = 1;
  for (double q : p) {
    for (std::size_t j = 0; j < len; ++j) {
      pr[j + len] = pr[j] * q;
      pr[j] *= 1.0 - q;
    }
    len *= 2;
  }
  for (Bits x = 0; x < dim; ++x) out[x] = {x, pr[x]};
  return out;
}

}  // namespace tvqs::probmodel
