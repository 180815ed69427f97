#include "tvqs/spinchain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "tvqs/probmodel.hpp"

namespace tvqs::spinchain {

using qsim::Axis;
using qsim::Bits;
using qsim::PauliString;

void XXZSpec::validate() const {
  if (n < 1 || n > kOracleCap) {
    throw std::invalid_argument("model.n must be in [1, " + std::to_string(kOracleCap) + "]");
  }
  if (!std::isfinite(delta)) throw std::invalid_argument("model.delta must be finite");
  if (!std::isfinite(h)) throw std::invalid_argument("model.h must be finite");
}

std::vector<PauliString> build_terms(const XXZSpec& spec) {
  spec.validate();
  std::vector<PauliString> terms;
  for (int i = 0; i + 1 < spec.n; ++i) {
    terms.push_back({{{i, Axis::X}, {i + 1, Axis::X}}, 1.0});
    terms.push_back({{{i, Axis::Y}, {i + 1, Axis::Y}}, 1.0});
    if (spec.delta != 0.0) terms.push_back({{{i, Axis::Z}, {i + 1, Axis::Z}}, spec.delta});
  }
  if (spec.h != 0.0) {
    for (int i = 0; i < spec.n; ++i) terms.push_back({{{i, Axis::Z}}, spec.h});
  }
  return terms;
}

namespace {

qsim::PauliOperator make_operator(const XXZSpec& spec) {
  const auto terms = build_terms(spec);
  return qsim::PauliOperator(spec.n, terms);
}

}  // namespace

SpectralOracle::SpectralOracle(const XXZSpec& spec)
    : spec_(spec), op_(make_operator(spec)), blocks_(op_.invariant_blocks()) {
  std::vector<std::pair<std::size_t, Eigen::Index>> where(op_.dim());
  std::vector<Eigen::MatrixXd> hb(blocks_.size());
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const auto m = static_cast<Eigen::Index>(blocks_[b].size());
    hb[b] = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index r = 0; r < m; ++r) where[blocks_[b][static_cast<std::size_t>(r)]] = {b, r};
  }
  // Every matrix element of the XXZ chain is real.
  for (const auto& term : op_.terms()) {
    const Bits flip = term.flip_mask();
    for (Bits j = 0; j < op_.dim(); ++j) {
      const auto [b, c] = where[j];
      const auto [b_to, r] = where[j ^ flip];
      // Couplings that cancel between terms (XX + YY on |00>,|11>) leave the pair in separate blocks.
      if (b_to != b) continue;
      hb[b](r, c) += term.coeff * qsim::pauli_phase(term, j).real();
    }
  }

  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hb[b]);
    Eigen::MatrixXd v = es.eigenvectors();
    for (Eigen::Index k = 0; k < v.cols(); ++k) {
      for (Eigen::Index r = 0; r < v.rows(); ++r) {
        if (std::abs(v(r, k)) > 1e-12) {
          if (v(r, k) < 0) v.col(k) *= -1.0;
          break;
        }
      }
      levels_.push_back({b, k});
      eigenvalues_.push_back(es.eigenvalues()(k));
    }
    block_vectors_.push_back(std::move(v));
  }

  // Ascending energy; within a degenerate cluster, descending lexicographic
  // order of the sign-fixed dense eigenvectors.
  std::vector<std::size_t> order(levels_.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return eigenvalues_[a] < eigenvalues_[b]; });
  auto lex_greater = [&](std::size_t a, std::size_t b) {
    const Eigen::VectorXd va = dense_vector(levels_[a]);
    const Eigen::VectorXd vb = dense_vector(levels_[b]);
    for (Eigen::Index i = 0; i < va.size(); ++i) {
      if (std::abs(va(i) - vb(i)) > 1e-12) return va(i) > vb(i);
    }
    return false;
  };
  for (std::size_t lo = 0; lo < order.size();) {
    std::size_t hi = lo + 1;
    while (hi < order.size() && eigenvalues_[order[hi]] - eigenvalues_[order[hi - 1]] < 1e-9) ++hi;
    if (hi - lo > 1) std::stable_sort(order.begin() + lo, order.begin() + hi, lex_greater);
    lo = hi;
  }
  std::vector<Level> levels;
  std::vector<double> values;
  for (std::size_t i : order) {
    levels.push_back(levels_[i]);
    values.push_back(eigenvalues_[i]);
  }
  levels_ = std::move(levels);
  eigenvalues_ = std::move(values);
}

Eigen::VectorXd SpectralOracle::dense_vector(const Level& level) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(op_.dim()));
  const auto& idx = blocks_[level.block];
  const auto& vecs = block_vectors_[level.block];
  for (std::size_t r = 0; r < idx.size(); ++r) v(static_cast<Eigen::Index>(idx[r])) = vecs(static_cast<Eigen::Index>(r), level.column);
  return v;
}

Eigen::VectorXd SpectralOracle::eigenvector(std::size_t n) const { return dense_vector(levels_.at(n)); }

int SpectralOracle::excitation_number(std::size_t n) const {
  return qsim::hamming_weight(blocks_[levels_.at(n).block].front());
}

std::vector<double> SpectralOracle::gibbs_weights(double beta) const {
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  const double e0 = eigenvalues_.front();
  std::vector<double> w(eigenvalues_.size());
  double z = 0.0;
  for (std::size_t n = 0; n < w.size(); ++n) {
    w[n] = std::exp(-beta * (eigenvalues_[n] - e0));
    z += w[n];
  }
  for (double& x : w) x /= z;
  return w;
}

ThermalValues SpectralOracle::thermal(double beta) const {
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  const double e0 = eigenvalues_.front();
  double z_shifted = 0.0;
  for (double e : eigenvalues_) z_shifted += std::exp(-beta * (e - e0));
  ThermalValues t;
  t.beta = beta;
  t.free_energy = e0 - std::log(z_shifted) / beta;
  const auto w = gibbs_weights(beta);
  for (std::size_t n = 0; n < w.size(); ++n) t.energy += w[n] * eigenvalues_[n];
  t.entropy = beta * (t.energy - t.free_energy);
  return t;
}

Eigen::MatrixXcd SpectralOracle::gibbs_matrix(double beta) const {
  if (n_qubits() > kDenseMatrixCap) {
    throw probmodel::CapacityError("dense density matrices are limited to N <= " + std::to_string(kDenseMatrixCap));
  }
  const auto w = gibbs_weights(beta);
  const auto dim = static_cast<Eigen::Index>(op_.dim());
  Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(dim, dim);
  for (std::size_t n = 0; n < w.size(); ++n) {
    const Eigen::VectorXd v = eigenvector(n);
    rho.noalias() += w[n] * v * v.transpose();
  }
  return rho.cast<qsim::cplx>();
}

Eigen::VectorXcd SpectralOracle::project(std::span<const qsim::cplx> amps) const {
  if (amps.size() != op_.dim()) throw std::invalid_argument("state dimension does not match the oracle");
  Eigen::VectorXcd out(static_cast<Eigen::Index>(op_.dim()));
  for (std::size_t n = 0; n < levels_.size(); ++n) {
    const auto& idx = blocks_[levels_[n].block];
    const auto& vecs = block_vectors_[levels_[n].block];
    qsim::cplx acc = 0.0;
    for (std::size_t r = 0; r < idx.size(); ++r) acc += vecs(static_cast<Eigen::Index>(r), levels_[n].column) * amps[idx[r]];
    out(static_cast<Eigen::Index>(n)) = acc;
  }
  return out;
}

Eigen::MatrixXcd SpectralOracle::project(const Eigen::MatrixXcd& rho) const {
  if (rho.rows() != static_cast<Eigen::Index>(op_.dim()) || rho.cols() != rho.rows()) {
    throw std::invalid_argument("density matrix dimension does not match the oracle");
  }
  if (n_qubits() > kDenseMatrixCap) {
    throw probmodel::CapacityError("dense density matrices are limited to N <= " + std::to_string(kDenseMatrixCap));
  }
  const auto dim = static_cast<Eigen::Index>(op_.dim());
  Eigen::MatrixXd v(dim, dim);
  for (Eigen::Index n = 0; n < dim; ++n) v.col(n) = eigenvector(static_cast<std::size_t>(n));
  return v.transpose().cast<qsim::cplx>() * rho * v.cast<qsim::cplx>();
}

double SpectralOracle::max_residual() const {
  double worst = 0.0;
  std::vector<qsim::cplx> in(op_.dim()), out(op_.dim());
  for (std::size_t n = 0; n < levels_.size(); ++n) {
    const Eigen::VectorXd v = eigenvector(n);
    for (std::size_t j = 0; j < op_.dim(); ++j) in[j] = v(static_cast<Eigen::Index>(j));
    op_.apply(in, out);
    double r2 = 0.0;
    for (std::size_t j = 0; j < op_.dim(); ++j) r2 += std::norm(out[j] - eigenvalues_[n] * in[j]);
    worst = std::max(worst, std::sqrt(r2));
  }
  return worst;
}

ExactGibbs exact_gibbs(const XXZSpec& spec, double beta) {
  const SpectralOracle oracle(spec);
  return {oracle.thermal(beta), oracle.gibbs_matrix(beta)};
}

Eigen::MatrixXcd eigen_basis_projection(const Eigen::MatrixXcd& rho, const SpectralOracle& oracle) {
  return oracle.project(rho);
}

Eigen::VectorXcd eigen_basis_projection(const qsim::StateVector& state, const SpectralOracle& oracle) {
  return oracle.project(state.amps());
}

}  // namespace tvqs::spinchain
