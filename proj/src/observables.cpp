#include "tvqs/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tvqs::observables {

namespace {

constexpr double kDensityTol = 1e-8;

void check_dense_cap(int n) {
  if (n > spinchain::kDenseMatrixCap) {
    throw probmodel::CapacityError("dense density matrices are limited to N <= " +
                                   std::to_string(spinchain::kDenseMatrixCap));
  }
}

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> hermitian_eig(const Eigen::MatrixXcd& m) {
  const Eigen::MatrixXcd sym = 0.5 * (m + m.adjoint());
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(sym);
}

Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd& m) {
  const auto es = hermitian_eig(m);
  const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().adjoint();
}

struct MeanStd {
  double mean = 0.0;
  double std_error = 0.0;
};

MeanStd summarize(const std::vector<double>& xs) {
  MeanStd out;
  out.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    const double sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    out.std_error = sd / std::sqrt(static_cast<double>(xs.size()));
  }
  return out;
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::FullSpace:
      return "full_space";
    case Method::Sample:
      return "sample";
    case Method::ThermalRelation:
      return "thermal_relation";
  }
  return "full_space";
}

Method parse_method(const std::string& s) {
  if (s == "full_space") return Method::FullSpace;
  if (s == "sample") return Method::Sample;
  if (s == "thermal_relation") return Method::ThermalRelation;
  throw std::invalid_argument("method must be full_space, sample or thermal_relation, got '" + s + "'");
}

Eigen::MatrixXcd assemble_gibbs(const BernoulliProduct& model, const CircuitParams& params,
                                const ansatz::Entangler& entangler) {
  const int n = model.n_sites();
  if (params.n_qubits() != n || entangler.n_qubits() != n) throw std::invalid_argument("model and circuit sizes differ");
  check_dense_cap(n);
  const ansatz::Circuit circuit(params, entangler);
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& [x, p] : model.enumerate()) {
    if (p == 0.0) continue;
    const auto psi = circuit.prepare(x);
    const Eigen::Map<const Eigen::VectorXcd> v(psi.amps().data(), dim);
    rho.noalias() += p * v * v.adjoint();
  }
  return rho;
}

double density_matrix_defect(const Eigen::MatrixXcd& rho) {
  if (rho.rows() != rho.cols() || rho.rows() == 0) return std::numeric_limits<double>::infinity();
  const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  const double trace = std::abs(rho.trace() - 1.0);
  const double neg = std::max(0.0, -hermitian_eig(rho).eigenvalues().minCoeff());
  return std::max({herm, trace, neg});
}

double fidelity(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
    throw std::invalid_argument("fidelity needs matrices of equal dimension");
  }
  if (density_matrix_defect(rho) > kDensityTol) throw std::invalid_argument("fidelity: first argument is not a density matrix");
  if (density_matrix_defect(sigma) > kDensityTol) {
    throw std::invalid_argument("fidelity: second argument is not a density matrix");
  }
  const Eigen::MatrixXcd s = psd_sqrt(rho);
  const Eigen::MatrixXcd m = s * sigma * s;
  const double root_sum = hermitian_eig(m).eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return std::clamp(root_sum * root_sum, 0.0, 1.0);
}

EigenIdentification identify_eigenstates(const BernoulliProduct& model, const CircuitParams& params,
                                         const ansatz::Entangler& entangler,
                                         const spinchain::SpectralOracle& oracle, double beta) {
  const int n = model.n_sites();
  if (params.n_qubits() != n || oracle.n_qubits() != n) throw std::invalid_argument("model and oracle sizes differ");
  check_dense_cap(n);
  const auto table = model.enumerate();
  EigenIdentification out;
  out.ranked.resize(table.size());
  std::iota(out.ranked.begin(), out.ranked.end(), Bits{0});
  std::stable_sort(out.ranked.begin(), out.ranked.end(),
                   [&](Bits a, Bits b) { return table[a].second > table[b].second; });

  const ansatz::Circuit circuit(params, entangler);
  const auto& h = oracle.hamiltonian();
  const auto dim = static_cast<Eigen::Index>(table.size());
  out.fidelity_matrix.resize(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    const Bits x = out.ranked[static_cast<std::size_t>(r)];
    const auto psi = circuit.prepare(x);
    out.probs.push_back(table[x].second);
    out.energies.push_back(h.expectation(psi));
    out.fidelity_matrix.row(r) = oracle.project(psi.amps()).cwiseAbs2().transpose();
  }
  out.gibbs_weights = oracle.gibbs_weights(beta);
  out.eigenvalues.assign(oracle.eigenvalues().begin(), oracle.eigenvalues().end());
  return out;
}

FidelityReport fidelity_report(const BernoulliProduct& model, const CircuitParams& params,
                               const vfe::Problem& problem, const spinchain::SpectralOracle& oracle) {
  FidelityReport out;
  const auto rho = assemble_gibbs(model, params, problem.entangler());
  out.gibbs_fidelity = fidelity(rho, oracle.gibbs_matrix(problem.beta()));
  out.eigen_fidelity_matrix =
      identify_eigenstates(model, params, problem.entangler(), oracle, problem.beta()).fidelity_matrix;
  return out;
}

ThermalEstimates estimate_thermals(const BernoulliProduct& model, const CircuitParams& params,
                                   const vfe::Problem& problem, Method method, std::size_t n_samples,
                                   std::size_t n_repeats, Rng& rng) {
  const double beta = problem.beta();
  const double s = model.entropy();
  ThermalEstimates out;
  out.entropy = {method, s, 0.0, n_samples, n_repeats};

  if (method == Method::FullSpace) {
    const auto eval = vfe::evaluate_full_space(model, vfe::full_space_energies(params, problem), beta);
    const std::size_t dim = eval.probs.size();
    out.free_energy = {method, eval.loss, 0.0, dim, 1};
    out.energy = {method, eval.energy, 0.0, dim, 1};
    out.entropy = {method, s, 0.0, dim, 1};
    return out;
  }

  if (n_samples == 0 || n_repeats == 0) throw std::invalid_argument("sampled estimates need n_samples, n_repeats >= 1");
  std::vector<double> f_rep, e_rep;
  for (std::size_t r = 0; r < n_repeats; ++r) {
    const auto batch = vfe::loss_sample(model, params, problem, n_samples, rng);
    f_rep.push_back(batch.mean);
    if (method == Method::Sample) {
      e_rep.push_back(std::accumulate(batch.energies.begin(), batch.energies.end(), 0.0) /
                      static_cast<double>(n_samples));
    } else {
      e_rep.push_back(batch.mean + s / beta);
    }
  }
  const auto f = summarize(f_rep);
  const auto e = summarize(e_rep);
  out.free_energy = {method, f.mean, f.std_error, n_samples, n_repeats};
  out.energy = {method, e.mean, e.std_error, n_samples, n_repeats};
  return out;
}

}  // namespace tvqs::observables
