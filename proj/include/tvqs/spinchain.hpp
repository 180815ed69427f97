#pragma once

// Open-boundary XXZ chain in a longitudinal field,
//   H = sum_i (X_i X_{i+1} + Y_i Y_{i+1} + delta Z_i Z_{i+1}) + h sum_i Z_i,
// and its exact-diagonalization oracle.

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tvqs/qsim.hpp"

namespace tvqs::spinchain {

inline constexpr int kOracleCap = 14;
// Dense 2^N x 2^N matrices are only materialized up to this size.
inline constexpr int kDenseMatrixCap = 12;

struct XXZSpec {
  int n = 5;
  double delta = 0.0;
  double h = 0.5;

  // n = 1 is accepted and reduces to the single-spin field h Z.
  void validate() const;
  bool operator==(const XXZSpec&) const = default;
};

std::vector<qsim::PauliString> build_terms(const XXZSpec& spec);

struct ThermalValues {
  double beta = 0.0;
  double free_energy = 0.0;
  double energy = 0.0;
  double entropy = 0.0;
};

class SpectralOracle {
 public:
  explicit SpectralOracle(const XXZSpec& spec);

  const XXZSpec& spec() const { return spec_; }
  int n_qubits() const { return spec_.n; }
  std::size_t dim() const { return eigenvalues_.size(); }

  // Ascending.
  std::span<const double> eigenvalues() const { return eigenvalues_; }
  // Normalized, real, first nonzero component positive.
  Eigen::VectorXd eigenvector(std::size_t n) const;
  // Number of excitations (ones) shared by the support of eigenvector n.
  int excitation_number(std::size_t n) const;

  // P_Gibbs(n) = exp(-beta E_n) / Z
  std::vector<double> gibbs_weights(double beta) const;
  ThermalValues thermal(double beta) const;
  // exp(-beta H) / Z in the computational basis.
  Eigen::MatrixXcd gibbs_matrix(double beta) const;

  // <n|psi> for every eigenindex n.
  Eigen::VectorXcd project(std::span<const qsim::cplx> amps) const;
  // V^dagger rho V
  Eigen::MatrixXcd project(const Eigen::MatrixXcd& rho) const;

  // Largest ||H v - E v|| over the spectrum.
  double max_residual() const;

  const qsim::PauliOperator& hamiltonian() const { return op_; }

 private:
  struct Level {
    std::size_t block;
    Eigen::Index column;
  };

  Eigen::VectorXd dense_vector(const Level& level) const;

  XXZSpec spec_;
  qsim::PauliOperator op_;
  std::vector<std::vector<qsim::Bits>> blocks_;
  std::vector<Eigen::MatrixXd> block_vectors_;
  std::vector<Level> levels_;
  std::vector<double> eigenvalues_;
};

struct ExactGibbs {
  ThermalValues values;
  Eigen::MatrixXcd rho;
};

ExactGibbs exact_gibbs(const XXZSpec& spec, double beta);

// Same as the oracle members; kept as free functions for symmetry with the
// other modules.
Eigen::MatrixXcd eigen_basis_projection(const Eigen::MatrixXcd& rho, const SpectralOracle& oracle);
Eigen::VectorXcd eigen_basis_projection(const qsim::StateVector& state, const SpectralOracle& oracle);

}  // namespace tvqs::spinchain
