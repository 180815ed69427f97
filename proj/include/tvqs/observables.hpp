#pragma once

// Post-training estimates of F, E, S, the trained mixed state and its
// comparison with the exact Gibbs state.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tvqs/spinchain.hpp"
#include "tvqs/vfe.hpp"

namespace tvqs::observables {

using ansatz::CircuitParams;
using probmodel::BernoulliProduct;
using qsim::Bits;

enum class Method { FullSpace, Sample, ThermalRelation };

std::string to_string(Method m);
Method parse_method(const std::string& s);

struct ThermalEstimate {
  Method method = Method::FullSpace;
  double value = 0.0;
  double std_error = 0.0;  // std of the repeat estimates / sqrt(n_repeats); 0 when exact or analytic
  std::size_t n_samples = 0;
  std::size_t n_repeats = 0;
};

struct ThermalEstimates {
  ThermalEstimate free_energy;
  ThermalEstimate energy;
  ThermalEstimate entropy;
};

// rho = sum_x p(x) |psi(x)><psi(x)|
Eigen::MatrixXcd assemble_gibbs(const BernoulliProduct& model, const CircuitParams& params,
                                const ansatz::Entangler& entangler);

// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2. Throws
// std::invalid_argument unless both inputs are density matrices within 1e-8.
double fidelity(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma);

// Largest violation of Hermiticity, unit trace or positivity.
double density_matrix_defect(const Eigen::MatrixXcd& rho);

struct EigenIdentification {
  std::vector<Bits> ranked;            // bitstrings by descending p(x), ties by value
  std::vector<double> probs;           // p(ranked[r])
  std::vector<double> energies;        // E_theta(ranked[r])
  std::vector<double> gibbs_weights;   // P_Gibbs(n), eigenvalues ascending
  std::vector<double> eigenvalues;     // E_n
  Eigen::MatrixXd fidelity_matrix;     // (r, n) = |<n|psi(ranked[r])>|^2
};

EigenIdentification identify_eigenstates(const BernoulliProduct& model, const CircuitParams& params,
                                         const ansatz::Entangler& entangler,
                                         const spinchain::SpectralOracle& oracle, double beta);

struct FidelityReport {
  double gibbs_fidelity = 0.0;
  Eigen::MatrixXd eigen_fidelity_matrix;
};

FidelityReport fidelity_report(const BernoulliProduct& model, const CircuitParams& params,
                               const vfe::Problem& problem, const spinchain::SpectralOracle& oracle);

// Full-space: exact enumeration. Sample: n_repeats independent means of
// n_samples draws. Thermal relation: E = F_sample + S / beta. S is analytic
// for every method.
ThermalEstimates estimate_thermals(const BernoulliProduct& model, const CircuitParams& params,
                                   const vfe::Problem& problem, Method method, std::size_t n_samples,
                                   std::size_t n_repeats, Rng& rng);

}  // namespace tvqs::observables
