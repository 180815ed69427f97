#pragma once

// Layered U(1)-preserving circuit. Each layer is one global XY-hopping
// evolution exp(-i H0 tau) and an Rz rotation on every qubit; the order inside
// a layer is configurable.

#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "tvqs/qsim.hpp"
#include "tvqs/rng.hpp"

namespace tvqs::ansatz {

using qsim::Bits;
using qsim::cplx;
using qsim::StateVector;

// EntanglerFirst: layer = Rz(theta_k) U_g, the evolution acts first.
// RzFirst: layer = U_g Rz(theta_k); the first Rz layer then only multiplies
// each basis input by a phase.
enum class LayerOrder { EntanglerFirst, RzFirst };

std::string to_string(LayerOrder order);
LayerOrder parse_layer_order(const std::string& s);

struct EntanglerSpec {
  int n_qubits = 0;
  std::vector<double> nn_couplings;   // g_{i,i+1}, length N-1
  std::vector<double> nnn_couplings;  // g_{i,i+2}, length max(N-2, 0)
  double tau = std::numbers::pi / 4;
  LayerOrder order = LayerOrder::EntanglerFirst;

  // All nearest-neighbour couplings g, next-nearest ones nnn_ratio * g.
  static EntanglerSpec uniform(int n_qubits, double g = 1.0, double nnn_ratio = 0.0,
                               double tau = std::numbers::pi / 4, LayerOrder order = LayerOrder::EntanglerFirst);

  void validate() const;

  // H0 = sum g (s+ s- + s- s+) = sum g (XX + YY) / 2 over the coupled pairs.
  std::vector<qsim::PauliString> hamiltonian() const;
};

// The cached block-diagonal unitary exp(-i H0 tau) for one EntanglerSpec.
class Entangler {
 public:
  explicit Entangler(EntanglerSpec spec);

  const EntanglerSpec& spec() const { return spec_; }
  int n_qubits() const { return spec_.n_qubits; }
  LayerOrder order() const { return spec_.order; }
  const qsim::BlockEvolution& evolution() const { return *evolution_; }

 private:
  EntanglerSpec spec_;
  std::shared_ptr<const qsim::BlockEvolution> evolution_;
};

// d x N Rz angles, row k holding layer k.
class CircuitParams {
 public:
  CircuitParams() = default;
  CircuitParams(int depth, int n_qubits);
  CircuitParams(int depth, int n_qubits, std::vector<double> thetas);

  // Uniform on [0, 2 pi).
  static CircuitParams random(int depth, int n_qubits, Rng& rng);

  int depth() const { return depth_; }
  int n_qubits() const { return n_qubits_; }
  std::size_t size() const { return thetas_.size(); }

  double& at(int layer, int qubit) { return thetas_[index(layer, qubit)]; }
  double at(int layer, int qubit) const { return thetas_[index(layer, qubit)]; }

  std::span<double> values() { return thetas_; }
  std::span<const double> values() const { return thetas_; }
  std::span<const double> layer(int k) const {
    return std::span<const double>(thetas_).subspan(static_cast<std::size_t>(k * n_qubits_),
                                                    static_cast<std::size_t>(n_qubits_));
  }

  void validate() const;

 private:
  std::size_t index(int layer, int qubit) const {
    return static_cast<std::size_t>(layer * n_qubits_ + qubit);
  }

  int depth_ = 0;
  int n_qubits_ = 0;
  std::vector<double> thetas_;
};

enum class MeasurementSetting { Z, X, Y };

// Diagonal of a full Rz layer, exp(-i/2 sum_i theta_i z_i(j)) for each basis index j.
std::vector<cplx> rz_layer_phases(std::span<const double> thetas);

// Circuit with precomputed per-layer phase tables; cheap to evaluate repeatedly.
class Circuit {
 public:
  Circuit(const CircuitParams& params, const Entangler& entangler);

  const CircuitParams& params() const { return params_; }
  const Entangler& entangler() const { return *entangler_; }
  int depth() const { return params_.depth(); }
  int n_qubits() const { return params_.n_qubits(); }

  void apply_rz_layer(int k, StateVector& state) const;
  void apply_rz_layer_adjoint(int k, StateVector& state) const;
  // The parts of layer k applied before and after its Rz sublayer.
  void apply_before_rz(StateVector& state) const;
  void apply_after_rz(StateVector& state) const;
  void apply_before_rz_adjoint(StateVector& state) const;
  void apply_after_rz_adjoint(StateVector& state) const;
  void apply_layer(int k, StateVector& state) const;
  void apply(StateVector& state) const;

  StateVector prepare(Bits x) const;

 private:
  CircuitParams params_;
  const Entangler* entangler_;
  std::vector<std::vector<cplx>> phases_;
  std::vector<std::vector<cplx>> phases_conj_;
};

// |psi_theta(x)> = U(theta)|x>
StateVector prepare(Bits x, const CircuitParams& params, const Entangler& entangler);

double energy_exact(Bits x, const CircuitParams& params, const Entangler& entangler,
                    const qsim::PauliOperator& hamiltonian);

// Rotates every qubit so that a Z-basis readout measures the setting's axis.
void rotate_to_z(StateVector& state, MeasurementSetting setting);

// Shot-based estimate of <H> from the three settings {XX}, {YY}, {ZZ, Z}.
// Every term must be a product of a single Pauli axis.
double energy_shots_state(const StateVector& state, std::span<const qsim::PauliString> hamiltonian,
                          std::size_t shots_per_setting, Rng& rng);

double energy_shots(Bits x, const CircuitParams& params, const Entangler& entangler,
                    std::span<const qsim::PauliString> hamiltonian, std::size_t shots_per_setting, Rng& rng);

}  // namespace tvqs::ansatz
