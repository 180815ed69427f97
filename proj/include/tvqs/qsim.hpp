#pragma once

// Dense statevector simulation for small registers.
//
// Basis convention: qubit i is bit i of the basis index and |0> is the +1
// eigenstate of sigma_z. Bitstrings are written with character i holding
// qubit i, so "10" is the index 1.

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "tvqs/rng.hpp"

namespace tvqs::qsim {

using cplx = std::complex<double>;
using Bits = std::uint64_t;

inline constexpr int kMaxQubits = 14;

class StateVector {
 public:
  // |0...0>
  explicit StateVector(int n_qubits);

  static StateVector basis(int n_qubits, Bits index);

  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return amps_.size(); }
  std::span<cplx> amps() { return amps_; }
  std::span<const cplx> amps() const { return amps_; }
  cplx operator[](std::size_t i) const { return amps_[i]; }

  double norm_sq() const;

 private:
  int n_qubits_;
  std::vector<cplx> amps_;
};

Bits parse_bits(std::string_view bits, int n_qubits);
std::string format_bits(Bits x, int n_qubits);
int hamming_weight(Bits x);

StateVector basis_state(int n_qubits, std::string_view bits);

enum class Axis : std::uint8_t { X, Y, Z };

struct PauliFactor {
  int qubit;
  Axis axis;
};

struct PauliString {
  std::vector<PauliFactor> factors;
  double coeff = 1.0;

  // Indices distinct and below n_qubits; throws std::invalid_argument.
  void validate(int n_qubits) const;
  Bits flip_mask() const;
  bool is_diagonal() const { return flip_mask() == 0; }
  std::string label() const;
};

// P|j> = phase(j) |j ^ flip_mask>, excluding the coefficient.
cplx pauli_phase(const PauliString& p, Bits j);

// exp(-i theta sigma_z / 2) on one qubit.
void apply_rz(StateVector& state, int qubit, double theta);

// Arbitrary 2x2 unitary (row-major) on one qubit.
void apply_single_qubit(StateVector& state, int qubit, const std::array<cplx, 4>& u);

double expect_pauli(const StateVector& state, const PauliString& term);

// I.i.d. computational-basis samples from |amps|^2.
std::vector<Bits> sample_bits(const StateVector& state, std::size_t n_shots, Rng& rng);

// Sparse Hermitian operator assembled from a real-coefficient Pauli sum.
class PauliOperator {
 public:
  PauliOperator(int n_qubits, std::span<const PauliString> terms);

  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return diag_.size(); }
  std::span<const PauliString> terms() const { return terms_; }
  std::span<const double> diagonal() const { return diag_; }

  double expectation(std::span<const cplx> amps) const;
  double expectation(const StateVector& state) const { return expectation(state.amps()); }

  // out = H in
  void apply(std::span<const cplx> in, std::span<cplx> out) const;

  // Basis states grouped into the connected components of the off-diagonal
  // coupling graph, each sorted ascending. H is block diagonal on them.
  std::vector<std::vector<Bits>> invariant_blocks() const;

  Eigen::MatrixXcd dense() const;

 private:
  friend class BlockEvolution;

  struct Coupling {
    Bits row;
    Bits col;  // row < col; the (col, row) element is the conjugate
    cplx value;
  };

  int n_qubits_;
  std::vector<PauliString> terms_;
  std::vector<double> diag_;
  std::vector<Coupling> upper_;
};

// exp(-i H t), exact, computed once by dense diagonalization of each invariant
// block of H.
class BlockEvolution {
 public:
  BlockEvolution(const PauliOperator& hamiltonian, double t);

  int n_qubits() const { return n_qubits_; }
  void apply(std::span<cplx> amps) const { apply_impl(amps, false); }
  void apply_adjoint(std::span<cplx> amps) const { apply_impl(amps, true); }
  void apply(StateVector& state) const { apply_impl(state.amps(), false); }
  void apply_adjoint(StateVector& state) const { apply_impl(state.amps(), true); }

  std::size_t n_blocks() const { return blocks_.size(); }
  std::size_t largest_block() const { return largest_; }

 private:
  struct Block {
    std::vector<Bits> index;
    std::vector<cplx> u;      // m x m row-major
    std::vector<cplx> u_dag;  // conjugate transpose
  };

  void apply_impl(std::span<cplx> amps, bool adjoint) const;

  int n_qubits_;
  std::size_t largest_ = 0;
  std::vector<Block> blocks_;
};

StateVector apply_hermitian_evolution(StateVector state, std::span<const PauliString> hamiltonian, double t);

}  // namespace tvqs::qsim
