#include "tvqs/qsim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "tvqs/simd/kernels.hpp"

namespace tvqs::qsim {

namespace {

void check_qubits(int n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw std::invalid_argument("qubit count must be in [1, " + std::to_string(kMaxQubits) +
                                "], got " + std::to_string(n_qubits));
  }
}

void check_index(const StateVector& state, int qubit) {
  if (qubit < 0 || qubit >= state.n_qubits()) {
    throw std::invalid_argument("qubit index " + std::to_string(qubit) + " out of range for " +
                                std::to_string(state.n_qubits()) + " qubits");
  }
}

// Disjoint-set forest over basis indices.
struct UnionFind {
  std::vector<Bits> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), Bits{0}); }
  Bits find(Bits x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(Bits a, Bits b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
  check_qubits(n_qubits);
  amps_.assign(std::size_t{1} << n_qubits, cplx{0.0, 0.0});
  amps_[0] = 1.0;
}

StateVector StateVector::basis(int n_qubits, Bits index) {
  StateVector s(n_qubits);
  if (index >= s.dim()) throw std::invalid_argument("basis index out of range");
  s.amps_[0] = 0.0;
  s.amps_[index] = 1.0;
  return s;
}

double StateVector::norm_sq() const { return simd::norm_sq(amps_); }

Bits parse_bits(std::string_view bits, int n_qubits) {
  if (static_cast<int>(bits.size()) != n_qubits) {
    throw std::invalid_argument("bitstring \"" + std::string(bits) + "\" has length " +
                                std::to_string(bits.size()) + ", expected " + std::to_string(n_qubits));
  }
  Bits x = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') {
      x |= Bits{1} << i;
    } else if (bits[i] != '0') {
      throw std::invalid_argument("bitstring may only contain '0' and '1'");
    }
  }
  return x;
}

std::string format_bits(Bits x, int n_qubits) {
  std::string s(static_cast<std::size_t>(n_qubits), '0');
  for (int i = 0; i < n_qubits; ++i) {
    if ((x >> i) & 1U) s[static_cast<std::size_t>(i)] = '1';
  }
  return s;
}

int hamming_weight(Bits x) { return std::popcount(x); }

StateVector basis_state(int n_qubits, std::string_view bits) {
  return StateVector::basis(n_qubits, parse_bits(bits, n_qubits));
}

void PauliString::validate(int n_qubits) const {
  Bits seen = 0;
  for (const auto& f : factors) {
    if (f.qubit < 0 || f.qubit >= n_qubits) {
      throw std::invalid_argument("Pauli factor on qubit " + std::to_string(f.qubit) + " out of range");
    }
    const Bits bit = Bits{1} << f.qubit;
    if (seen & bit) throw std::invalid_argument("Pauli string repeats qubit " + std::to_string(f.qubit));
    seen |= bit;
  }
  if (!std::isfinite(coeff)) throw std::invalid_argument("Pauli coefficient must be finite");
}

Bits PauliString::flip_mask() const {
  Bits m = 0;
  for (const auto& f : factors) {
    if (f.axis != Axis::Z) m |= Bits{1} << f.qubit;
  }
  return m;
}

std::string PauliString::label() const {
  std::string s;
  for (const auto& f : factors) {
    s += f.axis == Axis::X ? 'X' : (f.axis == Axis::Y ? 'Y' : 'Z');
    s += std::to_string(f.qubit);
  }
  return s.empty() ? "I" : s;
}

cplx pauli_phase(const PauliString& p, Bits j) {
  Bits sign_mask = 0;
  int n_y = 0;
  for (const auto& f : p.factors) {
    if (f.axis != Axis::X) sign_mask |= Bits{1} << f.qubit;
    if (f.axis == Axis::Y) ++n_y;
  }
  static constexpr cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  cplx phase = kIPow[n_y & 3];
  if (std::popcount(j & sign_mask) & 1) phase = -phase;
  return phase;
}

void apply_rz(StateVector& state, int qubit, double theta) {
  check_index(state, qubit);
  const cplx lo = std::polar(1.0, -0.5 * theta);
  const cplx hi = std::polar(1.0, 0.5 * theta);
  auto a = state.amps();
  const Bits bit = Bits{1} << qubit;
  for (std::size_t j = 0; j < a.size(); ++j) a[j] *= (j & bit) ? hi : lo;
}

void apply_single_qubit(StateVector& state, int qubit, const std::array<cplx, 4>& u) {
  check_index(state, qubit);
  auto a = state.amps();
  const Bits bit = Bits{1} << qubit;
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (j & bit) continue;
    const cplx a0 = a[j], a1 = a[j | bit];
    a[j] = u[0] * a0 + u[1] * a1;
    a[j | bit] = u[2] * a0 + u[3] * a1;
  }
}

double expect_pauli(const StateVector& state, const PauliString& term) {
  term.validate(state.n_qubits());
  const Bits flip = term.flip_mask();
  const auto a = state.amps();
  cplx acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (a[j] == cplx{}) continue;
    acc += std::conj(a[j ^ flip]) * pauli_phase(term, j) * a[j];
  }
  return term.coeff * acc.real();
}

std::vector<Bits> sample_bits(const StateVector& state, std::size_t n_shots, Rng& rng) {
  if (n_shots == 0) throw std::invalid_argument("sample_bits needs at least one shot");
  std::vector<double> cdf(state.dim());
  simd::abs_sq(state.amps(), cdf);
  std::partial_sum(cdf.begin(), cdf.end(), cdf.begin());
  const double total = cdf.back();
  std::vector<Bits> out;
  out.reserve(n_shots);
  for (std::size_t s = 0; s < n_shots; ++s) {
    const double u = rng.uniform() * total;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    out.push_back(static_cast<Bits>(it - cdf.begin()));
  }
  return out;
}

PauliOperator::PauliOperator(int n_qubits, std::span<const PauliString> terms)
    : n_qubits_(n_qubits), terms_(terms.begin(), terms.end()) {
  check_qubits(n_qubits);
  for (const auto& t : terms_) t.validate(n_qubits);
  const std::size_t dim = std::size_t{1} << n_qubits;
  diag_.assign(dim, 0.0);

  std::vector<Coupling> raw;
  for (const auto& t : terms_) {
    const Bits flip = t.flip_mask();
    for (Bits j = 0; j < dim; ++j) {
      const cplx v = t.coeff * pauli_phase(t, j);
      if (flip == 0) {
        diag_[j] += v.real();
      } else if (j < (j ^ flip)) {
        // element <j^flip| P |j>; store its conjugate as the (j, j^flip) entry
        raw.push_back({j, j ^ flip, std::conj(v)});
      }
    }
  }
  std::sort(raw.begin(), raw.end(), [](const Coupling& a, const Coupling& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  for (const auto& c : raw) {
    if (!upper_.empty() && upper_.back().row == c.row && upper_.back().col == c.col) {
      upper_.back().value += c.value;
    } else {
      upper_.push_back(c);
    }
  }
  std::erase_if(upper_, [](const Coupling& c) { return std::abs(c.value) < 1e-15; });
}

double PauliOperator::expectation(std::span<const cplx> amps) const {
  if (amps.size() != diag_.size()) throw std::invalid_argument("state dimension does not match operator");
  double e = simd::weighted_norm_sq(amps, diag_);
  double off = 0.0;
  for (const auto& c : upper_) off += (std::conj(amps[c.row]) * c.value * amps[c.col]).real();
  return e + 2.0 * off;
}

void PauliOperator::apply(std::span<const cplx> in, std::span<cplx> out) const {
  if (in.size() != diag_.size() || out.size() != diag_.size()) {
    throw std::invalid_argument("state dimension does not match operator");
  }
  for (std::size_t j = 0; j < in.size(); ++j) out[j] = diag_[j] * in[j];
  for (const auto& c : upper_) {
    out[c.row] += c.value * in[c.col];
    out[c.col] += std::conj(c.value) * in[c.row];
  }
}

std::vector<std::vector<Bits>> PauliOperator::invariant_blocks() const {
  UnionFind uf(diag_.size());
  for (const auto& c : upper_) uf.unite(c.row, c.col);
  std::vector<std::vector<Bits>> by_root(diag_.size());
  for (Bits j = 0; j < diag_.size(); ++j) by_root[uf.find(j)].push_back(j);
  std::vector<std::vector<Bits>> blocks;
  for (auto& b : by_root) {
    if (!b.empty()) blocks.push_back(std::move(b));
  }
  return blocks;
}

Eigen::MatrixXcd PauliOperator::dense() const {
  const auto dim = static_cast<Eigen::Index>(diag_.size());
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) h(j, j) = diag_[static_cast<std::size_t>(j)];
  for (const auto& c : upper_) {
    h(static_cast<Eigen::Index>(c.row), static_cast<Eigen::Index>(c.col)) = c.value;
    h(static_cast<Eigen::Index>(c.col), static_cast<Eigen::Index>(c.row)) = std::conj(c.value);
  }
  return h;
}

BlockEvolution::BlockEvolution(const PauliOperator& hamiltonian, double t) : n_qubits_(hamiltonian.n_qubits()) {
  auto index_sets = hamiltonian.invariant_blocks();
  // (block, local position) of every basis index
  std::vector<std::pair<std::size_t, Eigen::Index>> where(hamiltonian.dim());
  std::vector<Eigen::MatrixXcd> hb(index_sets.size());
  for (std::size_t b = 0; b < index_sets.size(); ++b) {
    const auto m = static_cast<Eigen::Index>(index_sets[b].size());
    hb[b] = Eigen::MatrixXcd::Zero(m, m);
    for (Eigen::Index r = 0; r < m; ++r) {
      const Bits j = index_sets[b][static_cast<std::size_t>(r)];
      where[j] = {b, r};
      hb[b](r, r) = hamiltonian.diag_[j];
    }
  }
  for (const auto& c : hamiltonian.upper_) {
    const auto [b, r] = where[c.row];
    const auto col = where[c.col].second;
    hb[b](r, col) += c.value;
    hb[b](col, r) += std::conj(c.value);
  }

  for (std::size_t bi = 0; bi < index_sets.size(); ++bi) {
    const auto m = static_cast<Eigen::Index>(index_sets[bi].size());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hb[bi]);
    Eigen::VectorXcd phases(m);
    for (Eigen::Index k = 0; k < m; ++k) phases(k) = std::polar(1.0, -es.eigenvalues()(k) * t);
    const Eigen::MatrixXcd u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();

    Block b;
    b.index = std::move(index_sets[bi]);
    b.u.resize(static_cast<std::size_t>(m * m));
    b.u_dag.resize(static_cast<std::size_t>(m * m));
    for (Eigen::Index r = 0; r < m; ++r) {
      for (Eigen::Index c = 0; c < m; ++c) {
        b.u[static_cast<std::size_t>(r * m + c)] = u(r, c);
        b.u_dag[static_cast<std::size_t>(r * m + c)] = std::conj(u(c, r));
      }
    }
    largest_ = std::max(largest_, b.index.size());
    blocks_.push_back(std::move(b));
  }
}

void BlockEvolution::apply_impl(std::span<cplx> amps, bool adjoint) const {
  if (amps.size() != (std::size_t{1} << n_qubits_)) {
    throw std::invalid_argument("state dimension does not match evolution operator");
  }
  std::vector<cplx> in(largest_), out(largest_);
  for (const auto& b : blocks_) {
    const std::size_t m = b.index.size();
    bool occupied = false;
    for (std::size_t r = 0; r < m; ++r) {
      in[r] = amps[b.index[r]];
      occupied |= in[r] != cplx{};
    }
    if (!occupied) continue;
    if (m == 1) {
      amps[b.index[0]] = (adjoint ? b.u_dag[0] : b.u[0]) * in[0];
      continue;
    }
    simd::cgemv(adjoint ? b.u_dag : b.u, std::span<const cplx>(in.data(), m), std::span<cplx>(out.data(), m));
    for (std::size_t r = 0; r < m; ++r) amps[b.index[r]] = out[r];
  }
}

StateVector apply_hermitian_evolution(StateVector state, std::span<const PauliString> hamiltonian, double t) {
  const PauliOperator op(state.n_qubits(), hamiltonian);
  BlockEvolution(op, t).apply(state);
  return state;
}

}  // namespace tvqs::qsim
