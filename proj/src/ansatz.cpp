#include "tvqs/ansatz.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tvqs/simd/kernels.hpp"

namespace tvqs::ansatz {

std::string to_string(LayerOrder order) {
  return order == LayerOrder::EntanglerFirst ? "entangler_first" : "rz_first";
}

LayerOrder parse_layer_order(const std::string& s) {
  if (s == "entangler_first") return LayerOrder::EntanglerFirst;
  if (s == "rz_first") return LayerOrder::RzFirst;
  throw std::invalid_argument("layer order must be entangler_first or rz_first, got '" + s + "'");
}

EntanglerSpec EntanglerSpec::uniform(int n_qubits, double g, double nnn_ratio, double tau, LayerOrder order) {
  EntanglerSpec s;
  s.n_qubits = n_qubits;
  s.nn_couplings.assign(static_cast<std::size_t>(std::max(n_qubits - 1, 0)), g);
  s.nnn_couplings.assign(static_cast<std::size_t>(std::max(n_qubits - 2, 0)), nnn_ratio * g);
  s.tau = tau;
  s.order = order;
  return s;
}

void EntanglerSpec::validate() const {
  if (n_qubits < 1 || n_qubits > qsim::kMaxQubits) {
    throw std::invalid_argument("entangler qubit count out of range");
  }
  if (nn_couplings.size() != static_cast<std::size_t>(std::max(n_qubits - 1, 0))) {
    throw std::invalid_argument("entangler needs N-1 nearest-neighbour couplings");
  }
  if (nnn_couplings.size() != static_cast<std::size_t>(std::max(n_qubits - 2, 0))) {
    throw std::invalid_argument("entangler needs N-2 next-nearest-neighbour couplings");
  }
  if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("entangler tau must be positive");
  for (double g : nn_couplings) {
    if (!std::isfinite(g)) throw std::invalid_argument("entangler couplings must be finite");
  }
  for (double g : nnn_couplings) {
    if (!std::isfinite(g)) throw std::invalid_argument("entangler couplings must be finite");
  }
}

std::vector<qsim::PauliString> EntanglerSpec::hamiltonian() const {
  using qsim::Axis;
  std::vector<qsim::PauliString> terms;
  auto hop = [&](int i, int j, double g) {
    if (g == 0.0) return;
    terms.push_back({{{i, Axis::X}, {j, Axis::X}}, 0.5 * g});
    terms.push_back({{{i, Axis::Y}, {j, Axis::Y}}, 0.5 * g});
  };
  for (int i = 0; i + 1 < n_qubits; ++i) hop(i, i + 1, nn_couplings[static_cast<std::size_t>(i)]);
  for (int i = 0; i + 2 < n_qubits; ++i) hop(i, i + 2, nnn_couplings[static_cast<std::size_t>(i)]);
  return terms;
}

Entangler::Entangler(EntanglerSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  const auto terms = spec_.hamiltonian();
  const qsim::PauliOperator h0(spec_.n_qubits, terms);
  evolution_ = std::make_shared<const qsim::BlockEvolution>(h0, spec_.tau);
}

CircuitParams::CircuitParams(int depth, int n_qubits)
    : depth_(depth), n_qubits_(n_qubits), thetas_(static_cast<std::size_t>(std::max(depth * n_qubits, 0)), 0.0) {
  validate();
}

CircuitParams::CircuitParams(int depth, int n_qubits, std::vector<double> thetas)
    : depth_(depth), n_qubits_(n_qubits), thetas_(std::move(thetas)) {
  validate();
}

CircuitParams CircuitParams::random(int depth, int n_qubits, Rng& rng) {
  CircuitParams p(depth, n_qubits);
  for (double& t : p.thetas_) t = 2.0 * std::numbers::pi * rng.uniform();
  return p;
}

void CircuitParams::validate() const {
  if (depth_ < 0) throw std::invalid_argument("circuit depth must be non-negative");
  if (n_qubits_ < 1 || n_qubits_ > qsim::kMaxQubits) throw std::invalid_argument("circuit qubit count out of range");
  if (thetas_.size() != static_cast<std::size_t>(depth_ * n_qubits_)) {
    throw std::invalid_argument("circuit angle matrix must be depth x n_qubits");
  }
  for (double t : thetas_) {
    if (!std::isfinite(t)) throw std::invalid_argument("circuit angles must be finite");
  }
}

std::vector<cplx> rz_layer_phases(std::span<const double> thetas) {
  // Built by doubling: adding qubit i splits each entry into bit-0 and bit-1 halves.
  std::vector<cplx> phases(std::size_t{1} << thetas.size());
  phases[0] = 1.0;
  std::size_t len = 1;
  for (double theta : thetas) {
    const cplx lo = std::polar(1.0, -0.5 * theta);
    const cplx hi = std::polar(1.0, 0.5 * theta);
    for (std::size_t j = 0; j < len; ++j) {
      phases[j + len] = phases[j] * hi;
      phases[j] *= lo;
    }
    len *= 2;
  }
  return phases;
}

Circuit::Circuit(const CircuitParams& params, const Entangler& entangler)
    : params_(params), entangler_(&entangler) {
  params_.validate();
  if (params_.n_qubits() != entangler.n_qubits()) {
    throw std::invalid_argument("circuit and entangler qubit counts differ");
  }
  for (int k = 0; k < params_.depth(); ++k) {
    auto ph = rz_layer_phases(params_.layer(k));
    std::vector<cplx> conj(ph.size());
    for (std::size_t j = 0; j < ph.size(); ++j) conj[j] = std::conj(ph[j]);
    phases_.push_back(std::move(ph));
    phases_conj_.push_back(std::move(conj));
  }
}

void Circuit::apply_rz_layer(int k, StateVector& state) const {
  simd::cmul_inplace(state.amps(), phases_[static_cast<std::size_t>(k)]);
}

void Circuit::apply_rz_layer_adjoint(int k, StateVector& state) const {
  simd::cmul_inplace(state.amps(), phases_conj_[static_cast<std::size_t>(k)]);
}

void Circuit::apply_before_rz(StateVector& state) const {
  if (entangler_->order() == LayerOrder::EntanglerFirst) entangler_->evolution().apply(state);
}

void Circuit::apply_after_rz(StateVector& state) const {
  if (entangler_->order() == LayerOrder::RzFirst) entangler_->evolution().apply(state);
}

void Circuit::apply_before_rz_adjoint(StateVector& state) const {
  if (entangler_->order() == LayerOrder::EntanglerFirst) entangler_->evolution().apply_adjoint(state);
}

void Circuit::apply_after_rz_adjoint(StateVector& state) const {
  if (entangler_->order() == LayerOrder::RzFirst) entangler_->evolution().apply_adjoint(state);
}

void Circuit::apply_layer(int k, StateVector& state) const {
  apply_before_rz(state);
  apply_rz_layer(k, state);
  apply_after_rz(state);
}

void Circuit::apply(StateVector& state) const {
  if (state.n_qubits() != n_qubits()) throw std::invalid_argument("state and circuit qubit counts differ");
  for (int k = 0; k < depth(); ++k) apply_layer(k, state);
}

StateVector Circuit::prepare(Bits x) const {
  StateVector s = StateVector::basis(n_qubits(), x);
  apply(s);
  return s;
}

StateVector prepare(Bits x, const CircuitParams& params, const Entangler& entangler) {
  return Circuit(params, entangler).prepare(x);
}

double energy_exact(Bits x, const CircuitParams& params, const Entangler& entangler,
                    const qsim::PauliOperator& hamiltonian) {
  return hamiltonian.expectation(prepare(x, params, entangler));
}

void rotate_to_z(StateVector& state, MeasurementSetting setting) {
  const double r = std::numbers::sqrt2 / 2;
  std::array<cplx, 4> u{};
  switch (setting) {
    case MeasurementSetting::Z:
      return;
    case MeasurementSetting::X:  // exp(+i pi/4 sigma_y)
      u = {cplx{r, 0}, cplx{r, 0}, cplx{-r, 0}, cplx{r, 0}};
      break;
    case MeasurementSetting::Y:  // exp(-i pi/4 sigma_x)
      u = {cplx{r, 0}, cplx{0, -r}, cplx{0, -r}, cplx{r, 0}};
      break;
  }
  for (int q = 0; q < state.n_qubits(); ++q) qsim::apply_single_qubit(state, q, u);
}

namespace {

struct SettingTerms {
  MeasurementSetting setting;
  std::vector<std::pair<Bits, double>> parity_terms;  // (support mask, coefficient)
};

}  // namespace

double energy_shots_state(const StateVector& state, std::span<const qsim::PauliString> hamiltonian,
                          std::size_t shots_per_setting, Rng& rng) {
  if (shots_per_setting == 0) throw std::invalid_argument("energy_shots needs at least one shot per setting");
  std::array<SettingTerms, 3> groups{{{MeasurementSetting::X, {}}, {MeasurementSetting::Y, {}},
                                      {MeasurementSetting::Z, {}}}};
  double constant = 0.0;
  for (const auto& term : hamiltonian) {
    term.validate(state.n_qubits());
    if (term.factors.empty()) {
      constant += term.coeff;
      continue;
    }
    const qsim::Axis axis = term.factors.front().axis;
    Bits mask = 0;
    for (const auto& f : term.factors) {
      if (f.axis != axis) {
        throw std::invalid_argument("term " + term.label() + " mixes Pauli axes; not measurable in one setting");
      }
      mask |= Bits{1} << f.qubit;
    }
    groups[static_cast<std::size_t>(axis)].parity_terms.emplace_back(mask, term.coeff);
  }

  double energy = constant;
  for (const auto& g : groups) {
    if (g.parity_terms.empty()) continue;
    StateVector rotated = state;
    rotate_to_z(rotated, g.setting);
    const auto shots = qsim::sample_bits(rotated, shots_per_setting, rng);
    for (const auto& [mask, coeff] : g.parity_terms) {
      long long sum = 0;
      for (Bits b : shots) sum += (std::popcount(b & mask) & 1) ? -1 : 1;
      energy += coeff * static_cast<double>(sum) / static_cast<double>(shots.size());
    }
  }
  return energy;
}

double energy_shots(Bits x, const CircuitParams& params, const Entangler& entangler,
                    std::span<const qsim::PauliString> hamiltonian, std::size_t shots_per_setting, Rng& rng) {
  return energy_shots_state(prepare(x, params, entangler), hamiltonian, shots_per_setting, rng);
}

}  // namespace tvqs::ansatz
