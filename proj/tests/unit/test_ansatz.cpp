#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dense_oracle.hpp"
#include "tvqs/ansatz.hpp"
#include "tvqs/commands.hpp"
#include "tvqs/spinchain.hpp"

using namespace tvqs;
using ansatz::CircuitParams;
using ansatz::Entangler;
using ansatz::EntanglerSpec;
using ansatz::LayerOrder;
using ansatz::MeasurementSetting;
using qsim::Axis;
using qsim::cplx;
using qsim::PauliString;
using qsim::StateVector;

namespace {

StateVector random_state(int n, std::mt19937_64& gen) {
  std::normal_distribution<double> d;
  StateVector s(n);
  double nrm = 0;
  for (auto& a : s.amps()) {
    a = {d(gen), d(gen)};
    nrm += std::norm(a);
  }
  for (auto& a : s.amps()) a /= std::sqrt(nrm);
  return s;
}

const CircuitParams kFrozenParams(2, 3, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6});

struct FrozenCase {
  LayerOrder order;
  double nnn;
  double e1, e3, e6;
};

// exp(-i H0 tau) from a dense scipy expm; H = XXZ(N=3, delta=0.7, h=-0.3).
const FrozenCase kFrozen[] = {
    {LayerOrder::EntanglerFirst, 0.0, -0.27071314018799747, 0.329286859812003, -0.6224454108574261},
    {LayerOrder::EntanglerFirst, 0.25, -0.18229327983634108, 0.4177067201636595, -0.3958409045300204},
    {LayerOrder::RzFirst, 0.0, -0.49356902549025083, 0.10643097450974912, -0.3995895255551725},
    {LayerOrder::RzFirst, 0.25, -0.3587624809333268, 0.24123751906667312, -0.20555388182118475},
};

}  // namespace

TEST(Ansatz, BareEntanglerExample) {
  for (auto order : {LayerOrder::EntanglerFirst, LayerOrder::RzFirst}) {
    const Entangler ent(EntanglerSpec::uniform(2, 1.0, 0.0, std::numbers::pi / 4, order));
    const auto s = ansatz::prepare(0b01, CircuitParams(1, 2), ent);
    EXPECT_NEAR(std::abs(s[0b01] - cplx(1 / std::numbers::sqrt2, 0)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(s[0b10] - cplx(0, -1 / std::numbers::sqrt2)), 0.0, 1e-12);
  }
}

TEST(Ansatz, ZeroExcitationSectorInvariant) {
  std::mt19937_64 gen(1);
  Rng rng(2);
  const Entangler ent(EntanglerSpec::uniform(5));
  const auto p = CircuitParams::random(5, 5, rng);
  const auto s = ansatz::prepare(0, p, ent);
  EXPECT_NEAR(std::abs(s[0]), 1.0, 1e-12);
}

TEST(Ansatz, PreparedStateStaysInSector) {
  Rng rng(3);
  for (double nnn : {0.0, 1.142 / 14.60}) {
    const Entangler ent(EntanglerSpec::uniform(5, 1.0, nnn));
    for (int trial = 0; trial < 20; ++trial) {
      const auto p = CircuitParams::random(5, 5, rng);
      const qsim::Bits x = qsim::parse_bits("10101", 5);
      const auto s = ansatz::prepare(x, p, ent);
      double leak = 0;
      for (std::size_t j = 0; j < s.dim(); ++j)
        if (qsim::hamming_weight(j) != 3) leak += std::norm(s[j]);
      ASSERT_LT(leak, 1e-10);
      ASSERT_NEAR(s.norm_sq(), 1.0, 1e-10);
    }
  }
}

TEST(Ansatz, MatchesDenseCircuitUnitary) {
  Rng rng(4);
  for (auto order : {LayerOrder::EntanglerFirst, LayerOrder::RzFirst}) {
    for (int n = 1; n <= 5; ++n) {
      const auto spec = EntanglerSpec::uniform(n, 1.0, 0.2, 0.7, order);
      const Entangler ent(spec);
      const auto p = CircuitParams::random(3, n, rng);
      const auto u = dense::circuit(p, spec);
      EXPECT_LE((u.adjoint() * u - dense::Mat::Identity(u.rows(), u.cols())).norm(), 1e-10);
      for (qsim::Bits x = 0; x < (qsim::Bits{1} << n); ++x) {
        const auto got = dense::to_eigen(ansatz::prepare(x, p, ent));
        ASSERT_LE((got - u.col(static_cast<Eigen::Index>(x))).norm(), 1e-10);
      }
    }
  }
}

TEST(Ansatz, FrozenEnergies) {
  const spinchain::XXZSpec model{3, 0.7, -0.3};
  const qsim::PauliOperator h(3, spinchain::build_terms(model));
  for (const auto& c : kFrozen) {
    const Entangler ent(EntanglerSpec::uniform(3, 1.0, c.nnn, std::numbers::pi / 4, c.order));
    EXPECT_NEAR(ansatz::energy_exact(1, kFrozenParams, ent, h), c.e1, 1e-12);
    EXPECT_NEAR(ansatz::energy_exact(3, kFrozenParams, ent, h), c.e3, 1e-12);
    EXPECT_NEAR(ansatz::energy_exact(6, kFrozenParams, ent, h), c.e6, 1e-12);
  }
}

TEST(Ansatz, LayerOrderSemantics) {
  const spinchain::XXZSpec model{4, 0.3, 0.2};
  const qsim::PauliOperator h(4, spinchain::build_terms(model));
  Rng rng(5);
  auto p = CircuitParams::random(3, 4, rng);
  auto q = p;
  for (int i = 0; i < 4; ++i) q.at(0, i) += 0.3 * (i + 1);
  const Entangler rz_first(EntanglerSpec::uniform(4, 1.0, 0.0, std::numbers::pi / 4, LayerOrder::RzFirst));
  const Entangler ent_first(EntanglerSpec::uniform(4, 1.0, 0.0, std::numbers::pi / 4, LayerOrder::EntanglerFirst));
  const qsim::Bits x = 0b0110;
  // A leading Rz layer only dresses the basis input with a phase.
  EXPECT_NEAR(ansatz::energy_exact(x, p, rz_first, h), ansatz::energy_exact(x, q, rz_first, h), 1e-12);
  EXPECT_GT(std::abs(ansatz::energy_exact(x, p, ent_first, h) - ansatz::energy_exact(x, q, ent_first, h)), 1e-3);

  EXPECT_EQ(ansatz::parse_layer_order("rz_first"), LayerOrder::RzFirst);
  EXPECT_EQ(ansatz::to_string(LayerOrder::EntanglerFirst), "entangler_first");
  EXPECT_THROW(ansatz::parse_layer_order("sideways"), std::invalid_argument);
}

TEST(Ansatz, DepthZeroIsIdentity) {
  const Entangler ent(EntanglerSpec::uniform(3));
  const auto s = ansatz::prepare(0b101, CircuitParams(0, 3), ent);
  EXPECT_EQ(s[0b101], cplx(1, 0));
}

TEST(Ansatz, OrthogonalInputsStayOrthogonal) {
  Rng rng(6);
  const Entangler ent(EntanglerSpec::uniform(4));
  const auto p = CircuitParams::random(4, 4, rng);
  for (qsim::Bits a = 0; a < 16; ++a)
    for (qsim::Bits b = a + 1; b < 16; ++b) {
      const auto sa = ansatz::prepare(a, p, ent);
      const auto sb = ansatz::prepare(b, p, ent);
      cplx ip = 0;
      for (std::size_t j = 0; j < sa.dim(); ++j) ip += std::conj(sa[j]) * sb[j];
      ASSERT_LT(std::abs(ip), 1e-10);
    }
}

TEST(Ansatz, EnergyExamples) {
  Rng rng(7);
  const spinchain::XXZSpec xy{5, 0.0, 0.5};
  const qsim::PauliOperator h(5, spinchain::build_terms(xy));
  const Entangler ent(EntanglerSpec::uniform(5));
  for (int trial = 0; trial < 5; ++trial)
    EXPECT_NEAR(ansatz::energy_exact(0, CircuitParams::random(5, 5, rng), ent, h), 2.5, 1e-12);

  const qsim::PauliOperator h2(2, spinchain::build_terms({2, 0.0, 0.0}));
  const Entangler ent2(EntanglerSpec::uniform(2));
  EXPECT_NEAR(ansatz::energy_exact(0, CircuitParams::random(3, 2, rng), ent2, h2), 0.0, 1e-12);
  for (qsim::Bits x = 0; x < 4; ++x) {
    const double e = ansatz::energy_exact(x, CircuitParams::random(3, 2, rng), ent2, h2);
    EXPECT_GE(e, -2.0 - 1e-12);
    EXPECT_LE(e, 2.0 + 1e-12);
  }
}

TEST(Ansatz, ShapeErrors) {
  const Entangler ent(EntanglerSpec::uniform(3));
  EXPECT_THROW(ansatz::prepare(0, CircuitParams(2, 4), ent), std::invalid_argument);
  EXPECT_THROW(CircuitParams(2, 3, std::vector<double>(5, 0.0)), std::invalid_argument);
  EXPECT_THROW(CircuitParams(1, 2, {0.0, std::nan("")}), std::invalid_argument);
  auto bad = EntanglerSpec::uniform(4);
  bad.nn_couplings.pop_back();
  EXPECT_THROW(Entangler{bad}, std::invalid_argument);
  EXPECT_THROW(Entangler(EntanglerSpec::uniform(3, 1.0, 0.0, -1.0)), std::invalid_argument);
}

TEST(Ansatz, SettingRotation) {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 4;
    const auto psi = random_state(n, gen);
    for (auto [setting, axis] : {std::pair{MeasurementSetting::X, Axis::X}, std::pair{MeasurementSetting::Y, Axis::Y}}) {
      auto rotated = psi;
      ansatz::rotate_to_z(rotated, setting);
      for (int i = 0; i < n; ++i) {
        ASSERT_NEAR(qsim::expect_pauli(rotated, PauliString{{{i, Axis::Z}}, 1.0}),
                    qsim::expect_pauli(psi, PauliString{{{i, axis}}, 1.0}), 1e-12);
        if (i + 1 < n)
          ASSERT_NEAR(qsim::expect_pauli(rotated, PauliString{{{i, Axis::Z}, {i + 1, Axis::Z}}, 1.0}),
                      qsim::expect_pauli(psi, PauliString{{{i, axis}, {i + 1, axis}}, 1.0}), 1e-12);
      }
    }
  }
}

TEST(AnsatzShots, DiagonalTermsExactOnBasisStates) {
  const auto terms = spinchain::build_terms({4, 0.6, -0.4});
  std::vector<PauliString> diag;
  for (const auto& t : terms)
    if (t.is_diagonal()) diag.push_back(t);
  const qsim::PauliOperator h(4, diag);
  Rng rng(9);
  for (qsim::Bits x = 0; x < 16; ++x) {
    const auto s = StateVector::basis(4, x);
    EXPECT_NEAR(ansatz::energy_shots_state(s, diag, 3, rng), h.expectation(s), 1e-12);
  }
}

TEST(AnsatzShots, LargeShotLimit) {
  Rng rng(10);
  const auto terms = spinchain::build_terms({3, 0.4, 0.3});
  const qsim::PauliOperator h(3, terms);
  const Entangler ent(EntanglerSpec::uniform(3));
  const auto p = CircuitParams::random(3, 3, rng);
  const std::size_t shots = 1000000;
  for (qsim::Bits x : {qsim::Bits{1}, qsim::Bits{3}, qsim::Bits{5}}) {
    const double exact = ansatz::energy_exact(x, p, ent, h);
    const double est = ansatz::energy_shots(x, p, ent, terms, shots, rng);
    // Each setting sums bounded +-1 outcomes; bound its variance by (sum |c|)^2.
    double bound = 0;
    for (auto axis : {Axis::X, Axis::Y, Axis::Z}) {
      double c = 0;
      for (const auto& t : terms)
        if (t.factors.front().axis == axis) c += std::abs(t.coeff);
      bound += c * c / shots;
    }
    EXPECT_NEAR(est, exact, 5 * std::sqrt(bound));
  }
}

TEST(AnsatzShots, VarianceScalesInverselyWithShots) {
  Rng rng(11);
  const auto terms = spinchain::build_terms({3, 0.4, 0.3});
  const Entangler ent(EntanglerSpec::uniform(3));
  const auto p = CircuitParams::random(3, 3, rng);
  const auto psi = ansatz::prepare(0b011, p, ent);
  std::vector<double> log_shots, log_var;
  for (std::size_t shots : {25u, 100u, 400u, 1600u, 6400u}) {
    std::vector<double> est;
    for (int r = 0; r < 50; ++r) est.push_back(ansatz::energy_shots_state(psi, terms, shots, rng));
    double mean = 0;
    for (double e : est) mean += e / est.size();
    double var = 0;
    for (double e : est) var += (e - mean) * (e - mean) / (est.size() - 1);
    log_shots.push_back(std::log(static_cast<double>(shots)));
    log_var.push_back(std::log(var));
  }
  const auto fit = commands::fit_line(log_shots, log_var);
  EXPECT_NEAR(fit.slope, -1.0, 0.15);
}

TEST(AnsatzShots, Errors) {
  Rng rng(12);
  const auto s = StateVector(2);
  const std::vector<PauliString> terms{{{{0, Axis::Z}}, 1.0}};
  EXPECT_THROW(ansatz::energy_shots_state(s, terms, 0, rng), std::invalid_argument);
  const std::vector<PauliString> mixed{{{{0, Axis::X}, {1, Axis::Z}}, 1.0}};
  EXPECT_THROW(ansatz::energy_shots_state(s, mixed, 10, rng), std::invalid_argument);
}
