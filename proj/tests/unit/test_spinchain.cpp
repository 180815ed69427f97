#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "dense_oracle.hpp"
#include "tvqs/spinchain.hpp"

using namespace tvqs;
using spinchain::SpectralOracle;
using spinchain::XXZSpec;

namespace {

struct Frozen {
  XXZSpec spec;
  double beta, f, e, s;
};

// Dense numpy diagonalization, independent of the library.
const Frozen kFrozen[] = {
    {{5, 0.0, 0.5}, 0.5, -8.979008735145477, -3.672681984714959, 2.653163375215259},
    {{5, 0.3, 0.0}, 0.5, -9.030862672832217, -3.938779657848615, 2.5460415074918012},
    {{2, 0.0, 0.0}, 1.0, -2.2538560220859454, -1.5231883119115295, 0.7306677101744159},
    {{3, 0.7, -0.3}, 1.3, -4.213238167713584, -3.679181801200625, 0.6942732764668463},
    {{5, 0.0, 0.5}, 3.0, -5.996740087517704, -5.867355979442419, 0.38815232422585666},
};

}  // namespace

TEST(Spinchain, BuildTermsCounts) {
  auto t = spinchain::build_terms({2, 0.0, 0.0});
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0].factors[0].axis, qsim::Axis::X);
  EXPECT_EQ(t[1].factors[0].axis, qsim::Axis::Y);

  t = spinchain::build_terms({5, 0.0, 0.5});
  EXPECT_EQ(std::count_if(t.begin(), t.end(), [](const auto& p) { return p.factors.size() == 2; }), 8);
  EXPECT_EQ(std::count_if(t.begin(), t.end(), [](const auto& p) { return p.factors.size() == 1; }), 5);

  t = spinchain::build_terms({5, 0.3, 0.0});
  EXPECT_EQ(t.size(), 12u);
}

TEST(Spinchain, FrozenThermalValues) {
  for (const auto& c : kFrozen) {
    const auto g = spinchain::exact_gibbs(c.spec, c.beta);
    EXPECT_NEAR(g.values.free_energy, c.f, 1e-10);
    EXPECT_NEAR(g.values.energy, c.e, 1e-10);
    EXPECT_NEAR(g.values.entropy, c.s, 1e-10);
    EXPECT_NEAR(g.values.entropy, c.beta * (g.values.energy - g.values.free_energy), 1e-12);
    EXPECT_NEAR(g.rho.trace().real(), 1.0, 1e-12);
    EXPECT_LE((g.rho - g.rho.adjoint()).norm(), 1e-12);
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(g.rho).eigenvalues().minCoeff(), -1e-12);
  }
}

TEST(Spinchain, SingleSpinClosedForm) {
  const auto v = SpectralOracle({1, 0.0, 0.5}).thermal(0.5);
  EXPECT_NEAR(v.free_energy, -2 * std::log(2 * std::cosh(0.25)), 1e-14);
  EXPECT_NEAR(v.free_energy, -1.448154, 1e-6);
  EXPECT_NEAR(v.energy, -0.5 * std::tanh(0.25), 1e-14);
  EXPECT_NEAR(v.energy, -0.122460, 1e-6);
  EXPECT_NEAR(v.entropy, 0.662847, 1e-6);
}

TEST(Spinchain, LowTemperatureLimit) {
  const SpectralOracle o({2, 0.0, 0.0});
  const auto ev = o.eigenvalues();
  ASSERT_EQ(ev.size(), 4u);
  EXPECT_NEAR(ev[0], -2, 1e-12);
  EXPECT_NEAR(ev[1], 0, 1e-12);
  EXPECT_NEAR(ev[2], 0, 1e-12);
  EXPECT_NEAR(ev[3], 2, 1e-12);
  EXPECT_NEAR(o.thermal(40.0).free_energy, -2.0, 1e-12);
}

TEST(Spinchain, MatchesDenseHamiltonian) {
  const XXZSpec spec{4, 0.45, -0.2};
  const SpectralOracle o(spec);
  const auto h = dense::hamiltonian(spinchain::build_terms(spec), 4);
  Eigen::SelfAdjointEigenSolver<dense::Mat> es(h);
  for (std::size_t k = 0; k < o.dim(); ++k) EXPECT_NEAR(o.eigenvalues()[k], es.eigenvalues()(static_cast<Eigen::Index>(k)), 1e-12);
  EXPECT_LE((o.hamiltonian().dense() - h).norm(), 1e-12);
}

TEST(Spinchain, EigenResidualAndSignConvention) {
  for (const XXZSpec spec : {XXZSpec{5, 0.0, 0.5}, XXZSpec{6, 0.3, 0.0}, XXZSpec{7, 1.0, 0.2}}) {
    const SpectralOracle o(spec);
    EXPECT_LT(o.max_residual(), 1e-10);
    for (std::size_t k = 0; k < o.dim(); ++k) {
      const auto v = o.eigenvector(k);
      EXPECT_NEAR(v.norm(), 1.0, 1e-12);
      for (Eigen::Index j = 0; j < v.size(); ++j)
        if (std::abs(v(j)) > 1e-12) {
          EXPECT_GT(v(j), 0.0);
          break;
        }
      for (Eigen::Index j = 0; j < v.size(); ++j)
        if (std::abs(v(j)) > 1e-12) EXPECT_EQ(qsim::hamming_weight(static_cast<qsim::Bits>(j)), o.excitation_number(k));
    }
  }
}

TEST(Spinchain, XYSpectrumSymmetric) {
  for (int n = 2; n <= 7; ++n) {
    const SpectralOracle o({n, 0.0, 0.0});
    const auto ev = o.eigenvalues();
    double worst = 0;
    for (std::size_t k = 0; k < ev.size(); ++k) worst = std::max(worst, std::abs(ev[k] + ev[ev.size() - 1 - k]));
    EXPECT_LT(worst, 1e-9);
  }
}

TEST(Spinchain, CommutesWithMagnetization) {
  const auto h = SpectralOracle({5, 0.8, 0.3}).hamiltonian().dense();
  for (Eigen::Index r = 0; r < h.rows(); ++r)
    for (Eigen::Index c = 0; c < h.cols(); ++c)
      if (qsim::hamming_weight(static_cast<qsim::Bits>(r)) != qsim::hamming_weight(static_cast<qsim::Bits>(c)))
        ASSERT_EQ(h(r, c), qsim::cplx(0, 0));
}

TEST(Spinchain, EigenBasisProjection) {
  const XXZSpec spec{4, 0.3, 0.1};
  const SpectralOracle o(spec);
  const double beta = 0.8;
  const auto proj = spinchain::eigen_basis_projection(o.gibbs_matrix(beta), o);
  const auto w = o.gibbs_weights(beta);
  for (Eigen::Index r = 0; r < proj.rows(); ++r)
    for (Eigen::Index c = 0; c < proj.cols(); ++c)
      EXPECT_NEAR(std::abs(proj(r, c) - (r == c ? w[static_cast<std::size_t>(r)] : 0.0)), 0.0, 1e-10);

  const auto v = o.eigenvector(5);
  qsim::StateVector s(4);
  for (std::size_t j = 0; j < s.dim(); ++j) s.amps()[j] = v(static_cast<Eigen::Index>(j));
  const auto a = spinchain::eigen_basis_projection(s, o);
  for (Eigen::Index k = 0; k < a.size(); ++k) EXPECT_NEAR(std::abs(a(k)), k == 5 ? 1.0 : 0.0, 1e-10);

  EXPECT_THROW(spinchain::eigen_basis_projection(qsim::StateVector(3), o), std::invalid_argument);
}

TEST(Spinchain, Validation) {
  EXPECT_THROW(SpectralOracle({0, 0.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(SpectralOracle({15, 0.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(SpectralOracle({2, 0.0, 0.0}).thermal(0.0), std::invalid_argument);
}
