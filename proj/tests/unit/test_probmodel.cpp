#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "tvqs/probmodel.hpp"

using tvqs::Rng;
using tvqs::probmodel::BernoulliProduct;
using tvqs::probmodel::Bits;

namespace {

BernoulliProduct random_model(int n, std::mt19937_64& gen) {
  std::normal_distribution<double> d(0.0, 2.0);
  std::vector<double> s(static_cast<std::size_t>(n));
  for (auto& v : s) v = d(gen);
  return BernoulliProduct(s);
}

}  // namespace

TEST(Probmodel, SampleExamples) {
  Rng rng(3);
  BernoulliProduct cold(std::vector<double>(4, -1e9));
  for (auto x : cold.sample(50, rng)) EXPECT_EQ(x, 0u);

  BernoulliProduct uniform(5);
  const std::size_t n = 100000;
  std::vector<std::size_t> ones(5, 0);
  for (auto x : uniform.sample(n, rng))
    for (int i = 0; i < 5; ++i) ones[static_cast<std::size_t>(i)] += (x >> i) & 1;
  for (auto c : ones) EXPECT_NEAR(static_cast<double>(c) / n, 0.5, 0.005);

  EXPECT_EQ(uniform.sample(2, rng).size(), 2u);
  EXPECT_THROW(uniform.sample(0, rng), std::invalid_argument);
}

TEST(Probmodel, LogProbExamples) {
  BernoulliProduct uniform(5);
  for (Bits x = 0; x < 32; ++x) EXPECT_NEAR(uniform.log_prob(x), -5 * std::numbers::ln2, 1e-14);

  BernoulliProduct hot({25.0, 0.0});
  EXPECT_LE(hot.log_prob(0b01) + std::numbers::ln2, 0.0);
  EXPECT_GT(hot.log_prob(0b01) + std::numbers::ln2, -1e-10);
}

TEST(Probmodel, ClampKeepsValuesFinite) {
  BernoulliProduct m({1e6, -1e6});
  EXPECT_TRUE(std::isfinite(m.log_prob(0b10)));
  EXPECT_TRUE(std::isfinite(m.entropy()));
  EXPECT_GT(m.prob_one(0), 0.0);
  EXPECT_LT(m.prob_one(0), 1.0);
}

TEST(Probmodel, EntropyExamples) {
  EXPECT_NEAR(BernoulliProduct(5).entropy(), 5 * std::numbers::ln2, 1e-14);
  EXPECT_NEAR(BernoulliProduct(5).entropy(), 3.465736, 1e-6);
  BernoulliProduct m({0.0, 30.0});
  EXPECT_NEAR(m.entropy(), std::numbers::ln2, 1e-11);
}

TEST(Probmodel, GradLogProbExamples) {
  BernoulliProduct uniform(3);
  const auto g = uniform.grad_log_prob(0b101);
  EXPECT_DOUBLE_EQ(g[0], 0.5);
  EXPECT_DOUBLE_EQ(g[1], -0.5);
  EXPECT_DOUBLE_EQ(g[2], 0.5);
}

TEST(Probmodel, EnumerateExamples) {
  const auto e1 = BernoulliProduct(1).enumerate();
  ASSERT_EQ(e1.size(), 2u);
  EXPECT_EQ(e1[0].first, 0u);
  EXPECT_DOUBLE_EQ(e1[0].second, 0.5);
  EXPECT_DOUBLE_EQ(e1[1].second, 0.5);

  const auto e2 = BernoulliProduct({30.0, -30.0}).enumerate();
  EXPECT_NEAR(e2[0b01].second, 1.0, 1e-12);

  EXPECT_THROW(BernoulliProduct(15).enumerate(), tvqs::probmodel::CapacityError);
  EXPECT_THROW(BernoulliProduct(6).enumerate(5), tvqs::probmodel::CapacityError);
}

TEST(ProbmodelProperties, RandomDraws) {
  std::mt19937_64 gen(9);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 10;
    const auto m = random_model(n, gen);
    double total = 0, total_exp = 0, h_enum = 0;
    for (const auto& [x, p] : m.enumerate()) {
      total += p;
      total_exp += std::exp(m.log_prob(x));
      if (p > 0) h_enum -= p * std::log(p);
      ASSERT_LE(m.log_prob(x), 0.0);
    }
    ASSERT_NEAR(total, 1.0, 1e-12);
    ASSERT_NEAR(total_exp, 1.0, 1e-12);
    ASSERT_NEAR(m.entropy(), h_enum, 1e-12);
    ASSERT_GE(m.entropy(), 0.0);
    ASSERT_LE(m.entropy(), n * std::numbers::ln2 + 1e-12);

    const Bits x = gen() & ((Bits{1} << n) - 1);
    const auto g = m.grad_log_prob(x);
    const double h = 1e-6;
    for (int i = 0; i < n; ++i) {
      auto up = std::vector<double>(m.logits().begin(), m.logits().end());
      auto dn = up;
      up[static_cast<std::size_t>(i)] += h;
      dn[static_cast<std::size_t>(i)] -= h;
      const double fd = (BernoulliProduct(up).log_prob(x) - BernoulliProduct(dn).log_prob(x)) / (2 * h);
      ASSERT_NEAR(g[static_cast<std::size_t>(i)], fd, 1e-6);
    }
  }
}

TEST(ProbmodelProperties, SampleMarginals) {
  std::mt19937_64 gen(10);
  Rng rng(11);
  const auto m = random_model(6, gen);
  const std::size_t n = 100000;
  std::vector<double> ones(6, 0);
  for (auto x : m.sample(n, rng))
    for (int i = 0; i < 6; ++i) ones[static_cast<std::size_t>(i)] += static_cast<double>((x >> i) & 1);
  for (int i = 0; i < 6; ++i) {
    const double phi = m.prob_one(i);
    const double sigma = std::sqrt(phi * (1 - phi) / n);
    EXPECT_NEAR(ones[static_cast<std::size_t>(i)] / n, phi, 4 * sigma + 1e-12);
  }
}
