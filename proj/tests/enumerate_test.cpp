#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include <tft/enumerate.hpp>

using namespace tft;

namespace {

DiscreteChain example2() {
  Eigen::Matrix2d m;
  m << 0.7, 0.3, 0.4, 0.6;
  return DiscreteChain(Eigen::Vector2d(0.5, 0.5), {m});
}

Eigen::MatrixXd random_stochastic(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = u(rng);
    m.row(i) /= m.row(i).sum();
  }
  return m;
}

DiscreteChain random_chain(std::size_t n, std::size_t steps, std::mt19937_64& rng) {
  Eigen::VectorXd mu = random_stochastic(n, rng).row(0).transpose();
  std::vector<Eigen::MatrixXd> ms;
  for (std::size_t i = 0; i < steps; ++i) ms.push_back(random_stochastic(n, rng));
  return DiscreteChain(mu, ms);
}

}  // namespace

TEST(Enumerate, CountsAndNormalization) {
  Eigen::Matrix2d m;
  m << 0.7, 0.3, 0.4, 0.6;
  const DiscreteChain c(Eigen::Vector2d(0.5, 0.5), {m, m});
  const auto paths = enumerate_paths(c);
  ASSERT_EQ(paths.size(), 8u);
  double total = 0;
  for (const auto& p : paths) total += p.probability;
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_EQ(paths[1].states, (std::vector<State>{0, 0, 1}));
}

TEST(Enumerate, ZeroInitialMass) {
  Eigen::Matrix2d m;
  m << 0.7, 0.3, 0.4, 0.6;
  const DiscreteChain c(Eigen::Vector2d(1, 0), {m, m});
  EXPECT_FALSE(c.strictly_positive());
  for (const auto& p : enumerate_paths(c))
    if (p.states[0] == 1) {
      EXPECT_EQ(p.probability, 0.0);
    }
  EXPECT_THROW(exact_verify(c, c, CoordinatePermutation::reversal(2)), std::invalid_argument);
}

TEST(Enumerate, MarginalMatchesMatrixProduct) {
  std::mt19937_64 rng(1);
  const auto c = random_chain(3, 3, rng);
  Eigen::VectorXd want(3);
  want.setZero();
  for (const auto& p : enumerate_paths(c)) want(static_cast<Eigen::Index>(p.states.back())) += p.probability;
  EXPECT_LE((c.marginal(3) - want).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Enumerate, SizeGuard) {
  std::mt19937_64 rng(2);
  const auto c = random_chain(3, 15, rng);
  EXPECT_THROW(enumerate_paths(c), std::length_error);
}

TEST(Enumerate, ValidatesChains) {
  Eigen::Matrix2d bad;
  bad << 0.7, 0.4, 0.4, 0.6;
  EXPECT_THROW(DiscreteChain(Eigen::Vector2d(0.5, 0.5), {bad}), std::invalid_argument);
}

TEST(CoordinatePermutationTest, Basics) {
  const auto r = CoordinatePermutation::reversal(3);
  EXPECT_EQ(r.apply({0, 1, 2, 3}), (std::vector<State>{3, 2, 1, 0}));
  EXPECT_TRUE(r.is_involution());
  const auto c = CoordinatePermutation::cyclic_shift(3, 1);
  EXPECT_EQ(c.apply({0, 1, 2, 3}), (std::vector<State>{1, 2, 3, 0}));
  EXPECT_FALSE(c.is_involution());
  EXPECT_EQ(c.inverse().apply(c.apply({5, 6, 7, 8})), (std::vector<State>{5, 6, 7, 8}));
  EXPECT_THROW(CoordinatePermutation({0, 0, 1}), std::invalid_argument);
}

TEST(ExactVerify, TwoStateExample) {
  const auto c = example2();
  const auto r = exact_verify(c, c, CoordinatePermutation::reversal(1));
  EXPECT_TRUE(r.pass());
  // Paths (0,1): P = 0.15, P(reversed) = 0.20.
  bool found = false;
  for (const auto& s : r.support) {
    if (std::abs(s.value - std::log(0.75)) < 1e-12) {
      found = true;
      EXPECT_NEAR(s.p_mass, 0.15, 1e-15);
      EXPECT_NEAR(s.q_mass, 0.20, 1e-15);
      EXPECT_NEAR(s.p_mass, 0.75 * s.q_mass, 1e-15);
    }
  }
  EXPECT_TRUE(found);
  EXPECT_NEAR(r.integral_ft, 1.0, 1e-15);
}

TEST(ExactVerify, IdentityIsDegenerate) {
  std::mt19937_64 rng(3);
  const auto c = random_chain(3, 2, rng);
  const auto r = exact_verify(c, c, CoordinatePermutation::identity(2));
  ASSERT_EQ(r.support.size(), 1u);
  EXPECT_EQ(r.support[0].value, 0.0);
  for (const auto& m : r.mgf) EXPECT_NEAR(m.lhs, 1.0, 1e-15);
  EXPECT_TRUE(r.pass());
}

TEST(ExactVerify, CyclicShiftUnrelatedChains) {
  std::mt19937_64 rng(4);
  const auto p = random_chain(3, 2, rng);
  const auto q = random_chain(3, 2, rng);
  const auto r = exact_verify(p, q, CoordinatePermutation::cyclic_shift(2, 1));
  EXPECT_TRUE(r.corollary_pass);
  EXPECT_TRUE(r.mgf_pass);
  EXPECT_TRUE(r.integral_ft_pass);
  for (const auto& s : r.support) EXPECT_LE(s.rel_error, 1e-10);
}

TEST(ExactVerify, ChangeOfVariablesHoldsForRandomPermutations) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng() % 4;
    const std::size_t states = 2 + rng() % 2;
    std::vector<std::size_t> sigma(n + 1);
    std::iota(sigma.begin(), sigma.end(), 0);
    std::shuffle(sigma.begin(), sigma.end(), rng);
    const auto p = random_chain(states, n, rng);
    const auto q = random_chain(states, n, rng);
    const auto r = exact_verify(p, q, CoordinatePermutation(sigma));
    EXPECT_NEAR(r.integral_ft, 1.0, 1e-12);
    EXPECT_TRUE(r.pass());
  }
}

TEST(ExactVerify, FiniteSumsSatisfyIdentityOffStrip) {
  // With finitely many paths both sides are finite for every λ, so the
  // identity extends beyond [-1, 0]; only infinite path spaces can break it.
  std::mt19937_64 rng(6);
  const auto p = random_chain(2, 2, rng);
  const auto q = random_chain(2, 2, rng);
  ExactOptions o;
  o.lambdas = {0.5};
  const auto r = exact_verify(p, q, CoordinatePermutation::reversal(2), o);
  EXPECT_NEAR(r.mgf[0].lhs, r.mgf[0].rhs, 1e-12 * r.mgf[0].lhs);
}
