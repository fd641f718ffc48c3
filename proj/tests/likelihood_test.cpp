#include <cmath>

#include <gtest/gtest.h>

#include <tft/likelihood.hpp>
#include <tft/stats.hpp>

using namespace tft;

namespace {

RateMatrix two_state(double k12, double k21) {
  RateMatrix k(2, 2);
  k << 0, k12, k21, 0;
  return k;
}

ProcessMeasure constant2(double k12, double k21, Eigen::Vector2d mu0, double horizon = 1.0) {
  return ProcessMeasure(StateSpace::finite(2), RateProtocol::constant(two_state(k12, k21), horizon),
                        InitialDistribution(mu0));
}

Hamiltonian driven_h() {
  std::vector<Eigen::VectorXd> e{Eigen::Vector3d(0, 1, 2), Eigen::Vector3d(0.5, 0, 1.5),
                                 Eigen::Vector3d(1.5, 0.5, 0), Eigen::Vector3d(2, 1, 0)};
  return Hamiltonian::piecewise_constant({0, 0.25, 0.5, 0.75, 1}, e, 1.0);
}

ProcessMeasure driven3() {
  const auto h = driven_h();
  return ProcessMeasure(StateSpace::finite(3), build_ldb_protocol(h, 1.0, StateSpace::finite(3), 1.0),
                        gibbs_distribution(h, 0).distribution);
}

}  // namespace

TEST(LogPathDensity, HandExamples) {
  const auto p = constant2(1, 2, {0.5, 0.5});
  EXPECT_NEAR(log_path_density(p, JumpPath(0, {{0.3, 1}}, 1.0)), std::log(0.5) - 1.7, 1e-14);
  const auto unit = constant2(1, 1, {1, 0});
  EXPECT_NEAR(log_path_density(unit, JumpPath(0, {}, 1.0)), -1.0, 1e-15);
}

TEST(LogPathDensity, SupportErrors) {
  const auto p = constant2(1, 2, {1, 0});
  EXPECT_THROW(log_path_density(p, JumpPath(1, {}, 1.0)), SupportError);
  RateMatrix k(3, 3);
  k << 0, 1, 0, 1, 0, 1, 0, 1, 0;
  const ProcessMeasure m(StateSpace::finite(3), RateProtocol::constant(k, 1.0),
                         InitialDistribution(Eigen::Vector3d(1, 0, 0)));
  EXPECT_THROW(log_path_density(m, JumpPath(0, {{0.5, 2}}, 1.0)), SupportError);
  EXPECT_THROW(log_path_density(p, JumpPath(0, {}, 2.0)), std::invalid_argument);
}

TEST(LogPathDensity, FunctionalProtocolClosedForm) {
  // k_12 = 1 + s, k_21 = 2 - s; exit integrals 0.22, 0.775 and 0.555.
  const ProcessMeasure m(StateSpace::finite(2),
                         RateProtocol::functional(2, 1.0, [](double s) { return two_state(1 + s, 2 - s); }, 2.0),
                         InitialDistribution(Eigen::Vector2d(0.3, 0.7)));
  const JumpPath w(0, {{0.2, 1}, {0.7, 0}}, 1.0);
  EXPECT_NEAR(log_path_density(m, w), std::log(0.3) + std::log(1.2) + std::log(1.3) - 1.55, 1e-10);
}

TEST(LogPathDensity, ChangeOfMeasureMeanIsOne) {
  const auto p = driven3();
  RateMatrix k(3, 3);
  k << 0, 2, 1, 1, 0, 0.5, 0.7, 1.5, 0;
  const ProcessMeasure q(StateSpace::finite(3), RateProtocol::constant(k, 1.0),
                         InitialDistribution(Eigen::Vector3d(0.2, 0.3, 0.5)));
  const auto paths = sample_ensemble(p, 100000, 41);
  std::vector<double> logs;
  for (const auto& w : paths) logs.push_back(log_path_density(q, w) - log_path_density(p, w));
  const auto e = exp_mean(logs);
  EXPECT_NEAR(e.value, 1.0, 3 * e.se);
}

TEST(Score, DistinctConstantProtocols) {
  const auto p = constant2(1, 2, {0.5, 0.5});
  const auto q = constant2(2, 1, {0.5, 0.5});
  const auto s = score(p, q, PathTransform::identity(), JumpPath(0, {{0.3, 1}}, 1.0), Direction::Forward);
  EXPECT_NEAR(s.value, -0.4 - std::log(2.0), 1e-14);
  EXPECT_NEAR(s.boundary + s.current, s.value, 1e-10);
}

TEST(Score, ReversibleStationaryIsZero) {
  const double a = 1.3, b = 0.4;
  const auto p = constant2(a, b, {b / (a + b), a / (a + b)});
  for (const auto& w : sample_ensemble(p, 10000, 5)) {
    EXPECT_LT(std::abs(score(p, p, PathTransform::time_reversal(), w, Direction::Forward).value), 1e-10);
  }
}

TEST(Score, BackwardIsMinusForwardOnImage) {
  const auto p = driven3();
  const auto q = bc2_reversed_measure(p, driven_h());
  for (const auto& phi : {PathTransform::time_reversal(),
                          PathTransform::holding_permutation(PermutationFamily::cyclic_shift(1))}) {
    for (const auto& w : sample_ensemble(p, 10000, 6)) {
      const double sp = score(p, q, phi, w, Direction::Forward).value;
      const double sq = score(p, q, phi, apply_transform(phi, w), Direction::Backward).value;
      EXPECT_NEAR(sq, -sp, 1e-10);
    }
  }
}

TEST(Score, EquivalenceFailureCarriesPath) {
  const auto p = constant2(1, 2, {0.5, 0.5});
  const auto q = constant2(1, 2, {1, 0});
  const JumpPath w(0, {{0.3, 1}}, 1.0);
  try {
    score(p, q, PathTransform::time_reversal(), w, Direction::Forward);
    FAIL() << "expected EquivalenceError";
  } catch (const EquivalenceError& e) {
    EXPECT_EQ(e.path(), format_path(w));
  }
}

TEST(Heat, SingleJumpAndCycle) {
  const auto p = driven3();
  const double s = 0.6;
  const JumpPath one(0, {{s, 1}}, 1.0);
  EXPECT_NEAR(heat_dissipation(p, one), std::log(p.protocol().rate(0, 1, s) / p.protocol().rate(1, 0, s)), 1e-15);
  const auto c = constant2(1, 2, {0.5, 0.5});
  EXPECT_NEAR(heat_dissipation(c, JumpPath(0, {{0.2, 1}, {0.5, 0}}, 1.0)), 0.0, 1e-15);
}

TEST(Heat, BirthDeathChainReachingThree) {
  // α = 2 on sites 0..4 with p_0 = 1; path 0 -> 1 -> 2 -> 3.
  RateMatrix k = RateMatrix::Zero(5, 5);
  k(0, 1) = 1;
  for (int j = 1; j < 4; ++j) {
    k(j, j + 1) = 2.0 / 3;
    k(j, j - 1) = 1.0 / 3;
  }
  k(4, 3) = 1.0 / 3;
  Eigen::VectorXd mu0 = Eigen::VectorXd::Constant(5, 0.2);
  const ProcessMeasure m(StateSpace::finite(5), RateProtocol::constant(k, 1.0), InitialDistribution(mu0));
  EXPECT_NEAR(heat_dissipation(m, JumpPath(0, {{0.1, 1}, {0.2, 2}, {0.3, 3}}, 1.0)), std::log(12.0), 1e-14);
}

TEST(Heat, MatchesConditionalDensityDifference) {
  const auto p = driven3();
  const ProcessMeasure rev(p.space(), protocol_reverse(p.protocol()), p.initial());
  const auto r = PathTransform::time_reversal();
  for (const auto& w : sample_ensemble(p, 2000, 7)) {
    const auto rw = apply_transform(r, w);
    const double cond = (log_path_density(p, w) - p.initial().log_mass(w.initial_state())) -
                        (log_path_density(rev, rw) - rev.initial().log_mass(rw.initial_state()));
    EXPECT_NEAR(heat_dissipation(p, w), cond, 1e-12);
  }
}

TEST(EntropyProduction, DecompositionAndMean) {
  const auto p = driven3();
  const auto paths = sample_ensemble(p, 100000, 8);
  std::vector<double> s;
  const auto q = bc1_reversed_measure(p);
  const auto mu_t = evolve_law(p, 1.0);
  for (const auto& w : paths) {
    const auto e = entropy_production(p, q, w);
    EXPECT_NEAR(e.current, heat_dissipation(p, w), 1e-10);
    EXPECT_NEAR(e.boundary, p.initial().log_mass(w.initial_state()) - mu_t.log_mass(w.final_state()), 1e-10);
    s.push_back(e.value);
  }
  // Relative entropy of P to its BC1 backward measure, from the master equation
  // and a quadrature of the mean heat flux.
  const double kl = 0.8402700410799957;
  const auto m = sample_mean(s);
  EXPECT_GE(m.value, 0.0);
  EXPECT_NEAR(m.value, kl, 3 * m.se);
}

TEST(EntropyProduction, ReversibleStationaryIsZero) {
  const auto p = constant2(1.3, 0.4, {0.4 / 1.7, 1.3 / 1.7});
  for (const auto& w : sample_ensemble(p, 5000, 9)) EXPECT_LT(std::abs(entropy_production(p, w).value), 1e-10);
}

TEST(DissipatedWork, EquilibriumIsZero) {
  const auto h = Hamiltonian::constant(Eigen::Vector3d(0, 0.3, 1.2), 1.0, 1.0);
  const ProcessMeasure p(StateSpace::finite(3), build_ldb_protocol(h, 1.0, StateSpace::finite(3), 1.0),
                         gibbs_distribution(h, 0).distribution);
  for (const auto& w : sample_ensemble(p, 5000, 10)) EXPECT_LT(std::abs(dissipated_work(p, h, w).value), 1e-10);
}

TEST(DissipatedWork, IntegralFtAndDecomposition) {
  const auto p = driven3();
  const auto h = driven_h();
  const auto q = bc2_reversed_measure(p, h);
  const double dlogz = gibbs_distribution(h, 1).log_partition - gibbs_distribution(h, 0).log_partition;
  std::vector<double> neg, vals;
  for (const auto& w : sample_ensemble(p, 100000, 12)) {
    const auto s = dissipated_work(p, q, h, w);
    const double want = h.energy(w.final_state(), 1.0) - h.energy(w.initial_state(), 0.0) + dlogz;
    EXPECT_NEAR(s.boundary, want, 1e-10);
    EXPECT_NEAR(s.current, heat_dissipation(p, w), 1e-10);
    neg.push_back(-s.value);
    vals.push_back(s.value);
  }
  const auto e = exp_mean(neg);
  EXPECT_NEAR(e.value, 1.0, 3 * e.se);
  // Mean dissipated work from the master equation.
  const auto m = sample_mean(vals);
  EXPECT_NEAR(m.value, 0.8858130926144663, 3 * m.se);
}

TEST(Boundaries, Bc2RejectsNonGibbsAndNonLdb) {
  const auto h = driven_h();
  const ProcessMeasure bad_init(StateSpace::finite(3), build_ldb_protocol(h, 1.0, StateSpace::finite(3), 1.0),
                                InitialDistribution(Eigen::Vector3d(1.0 / 3, 1.0 / 3, 1.0 / 3)));
  EXPECT_THROW(bc2_reversed_measure(bad_init, h), std::invalid_argument);
  RateMatrix k = RateMatrix::Ones(3, 3);
  const ProcessMeasure bad_rates(StateSpace::finite(3), RateProtocol::constant(k, 1.0),
                                 gibbs_distribution(h, 0).distribution);
  EXPECT_FALSE(satisfies_ldb(bad_rates.protocol(), h));
  EXPECT_THROW(bc2_reversed_measure(bad_rates, h), std::invalid_argument);
  EXPECT_TRUE(satisfies_ldb(driven3().protocol(), h));
}

TEST(Boundaries, Bc1UsesFinalLaw) {
  const auto p = driven3();
  const auto q = bc1_reversed_measure(p);
  EXPECT_LE((q.initial().masses() - evolve_law(p, 1.0).masses()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((q.protocol().rates_at(0.1) - p.protocol().rates_at(0.9)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Boundaries, EmpiricalBc1) {
  const auto p = driven3();
  const auto paths = sample_ensemble(p, 200000, 13);
  const auto q = bc1_reversed_measure_empirical(p, paths);
  EXPECT_LE((q.initial().masses() - evolve_law(p, 1.0).masses()).cwiseAbs().maxCoeff(), 5e-3);
  std::vector<JumpPath> few{JumpPath(0, {}, 1.0)};
  EXPECT_THROW(bc1_reversed_measure_empirical(p, few), std::invalid_argument);
}
