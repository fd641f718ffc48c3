#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include <tft/process.hpp>
#include <tft/sampler.hpp>
#include <tft/stats.hpp>

using namespace tft;

namespace {

RateMatrix two_state(double k12, double k21) {
  RateMatrix k(2, 2);
  k << 0, k12, k21, 0;
  return k;
}

ProcessMeasure unit_chain(double horizon) {
  return ProcessMeasure(StateSpace::finite(2), RateProtocol::constant(two_state(1, 1), horizon),
                        InitialDistribution(Eigen::Vector2d(0.5, 0.5)));
}

ProcessMeasure driven3() {
  std::vector<Eigen::VectorXd> e{Eigen::Vector3d(0, 1, 2), Eigen::Vector3d(0.5, 0, 1.5),
                                 Eigen::Vector3d(1.5, 0.5, 0), Eigen::Vector3d(2, 1, 0)};
  const auto h = Hamiltonian::piecewise_constant({0, 0.25, 0.5, 0.75, 1}, e, 1.0);
  return ProcessMeasure(StateSpace::finite(3), build_ldb_protocol(h, 1.0, StateSpace::finite(3), 1.0),
                        gibbs_distribution(h, 0).distribution);
}

std::vector<double> histogram(const std::vector<JumpPath>& paths, std::size_t cells) {
  std::vector<double> h(cells, 0.0);
  for (const auto& w : paths) h[std::min(w.jump_count(), cells - 1)] += 1;
  return h;
}

}  // namespace

TEST(JumpPathTest, Invariants) {
  EXPECT_THROW(JumpPath(0, {{0.0, 1}}, 1.0), std::invalid_argument);
  EXPECT_THROW(JumpPath(0, {{1.0, 1}}, 1.0), std::invalid_argument);
  EXPECT_THROW(JumpPath(0, {{0.5, 1}, {0.4, 0}}, 1.0), std::invalid_argument);
  EXPECT_THROW(JumpPath(0, {{0.5, 0}}, 1.0), std::invalid_argument);
  const JumpPath w(0, {{0.3, 1}, {0.6, 2}}, 1.0);
  EXPECT_EQ(w.state_at(0.0), 0u);
  EXPECT_EQ(w.state_at(0.3), 1u);
  EXPECT_EQ(w.state_at(0.59), 1u);
  EXPECT_EQ(w.state_at(1.0), 2u);
  EXPECT_EQ(w.skeleton(), (std::vector<State>{0, 1, 2}));
  const auto d = w.holding_durations();
  EXPECT_DOUBLE_EQ(d[0] + d[1] + d[2], 1.0);
}

TEST(JumpPathTest, TextRoundTrip) {
  const JumpPath w(2, {{0.1 + 0.2, 0}, {std::nextafter(0.5, 1.0), 1}}, 1.0);
  EXPECT_EQ(parse_path(format_path(w)), w);
  EXPECT_EQ(format_path(JumpPath(1, {}, 2.5)), "1 2.5 0");
  EXPECT_THROW(parse_path("0 1 2 0.5 1"), std::invalid_argument);
}

TEST(Sampler, ZeroJumpFraction) {
  const auto paths = sample_ensemble(unit_chain(1.0), 100000, 11);
  double zero = 0;
  for (const auto& w : paths) zero += w.jump_count() == 0;
  const double p = std::exp(-1.0), n = 1e5;
  EXPECT_NEAR(zero / n, p, 3 * std::sqrt(p * (1 - p) / n));
}

TEST(Sampler, Deterministic) {
  const auto m = driven3();
  SeededStream a(5, 7), b(5, 7);
  EXPECT_EQ(sample_path(m, a), sample_path(m, b));
  const auto batch = sample_ensemble(m, 20, 5);
  SeededStream c(5, 7);
  EXPECT_EQ(batch[7], sample_path(m, c));
}

TEST(Sampler, WorkerCountDoesNotMatter) {
  const auto m = driven3();
  EXPECT_EQ(sample_ensemble(m, 5000, 9, {1, 0}), sample_ensemble(m, 5000, 9, {8, 0}));
}

TEST(Sampler, DomainsSeparateStreams) {
  SeededStream a(1, 0, 0), b(1, 0, 1);
  EXPECT_NE(a.next(), b.next());
}

TEST(Sampler, UnitExitRateMeanJumps) {
  const auto paths = sample_ensemble(unit_chain(2.0), 10000, 3);
  std::vector<double> n;
  for (const auto& w : paths) n.push_back(static_cast<double>(w.jump_count()));
  const double mean = std::accumulate(n.begin(), n.end(), 0.0) / n.size();
  EXPECT_NEAR(mean, 2.0, 3 * std::sqrt(2.0 / 1e4));
}

TEST(Sampler, ThinningMatchesInversion) {
  const auto m = driven3();
  const auto inv = sample_ensemble(m, 100000, 21, {1, 0, SamplingMethod::Inversion});
  const auto thin = sample_ensemble(m, 100000, 22, {1, 0, SamplingMethod::Thinning});
  const auto a = histogram(inv, 8), b = histogram(thin, 8);
  // Two-sample chi-square via the pooled expectation.
  std::vector<double> expected(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) expected[i] = (a[i] + b[i]) / 2;
  std::vector<double> obs_all(a), exp_all(expected);
  obs_all.insert(obs_all.end(), b.begin(), b.end());
  exp_all.insert(exp_all.end(), expected.begin(), expected.end());
  EXPECT_GT(chi_square_pvalue(obs_all, exp_all), 0.01);
}

TEST(Sampler, FunctionalProtocolThinning) {
  const ProcessMeasure m(StateSpace::finite(2),
                         RateProtocol::functional(2, 1.0, [](double) { return two_state(1, 1); }, 1.0),
                         InitialDistribution(Eigen::Vector2d(1, 0)));
  const auto paths = sample_ensemble(m, 100000, 4);
  double zero = 0;
  for (const auto& w : paths) zero += w.jump_count() == 0;
  const double p = std::exp(-1.0);
  EXPECT_NEAR(zero / 1e5, p, 3 * std::sqrt(p * (1 - p) / 1e5));
}

TEST(Sampler, FinalLawMatchesEvolveLaw) {
  const auto m = driven3();
  const auto paths = sample_ensemble(m, 100000, 17);
  const auto mu = evolve_law(m, 1.0);
  std::vector<double> obs(3, 0.0), expct(3);
  for (const auto& w : paths) obs[w.final_state()] += 1;
  for (State x = 0; x < 3; ++x) expct[x] = 1e5 * mu.mass(x);
  EXPECT_GT(chi_square_pvalue(obs, expct), 0.001);
}

TEST(Sampler, EmittedPathsAreValid) {
  const auto m = driven3();
  for (const auto& w : sample_ensemble(m, 2000, 8)) {
    double last = 0.0;
    State x = w.initial_state();
    for (const auto& j : w.jumps()) {
      EXPECT_GT(j.time, last);
      EXPECT_LT(j.time, 1.0);
      EXPECT_NE(j.target, x);
      last = j.time;
      x = j.target;
    }
  }
}
