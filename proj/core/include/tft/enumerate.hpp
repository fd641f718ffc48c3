// enumerate.hpp: discrete-time finite chains small enough to list every path,
// giving exact values for the MGF symmetry, the pointwise distributional
// symmetry and the integral fluctuation theorem.

#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "tft/process.hpp"

namespace tft {

// Paths (x_0, ..., x_n) with law μ0(x_0) Π M_i(x_{i-1}, x_i).
class DiscreteChain {
 public:
  // Each M_i is N×N row-stochastic within 1e-12 with nonnegative entries; μ0
  // sums to 1 within 1e-12.
  DiscreteChain(Eigen::VectorXd initial, std::vector<Eigen::MatrixXd> steps);

  std::size_t num_states() const noexcept { return static_cast<std::size_t>(initial_.size()); }
  std::size_t steps() const noexcept { return steps_.size(); }
  const Eigen::VectorXd& initial() const noexcept { return initial_; }
  const std::vector<Eigen::MatrixXd>& step_matrices() const noexcept { return steps_; }
  // All entries of μ0 and every M_i strictly positive; then P ~ σQ for every σ.
  bool strictly_positive() const;

  double log_probability(const std::vector<State>& path) const;
  // μ0 M_1 ... M_n
  Eigen::VectorXd marginal(std::size_t step) const;

 private:
  Eigen::VectorXd initial_;
  std::vector<Eigen::MatrixXd> steps_;
};

// (x_0, ..., x_n) -> (x_{σ(0)}, ..., x_{σ(n)}).
class CoordinatePermutation {
 public:
  explicit CoordinatePermutation(std::vector<std::size_t> sigma);
  static CoordinatePermutation identity(std::size_t steps);
  static CoordinatePermutation reversal(std::size_t steps);
  static CoordinatePermutation cyclic_shift(std::size_t steps, long shift = 1);

  const std::vector<std::size_t>& sigma() const noexcept { return sigma_; }
  std::vector<State> apply(const std::vector<State>& path) const;
  CoordinatePermutation inverse() const;
  bool is_involution() const;

 private:
  std::vector<std::size_t> sigma_;
};

struct EnumeratedPath {
  std::vector<State> states;
  double probability;
  double log_probability;
};

inline constexpr double kEnumerationLimit = 1e7;

// Every path in lexicographic order (x_0 most significant). Throws
// std::length_error when N^(n+1) exceeds kEnumerationLimit.
std::vector<EnumeratedPath> enumerate_paths(const DiscreteChain& chain);

struct SupportPoint {
  double value;       // x, a cluster of S_P values
  double p_mass;      // P(S_P = x)
  double q_mass;      // Q(S_Q = -x)
  double rel_error;   // |P(S_P = x) - e^x Q(S_Q = -x)| / P(S_P = x)
  bool pass;
};

struct ExactMgfPoint {
  double lambda;
  double lhs;  // Σ P(ω) e^{λ S_P(ω)}
  double rhs;  // Σ Q(ω) e^{-(1+λ) S_Q(ω)}
  bool pass;
};

struct ExactReport {
  std::vector<SupportPoint> support;
  std::size_t unmatched_q_points = 0;
  std::vector<ExactMgfPoint> mgf;
  double integral_ft;  // Σ P(ω) e^{-S_P(ω)}
  bool corollary_pass;
  bool mgf_pass;
  bool integral_ft_pass;
  bool pass() const { return corollary_pass && mgf_pass && integral_ft_pass; }
};

struct ExactOptions {
  std::vector<double> lambdas{-1.0, -0.75, -0.5, -0.25, 0.0};
  double cluster_tol = 1e-9;
  double corollary_rel_tol = 1e-10;
  double mgf_rel_tol = 1e-12;
  double integral_ft_tol = 1e-12;
};

// S_P(ω) = log P(ω) - log Q(σω), S_Q(ω) = log Q(ω) - log P(σ⁻¹ω).
// Both chains must be strictly positive with equal N and n.
ExactReport exact_verify(const DiscreteChain& p, const DiscreteChain& q, const CoordinatePermutation& sigma,
                         const ExactOptions& options = {});

nlohmann::json to_json(const ExactReport& report);

}  // namespace tft
